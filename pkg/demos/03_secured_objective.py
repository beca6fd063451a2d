"""The hop-freezing secure objective shrugging off the same attack.

After a short normal phase the network latches every neighbor's hop count.
From then on a parent switch must clear three gates: the candidate's frozen
hop has to match the current parent's, its advertised rank has to be
plausible for that frozen hop (per-hop cost never drops below one expected
transmission), and the usual hysteresis margin. The attacker's 257 claims a
position its frozen hop cannot support, so nobody follows it.
"""

from rplsim import ScenarioConfig, run_scenario


def run(attack):
    cfg = ScenarioConfig(topology="grid51", of="secof", seed=1,
                         horizon_s=1800.0, attacker_level=3,
                         attack_enabled=attack, out_prefix="")
    return run_scenario(cfg, keep_trace=False)


def main():
    _, base, _ = run(attack=False)
    sim, atk, _ = run(attack=True)

    attacker = 51
    print("frozen view of the attacker at one of its neighbors:")
    victim = sim.nodes[sorted(sim.medium.neighbors(attacker))[0]]
    rec = victim.neighbors[attacker]
    print(f"  node {victim.id}: attacker advertises "
          f"{rec.advertised_rank:.1f} but froze at hop {rec.frozen_hop} "
          f"(minimum honest rank {256 + rec.frozen_hop:.0f})")

    print(f"\nnodes that adopted the attacker: {sorted(sim.attack_children)}")
    print(f"routing cycles observed:        {atk['cycles']}")
    print(f"pdr      no-attack {base['pdr']:.4f} | attack {atk['pdr']:.4f}")
    print(f"resets   no-attack {base['trickle_resets']} | attack "
          f"{atk['trickle_resets']}")
    print(f"power    no-attack {base['mean_power_mw']:.4f} mW | attack "
          f"{atk['mean_power_mw']:.4f} mW")


if __name__ == "__main__":
    main()
