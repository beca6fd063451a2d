"""Attack-success and impact matrix: three objectives x three placements.

Level 1 puts the attacker inside the root's radio range, Level 2 behind a
root neighbor, Level 3 out of both. For each cell: did anyone adopt the
attacker, and did delivery or power move relative to the same topology
without the attack?
"""

from rplsim import ScenarioConfig, run_scenario


def cell(of, level):
    base_cfg = ScenarioConfig(topology="grid51", of=of, seed=1,
                              horizon_s=1800.0, attacker_level=level,
                              out_prefix="")
    _, base, _ = run_scenario(base_cfg, keep_trace=False)
    atk_cfg = ScenarioConfig(topology="grid51", of=of, seed=1,
                             horizon_s=1800.0, attacker_level=level,
                             attack_enabled=True, out_prefix="")
    sim, atk, _ = run_scenario(atk_cfg, keep_trace=False)

    trapped = len(sim.attack_children)
    neighborhood = atk["attacker_neighborhood"]
    if trapped == 0:
        success = "no"
    elif trapped < neighborhood and level == 1:
        success = "partial"
    else:
        success = "yes"
    dpdr = abs(atk["pdr"] - base["pdr"]) / base["pdr"]
    dpow = abs(atk["mean_power_mw"] - base["mean_power_mw"]) / base["mean_power_mw"]
    affected = "yes" if (dpdr > 0.02 or dpow > 0.05) else "no"
    return success, trapped, affected, dpdr, dpow


def main():
    print(f"{'objective':<10} {'level':<6} {'adopted?':<9} {'trapped':<8} "
          f"{'pdr/power affected?':<20} {'dPDR':>7} {'dPower':>8}")
    for of in ("of0", "mrhof", "secof"):
        for level in (1, 2, 3):
            success, trapped, affected, dpdr, dpow = cell(of, level)
            print(f"{of:<10} {level:<6} {success:<9} {trapped:<8} "
                  f"{affected:<20} {dpdr:>6.1%} {dpow:>7.1%}")


if __name__ == "__main__":
    main()
