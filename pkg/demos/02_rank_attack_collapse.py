"""The decreased-rank attack at Level 3: delivery collapse and reset storms.

A deep attacker starts advertising rank 257 at minute 2. Every neighbor
prefers the impossibly good parent, the attacker keeps forwarding honestly to
its own (now trapped) parent, and a routing loop forms. Packets circling the
loop pick up the rank-error flag and are dropped on the second violation,
each drop resetting a Trickle timer -- delivery collapses while control
traffic climbs.
"""

from rplsim import ScenarioConfig, run_scenario
from rplsim.engine import US_PER_S, us


def run(of, attack):
    cfg = ScenarioConfig(topology="grid51", of=of, seed=1, horizon_s=1800.0,
                         attacker_level=3, attack_enabled=attack, out_prefix="")
    return run_scenario(cfg, keep_trace=False)


def main():
    for of in ("of0", "mrhof"):
        _, base, _ = run(of, attack=False)
        sim, atk, _ = run(of, attack=True)

        print(f"=== {of} ===")
        print(f"  attacker neighborhood: {sorted(sim.medium.neighbors(51))}")
        print(f"  nodes that adopted the attacker: {sorted(sim.attack_children)}")
        print(f"  routing cycles observed: {atk['cycles']}")
        print(f"  pdr: {base['pdr']:.3f} -> {atk['pdr']:.3f}")
        print(f"  trickle resets: {base['trickle_resets']} -> "
              f"{atk['trickle_resets']} "
              f"({atk['trickle_resets'] / base['trickle_resets']:.1f}x)")

        print("  cumulative delivery ratio by minute:")
        marks = {s.at_us: s.pdr for s in sim.collector.samples}
        for minute in (1, 2, 5, 10, 15, 20, 25, 30):
            at = us(minute * 60)
            if at in marks:
                bar = "#" * int(marks[at] * 40)
                print(f"    {minute:>3} min  {marks[at]:.3f}  {bar}")
        print()


if __name__ == "__main__":
    main()
