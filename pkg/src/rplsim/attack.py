"""Decreased-rank attacker: a protocol-conformant node that, from a scheduled
instant, pins its wire-visible rank to an illegitimately low value.

The lie covers everywhere rank appears on the wire (DIO advertisements and the
SenderRank stamped into data packets); parent selection and forwarding stay
honest, and received data is never dropped, so every observed effect comes
from topology corruption alone.
"""

from dataclasses import dataclass

from .engine import us

LEVEL1 = 1  # in the root's radio range
LEVEL2 = 2  # in range of a root neighbor, not of the root
LEVEL3 = 3  # neither

PLACEMENT_LEVELS = (LEVEL1, LEVEL2, LEVEL3)


class PlacementViolation(ValueError):
    """Requested placement level does not match the connectivity graph."""


@dataclass
class AttackConfig:
    attacker: int
    start_us: int = us(120)
    advertised_rank: float = 257.0
    level: int | None = None  # None when placed by explicit position


def classify_placement(neighbors, root, attacker):
    """Placement level implied by the connectivity graph."""
    root_zone = set(neighbors(root))
    if attacker in root_zone:
        return LEVEL1
    for n in sorted(root_zone):
        if attacker in neighbors(n):
            return LEVEL2
    return LEVEL3


def verify_placement(neighbors, root, attacker, level):
    """Raise PlacementViolation unless the attacker sits at the stated level.

    `neighbors` is a callable returning the radio neighbors of a node id.
    """
    if level not in PLACEMENT_LEVELS:
        raise PlacementViolation(f"unknown placement level {level!r}")
    actual = classify_placement(neighbors, root, attacker)
    if actual != level:
        raise PlacementViolation(
            f"attacker {attacker} is at level {actual}, requested level {level}")
    return actual


def install(engine, node, config):
    """Attach the attack to a node and schedule its launch.

    Before start_us the node is indistinguishable from an honest one. At
    start_us it resets its Trickle timer and immediately multicasts the lying
    advertisement rather than waiting out the current interval.
    """
    node.attack = config

    def launch():
        node.trickle_reset("attack-start")
        node.emit_dio()

    engine.schedule(config.start_us, node.id, "attack-start", launch)
