"""Topology presets, random layouts and the plain-text position file format.

grid51: 49 normal nodes on a 7x7 grid (14 m spacing), the sink centered one
spacing above the top row, and the attacker slot inserted per placement level.
With a 25 m radio range the grid is king-move adjacent and nothing two cells
away is reachable, giving 7+ hop depth inside the 100 m square.

small11: four tiers root -> {2,3,4} -> {5,6,7} -> {8,9,10} with the attacker
in range of exactly the last tier.
"""

from .engine import RngStreams
from .radio import Position

GRID51_SPACING = 14.0
GRID51_TX_RANGE = 25.0
GRID51_ROOT = 1
GRID51_ATTACKER = 51
GRID51_ATTACKER_SLOTS = {
    1: Position(50.0, 26.0),   # inside root range, reaches hop-1..3 nodes
    2: Position(57.0, 27.0),   # behind root neighbors, coverage-redundant slot
    3: Position(50.0, 93.0),   # deep zone, reaches hop-5..7 only
}

SMALL11_TX_RANGE = 25.0
SMALL11_ROOT = 1
SMALL11_ATTACKER = 11

DEFAULT_TX_RANGE = 30.0


class TopologyError(ValueError):
    pass


def grid51(attacker_level=3):
    """51 positions: sink, 49 normal nodes, attacker slot for the level."""
    if attacker_level not in GRID51_ATTACKER_SLOTS:
        raise TopologyError(f"no grid51 attacker slot for level {attacker_level!r}")
    xs = [8.0 + GRID51_SPACING * i for i in range(7)]
    ys = [16.0 + GRID51_SPACING * j for j in range(7)]
    positions = {GRID51_ROOT: Position(50.0, 2.0)}
    nid = 2
    for y in ys:
        for x in xs:
            positions[nid] = Position(x, y)
            nid += 1
    positions[GRID51_ATTACKER] = GRID51_ATTACKER_SLOTS[attacker_level]
    return positions


def small11():
    """Three column-locked tiers below the root: same-tier neighbors are in
    range (23 m) but diagonals are not (29.2 m), so each tier-k node reaches
    exactly its own column's tier-(k-1) node and relay load stays balanced.
    The attacker slot reaches exactly the last tier."""
    tiers = [15.0, 33.0, 51.0]
    xs = [27.0, 50.0, 73.0]
    positions = {SMALL11_ROOT: Position(50.0, 6.0)}
    nid = 2
    for y in tiers:
        for x in xs:
            positions[nid] = Position(x, y)
            nid += 1
    positions[SMALL11_ATTACKER] = Position(50.0, 60.5)
    return positions


def _adjacency(positions, tx_range):
    ids = sorted(positions)
    return {
        a: {b for b in ids
            if b != a and positions[a].distance(positions[b]) <= tx_range}
        for a in ids
    }


def is_connected(positions, tx_range):
    ids = sorted(positions)
    if not ids:
        return False
    adj = _adjacency(positions, tx_range)
    seen = {ids[0]}
    frontier = [ids[0]]
    while frontier:
        cur = frontier.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen) == len(ids)


def hop_counts(positions, tx_range, root):
    """BFS hop distance from the root over the unit-disk graph."""
    adj = _adjacency(positions, tx_range)
    hops = {root: 0}
    frontier = [root]
    while frontier:
        nxt_frontier = []
        for cur in frontier:
            for nxt in sorted(adj[cur]):
                if nxt not in hops:
                    hops[nxt] = hops[cur] + 1
                    nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return hops


def random_topology(n, area, seed, tx_range, max_tries=200):
    """n nodes uniform in an area x area square, regenerated until connected."""
    if n < 2:
        raise TopologyError("need at least 2 nodes")
    streams = RngStreams(seed)
    for attempt in range(max_tries):
        rng = streams.stream(f"topo:{attempt}")
        positions = {
            nid: Position(rng.uniform(0.0, area), rng.uniform(0.0, area))
            for nid in range(1, n + 1)
        }
        if is_connected(positions, tx_range):
            return positions
    raise TopologyError(
        f"no connected layout for n={n}, area={area}, range={tx_range} "
        f"after {max_tries} tries")


def place_attacker(positions, tx_range, root, attacker, level, seed,
                   area=None, max_tries=500):
    """Find a position for `attacker` matching the placement level.

    Used for random topologies; the fixed presets carry their own slots.
    """
    from .attack import classify_placement

    if area is None:
        area = max(max(p.x for p in positions.values()),
                   max(p.y for p in positions.values()))
    rng = RngStreams(seed).stream("attacker-placement")
    others = {nid: pos for nid, pos in positions.items() if nid != attacker}
    for _ in range(max_tries):
        candidate = Position(rng.uniform(0.0, area), rng.uniform(0.0, area))
        trial = dict(others)
        trial[attacker] = candidate
        if not is_connected(trial, tx_range):
            continue
        adj = _adjacency(trial, tx_range)
        if classify_placement(lambda nid: sorted(adj[nid]), root, attacker) == level:
            return trial
    raise TopologyError(
        f"could not place attacker at level {level} after {max_tries} tries")


def write_topology_file(path, positions):
    with open(path, "w", encoding="utf-8") as f:
        f.write("# node_id x_m y_m\n")
        for nid in sorted(positions):
            p = positions[nid]
            f.write(f"{nid} {p.x:.3f} {p.y:.3f}\n")


def read_topology_file(path):
    positions = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 3:
                raise TopologyError(f"{path}:{lineno}: expected 'id x y', got {raw!r}")
            nid = int(parts[0])
            if nid in positions:
                raise TopologyError(f"{path}:{lineno}: duplicate node id {nid}")
            positions[nid] = Position(float(parts[1]), float(parts[2]))
    if not positions:
        raise TopologyError(f"{path}: no positions found")
    return positions
