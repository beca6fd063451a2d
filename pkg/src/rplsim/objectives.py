"""Parent-selection policies: OF0, MRHOF, and the hop-freezing secure OF.

Pure functions over candidate snapshots; all node-state mutation happens in
the protocol layer. Ties break toward the lowest node id everywhere, which
keeps runs deterministic.

secof restricted mode gates switches two ways beyond the MRHOF rank test:
  * hop clause   — the candidate's frozen hop must match the current parent's
                   ("eq", default) or not exceed it ("leq");
  * rank guard   — a candidate advertising rank < root_rank + frozen_hop is
                   rejected outright: with per-hop cost >= 1 such a rank is
                   impossible unless the node's hop changed, and in a
                   stationary network a hop change marks an impostor.
"""

import math
from dataclasses import dataclass

INFINITE_RANK = math.inf
ROOT_RANK = 256.0
MIN_ETX = 1.0
MAX_ETX = 5.0

OF0 = "of0"
MRHOF = "mrhof"
SECOF = "secof"
OF_KINDS = (OF0, MRHOF, SECOF)

OF0_RANK_STEP = 256.0  # min-hop rank increase per hop under the hop metric

MODE_NORMAL = "normal"
MODE_RESTRICTED = "restricted"

HOP_CLAUSE_EQ = "eq"
HOP_CLAUSE_LEQ = "leq"


@dataclass
class ParentCandidate:
    """Snapshot of one neighbor as seen by the selecting node."""
    node: int
    advertised_rank: float
    etx: float = MIN_ETX
    frozen_hop: int | None = None

    def path_rank(self):
        return self.advertised_rank + self.etx


@dataclass
class SecofParams:
    alpha: float = 0.5
    hop_clause: str = HOP_CLAUSE_EQ
    rank_guard: bool = True

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.hop_clause not in (HOP_CLAUSE_EQ, HOP_CLAUSE_LEQ):
            raise ValueError(f"unknown hop_clause {self.hop_clause!r}")


def _finite(candidates):
    return [c for c in candidates if math.isfinite(c.advertised_rank)]


def _argmin(candidates, key):
    # tie-break: lowest node id
    return min(candidates, key=lambda c: (key(c), c.node), default=None)


def of0_select(candidates, current=None):
    """Always the candidate with the least advertised rank; None when nothing
    finite is on offer (the caller poisons)."""
    best = _argmin(_finite(candidates), lambda c: c.advertised_rank)
    return best.node if best else None


def mrhof_select(candidates, current, alpha):
    """Hysteresis selection over would-be path rank (advertised + link ETX).

    First attach takes the minimum; afterwards a switch needs an improvement
    strictly greater than alpha. Equal-cost streams never cause churn.
    """
    finite = _finite(candidates)
    by_node = {c.node: c for c in finite}
    if current is None or current not in by_node:
        best = _argmin(finite, lambda c: c.path_rank())
        return best.node if best else None
    cur = by_node[current]
    best = _argmin(finite, lambda c: c.path_rank())
    if best is not None and best.path_rank() < cur.path_rank() - alpha:
        return best.node
    return current


def guard_ok(candidate, params, root_rank=ROOT_RANK):
    """Rank-plausibility test: a node whose hop froze at h cannot reach a rank
    below root_rank + h, since per-hop cost never drops below one expected
    transmission. A violation marks an impostor."""
    if not params.rank_guard or candidate.frozen_hop is None:
        return True
    return candidate.advertised_rank >= root_rank + candidate.frozen_hop * MIN_ETX


def secof_select(candidates, current, params, mode,
                 own_frozen_hop=None, root_rank=ROOT_RANK, exclude=()):
    """Secure parent selection.

    Normal mode is byte-identical to MRHOF. Restricted mode only considers
    candidates whose hop was recorded before the freeze, applies the rank
    guard, and gates switches by the hop clause against the current parent's
    frozen hop. A current parent caught violating the guard is abandoned. A
    parentless node bootstraps onto the minimum-rank eligible candidate at a
    strictly shallower frozen level than its own, widening to any known
    frozen level only if that pool is empty (the caller then vets the edge
    for cycles).
    """
    if mode == MODE_NORMAL:
        return mrhof_select(candidates, current, params.alpha)

    eligible = [
        c for c in _finite(candidates)
        if c.frozen_hop is not None and guard_ok(c, params, root_rank)
        and c.node not in exclude
    ]
    by_node = {c.node: c for c in eligible}

    if current is None or current not in by_node:
        pool = eligible
        if own_frozen_hop is not None:
            shallow = [c for c in pool if c.frozen_hop <= own_frozen_hop - 1]
            pool = shallow or pool
        best = _argmin(pool, lambda c: c.path_rank())
        return best.node if best else None

    cur = by_node[current]
    if params.hop_clause == HOP_CLAUSE_EQ:
        pool = [c for c in eligible if c.frozen_hop == cur.frozen_hop]
    else:
        pool = [c for c in eligible if c.frozen_hop <= cur.frozen_hop]
    best = _argmin(pool, lambda c: c.path_rank())
    if best is not None and best.path_rank() < cur.path_rank() - params.alpha:
        return best.node
    return current


def secof_mode(now_us, normal_duration_us):
    """Single Normal -> Restricted step; the boundary instant is restricted."""
    return MODE_NORMAL if now_us < normal_duration_us else MODE_RESTRICTED


def rank_increase(of_kind, parent_advertised, etx):
    """Own rank through a given parent: OF0 steps one min-hop rank increase
    per hop, the ETX objectives add the link estimate."""
    if not math.isfinite(parent_advertised):
        return INFINITE_RANK
    if of_kind == OF0:
        return parent_advertised + OF0_RANK_STEP
    return parent_advertised + etx
