"""Per-node routing state machine.

Each node owns its rank, hop count, neighbor table, Trickle timer and link
estimates. All interaction happens through frames scheduled on the shared
engine; nothing here is touched from outside an event handler.
"""

import math
from dataclasses import dataclass

from . import objectives
from .engine import us
from .radio import Frame

INFINITE_RANK = objectives.INFINITE_RANK
ROOT_RANK = objectives.ROOT_RANK


def compute_hops(parent_hop):
    """Hop count through a parent: one more than the parent's."""
    if parent_hop is None:
        raise ValueError("parent hop unknown")
    return parent_hop + 1


def compute_rank(parent_rank, etx):
    """Rank through a parent: parent rank plus the link estimate.

    A poisoned (infinite-rank) parent yields an infinite rank.
    """
    if not math.isfinite(parent_rank):
        return INFINITE_RANK
    if not objectives.MIN_ETX <= etx <= objectives.MAX_ETX:
        raise ValueError(f"etx {etx} outside [1, 5]")
    return parent_rank + etx


class EtxEstimator:
    """EWMA link estimate in expected transmissions, clamped to [1, 5] by
    construction when fed packet values in [1, 5]."""

    def __init__(self, initial=2.0, beta=90, scale=100):
        if not objectives.MIN_ETX <= initial <= objectives.MAX_ETX:
            raise ValueError(f"initial etx {initial} outside [1, 5]")
        if not 0 < beta < scale:
            raise ValueError(f"need 0 < beta < scale, got {beta}/{scale}")
        self.value = float(initial)
        self.beta = beta
        self.scale = scale

    def update(self, packet_etx):
        if not objectives.MIN_ETX <= packet_etx <= objectives.MAX_ETX:
            raise ValueError(f"packet etx {packet_etx} outside [1, 5]")
        self.value = (self.value * self.beta + packet_etx * (self.scale - self.beta)) / self.scale
        return self.value


@dataclass
class TrickleParams:
    imin_us: int = us(4)
    doublings: int = 8
    k: int = 10

    @property
    def imax_us(self):
        return self.imin_us << self.doublings


class Trickle:
    """Adaptive suppression timer: interval doubles from Imin to Imax, resets
    to Imin on inconsistency, fires once per interval at a random point in
    [I/2, I)."""

    def __init__(self, engine, rng, params, owner_id, on_fire):
        self.engine = engine
        self.rng = rng
        self.params = params
        self.owner_id = owner_id
        self.on_fire = on_fire
        self.interval = params.imin_us
        self.c = 0
        self.running = False
        self.resets = 0
        self._fire_event = None
        self._end_event = None

    def start(self):
        if self.running:
            return
        self.running = True
        self.interval = self.params.imin_us
        self._begin_interval()

    def reset(self):
        if not self.running:
            self.start()
            self.resets += 1
            return
        self._cancel_pending()
        self.interval = self.params.imin_us
        self.resets += 1
        self._begin_interval()

    def stop(self):
        self._cancel_pending()
        self.running = False

    def heard_consistent(self):
        self.c += 1

    def _cancel_pending(self):
        for ev in (self._fire_event, self._end_event):
            if ev is not None:
                ev.cancel()
        self._fire_event = None
        self._end_event = None

    def _begin_interval(self):
        self.c = 0
        start = self.engine.now
        t = self.rng.uniform_us(self.interval // 2, self.interval)
        self._fire_event = self.engine.schedule(
            start + t, self.owner_id, "trickle-fire", self._fire)
        self._end_event = self.engine.schedule(
            start + self.interval, self.owner_id, "trickle-end", self._end)

    def _fire(self):
        self._fire_event = None
        self.on_fire(self.c)

    def _end(self):
        self._end_event = None
        self.interval = min(self.interval * 2, self.params.imax_us)
        self._begin_interval()


@dataclass
class DioMessage:
    sender: int
    advertised_rank: float
    advertised_hop: int | None
    dodag_id: int = 0
    metric_kind: str = "etx"  # "etx" | "hopcount"
    trickle: TrickleParams | None = None


@dataclass
class NeighborRecord:
    node: int
    advertised_rank: float
    etx: EtxEstimator
    adv_hop: int | None = None
    frozen_hop: int | None = None
    last_heard: int = 0


@dataclass
class NodeCounters:
    dio_tx: int = 0
    dio_rx: int = 0
    dio_suppressed: int = 0
    data_tx_attempts: int = 0
    data_rx: int = 0
    trickle_resets: int = 0
    parent_switches: int = 0
    poison_events: int = 0


@dataclass
class RplParams:
    etx_initial: float = 2.0
    ewma_beta: int = 90
    ewma_scale: int = 100
    rank_reset_threshold: float = 1.0  # advertised-rank drift that counts as inconsistency
    neighbor_expiry_intervals: int = 3  # multiples of Imax without a DIO


class Node:
    """One RPL node. The attacker is the same machine with an attack config
    attached: from start_time its wire-visible rank is pinned to the fake
    value while parent selection and forwarding stay honest."""

    def __init__(self, node_id, engine, rngs, medium, of_kind,
                 rpl_params=None, trickle_params=None, secof_params=None,
                 is_root=False, root_rank=ROOT_RANK, attack=None):
        self.id = node_id
        self.engine = engine
        self.medium = medium
        self.of_kind = of_kind
        self.params = rpl_params or RplParams()
        self.trickle_params = trickle_params or TrickleParams()
        self.secof = secof_params or objectives.SecofParams()
        self.is_root = is_root
        self.root_rank = root_rank
        self.attack = attack  # AttackConfig or None

        self.rank = root_rank if is_root else INFINITE_RANK
        self.hop = 0 if is_root else None
        self.preferred_parent = None
        self.neighbors = {}
        self.counters = NodeCounters()
        self.mode = objectives.MODE_NORMAL
        self.frozen_own_hop = None
        self.last_advertised_rank = root_rank if is_root else None
        self.joined = is_root
        self.traffic = None          # wired by the simulation builder
        self.on_parent_change = None  # hook(node, old, new, now)

        self.trickle = Trickle(
            engine, rngs.stream(f"trickle:{node_id}"),
            self.trickle_params, node_id, self._trickle_fire)

    # -- wire-visible rank -------------------------------------------------

    def attack_active(self, now=None):
        if self.attack is None:
            return False
        now = self.engine.now if now is None else now
        return now >= self.attack.start_us

    def claimed_rank(self, now=None):
        """Rank this node puts on the wire: DIO advertisements and the
        SenderRank stamped into forwarded data packets."""
        if self.attack_active(now):
            return self.attack.advertised_rank
        return self.rank

    # -- lifecycle ----------------------------------------------------------

    def start(self):
        if self.is_root:
            self.trickle.start()

    # -- trickle ------------------------------------------------------------

    def _trickle_fire(self, c):
        if c >= self.trickle_params.k:
            self.counters.dio_suppressed += 1
            return
        self.emit_dio()

    def trickle_reset(self, reason=""):
        if not self.joined:
            return
        self.counters.trickle_resets += 1
        self.trickle.reset()

    # -- DIO emission ---------------------------------------------------------

    def build_dio(self):
        return DioMessage(
            sender=self.id,
            advertised_rank=self.claimed_rank(),
            advertised_hop=self.hop,
            metric_kind="hopcount" if self.of_kind == objectives.OF0 else "etx",
            trickle=self.trickle_params,
        )

    def emit_dio(self):
        dio = self.build_dio()
        frame = Frame(kind="dio", src=self.id, dst="broadcast",
                      size=self.medium.params.dio_bytes, payload=dio)
        self.medium.multicast(self.id, frame, self._deliver_dio)
        self.counters.dio_tx += 1
        self.last_advertised_rank = dio.advertised_rank
        return dio

    def _deliver_dio(self, dst, frame):
        # runs in the receiver's arrival event
        self.medium.nodes[dst].handle_dio(frame.payload)

    # -- DIO processing -------------------------------------------------------

    def handle_dio(self, dio):
        if dio.sender == self.id:
            return
        now = self.engine.now
        self.counters.dio_rx += 1
        self._evict_stale(now)

        rec = self.neighbors.get(dio.sender)
        if rec is not None and rec.advertised_rank == dio.advertised_rank:
            self.trickle.heard_consistent()
        if rec is None:
            rec = NeighborRecord(
                node=dio.sender,
                advertised_rank=dio.advertised_rank,
                etx=EtxEstimator(self.params.etx_initial,
                                 self.params.ewma_beta, self.params.ewma_scale),
            )
            self.neighbors[dio.sender] = rec
        else:
            rec.advertised_rank = dio.advertised_rank
        rec.last_heard = now
        if self.mode == objectives.MODE_NORMAL:
            rec.adv_hop = dio.advertised_hop

        if self.is_root:
            return
        self.reselect()
        self._recompute_rank()

    def _evict_stale(self, now):
        horizon = self.params.neighbor_expiry_intervals * self.trickle_params.imax_us
        stale = [nid for nid, rec in self.neighbors.items()
                 if now - rec.last_heard > horizon]
        for nid in stale:
            del self.neighbors[nid]
            if nid == self.preferred_parent:
                self._set_parent(None)

    # -- parent selection -------------------------------------------------------

    def _candidates(self):
        return [
            objectives.ParentCandidate(
                node=rec.node,
                advertised_rank=rec.advertised_rank,
                etx=rec.etx.value,
                frozen_hop=rec.frozen_hop,
            )
            for rec in self.neighbors.values()
        ]

    def select_parent(self, exclude=()):
        cands = self._candidates()
        current = self.preferred_parent
        if self.of_kind == objectives.OF0:
            return objectives.of0_select(cands, current)
        if self.of_kind == objectives.MRHOF:
            return objectives.mrhof_select(cands, current, self.secof.alpha)
        return objectives.secof_select(
            cands, current, self.secof, self.mode,
            own_frozen_hop=self.frozen_own_hop, root_rank=self.root_rank,
            exclude=exclude)

    def _would_cycle(self, candidate):
        nodes = self.medium.nodes
        cur = candidate
        seen = set()
        while cur is not None and cur in nodes and cur not in seen:
            if cur == self.id:
                return True
            seen.add(cur)
            cur = nodes[cur].preferred_parent
        return False

    def reselect(self):
        if self.is_root:
            return
        vet_cycles = (self.of_kind == objectives.SECOF
                      and self.mode == objectives.MODE_RESTRICTED)
        exclude = set()
        while True:
            new = self.select_parent(exclude=exclude)
            if (vet_cycles and new is not None and new != self.preferred_parent
                    and self._would_cycle(new)):
                exclude.add(new)
                continue
            break
        if new != self.preferred_parent:
            self._set_parent(new)
        elif new is None:
            self.poison()

    def _set_parent(self, new):
        old = self.preferred_parent
        if new == old:
            return
        self.preferred_parent = new
        self.counters.parent_switches += 1
        if new is None:
            self.poison()
        else:
            self.joined = True
            self._recompute_hop()
            self._recompute_rank(force_reset=True)
        if self.on_parent_change is not None:
            self.on_parent_change(self, old, new, self.engine.now)

    def _recompute_hop(self):
        if self.is_root or self.preferred_parent is None:
            return
        if self.mode == objectives.MODE_RESTRICTED and self.frozen_own_hop is not None:
            self.hop = self.frozen_own_hop
            return
        rec = self.neighbors.get(self.preferred_parent)
        if rec is not None and rec.adv_hop is not None:
            self.hop = compute_hops(rec.adv_hop)

    def _recompute_rank(self, force_reset=False):
        if self.is_root:
            return
        if self.preferred_parent is None:
            new = INFINITE_RANK
        else:
            rec = self.neighbors[self.preferred_parent]
            new = objectives.rank_increase(
                self.of_kind, rec.advertised_rank, rec.etx.value)
            if not math.isfinite(new):
                # parent poisoned under us
                self.reselect()
                return
        self.rank = new
        if force_reset:
            self.trickle_reset("parent-change")
            return
        ref = self.last_advertised_rank
        claimed = self.claimed_rank()  # drift is judged on the wire-visible rank
        # poison / rejoin transitions reset through their own paths
        if ref is None or not (math.isfinite(claimed) and math.isfinite(ref)):
            return
        # threshold is expressed in per-hop rank units, so it scales with the
        # objective's rank step (one min-hop increase under the hop metric)
        unit = objectives.OF0_RANK_STEP if self.of_kind == objectives.OF0 else 1.0
        if abs(claimed - ref) > self.params.rank_reset_threshold * unit:
            self.trickle_reset("rank-change")

    # -- poisoning / rejoin -------------------------------------------------------

    def poison(self):
        """Detach: advertise infinite rank until an acceptable DIO arrives."""
        if self.is_root:
            return
        already = not math.isfinite(self.rank) and self.preferred_parent is None
        self.preferred_parent = None
        self.rank = INFINITE_RANK
        if not already and self.joined:
            self.counters.poison_events += 1
            self.trickle_reset("poison")

    # -- mode switch -----------------------------------------------------------

    def freeze_hops(self):
        """Latch every neighbor's hop and the node's own; later DIOs never
        touch the frozen values, and neighbors first heard afterwards stay
        unknown."""
        for rec in self.neighbors.values():
            rec.frozen_hop = rec.adv_hop
        self.frozen_own_hop = self.hop
        self.mode = objectives.MODE_RESTRICTED

    # -- data-plane feedback ------------------------------------------------------

    def on_data_tx_done(self, dst, outcome):
        self.counters.data_tx_attempts += outcome.attempts
        rec = self.neighbors.get(dst)
        if rec is not None and outcome.attempts > 0:
            rec.etx.update(min(outcome.attempts, 5))
        if not self.is_root:
            self.reselect()
            self._recompute_rank()
