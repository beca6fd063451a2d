"""Upward application traffic and hop-by-hop forwarding.

Every non-root node originates one packet per period at a random offset inside
the period. Packets hop along preferred parents; each forwarder stamps its
wire-visible rank, and each receiver checks that upward packets descended in
rank. The first violation sets the packet's rank-error flag, the second drops
the packet and resets the detector's Trickle timer.
"""

import math
from dataclasses import dataclass

from .engine import us
from .radio import Frame

FATE_DELIVERED = "delivered"
FATE_INCONSISTENCY = "dropped-inconsistency"
FATE_NO_ROUTE = "dropped-no-route"
FATE_LINK_FAILURE = "dropped-link-failure"
FATE_TTL = "dropped-ttl"
FATE_IN_FLIGHT = "in-flight-at-horizon"

DROP_FATES = (FATE_INCONSISTENCY, FATE_NO_ROUTE, FATE_LINK_FAILURE, FATE_TTL)

VERDICT_CONSISTENT = "consistent"
VERDICT_MARK = "mark-R-and-forward"
VERDICT_DROP = "drop-and-reset"

TTL_HOPS = 64


@dataclass
class DataPacket:
    origin: int
    seq: int
    created_at: int
    o_flag: bool = False  # Down flag; upward-only traffic never sets it
    r_flag: bool = False  # Rank-Error, monotone once set
    sender_rank: float | None = None
    hops_traversed: int = 0


@dataclass
class PacketFate:
    origin: int
    seq: int
    created_at: int
    fate: str
    delivered_at: int | None = None
    hops_traversed: int = 0
    r_flag_set: bool = False


def check_consistency(receiver_rank, pkt):
    """Direction check on one received packet.

    Upward packets must strictly descend in rank at every hop (per-hop cost is
    at least one rank unit), so sender_rank <= receiver_rank flags an
    inconsistency. The downward branch mirrors it; with upward-only traffic it
    is encoded but unreachable.
    """
    if pkt.sender_rank is None:
        return VERDICT_CONSISTENT
    if pkt.o_flag:
        inconsistent = pkt.sender_rank >= receiver_rank
    else:
        inconsistent = pkt.sender_rank <= receiver_rank
    if not inconsistent:
        return VERDICT_CONSISTENT
    return VERDICT_DROP if pkt.r_flag else VERDICT_MARK


class Traffic:
    """Packet lifecycle: origination schedule, forwarding, fate accounting."""

    def __init__(self, engine, rngs, medium, nodes, root_id,
                 period_us=us(60), horizon_us=us(1800)):
        self.engine = engine
        self.rngs = rngs
        self.medium = medium
        self.nodes = nodes
        self.root_id = root_id
        self.period_us = period_us
        self.horizon_us = horizon_us
        self.fates = {}          # (origin, seq) -> PacketFate
        self.originated = 0
        self.delivered = 0
        self._open = {}          # (origin, seq) -> DataPacket still moving

    # -- origination -----------------------------------------------------------

    def schedule_app(self):
        """One packet per node per period, offset uniform inside the period."""
        for nid in sorted(self.nodes):
            if nid == self.root_id:
                continue
            stream = self.rngs.stream(f"app:{nid}")
            seq = 0
            start = 0
            while start < self.horizon_us:
                at = start + stream.uniform_us(0, self.period_us)
                self.engine.schedule(
                    at, nid, "app-send",
                    (lambda n=nid, s=seq: self._originate(n, s)))
                seq += 1
                start += self.period_us

    def _originate(self, origin, seq):
        pkt = DataPacket(origin=origin, seq=seq, created_at=self.engine.now)
        self.originated += 1
        self._open[(origin, seq)] = pkt
        self.forward(self.nodes[origin], pkt)

    # -- forwarding -----------------------------------------------------------

    def forward(self, node, pkt):
        """Route one packet sitting at `node` one step toward the root."""
        if node.is_root:
            self._finish(pkt, FATE_DELIVERED, delivered_at=self.engine.now)
            return

        verdict = check_consistency(node.claimed_rank(), pkt)
        if verdict == VERDICT_DROP:
            node.trickle_reset("inconsistency")
            self._finish(pkt, FATE_INCONSISTENCY)
            return
        if verdict == VERDICT_MARK:
            pkt.r_flag = True

        if node.preferred_parent is None or not math.isfinite(node.rank):
            self._finish(pkt, FATE_NO_ROUTE)
            return
        if pkt.hops_traversed >= TTL_HOPS:
            self._finish(pkt, FATE_TTL)
            return

        parent = node.preferred_parent
        pkt.sender_rank = node.claimed_rank()
        frame = Frame(kind="data", src=node.id, dst=parent,
                      size=self.medium.params.data_bytes, payload=pkt)
        self.medium.unicast(
            node.id, parent, frame,
            on_done=(lambda outcome, n=node, p=parent, k=pkt:
                     self._tx_done(n, p, k, outcome)),
            deliver=self._deliver)

    def _tx_done(self, node, parent, pkt, outcome):
        node.on_data_tx_done(parent, outcome)
        if not outcome.delivered:
            self._finish(pkt, FATE_LINK_FAILURE)

    def _deliver(self, dst, frame):
        pkt = frame.payload
        node = self.nodes[dst]
        node.counters.data_rx += 1
        pkt.hops_traversed += 1
        self.forward(node, pkt)

    # -- accounting -----------------------------------------------------------

    def _finish(self, pkt, fate, delivered_at=None):
        key = (pkt.origin, pkt.seq)
        if key in self.fates:
            raise RuntimeError(f"duplicate fate for packet {key}")
        self.fates[key] = PacketFate(
            origin=pkt.origin, seq=pkt.seq, created_at=pkt.created_at,
            fate=fate, delivered_at=delivered_at,
            hops_traversed=pkt.hops_traversed, r_flag_set=pkt.r_flag)
        self._open.pop(key, None)
        if fate == FATE_DELIVERED:
            self.delivered += 1

    def finalize(self):
        """Mark packets still moving at the horizon."""
        for key, pkt in sorted(self._open.items()):
            self.fates[key] = PacketFate(
                origin=pkt.origin, seq=pkt.seq, created_at=pkt.created_at,
                fate=FATE_IN_FLIGHT, hops_traversed=pkt.hops_traversed,
                r_flag_set=pkt.r_flag)
        self._open.clear()

    def resolved(self):
        return len(self.fates)

    def in_flight(self):
        return len(self._open)

    def drop_counts(self):
        counts = {fate: 0 for fate in DROP_FATES}
        for f in self.fates.values():
            if f.fate in counts:
                counts[f.fate] += 1
        return counts

    def conservation_ok(self):
        return self.originated == len(self.fates) + len(self._open)
