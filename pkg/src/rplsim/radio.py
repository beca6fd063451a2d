"""Unit-disk radio medium with Bernoulli per-attempt loss.

Multicast frames reach each in-range neighbor independently with probability
1 - loss_rate. Unicast frames retry up to max_attempts and report the attempt
count back to the sender for link estimation; ACKs are never lost, so the
attempt count equals the forward-path trials.

Energy model is low-power-listening flavored: a broadcast costs the sender a
full wake-interval strobe, unicasts are phase-locked and cost airtime only.
"""

import math
from dataclasses import dataclass, field

from .engine import us

DEFAULT_RATE_BPS = 250_000  # IEEE 802.15.4


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass
class LinkModel:
    tx_range: float = 30.0  # meters
    loss_rate: float = 0.0  # per transmission attempt

    def __post_init__(self):
        if self.tx_range <= 0:
            raise ValueError(f"tx_range must be > 0, got {self.tx_range}")
        if not 0.0 <= self.loss_rate <= 1.0:
            raise ValueError(f"loss_rate {self.loss_rate} outside [0, 1]")


@dataclass
class RadioParams:
    rate_bps: int = DEFAULT_RATE_BPS
    dio_bytes: int = 80
    data_bytes: int = 100
    ack_bytes: int = 11
    proc_delay_us: int = 1_000
    bcast_strobe_us: int = 62_500  # LPL wake interval paid per broadcast tx
    max_attempts: int = 8


@dataclass
class Frame:
    kind: str  # "dio-multicast" | "data-unicast" | "ack"
    src: int
    dst: object  # node id or "broadcast"
    size: int
    payload: object = None


@dataclass
class UnicastOutcome:
    delivered: bool
    attempts: int
    out_of_range: bool = False


def airtime_us(nbytes, rate_bps=DEFAULT_RATE_BPS):
    return us(nbytes * 8 / rate_bps)


class UnknownNodeError(KeyError):
    pass


class Medium:
    """Connectivity, loss draws and delivery scheduling for one topology."""

    def __init__(self, engine, rngs, positions, link, params=None, energy=None):
        self.engine = engine
        self.rngs = rngs
        self.positions = dict(positions)
        self.link = link
        self.params = params or RadioParams()
        self.energy = energy  # optional EnergyAccount
        self.nodes = {}  # id -> Node, filled by the simulation builder
        self._neighbors = {}
        self._rebuild()

    def _rebuild(self):
        rng_range = self.link.tx_range
        ids = sorted(self.positions)
        for nid in ids:
            pos = self.positions[nid]
            self._neighbors[nid] = tuple(
                other for other in ids
                if other != nid and pos.distance(self.positions[other]) <= rng_range
            )

    def neighbors(self, node):
        try:
            return self._neighbors[node]
        except KeyError:
            raise UnknownNodeError(f"unknown node id {node!r}") from None

    def _loss_stream(self, src, dst):
        return self.rngs.stream(f"loss:{src}:{dst}")

    def _charge_tx(self, node, dur_us):
        if self.energy is not None:
            self.energy.charge_tx(node, dur_us)

    def _charge_rx(self, node, dur_us):
        if self.energy is not None:
            self.energy.charge_rx(node, dur_us)

    def multicast(self, src, frame, deliver):
        """Fan a broadcast frame out to every in-range neighbor.

        `deliver(dst, frame)` runs once per delivered copy, after airtime plus
        processing delay. Returns the number of scheduled deliveries.
        """
        p = self.params
        air = airtime_us(frame.size, p.rate_bps)
        self._charge_tx(src, p.bcast_strobe_us)
        success_p = 1.0 - self.link.loss_rate
        arrival = self.engine.now + air + p.proc_delay_us
        count = 0
        for dst in self.neighbors(src):
            if self._loss_stream(src, dst).bernoulli(success_p):
                self._charge_rx(dst, air)
                self.engine.schedule(
                    arrival, dst, f"rx-{frame.kind}",
                    (lambda d=dst, fr=frame: deliver(d, fr)),
                )
                count += 1
        return count

    def unicast(self, src, dst, frame, on_done, deliver):
        """Retrying unicast with ACK feedback.

        Draws i.i.d. Bernoulli attempts until the first success or
        max_attempts. On success, `deliver(dst, frame)` fires at the receiver
        after the attempts' airtime; `on_done(outcome)` always fires at the
        sender once the exchange resolves. An out-of-range destination resolves
        immediately as a failure distinct from link loss.
        """
        p = self.params
        if dst not in self.neighbors(src):
            outcome = UnicastOutcome(delivered=False, attempts=0, out_of_range=True)
            self.engine.schedule_in(0, src, "tx-done", lambda: on_done(outcome))
            return outcome

        air = airtime_us(frame.size, p.rate_bps)
        ack_air = airtime_us(p.ack_bytes, p.rate_bps)
        success_p = 1.0 - self.link.loss_rate
        stream = self._loss_stream(src, dst)
        attempts = 0
        delivered = False
        for _ in range(p.max_attempts):
            attempts += 1
            if stream.bernoulli(success_p):
                delivered = True
                break

        self._charge_tx(src, attempts * air)
        elapsed = attempts * (air + p.proc_delay_us)
        outcome = UnicastOutcome(delivered=delivered, attempts=attempts)
        if delivered:
            self._charge_rx(dst, air)
            # ack frame back to the sender, never lost
            self._charge_tx(dst, ack_air)
            self._charge_rx(src, ack_air)
            self.engine.schedule_in(
                elapsed, dst, f"rx-{frame.kind}",
                (lambda d=dst, fr=frame: deliver(d, fr)),
            )
            self.engine.schedule_in(
                elapsed + ack_air, src, "tx-done", lambda: on_done(outcome))
        else:
            self.engine.schedule_in(
                elapsed, src, "tx-done", lambda: on_done(outcome))
        return outcome
