"""Deterministic discrete-event core: virtual clock, ordered event queue, seeded streams.

Time is an integer microsecond count. Two events at the same instant dispatch
in schedule order (global insertion sequence), so a (config, seed) pair always
produces the same trace on every run and platform.
"""

import hashlib
import heapq
import random

US_PER_S = 1_000_000


def us(seconds):
    """Convert seconds (int or float) to integer microseconds."""
    return int(round(seconds * US_PER_S))


class SimClockError(RuntimeError):
    """Scheduling into the past or running toward an earlier horizon."""


class Event:
    __slots__ = ("time", "seq", "target", "kind", "fn", "cancelled")

    def __init__(self, time, seq, target, kind, fn):
        self.time = time
        self.seq = seq
        self.target = target
        self.kind = kind
        self.fn = fn
        self.cancelled = False

    def cancel(self):
        self.cancelled = True

    def __repr__(self):
        return f"Event(t={self.time}, seq={self.seq}, {self.target}/{self.kind})"


class Engine:
    """Single-threaded event loop owning the virtual clock.

    `target` and `kind` exist purely for the trace log; `fn` is a zero-argument
    callback run at dispatch time.
    """

    def __init__(self, keep_trace=True):
        self.now = 0
        self.dispatched = 0
        self._seq = 0
        self._queue = []
        self.trace = [] if keep_trace else None

    def schedule(self, time, target, kind, fn):
        if time < self.now:
            raise SimClockError(f"schedule at {time} us before clock {self.now} us")
        ev = Event(time, self._seq, target, kind, fn)
        self._seq += 1
        heapq.heappush(self._queue, (time, ev.seq, ev))
        return ev

    def schedule_in(self, delay, target, kind, fn):
        return self.schedule(self.now + delay, target, kind, fn)

    def run_until(self, horizon):
        if horizon < self.now:
            raise SimClockError(f"horizon {horizon} us before clock {self.now} us")
        count = 0
        queue = self._queue
        trace = self.trace
        while queue and queue[0][0] <= horizon:
            time, _, ev = heapq.heappop(queue)
            if ev.cancelled:
                continue
            self.now = time
            if trace is not None:
                trace.append((time, ev.target, ev.kind))
            ev.fn()
            count += 1
        self.now = horizon
        self.dispatched += count
        return count

    def trace_lines(self):
        return [f"{t} {target} {kind}" for t, target, kind in self.trace or ()]

    def trace_hash(self):
        h = hashlib.sha256()
        for line in self.trace_lines():
            h.update(line.encode())
            h.update(b"\n")
        return h.hexdigest()

    def write_trace(self, path):
        with open(path, "w", encoding="utf-8") as f:
            for line in self.trace_lines():
                f.write(line + "\n")


class Rng:
    """One named draw stream. Value sequence depends only on the derived seed."""

    def __init__(self, seed_int):
        self._r = random.Random(seed_int)

    def uniform01(self):
        return self._r.random()

    def uniform(self, lo, hi):
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi})")
        return lo + (hi - lo) * self._r.random()

    def uniform_us(self, lo, hi):
        """Integer microsecond draw in [lo, hi)."""
        return lo + int(self._r.random() * (hi - lo))

    def bernoulli(self, p):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"bernoulli p={p} outside [0, 1]")
        return self._r.random() < p

    def shuffle(self, seq):
        self._r.shuffle(seq)


class RngStreams:
    """Per-(node, purpose) generators derived from one master seed.

    The derivation hashes the stream name, so adding a node or a new draw
    purpose never perturbs any other stream's sequence.
    """

    def __init__(self, master_seed):
        self.master_seed = master_seed
        self._streams = {}

    def stream(self, name):
        rng = self._streams.get(name)
        if rng is None:
            digest = hashlib.sha256(f"{self.master_seed}/{name}".encode()).digest()
            rng = Rng(int.from_bytes(digest[:8], "big"))
            self._streams[name] = rng
        return rng
