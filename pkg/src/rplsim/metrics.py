"""Measurement collection and CSV export.

The energy figure is a radio-activity proxy: accumulated transmit/receive
airtime (broadcasts pay a full LPL strobe window) weighted by platform power
draws, plus an idle floor for the remaining time. Absolute milliwatt values
are not comparable to duty-cycled hardware traces; orderings and ratios are.
"""

import csv
import math
from dataclasses import dataclass, field

from .engine import US_PER_S, us
from . import dataplane


@dataclass
class EnergyParams:
    p_tx_mw: float = 52.2
    p_rx_mw: float = 56.4
    p_idle_mw: float = 0.18


class EnergyAccount:
    """Per-node transmit/receive time, cumulative and per sampling window."""

    def __init__(self, node_ids, params=None):
        self.params = params or EnergyParams()
        self.tx_us = {nid: 0 for nid in node_ids}
        self.rx_us = {nid: 0 for nid in node_ids}
        self._win_tx = {nid: 0 for nid in node_ids}
        self._win_rx = {nid: 0 for nid in node_ids}

    def charge_tx(self, node, dur_us):
        self.tx_us[node] += dur_us
        self._win_tx[node] += dur_us

    def charge_rx(self, node, dur_us):
        self.rx_us[node] += dur_us
        self._win_rx[node] += dur_us

    def _power_mw(self, tx_us_v, rx_us_v, span_us):
        if span_us <= 0:
            return 0.0
        idle = max(0, span_us - tx_us_v - rx_us_v)
        p = self.params
        return (tx_us_v * p.p_tx_mw + rx_us_v * p.p_rx_mw + idle * p.p_idle_mw) / span_us

    def close_window(self, span_us):
        """Mean power per node over the window just ended; resets window sums."""
        out = {}
        for nid in self.tx_us:
            out[nid] = self._power_mw(self._win_tx[nid], self._win_rx[nid], span_us)
            self._win_tx[nid] = 0
            self._win_rx[nid] = 0
        return out

    def mean_power_mw(self, node, elapsed_us):
        return self._power_mw(self.tx_us[node], self.rx_us[node], elapsed_us)


@dataclass
class PdrSample:
    at_us: int
    originated: int
    delivered: int
    resolved: int
    in_flight: int
    pdr: float            # delivered / resolved; in-flight excluded
    mean_power_mw: float  # network mean over the window ending here
    trickle_resets: int


class MetricsCollector:
    """Fixed-grid sampler wired into the engine by the simulation builder."""

    def __init__(self, engine, traffic, energy, nodes, interval_us=us(60)):
        self.engine = engine
        self.traffic = traffic
        self.energy = energy
        self.nodes = nodes
        self.interval_us = interval_us
        self.samples = []
        self.node_window_power = []  # list of dicts, parallel to samples

    def schedule(self, horizon_us):
        t = self.interval_us
        while t <= horizon_us:
            self.engine.schedule(t, "metrics", "sample", self.sample)
            t += self.interval_us

    def sample(self):
        now = self.engine.now
        window_power = self.energy.close_window(self.interval_us)
        mean_power = (sum(window_power.values()) / len(window_power)
                      if window_power else 0.0)
        resolved = self.traffic.resolved()
        delivered = self.traffic.delivered
        pdr = delivered / resolved if resolved else 1.0
        self.samples.append(PdrSample(
            at_us=now,
            originated=self.traffic.originated,
            delivered=delivered,
            resolved=resolved,
            in_flight=self.traffic.in_flight(),
            pdr=pdr,
            mean_power_mw=mean_power,
            trickle_resets=sum(n.counters.trickle_resets for n in self.nodes.values()),
        ))
        self.node_window_power.append(window_power)


def _fmt(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.6f}"
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def export_csv(prefix, meta, collector, traffic, nodes, energy, horizon_us,
               trace_hash=""):
    """Write the run's five CSV files; returns their paths.

    `meta` carries the scenario echo: at least of, level, loss, seed.
    """
    of = meta["of"]
    level = meta["level"]
    loss = meta["loss"]
    seed = meta["seed"]
    paths = {}

    fate_counts = {}
    for f in traffic.fates.values():
        fate_counts[f.fate] = fate_counts.get(f.fate, 0) + 1
    accounted = sum(fate_counts.values())
    if accounted != traffic.originated:
        raise RuntimeError(
            f"fate log does not conserve packets: {accounted} != {traffic.originated}")

    in_flight = fate_counts.get(dataplane.FATE_IN_FLIGHT, 0)
    settled = traffic.resolved() - in_flight
    paths["runs"] = _write_csv(
        f"{prefix}_runs.csv",
        ["of", "level", "loss", "seed", "horizon_s", "nodes", "originated",
         "delivered", "dropped_inconsistency", "dropped_no_route",
         "dropped_link_failure", "dropped_ttl", "in_flight", "pdr",
         "trickle_resets", "trace_hash"],
        [[of, level, loss, seed, horizon_us // US_PER_S, len(nodes),
          traffic.originated, traffic.delivered,
          fate_counts.get(dataplane.FATE_INCONSISTENCY, 0),
          fate_counts.get(dataplane.FATE_NO_ROUTE, 0),
          fate_counts.get(dataplane.FATE_LINK_FAILURE, 0),
          fate_counts.get(dataplane.FATE_TTL, 0),
          in_flight,
          (traffic.delivered / settled if settled else 1.0),
          sum(n.counters.trickle_resets for n in nodes.values()),
          trace_hash]])

    paths["pdr_timeseries"] = _write_csv(
        f"{prefix}_pdr_timeseries.csv",
        ["sample_s", "of", "level", "loss", "seed", "originated", "delivered",
         "resolved", "in_flight", "pdr", "mean_power_mw", "trickle_resets"],
        [[s.at_us // US_PER_S, of, level, loss, seed, s.originated, s.delivered,
          s.resolved, s.in_flight, s.pdr, s.mean_power_mw, s.trickle_resets]
         for s in collector.samples])

    paths["power_per_node"] = _write_csv(
        f"{prefix}_power_per_node.csv",
        ["node_id", "of", "level", "mean_mW"],
        [[nid, of, level, energy.mean_power_mw(nid, horizon_us)]
         for nid in sorted(nodes)])

    paths["packet_fates"] = _write_csv(
        f"{prefix}_packet_fates.csv",
        ["origin", "seq", "created_at_us", "fate", "delivered_at_us",
         "hops_traversed", "r_flag_set"],
        [[f.origin, f.seq, f.created_at, f.fate,
          "" if f.delivered_at is None else f.delivered_at,
          f.hops_traversed, int(f.r_flag_set)]
         for f in (traffic.fates[k] for k in sorted(traffic.fates))])

    paths["counters"] = _write_csv(
        f"{prefix}_counters.csv",
        ["node_id", "of", "level", "loss", "seed", "dio_tx", "dio_rx",
         "dio_suppressed", "data_tx_attempts", "data_rx", "trickle_resets",
         "parent_switches", "poison_events", "final_rank"],
        [[nid, of, level, loss, seed, c.dio_tx, c.dio_rx, c.dio_suppressed,
          c.data_tx_attempts, c.data_rx, c.trickle_resets, c.parent_switches,
          c.poison_events, nodes[nid].rank]
         for nid, c in ((nid, nodes[nid].counters) for nid in sorted(nodes))])

    return paths
