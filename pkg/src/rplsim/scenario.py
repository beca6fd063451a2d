"""Scenario configuration, simulation assembly, runs and sweeps.

Config files are flat INI-style text with sections; unknown sections or keys
are hard errors so a typo cannot silently weaken an experiment.
"""

import configparser
import io
import math
import os
from dataclasses import dataclass, field, fields, replace

from . import attack as attack_mod
from . import metrics as metrics_mod
from . import objectives, topology
from .dataplane import Traffic
from .engine import Engine, RngStreams, us
from .metrics import EnergyAccount, EnergyParams, MetricsCollector
from .radio import LinkModel, Medium, RadioParams
from .rpl import Node, RplParams, TrickleParams


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    # [scenario]
    topology: str = "grid51"          # grid51 | small11 | random | file
    topology_file: str = ""
    random_n: int = 20
    random_area: float = 100.0
    root: int = 1
    attacker_level: int = 3           # attacker slot / placement level
    of: str = objectives.MRHOF
    loss_rate: float = 0.0
    horizon_s: float = 1800.0
    app_period_s: float = 60.0
    sample_interval_s: float = 60.0
    seed: int = 1
    out_prefix: str = ""
    root_rank: float = 256.0
    # [attack] — enabled by the section's presence
    attack_enabled: bool = False
    attack_start_s: float = 120.0
    attack_rank: float = 257.0
    # [trickle]
    trickle_imin_s: float = 4.0
    trickle_doublings: int = 8
    trickle_k: int = 10
    # [radio]
    tx_range_m: float = 0.0           # 0 -> topology default
    rate_kbps: float = 250.0
    dio_bytes: int = 80
    data_bytes: int = 100
    ack_bytes: int = 11
    proc_delay_ms: float = 1.0
    bcast_strobe_ms: float = 62.5
    max_attempts: int = 8
    # [rpl]
    etx_initial: float = 2.0
    ewma_beta: int = 90
    ewma_scale: int = 100
    rank_reset_threshold: float = 1.0
    neighbor_expiry_intervals: int = 3
    # [secof]
    alpha: float = 0.5
    secof_normal_s: float = 60.0
    hop_clause: str = objectives.HOP_CLAUSE_EQ
    rank_guard: bool = True
    # [energy]
    p_tx_mw: float = 52.2
    p_rx_mw: float = 56.4
    p_idle_mw: float = 0.18

    def validate(self):
        if self.topology not in ("grid51", "small11", "random", "file"):
            raise ConfigError(f"unknown topology {self.topology!r}")
        if self.topology == "file" and not self.topology_file:
            raise ConfigError("topology=file needs topology_file")
        if self.of not in objectives.OF_KINDS:
            raise ConfigError(f"unknown objective function {self.of!r}")
        if not 0.0 <= self.loss_rate <= 1.0:
            raise ConfigError(f"loss_rate {self.loss_rate} outside [0, 1]")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.hop_clause not in (objectives.HOP_CLAUSE_EQ, objectives.HOP_CLAUSE_LEQ):
            raise ConfigError(f"unknown hop_clause {self.hop_clause!r}")
        if self.horizon_s <= 0:
            raise ConfigError("horizon_s must be positive")
        if self.attack_enabled and self.attack_start_s >= self.horizon_s:
            raise ConfigError("attack_start_s must fall inside the horizon")
        if self.attacker_level not in (1, 2, 3):
            raise ConfigError(f"attacker_level must be 1..3, got {self.attacker_level}")
        return self


_SECTION_FIELDS = {
    "scenario": ["topology", "topology_file", "random_n", "random_area", "root",
                 "attacker_level", "of", "loss_rate", "horizon_s", "app_period_s",
                 "sample_interval_s", "seed", "out_prefix", "root_rank"],
    "attack": ["attack_start_s", "attack_rank"],
    "trickle": ["trickle_imin_s", "trickle_doublings", "trickle_k"],
    "radio": ["tx_range_m", "rate_kbps", "dio_bytes", "data_bytes", "ack_bytes",
              "proc_delay_ms", "bcast_strobe_ms", "max_attempts"],
    "rpl": ["etx_initial", "ewma_beta", "ewma_scale", "rank_reset_threshold",
            "neighbor_expiry_intervals"],
    "secof": ["alpha", "secof_normal_s", "hop_clause", "rank_guard"],
    "energy": ["p_tx_mw", "p_rx_mw", "p_idle_mw"],
}

# INI keys drop the section prefix where it is redundant
def _ini_key(section, field_name):
    prefix = section + "_"
    return field_name[len(prefix):] if field_name.startswith(prefix) else field_name


def parse_config(text):
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config syntax: {exc}") from exc

    cfg = ScenarioConfig()
    types = {f.name: f.type for f in fields(ScenarioConfig)}
    for section in cp.sections():
        if section not in _SECTION_FIELDS:
            raise ConfigError(f"unknown section [{section}]")
        allowed = {_ini_key(section, f): f for f in _SECTION_FIELDS[section]}
        for key, raw in cp.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            name = allowed[key]
            kind = types[name]
            try:
                if kind is bool:
                    value = raw.strip().lower() in ("1", "true", "yes", "on")
                elif kind is int:
                    value = int(raw)
                elif kind is float:
                    value = float(raw)
                else:
                    value = raw.strip()
            except ValueError as exc:
                raise ConfigError(f"bad value for {key} in [{section}]: {raw!r}") from exc
            setattr(cfg, name, value)
    cfg.attack_enabled = cp.has_section("attack")
    return cfg.validate()


def serialize_config(cfg):
    cp = configparser.ConfigParser()
    for section, names in _SECTION_FIELDS.items():
        if section == "attack" and not cfg.attack_enabled:
            continue
        cp.add_section(section)
        for name in names:
            cp.set(section, _ini_key(section, name), str(getattr(cfg, name)))
    out = io.StringIO()
    cp.write(out)
    return out.getvalue()


def load_config(path):
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())


# ---------------------------------------------------------------------------

@dataclass
class SimRun:
    """One assembled simulation plus everything observed while it ran."""
    config: ScenarioConfig
    engine: Engine
    nodes: dict
    medium: Medium
    traffic: Traffic
    energy: EnergyAccount
    collector: MetricsCollector
    root_id: int
    attacker_id: int | None
    cycles: list = field(default_factory=list)           # (time_us, node)
    attack_children: set = field(default_factory=set)    # switched to the attacker post-start
    switch_log: list = field(default_factory=list)       # (time_us, node, old, new)

    def horizon_us(self):
        return us(self.config.horizon_s)


def _build_positions(cfg):
    if cfg.topology == "grid51":
        positions = topology.grid51(cfg.attacker_level)
        return positions, topology.GRID51_ATTACKER, topology.GRID51_TX_RANGE
    if cfg.topology == "small11":
        return topology.small11(), topology.SMALL11_ATTACKER, topology.SMALL11_TX_RANGE
    if cfg.topology == "random":
        tx_range = cfg.tx_range_m or topology.DEFAULT_TX_RANGE
        attacker = cfg.random_n + 1
        positions = topology.random_topology(
            cfg.random_n + 1, cfg.random_area, cfg.seed, tx_range)
        if cfg.attack_enabled:
            positions = topology.place_attacker(
                positions, tx_range, cfg.root, attacker, cfg.attacker_level,
                cfg.seed, cfg.random_area)
        return positions, attacker, tx_range
    positions = topology.read_topology_file(cfg.topology_file)
    return positions, max(positions), cfg.tx_range_m or topology.DEFAULT_TX_RANGE


def build_simulation(cfg, keep_trace=True):
    cfg.validate()
    positions, attacker_id, default_range = _build_positions(cfg)
    if cfg.root not in positions:
        raise ConfigError(f"root {cfg.root} not present in topology")
    tx_range = cfg.tx_range_m or default_range

    engine = Engine(keep_trace=keep_trace)
    rngs = RngStreams(cfg.seed)
    energy = EnergyAccount(
        sorted(positions),
        EnergyParams(cfg.p_tx_mw, cfg.p_rx_mw, cfg.p_idle_mw))
    medium = Medium(
        engine, rngs, positions,
        LinkModel(tx_range=tx_range, loss_rate=cfg.loss_rate),
        RadioParams(
            rate_bps=int(cfg.rate_kbps * 1000),
            dio_bytes=cfg.dio_bytes, data_bytes=cfg.data_bytes,
            ack_bytes=cfg.ack_bytes,
            proc_delay_us=us(cfg.proc_delay_ms / 1000.0),
            bcast_strobe_us=us(cfg.bcast_strobe_ms / 1000.0),
            max_attempts=cfg.max_attempts),
        energy=energy)

    rpl_params = RplParams(
        etx_initial=cfg.etx_initial, ewma_beta=cfg.ewma_beta,
        ewma_scale=cfg.ewma_scale,
        rank_reset_threshold=cfg.rank_reset_threshold,
        neighbor_expiry_intervals=cfg.neighbor_expiry_intervals)
    trickle_params = TrickleParams(
        imin_us=us(cfg.trickle_imin_s), doublings=cfg.trickle_doublings,
        k=cfg.trickle_k)
    secof_params = objectives.SecofParams(
        alpha=cfg.alpha, hop_clause=cfg.hop_clause, rank_guard=cfg.rank_guard)

    nodes = {}
    for nid in sorted(positions):
        nodes[nid] = Node(
            nid, engine, rngs, medium, cfg.of,
            rpl_params=rpl_params, trickle_params=trickle_params,
            secof_params=secof_params, is_root=(nid == cfg.root),
            root_rank=cfg.root_rank)
    medium.nodes = nodes

    traffic = Traffic(
        engine, rngs, medium, nodes, cfg.root,
        period_us=us(cfg.app_period_s), horizon_us=us(cfg.horizon_s))
    collector = MetricsCollector(
        engine, traffic, energy, nodes, interval_us=us(cfg.sample_interval_s))

    sim = SimRun(
        config=cfg, engine=engine, nodes=nodes, medium=medium,
        traffic=traffic, energy=energy, collector=collector,
        root_id=cfg.root, attacker_id=attacker_id if cfg.attack_enabled else None)

    attack_cfg = None
    if cfg.attack_enabled:
        attack_mod.verify_placement(
            medium.neighbors, cfg.root, attacker_id, cfg.attacker_level)
        attack_cfg = attack_mod.AttackConfig(
            attacker=attacker_id, start_us=us(cfg.attack_start_s),
            advertised_rank=cfg.attack_rank, level=cfg.attacker_level)
        attack_mod.install(engine, nodes[attacker_id], attack_cfg)

    def on_parent_change(node, old, new, now, _sim=sim, _atk=attack_cfg):
        _sim.switch_log.append((now, node.id, old, new))
        if new is not None and _has_cycle(nodes, node.id):
            _sim.cycles.append((now, node.id))
        if (_atk is not None and new == _atk.attacker
                and now >= _atk.start_us and node.id != _atk.attacker):
            _sim.attack_children.add(node.id)

    for node in nodes.values():
        node.on_parent_change = on_parent_change

    if cfg.of == objectives.SECOF:
        switch_at = us(cfg.secof_normal_s)
        for nid in sorted(nodes):
            engine.schedule(switch_at, nid, "mode-switch", nodes[nid].freeze_hops)

    traffic.schedule_app()
    collector.schedule(us(cfg.horizon_s))
    nodes[cfg.root].start()
    return sim


def _has_cycle(nodes, start):
    seen = set()
    cur = start
    while cur is not None:
        if cur in seen:
            return True
        seen.add(cur)
        cur = nodes[cur].preferred_parent
    return False


def run_scenario(cfg, keep_trace=True, export=None):
    """Build, run to the horizon, finalize accounting; optionally export CSVs.

    `export` overrides cfg.out_prefix; pass a falsy prefix to skip files.
    """
    sim = build_simulation(cfg, keep_trace=keep_trace)
    sim.engine.run_until(sim.horizon_us())
    sim.traffic.finalize()

    prefix = cfg.out_prefix if export is None else export
    csv_paths = {}
    if prefix:
        csv_paths = export_run(sim, prefix)
    return sim, summarize(sim), csv_paths


def summarize(sim):
    traffic = sim.traffic
    nodes = sim.nodes
    horizon = sim.horizon_us()
    # packets still in the air at the horizon are neither delivered nor lost
    from .dataplane import FATE_IN_FLIGHT
    in_flight = sum(1 for f in traffic.fates.values() if f.fate == FATE_IN_FLIGHT)
    settled = traffic.resolved() - in_flight
    mean_power = (sum(sim.energy.mean_power_mw(nid, horizon) for nid in nodes)
                  / len(nodes))
    neighborhood = (set(sim.medium.neighbors(sim.attacker_id))
                    if sim.attacker_id is not None else set())
    return {
        "of": sim.config.of,
        "level": sim.config.attacker_level if sim.config.attack_enabled else 0,
        "loss": sim.config.loss_rate,
        "seed": sim.config.seed,
        "originated": traffic.originated,
        "delivered": traffic.delivered,
        "pdr": traffic.delivered / settled if settled else 1.0,
        "mean_power_mw": mean_power,
        "trickle_resets": sum(n.counters.trickle_resets for n in nodes.values()),
        "parent_switches": sum(n.counters.parent_switches for n in nodes.values()),
        "poison_events": sum(n.counters.poison_events for n in nodes.values()),
        "attack_children": len(sim.attack_children),
        "attacker_neighborhood": len(neighborhood),
        "cycles": len(sim.cycles),
        "dispatched": sim.engine.dispatched,
    }


def run_label(cfg):
    level = f"l{cfg.attacker_level}" if cfg.attack_enabled else "l0"
    loss = f"p{int(round(cfg.loss_rate * 100)):02d}"
    return f"{cfg.of}_{level}_{loss}_s{cfg.seed}"


def export_run(sim, prefix):
    full_prefix = f"{prefix}_{run_label(sim.config)}"
    directory = os.path.dirname(full_prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)
    meta = {
        "of": sim.config.of,
        "level": sim.config.attacker_level if sim.config.attack_enabled else 0,
        "loss": sim.config.loss_rate,
        "seed": sim.config.seed,
    }
    trace_hash = sim.engine.trace_hash() if sim.engine.trace is not None else ""
    return metrics_mod.export_csv(
        full_prefix, meta, sim.collector, sim.traffic, sim.nodes, sim.energy,
        sim.horizon_us(), trace_hash=trace_hash)


def sweep(base_cfg, seeds, ofs, levels, losses, out_prefix="", keep_trace=False):
    """Cartesian sweep; one summary row per cell, failures recorded inline.

    `levels` entries are 1/2/3 or the string "none" for attack-free baselines.
    """
    rows = []
    for of in ofs:
        for level in levels:
            for loss in losses:
                for seed in seeds:
                    cfg = replace(
                        base_cfg, of=of, loss_rate=loss, seed=seed, out_prefix="")
                    if level in ("none", "0", 0, None):
                        cfg.attack_enabled = False
                    else:
                        cfg.attack_enabled = True
                        cfg.attacker_level = int(level)
                    try:
                        _, summary, _ = run_scenario(cfg, keep_trace=keep_trace)
                        summary["status"] = "ok"
                    except Exception as exc:  # cell failures must not kill the sweep
                        summary = {
                            "of": of,
                            "level": 0 if level in ("none", "0", 0, None) else int(level),
                            "loss": loss, "seed": seed, "status": f"error: {exc}",
                        }
                    rows.append(summary)
    if out_prefix:
        directory = os.path.dirname(out_prefix)
        if directory:
            os.makedirs(directory, exist_ok=True)
        header = ["of", "level", "loss", "seed", "status", "originated",
                  "delivered", "pdr", "mean_power_mw", "trickle_resets",
                  "parent_switches", "poison_events", "attack_children",
                  "attacker_neighborhood", "cycles"]
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_cell(row.get(col, "")) for col in header))
        with open(f"{out_prefix}_sweep.csv", "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
    return rows


def _cell(value):
    if isinstance(value, float):
        return f"{value:.6f}"
    text = str(value)
    return text.replace(",", ";")
