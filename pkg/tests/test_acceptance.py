"""Acceptance suite: every criterion at its stated tolerance.

Run order is grouped so the expensive simulations execute once per module and
every criterion prints its own pass/fail line (use -s to watch them live).
"""

import random
from decimal import Decimal, getcontext

import pytest

from rplsim.dataplane import FATE_DELIVERED
from rplsim.engine import Engine, RngStreams, US_PER_S, us
from rplsim.rpl import EtxEstimator, Trickle, TrickleParams
from rplsim.scenario import ScenarioConfig, run_scenario
from rplsim import topology

SEEDS = (1, 2, 3, 4, 5)
OFS = ("of0", "mrhof", "secof")
LEVELS = (1, 2, 3)
ATTACK_START_S = 120.0
SETTLING_S = 0.5  # one lying-DIO propagation after the attack instant


def _extract(sim, summary):
    """Everything the criteria need, without holding the whole simulation."""
    horizon = sim.horizon_us()
    attacker = sim.attacker_id
    neighborhood = set(sim.medium.neighbors(51 if 51 in sim.nodes else max(sim.nodes)))
    late_cut = us(ATTACK_START_S + SETTLING_S)
    delivered_late = {}
    for fate in sim.traffic.fates.values():
        if fate.fate == FATE_DELIVERED and fate.created_at >= late_cut:
            delivered_late[fate.origin] = delivered_late.get(fate.origin, 0) + 1
    return {
        "pdr": summary["pdr"],
        "mean_power_mw": summary["mean_power_mw"],
        "resets": summary["trickle_resets"],
        "trapped": set(sim.attack_children),
        "neighborhood": neighborhood,
        "root_zone": set(sim.medium.neighbors(sim.root_id)),
        "cycles_post_attack": sum(1 for (t, _) in sim.cycles if t >= us(ATTACK_START_S)),
        "cycles_total": len(sim.cycles),
        "samples": [(s.at_us, s.pdr) for s in sim.collector.samples],
        "delivered_late": delivered_late,
        "node_power": {nid: sim.energy.mean_power_mw(nid, horizon)
                       for nid in sim.nodes},
        "poisons": summary["poison_events"],
    }


def _run(**kw):
    kw.setdefault("horizon_s", 1800.0)
    cfg = ScenarioConfig(out_prefix="", **kw)
    sim, summary, _ = run_scenario(cfg, keep_trace=False)
    return _extract(sim, summary)


@pytest.fixture(scope="module")
def grid():
    """(of, level, attack?, seed) -> extracted record over the grid51 matrix."""
    runs = {}
    for of in OFS:
        for level in LEVELS:
            for seed in SEEDS:
                runs[(of, level, False, seed)] = _run(
                    topology="grid51", of=of, seed=seed, attacker_level=level)
                runs[(of, level, True, seed)] = _run(
                    topology="grid51", of=of, seed=seed, attacker_level=level,
                    attack_enabled=True)
    return runs


@pytest.fixture(scope="module")
def small(request):
    runs = {}
    for of in OFS:
        for seed in SEEDS:
            runs[(of, seed)] = _run(
                topology="small11", of=of, seed=seed, attacker_level=3,
                attack_enabled=True)
    return runs


def _report(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return ok


# -- criterion 1: attack-success matrix ---------------------------------------

@pytest.mark.parametrize("of", OFS)
@pytest.mark.parametrize("level", LEVELS)
def test_criterion_1_attack_matrix(grid, of, level):
    failures = []
    for seed in SEEDS:
        rec = grid[(of, level, True, seed)]
        trapped, zone = rec["trapped"], rec["root_zone"]
        nb = len(rec["neighborhood"])
        if of == "secof":
            if trapped:
                failures.append(f"seed {seed}: trapped={sorted(trapped)}")
        elif level == 1:
            if not (0 < len(trapped) < nb):
                failures.append(f"seed {seed}: trapped={sorted(trapped)} of {nb}")
            elif any(t in zone for t in trapped):
                failures.append(f"seed {seed}: trapped node inside root range")
        else:
            if len(trapped) < 1:
                failures.append(f"seed {seed}: no node adopted the attacker")
    ok = _report(f"criterion 1 [{of} level {level}]", not failures,
                 "; ".join(failures))
    assert ok, f"{of} level {level}: {failures}"


# -- criterion 2: level 1/2 leave delivery and power untouched ---------------

@pytest.mark.parametrize("of", ("of0", "mrhof"))
@pytest.mark.parametrize("level", (1, 2))
def test_criterion_2_low_levels_impact_free(grid, of, level):
    failures = []
    for seed in SEEDS:
        base = grid[(of, level, False, seed)]
        atk = grid[(of, level, True, seed)]
        dpdr = abs(atk["pdr"] - base["pdr"]) / base["pdr"]
        dpow = (abs(atk["mean_power_mw"] - base["mean_power_mw"])
                / base["mean_power_mw"])
        if dpdr > 0.02:
            failures.append(f"seed {seed}: pdr moved {dpdr:.2%}")
        if dpow > 0.05:
            failures.append(f"seed {seed}: power moved {dpow:.2%}")
    ok = _report(f"criterion 2 [{of} level {level}]", not failures,
                 "; ".join(failures))
    assert ok, failures


# -- criterion 3: level-3 collapse ------------------------------------------

@pytest.mark.parametrize("of", ("of0", "mrhof"))
def test_criterion_3_level3_collapse(grid, of):
    failures = []
    for seed in SEEDS:
        base = grid[(of, 3, False, seed)]
        atk = grid[(of, 3, True, seed)]
        starving = atk["neighborhood"]
        fed = {n: atk["delivered_late"].get(n, 0) for n in starving}
        if any(fed.values()):
            failures.append(f"seed {seed}: post-attack deliveries {fed}")
        post = [pdr for (at, pdr) in atk["samples"] if at >= us(180)]
        if not all(b < a for a, b in zip(post, post[1:])):
            failures.append(f"seed {seed}: cumulative pdr not strictly decreasing")
        if atk["resets"] < 2 * base["resets"]:
            failures.append(
                f"seed {seed}: resets {atk['resets']} < 2x baseline {base['resets']}")
    ok = _report(f"criterion 3 [{of}]", not failures, "; ".join(failures))
    assert ok, failures


# -- criterion 4: the secure objective stays stable under the level-3 attack --

def test_criterion_4_secof_stability(grid):
    failures = []
    for seed in SEEDS:
        base = grid[("secof", 3, False, seed)]
        atk = grid[("secof", 3, True, seed)]
        if atk["pdr"] < 0.99 * base["pdr"]:
            failures.append(
                f"seed {seed}: pdr {atk['pdr']:.4f} below 99% of {base['pdr']:.4f}")
        if atk["resets"] > 1.05 * base["resets"]:
            failures.append(
                f"seed {seed}: resets {atk['resets']} above 105% of {base['resets']}")
    ok = _report("criterion 4 [secof level-3 stability]", not failures,
                 "; ".join(failures))
    assert ok, failures


# -- criterion 5: per-node power ordering on the small topology --------------

def test_criterion_5_power_ordering(small):
    failures = []
    for seed in SEEDS:
        for of in ("of0", "mrhof"):
            p = small[(of, seed)]["node_power"]
            hot = sum(p[n] for n in (8, 9, 10)) / 3
            cold = sum(p[n] for n in (2, 3, 4)) / 3
            if hot < 1.5 * cold:
                failures.append(f"seed {seed} {of}: ratio {hot / cold:.2f} < 1.5")
        p = small[("secof", seed)]["node_power"]
        values = [p[n] for n in range(2, 11)]
        spread = max(values) / min(values)
        if spread > 1.25:
            failures.append(f"seed {seed} secof: spread {spread:.2f} > 1.25")
    ok = _report("criterion 5 [small11 power ordering]", not failures,
                 "; ".join(failures))
    assert ok, failures


# -- criterion 6: loop freedom ------------------------------------------------

def test_criterion_6_secof_loop_freedom(grid):
    failures = []
    for level in LEVELS:
        for seed in SEEDS:
            for attack in (False, True):
                rec = grid[("secof", level, attack, seed)]
                if rec["cycles_total"]:
                    failures.append(
                        f"level {level} seed {seed} attack={attack}: "
                        f"{rec['cycles_total']} cycles")
    # randomized topologies, restricted mode active from 60 s
    rng = random.Random(2024)
    ran = 0
    for batch_seed in range(1, 1001):
        level_order = [3, 2, 1]
        rng.shuffle(level_order)
        rec = None
        for level in level_order:
            try:
                rec = _run(topology="random", random_n=19, of="secof",
                           seed=batch_seed, attacker_level=level,
                           attack_enabled=True, horizon_s=360.0)
                break
            except Exception:
                continue
        if rec is None:
            rec = _run(topology="random", random_n=19, of="secof",
                       seed=batch_seed, horizon_s=360.0)
        ran += 1
        if rec["cycles_total"]:
            failures.append(f"random seed {batch_seed}: {rec['cycles_total']} cycles")
    ok = _report("criterion 6a [secof loop freedom]", not failures,
                 f"{ran} randomized runs; " + "; ".join(failures))
    assert ok, failures


def test_criterion_6_standard_ofs_do_loop(grid):
    failures = []
    for of in ("of0", "mrhof"):
        for seed in SEEDS:
            rec = grid[(of, 3, True, seed)]
            if rec["cycles_post_attack"] < 1:
                failures.append(f"{of} seed {seed}: no post-attack cycle")
    ok = _report("criterion 6b [of0/mrhof level-3 loops]", not failures,
                 "; ".join(failures))
    assert ok, failures


# -- criterion 7: link-estimator oracle ---------------------------------------

def test_criterion_7_ewma_oracle():
    getcontext().prec = 50
    r = random.Random(7)
    checked = 0
    worst = Decimal(0)
    while checked < 100_000:
        start = r.uniform(1.0, 5.0)
        est = EtxEstimator(start)
        exact = Decimal(repr(start))
        for _ in range(r.randrange(20, 120)):
            p = r.randrange(1, 6)
            got = est.update(p)
            exact = (exact * 90 + Decimal(p) * 10) / 100
            diff = abs(Decimal(repr(got)) - exact)
            worst = max(worst, diff)
            assert 1.0 <= got <= 5.0, "estimate left [1, 5]"
            checked += 1
    ok = worst <= Decimal("1e-9")
    _report("criterion 7 [ewma oracle]",
            ok, f"{checked} updates, worst drift {worst:.2E}")
    assert ok


# -- criterion 8: determinism ---------------------------------------------------


def test_criterion_8_determinism(tmp_path):
    def once(seed, tag):
        cfg = ScenarioConfig(topology="small11", of="mrhof", seed=seed,
                             horizon_s=600.0, attack_enabled=True,
                             attacker_level=3,
                             out_prefix=str(tmp_path / tag))
        sim, _, paths = run_scenario(cfg, keep_trace=True)
        return sim.engine.trace_hash(), paths

    h1, p1 = once(1, "a")
    h2, p2 = once(1, "b")
    h3, _ = once(2, "c")
    same_csv = all(
        open(p1[k], "rb").read() == open(p2[k], "rb").read() for k in p1)
    ok = (h1 == h2) and same_csv and (h1 != h3)
    _report("criterion 8 [determinism]", ok,
            f"trace match={h1 == h2} csv match={same_csv} seeds differ={h1 != h3}")
    assert ok


# -- criterion 9: timer conformance ---------------------------------------------

def test_criterion_9_trickle_conformance():
    eng = Engine()
    params = TrickleParams(imin_us=us(4), doublings=4, k=3)
    fires = []
    tr = Trickle(eng, RngStreams(3).stream("trickle:x"), params, "x",
                 lambda c: fires.append((eng.now, c)))
    tr.start()
    observed = []
    t = 0
    for _ in range(7):
        observed.append(tr.interval)
        t += tr.interval
        eng.run_until(t)
    doubling_ok = observed == [us(4), us(8), us(16), us(32), us(64), us(64), us(64)]
    tr.reset()
    reset_ok = tr.interval == params.imin_us
    # one fire per interval, inside [I/2, I), counter reported at fire time
    start = eng.now
    fires.clear()
    eng.run_until(start + us(4))
    window_ok = (len(fires) == 1
                 and start + us(2) <= fires[0][0] < start + us(4))
    ok = doubling_ok and reset_ok and window_ok
    _report("criterion 9 [trickle conformance]", ok,
            f"doubling={doubling_ok} reset={reset_ok} fire-window={window_ok}")
    assert ok
