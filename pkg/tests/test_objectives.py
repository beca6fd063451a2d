import random

from rplsim.objectives import (
    HOP_CLAUSE_EQ, HOP_CLAUSE_LEQ, MODE_NORMAL, MODE_RESTRICTED,
    ParentCandidate, SecofParams, guard_ok, mrhof_select, of0_select,
    rank_increase, secof_mode, secof_select, OF0, MRHOF,
)
from rplsim.engine import us


def cand(node, rank, etx=2.0, frozen=None):
    return ParentCandidate(node=node, advertised_rank=rank, etx=etx,
                           frozen_hop=frozen)


# -- OF0 -----------------------------------------------------------------

def test_of0_picks_strict_minimum():
    assert of0_select([cand(1, 256.0), cand(2, 258.0)]) == 1


def test_of0_empty_set_yields_none():
    assert of0_select([]) is None
    assert of0_select([cand(2, float("inf"))]) is None


def test_of0_always_chases_the_minimum_even_away_from_current():
    chosen = of0_select([cand(3, 257.0), cand(9, 259.0)], current=9)
    assert chosen == 3


def test_of0_ties_break_to_lowest_id():
    assert of0_select([cand(7, 257.0), cand(4, 257.0)]) == 4


def test_of0_argmin_invariant_under_monotone_transforms():
    r = random.Random(11)
    for _ in range(200):
        cands = [cand(i, r.uniform(256, 1024)) for i in range(1, 8)]
        base = of0_select(cands)
        scaled = [cand(c.node, 3.0 * c.advertised_rank + 17.0) for c in cands]
        assert of0_select(scaled) == base


# -- MRHOF ---------------------------------------------------------------

def test_mrhof_first_attach_takes_minimum_path():
    assert mrhof_select([cand(5, 257.5, etx=0.0 + 2.0),
                         cand(6, 262.0, etx=2.0)], None, alpha=0.5) == 5


def test_mrhof_keeps_current_inside_hysteresis():
    # current path 300, alternative 290: improvement 10 < alpha 16
    cands = [cand(1, 288.0, etx=2.0), cand(2, 298.0, etx=2.0)]
    assert mrhof_select(cands, current=2, alpha=16.0) == 2


def test_mrhof_switches_beyond_hysteresis():
    cands = [cand(1, 278.0, etx=2.0), cand(2, 298.0, etx=2.0)]
    assert mrhof_select(cands, current=2, alpha=16.0) == 1


def test_mrhof_zero_churn_when_no_candidate_clears_alpha():
    r = random.Random(23)
    current = 5
    cur_path = 300.0
    for _ in range(500):
        others = [cand(i, cur_path - r.uniform(0.0, 0.5) - 2.0, etx=2.0)
                  for i in range(1, 5)]
        cands = others + [cand(current, cur_path - 2.0, etx=2.0)]
        assert mrhof_select(cands, current, alpha=0.5) == current


def test_mrhof_equal_paths_keep_current():
    cands = [cand(1, 260.0, etx=2.0), cand(2, 260.0, etx=2.0)]
    assert mrhof_select(cands, current=2, alpha=0.5) == 2


# -- secure OF -------------------------------------------------------------

def secof(alpha=0.5, clause=HOP_CLAUSE_EQ, guard=True):
    return SecofParams(alpha=alpha, hop_clause=clause, rank_guard=guard)


def test_secof_normal_mode_is_mrhof():
    cands = [cand(1, 278.0, etx=2.0, frozen=9), cand(2, 298.0, etx=2.0, frozen=1)]
    assert (secof_select(cands, 2, secof(alpha=16.0), MODE_NORMAL)
            == mrhof_select(cands, 2, 16.0))


def test_secof_normal_mode_matches_mrhof_on_random_inputs():
    r = random.Random(31)
    params = secof(alpha=0.5)
    for _ in range(500):
        cands = [cand(i, r.uniform(256, 300), etx=r.uniform(1, 5),
                      frozen=r.choice([None, 1, 2, 3]))
                 for i in range(1, r.randrange(2, 9))]
        current = r.choice([None] + [c.node for c in cands])
        assert (secof_select(cands, current, params, MODE_NORMAL)
                == mrhof_select(cands, current, 0.5))


def test_secof_rejects_deeper_frozen_hop():
    # candidate at a deeper frozen level than the current parent never wins
    cands = [cand(1, 257.0, etx=2.0, frozen=3), cand(2, 278.0, etx=2.0, frozen=2)]
    for clause in (HOP_CLAUSE_EQ, HOP_CLAUSE_LEQ):
        got = secof_select(cands, 2, secof(clause=clause, guard=False),
                           MODE_RESTRICTED)
        assert got == 2


def test_secof_switches_at_same_frozen_level_without_guard():
    # path 258.5 vs current 280 at the same frozen level
    cands = [cand(1, 256.5, etx=2.0, frozen=3), cand(2, 278.0, etx=2.0, frozen=3)]
    got = secof_select(cands, 2, secof(guard=False), MODE_RESTRICTED)
    assert got == 1


def test_secof_rank_guard_rejects_impossibly_low_rank():
    # a frozen hop of 3 cannot honestly advertise below 259
    cands = [cand(1, 256.5, etx=2.0, frozen=3), cand(2, 278.0, etx=2.0, frozen=3)]
    got = secof_select(cands, 2, secof(guard=True), MODE_RESTRICTED)
    assert got == 2


def test_secof_level3_liar_never_wins():
    # attacker claims 257 but froze at hop 3; current parent froze at hop 2
    cands = [cand(51, 257.0, etx=2.0, frozen=3), cand(2, 280.0, etx=2.0, frozen=2)]
    assert secof_select(cands, 2, secof(), MODE_RESTRICTED) == 2


def test_secof_unknown_frozen_hop_is_ineligible():
    cands = [cand(1, 257.0, etx=2.0, frozen=None)]
    assert secof_select(cands, None, secof(), MODE_RESTRICTED) is None


def test_secof_bootstrap_prefers_shallower_levels():
    cands = [cand(1, 262.0, etx=2.0, frozen=2), cand(2, 259.5, etx=2.0, frozen=3)]
    got = secof_select(cands, None, secof(), MODE_RESTRICTED, own_frozen_hop=3)
    assert got == 1


def test_secof_bootstrap_widens_when_no_shallower_candidate():
    cands = [cand(2, 261.0, etx=2.0, frozen=3)]
    got = secof_select(cands, None, secof(), MODE_RESTRICTED, own_frozen_hop=3)
    assert got == 2


def test_secof_leq_clause_admits_shallower_candidates():
    cands = [cand(1, 264.0, etx=2.0, frozen=1), cand(2, 278.0, etx=2.0, frozen=2)]
    assert secof_select(cands, 2, secof(clause=HOP_CLAUSE_LEQ),
                        MODE_RESTRICTED) == 1
    assert secof_select(cands, 2, secof(clause=HOP_CLAUSE_EQ),
                        MODE_RESTRICTED) == 2


def test_guard_boundary_is_inclusive():
    assert guard_ok(cand(1, 259.0, frozen=3), secof())
    assert not guard_ok(cand(1, 258.99, frozen=3), secof())
    assert guard_ok(cand(1, 0.0, frozen=None), secof())


# -- mode switch -----------------------------------------------------------

def test_mode_boundary_is_half_open():
    dur = us(60)
    assert secof_mode(0, dur) == MODE_NORMAL
    assert secof_mode(dur - 1, dur) == MODE_NORMAL
    assert secof_mode(dur, dur) == MODE_RESTRICTED
    assert secof_mode(us(120), dur) == MODE_RESTRICTED


# -- rank increase -----------------------------------------------------------

def test_rank_increase_per_objective():
    assert rank_increase(MRHOF, 256.0, 1.0) == 257.0
    assert rank_increase(MRHOF, 257.0, 2.0) == 259.0
    assert rank_increase(OF0, 256.0, 1.7) == 512.0
    assert rank_increase(OF0, float("inf"), 1.0) == float("inf")
