"""Cost relaxation tests: tree bounds, block-tree bounds, swap filtering,
the subgradient propagator, and the assignment propagator."""

import itertools
import math
import random

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from hampath.costs import (
    HeldKarpPropagator,
    HungarianPropagator,
    Objective,
    bst_build,
    bst_filter,
    effective_costs,
    lb_trivial,
    mst_kruskal,
    mst_prim,
    wst_filter,
)
from hampath.kernel import Contradiction, GraphVar, Scheduler
from hampath.oracle import dp_oracle
from hampath.structural import DegreePropagator, ReducedPathPropagator

import figures as fig
import oracles


def gv_of(arcs, n=fig.N, s=fig.S, e=fig.E):
    return GraphVar(n, s, e, sorted(arcs))


def with_order(arcs):
    """GraphVar plus an established block order for the base graph."""
    gv = gv_of(fig.arc_set(arcs))
    sched = Scheduler(gv)
    rp = ReducedPathPropagator(gv, door_rules=False)
    sched.register(rp)
    sched.schedule_all()
    sched.run_fixpoint()
    assert rp.path_order is not None
    return gv, rp


def random_instance(rng, n, density=0.75):
    s, e = 0, n - 1
    C = {}
    for u in range(n):
        for v in range(n):
            if u != v and v != s and u != e and rng.random() < density:
                C[(u, v)] = rng.randint(1, 30)
    mid = list(range(1, n - 1))
    rng.shuffle(mid)
    spine = [s] + mid + [e]
    for a, b in zip(spine, spine[1:]):
        C.setdefault((a, b), rng.randint(1, 30))
    M = np.full((n, n), float("inf"))
    for (u, v), w in C.items():
        M[u, v] = float(w)
    return C, M, s, e


# -- seven-node regression --------------------------------------------------------


def test_mst_totals_match_on_base_graph():
    gv = gv_of(fig.arc_set(fig.BASE7))
    C = fig.cost_matrix(fig.BASE7)
    E, S = effective_costs(gv, C)
    tp, _ = mst_prim(gv, E, S)
    tk, _ = mst_kruskal(gv, S)
    assert tp == tk == fig.BASE7_MST
    edges = [(a, b, S[a, b]) for a in range(fig.N) for b in range(a + 1, fig.N)
             if np.isfinite(S[a, b])]
    assert oracles.min_spanning_tree_brute(fig.N, edges) == fig.BASE7_MST


def test_block_tree_reproduces_stated_numbers():
    gv, rp = with_order(fig.BASE7)
    C = fig.cost_matrix(fig.BASE7)
    E, _ = effective_costs(gv, C)
    bst = bst_build(gv, E, rp.state, rp.path_order)
    assert bst.total == fig.BASE7_BST
    per_block = [0.0 if bst.block_trees[x] is None else bst.block_trees[x].total
                 for x in rp.path_order]
    assert per_block == [0.0, 10.0, 10.0, 0.0]
    assert [(c, u, v) for (c, u, v, _) in bst.connectors] == \
        [(2.0, 0, 1), (3.0, 2, 3), (2.0, 5, 6)]
    # the straight tree bound is weaker on this graph
    assert fig.BASE7_MST <= fig.BASE7_BST


def test_block_tree_filter_prunes_the_two_costly_arcs():
    gv, rp = with_order(fig.BASE7)
    C = fig.cost_matrix(fig.BASE7)
    E, _ = effective_costs(gv, C)
    bst = bst_build(gv, E, rp.state, rp.path_order)
    removed, enforced = bst_filter(gv, bst, E, ub=fig.BASE7_OPT)
    assert set(removed) == {(1, 4), (4, 6)}
    assert gv.has_arc(2, 4) and gv.has_arc(4, 3)
    # (5, 6) is the sole survivor of its cut once (4, 6) dies
    assert (5, 6) in enforced


def test_block_tree_filter_boundary_at_one_below():
    # the marginal of the in-block arc (4, 3) is exactly 28: kept at ub 28,
    # gone at ub 27
    gv, rp = with_order(fig.BASE7)
    C = fig.cost_matrix(fig.BASE7)
    E, _ = effective_costs(gv, C)
    bst = bst_build(gv, E, rp.state, rp.path_order)
    removed, _ = bst_filter(gv, bst, E, ub=fig.BASE7_OPT - 1)
    assert (4, 3) in removed


def test_plain_tree_filter_prunes_nothing_here():
    gv = gv_of(fig.arc_set(fig.BASE7))
    C = fig.cost_matrix(fig.BASE7)
    E, S = effective_costs(gv, C)
    total, edges = mst_kruskal(gv, S)
    from hampath.costs import TreeAnalysis
    tree = TreeAnalysis(list(range(fig.N)), edges, E)
    assert tree.total == fig.BASE7_MST
    removed, enforced, _ = wst_filter(gv, tree, E, ub=fig.BASE7_OPT)
    # the weaker bound removes nothing; it does notice that the cut around
    # the start node has a single crossing and pins it
    assert removed == []
    assert enforced == [(0, 1)]


def test_optimum_of_base_graph():
    C = fig.cost_matrix(fig.BASE7)
    cost, path = dp_oracle(C, fig.S, fig.E)
    assert cost == fig.BASE7_OPT
    assert tuple(path) == fig.BASE7_OPT_PATH
    costs = sorted(
        sum(fig.BASE7[a] for a in zip(seq, seq[1:]))
        for seq in oracles.ham_paths(fig.N, fig.S, fig.E,
                                     lambda a, b: (a, b) in fig.BASE7))
    assert costs == [28, 29]


# -- randomized tree equivalences --------------------------------------------------


def test_prim_equals_kruskal_equals_brute():
    rng = random.Random(5)
    for _ in range(80):
        n = rng.randint(4, 7)
        _, M, s, e = random_instance(rng, n, density=0.8)
        gv = GraphVar(n, s, e,
                      [(u, v) for u in range(n) for v in range(n)
                       if np.isfinite(M[u, v])])
        # force a couple of mandatory arcs, keeping them a matching
        live = sorted(gv.arcs())
        picked = []
        for (u, v) in rng.sample(live, min(2, len(live))):
            if all(u not in p and v not in p for p in picked):
                gv.enforce_arc(u, v)
                picked.append((u, v))
        E, S = effective_costs(gv, M)
        try:
            tp, _ = mst_prim(gv, E, S)
        except Contradiction:
            tp = None
        try:
            tk, _ = mst_kruskal(gv, S)
        except Contradiction:
            tk = None
        forced = [(min(u, v), max(u, v)) for (u, v) in gv.mandatory_arcs()]
        edges = [(a, b, S[a, b]) for a in range(n) for b in range(a + 1, n)
                 if np.isfinite(S[a, b])]
        tb = oracles.min_spanning_tree_brute(n, edges, forced=forced)
        assert (tp is None) == (tb is None) == (tk is None)
        if tb is not None:
            assert abs(tp - tb) < 1e-9 and abs(tk - tb) < 1e-9


def _paths_within(C_dict, n, s, e, ub):
    sets = []
    for seq in oracles.ham_paths(n, s, e, lambda a, b: (a, b) in C_dict):
        cost = sum(C_dict[a] for a in zip(seq, seq[1:]))
        if cost <= ub:
            sets.append(set(zip(seq, seq[1:])))
    return sets


def test_tree_filter_soundness_randomized():
    rng = random.Random(9)
    tried = 0
    for _ in range(60):
        n = rng.randint(5, 8)
        C, M, s, e = random_instance(rng, n)
        opt, _ = oracles.min_ham_path(n, s, e, lambda u, v: C.get((u, v)))
        if opt is None:
            continue
        tried += 1
        gv = GraphVar(n, s, e, sorted(C))
        E, S = effective_costs(gv, M)
        total, edges = mst_kruskal(gv, S)
        from hampath.costs import TreeAnalysis
        tree = TreeAnalysis(list(range(n)), edges, E)
        before = set(gv.arcs())
        removed, enforced, _ = wst_filter(gv, tree, E, ub=float(opt))
        ok_sets = _paths_within(C, n, s, e, opt)
        assert ok_sets, "optimum path must survive its own bound"
        union = set.union(*ok_sets)
        inter = set.intersection(*ok_sets)
        assert not (set(removed) & union)
        assert set(enforced) <= inter
        assert set(gv.arcs()) == before - set(removed)
    assert tried >= 30


def test_block_tree_filter_soundness_randomized():
    rng = random.Random(13)
    tried = 0
    for _ in range(80):
        n = rng.randint(6, 8)
        C, M, s, e = random_instance(rng, n, density=0.45)
        opt, _ = oracles.min_ham_path(n, s, e, lambda u, v: C.get((u, v)))
        if opt is None:
            continue
        gv = GraphVar(n, s, e, sorted(C))
        sched = Scheduler(gv)
        rp = ReducedPathPropagator(gv, door_rules=False)
        sched.register(rp)
        sched.schedule_all()
        try:
            sched.run_fixpoint()
        except Contradiction:
            pytest.fail("walk failed although a Hamiltonian path exists")
        if rp.path_order is None or len(rp.path_order) < 3:
            continue
        tried += 1
        live = {(u, v): C[(u, v)] for (u, v) in gv.arcs()}
        E, _ = effective_costs(gv, M)
        bst = bst_build(gv, E, rp.state, rp.path_order)
        assert bst.total <= opt + 1e-9
        removed, enforced = bst_filter(gv, bst, E, ub=float(opt))
        ok_sets = _paths_within(live, n, s, e, opt)
        assert ok_sets
        union = set.union(*ok_sets)
        inter = set.intersection(*ok_sets)
        assert not (set(removed) & union)
        assert set(enforced) <= inter
    assert tried >= 15


# -- subgradient propagator ---------------------------------------------------------


def test_subgradient_bound_below_optimum():
    rng = random.Random(21)
    for _ in range(40):
        n = rng.randint(5, 8)
        C, M, s, e = random_instance(rng, n)
        opt, _ = oracles.min_ham_path(n, s, e, lambda u, v: C.get((u, v)))
        if opt is None:
            continue
        gv = GraphVar(n, s, e, sorted(C))
        _, S0 = effective_costs(gv, M)
        mst0, _ = mst_kruskal(gv, S0)
        sched = Scheduler(gv)
        obj = Objective(gv)
        obj.set_ub(int(opt))
        hk = HeldKarpPropagator(gv, M, obj)
        dg = DegreePropagator(gv)
        for p in (dg, hk):
            sched.register(p)
        sched.schedule_all()
        try:
            sched.run_fixpoint()
        except Contradiction:
            pytest.fail("bound propagation failed with ub = optimum")
        assert obj.lb <= opt
        assert hk.best_lb <= opt + 1e-9
        # the very first multiplier iterate is all zeros, whose tree is the
        # plain spanning tree, so the reported bound can never fall below it
        assert obj.lb >= int(math.ceil(mst0 - 1e-9))


def test_subgradient_survives_backtracking():
    rng = random.Random(33)
    n = 7
    C, M, s, e = random_instance(rng, n)
    gv = GraphVar(n, s, e, sorted(C))
    sched = Scheduler(gv)
    obj = Objective(gv)
    hk = HeldKarpPropagator(gv, M, obj)
    sched.register(hk)
    sched.schedule_all()
    sched.run_fixpoint()
    lb_root = obj.lb
    opt, _ = oracles.min_ham_path(n, s, e, lambda u, v: C.get((u, v)))
    assert opt is not None and lb_root <= opt

    live = [a for a in sorted(gv.arcs()) if not gv.has_mandatory(*a)]
    for (u, v) in live[:4]:
        gv.push_world()
        try:
            gv.remove_arc(u, v)
            sched.schedule_all()
            sched.run_fixpoint()
            sub, _ = oracles.min_ham_path(
                n, s, e,
                lambda a, b: C.get((a, b)) if (a, b) != (u, v) else None)
            if sub is not None:
                assert obj.lb <= sub
        except Contradiction:
            pass
        gv.pop_world()
        sched.clear()
        assert obj.lb == lb_root   # the floor is trailed
        sched.schedule_all()
        sched.run_fixpoint()       # multipliers persist, bound stays sound
        assert obj.lb <= opt


# -- assignment propagator ------------------------------------------------------------


def _assignment_cost_scipy(gv, M):
    rows = [u for u in range(gv.n) if u != gv.e]
    cols = [v for v in range(gv.n) if v != gv.s]
    big = 1e15
    Cm = np.full((len(rows), len(cols)), big)
    for i, u in enumerate(rows):
        for j, v in enumerate(cols):
            if gv.has_arc(u, v):
                Cm[i, j] = M[u, v]
    ri, ci = linear_sum_assignment(Cm)
    cost = Cm[ri, ci].sum()
    return None if cost >= big / 2 else float(cost)


def test_assignment_cost_matches_scipy_and_brute():
    rng = random.Random(41)
    checked = 0
    for _ in range(60):
        n = rng.randint(4, 7)
        C, M, s, e = random_instance(rng, n, density=0.6)
        gv = GraphVar(n, s, e, sorted(C))
        obj = Objective(gv)
        hp = HungarianPropagator(gv, M, obj)
        want = _assignment_cost_scipy(gv, M)
        if want is None:
            with pytest.raises(Contradiction):
                hp.propagate()
            continue
        hp.propagate()
        assert obj.lb == int(math.ceil(want - 1e-9))
        left = [u for u in range(n) if u != e]
        right = [v for v in range(n) if v != s]
        brute = oracles.min_assignment_brute(
            left, right,
            lambda u, v: C.get((u, v)) if gv.has_arc(u, v) else None)
        assert abs(want - brute) < 1e-9
        checked += 1
    assert checked >= 25


def test_assignment_repair_after_domain_churn():
    rng = random.Random(55)
    n = 7
    C, M, s, e = random_instance(rng, n, density=0.8)
    gv = GraphVar(n, s, e, sorted(C))
    obj = Objective(gv)
    hp = HungarianPropagator(gv, M, obj)
    hp.propagate()
    for _ in range(40):
        live = [a for a in sorted(gv.arcs()) if not gv.has_mandatory(*a)]
        if not live:
            break
        u, v = live[rng.randrange(len(live))]
        gv.push_world()
        gv.remove_arc(u, v)
        want = _assignment_cost_scipy(gv, M)
        failed = False
        try:
            hp.propagate()
        except Contradiction:
            failed = True
        assert failed == (want is None)
        if not failed:
            cost = sum(hp.Cbase[i, j] for i, j in enumerate(hp.row_match))
            assert abs(cost - want) < 1e-6
        if failed or rng.random() < 0.6:
            gv.pop_world()
            hp.propagate()     # revived arcs must not break the duals
            back = _assignment_cost_scipy(gv, M)
            cost = sum(hp.Cbase[i, j] for i, j in enumerate(hp.row_match))
            assert abs(cost - back) < 1e-6


def test_assignment_filter_soundness():
    rng = random.Random(77)
    tried = 0
    for _ in range(40):
        n = rng.randint(4, 6)
        C, M, s, e = random_instance(rng, n, density=0.8)
        opt, _ = oracles.min_ham_path(n, s, e, lambda u, v: C.get((u, v)))
        if opt is None:
            continue
        tried += 1
        gv = GraphVar(n, s, e, sorted(C))
        obj = Objective(gv)
        obj.set_ub(int(opt))
        hp = HungarianPropagator(gv, M, obj)
        before = set(gv.arcs())
        hp.propagate()
        removed = before - set(gv.arcs())
        left = [u for u in range(n) if u != e]
        right = [v for v in range(n) if v != s]
        for (u, v) in removed:
            # cheapest assignment forced to use (u, v) must already beat ub
            best = None
            for perm in itertools.permutations(right):
                pairs = list(zip(left, perm))
                if (u, v) not in pairs:
                    continue
                if any((a, b) not in before for (a, b) in pairs):
                    continue
                tot = sum(C[(a, b)] for (a, b) in pairs)
                if best is None or tot < best:
                    best = tot
            assert best is None or best > opt
    assert tried >= 20


def test_objective_floor_meets_cap():
    gv = gv_of(fig.arc_set(fig.BASE7))
    obj = Objective(gv)
    obj.set_ub(10)
    with pytest.raises(Contradiction):
        obj.tighten_lb(11)
