"""Model assembly and depth-first branch and bound.

A model wires the propagators for one of the named configurations over a
cost matrix; solve() drives binary decisions from one of five branching
heuristics, either proving a bound or optimizing by tightening the cap
after every improving path.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .costs import (HeldKarpPropagator, HungarianPropagator, Objective,
                    TrivialObjectivePropagator)
from .kernel import Contradiction, GraphVar, Scheduler
from .structural import (AllDifferentPropagator, ArborescencePropagator,
                         DegreePropagator, NoCyclePropagator,
                         PositionPropagator, ReducedPathPropagator)

MODELS = ("BASIC", "ARB", "POS", "AD", "BST", "ALL")
RELAXATIONS = ("tree", "map", "both")
HEURISTICS = ("removeMaxRC", "enforceMaxRC", "removeMaxMC",
              "sparse", "enforceSparse")


class Model:
    """A graph variable plus the propagators of one configuration."""

    def __init__(self, n, s, e, C, model="ALL", relax="tree",
                 door_rules=True):
        model = model.upper()
        if model not in MODELS:
            raise ValueError(f"unknown model {model!r}")
        if relax not in RELAXATIONS:
            raise ValueError(f"unknown relaxation {relax!r}")
        self.model_name = model
        self.relax = relax
        self.C = np.asarray(C, dtype=float)
        arcs = [(u, v) for u in range(n) for v in range(n)
                if u != v and np.isfinite(self.C[u, v])]
        self.gv = GraphVar(n, s, e, arcs)
        self.scheduler = Scheduler(self.gv)
        self.obj = Objective(self.gv)
        gv = self.gv

        reg = self.scheduler.register
        reg(DegreePropagator(gv))
        reg(NoCyclePropagator(gv))
        reg(TrivialObjectivePropagator(gv, self.C, self.obj))
        self.rp = None
        if model in ("BST", "ALL"):
            self.rp = ReducedPathPropagator(gv, door_rules=door_rules)
            reg(self.rp)
        if model in ("ARB", "ALL"):
            reg(ArborescencePropagator(gv, reverse=False))
            reg(ArborescencePropagator(gv, reverse=True))
        if model in ("AD", "ALL"):
            reg(AllDifferentPropagator(gv))
        if model in ("POS", "ALL"):
            reg(PositionPropagator(gv, reduced=self.rp))
        self.hk = None
        if relax in ("tree", "both"):
            self.hk = HeldKarpPropagator(gv, self.C, self.obj, mode="mst")
            reg(self.hk)
            if model in ("BST", "ALL"):
                reg(HeldKarpPropagator(gv, self.C, self.obj, mode="bst",
                                       reduced=self.rp))
        if relax in ("map", "both"):
            reg(HungarianPropagator(gv, self.C, self.obj))

    def root_propagate(self):
        self.scheduler.schedule_all()
        self.scheduler.run_fixpoint()

    def path_cost(self, path):
        return int(round(sum(self.C[u, v] for u, v in zip(path, path[1:]))))

    def extract_path(self):
        gv = self.gv
        path = [gv.s]
        seen = {gv.s}
        u = gv.s
        while u != gv.e:
            (u,) = gv.msucc[u]
            if u in seen:
                raise AssertionError("instantiated graph loops")
            seen.add(u)
            path.append(u)
        if len(path) != gv.n:
            raise AssertionError("instantiated graph misses nodes")
        return path


# -- decisions -------------------------------------------------------------------


def _apply_decision(gv, dec):
    kind = dec[0]
    if kind == "enforce":
        gv.enforce_arc(dec[1], dec[2])
    elif kind == "remove":
        gv.remove_arc(dec[1], dec[2])
    else:
        u, drop = dec[1], dec[2]
        for v in drop:
            gv.remove_arc(u, v)


def _negate(dec):
    kind = dec[0]
    if kind == "enforce":
        return ("remove", dec[1], dec[2])
    if kind == "remove":
        return ("enforce", dec[1], dec[2])
    _, u, drop, keep = dec
    return ("restrict", u, keep, drop)


# -- branching heuristics -----------------------------------------------------------


def _tree_arc_scores(m):
    """(tree_arcs, marginals): replacement costs on realized tree arcs and
    insertion marginals on the rest, from the last Lagrangian analysis."""
    hk = m.hk
    if hk is None or hk.last_analysis is None:
        return None, None
    tree = hk.last_analysis
    gv = m.gv
    arcs = {}
    S = None
    maxpath = None
    repl = None
    from .costs import _tree_swap_tables, effective_costs
    E, S = effective_costs(gv, m.C, hk.pi_out, hk.pi_in)
    maxpath, repl = _tree_swap_tables(tree, S)
    for i, (a, b, w, mand) in enumerate(tree.edges):
        if mand:
            continue
        ra, rb = tree.realized[i]
        if gv.has_arc(ra, rb) and not gv.has_mandatory(ra, rb):
            arcs[(ra, rb)] = repl[i] - w
    marg = hk.last_marginals or {}
    return arcs, marg


def _sparse_pick(m, always_enforce):
    gv = m.gv
    hk = m.hk
    marg = hk.last_marginals if hk is not None else None

    def score(u, v):
        # smaller is better: estimated extra cost of the arc; realized
        # tree arcs carry no marginal and count as free
        if marg is not None:
            return float(marg.get((u, v), m.obj.lb)) - float(m.obj.lb)
        row = gv.succ[u]
        return float(m.C[u, v] - min(m.C[u, w] for w in row))

    cands = [u for u in range(gv.n)
             if u != gv.e and not gv.msucc[u]]
    if not cands:
        return None
    k_min = min(len(gv.succ[u]) for u in cands)
    best_u = None
    best_sum = None
    for u in cands:
        if len(gv.succ[u]) != k_min:
            continue
        s = sum(score(u, v) for v in gv.succ[u])
        if best_sum is None or s > best_sum:
            best_sum = s
            best_u = u
    u = best_u
    succs = sorted(gv.succ[u], key=lambda v: (score(u, v), v))
    if always_enforce or len(succs) <= 2:
        return ("enforce", u, succs[0])
    half = math.ceil(len(succs) / 2)
    keep = succs[:half]
    drop = sorted(v for v in succs[half:])
    return ("restrict", u, drop, sorted(keep))


def choose_decision(m, heuristic):
    gv = m.gv
    dec = None
    if heuristic in ("removeMaxRC", "enforceMaxRC"):
        arcs, _ = _tree_arc_scores(m)
        if arcs:
            (u, v), _ = max(arcs.items(), key=lambda kv: (kv[1], -kv[0][0], -kv[0][1]))
            dec = ("remove", u, v) if heuristic == "removeMaxRC" \
                else ("enforce", u, v)
    elif heuristic == "removeMaxMC":
        _, marg = _tree_arc_scores(m)
        if marg:
            live = {a: c for a, c in marg.items()
                    if gv.has_arc(*a) and not gv.has_mandatory(*a)}
            if live:
                (u, v), _ = max(live.items(),
                                key=lambda kv: (kv[1], -kv[0][0], -kv[0][1]))
                dec = ("remove", u, v)
    elif heuristic == "sparse":
        dec = _sparse_pick(m, always_enforce=False)
    elif heuristic == "enforceSparse":
        dec = _sparse_pick(m, always_enforce=True)
    else:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    if dec is None:
        # fall back on the first undecided arc
        for u, v in gv.arcs():
            if not gv.has_mandatory(u, v):
                return ("enforce", u, v)
        return None
    return dec


# -- search ---------------------------------------------------------------------


@dataclass
class SearchResult:
    status: str
    best_cost: int | None
    best_path: list | None
    nodes: int
    time_s: float
    lb: int | None = None
    stats: dict = field(default_factory=dict)


def solve(m, heuristic="enforceSparse", prove_ub=None, time_limit=None,
          clock=time.monotonic):
    """Run the branch and bound on a prepared model.

    prove_ub switches to decision mode: stop at the first path of cost at
    most prove_ub ("proven"), or exhaust the tree ("infeasible").  Without
    it the search optimizes: each path caps the objective at cost - 1 and
    the last path found is optimal.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    gv = m.gv
    t0 = clock()
    deadline = None if time_limit is None else t0 + time_limit
    best_cost = None
    best_path = None
    nodes = 1
    status = None
    if prove_ub is not None:
        m.obj.ub = int(prove_ub)

    def finish(st):
        per_prop = {p.name: dict(p.stats) for p in m.scheduler.props}
        return SearchResult(st, best_cost, best_path, nodes,
                            clock() - t0, lb=m.obj.lb, stats=per_prop)

    try:
        m.root_propagate()
    except Contradiction:
        return finish("infeasible")

    stack = []          # pending alternative per open level, None if spent
    advance = True
    while True:
        if deadline is not None and nodes % 64 == 0 and clock() > deadline:
            return finish("limit")
        if advance:
            if gv.is_instantiated():
                path = m.extract_path()
                cost = m.path_cost(path)
                best_cost, best_path = cost, path
                if prove_ub is not None:
                    return finish("proven")
                # cap future paths below this one; the current leaf is a
                # dead end either way, so skip the consistency check
                m.obj.ub = cost - 1
                advance = False
                continue
            dec = choose_decision(m, heuristic)
            if dec is None:
                advance = False
                continue
            stack.append(_negate(dec))
            gv.push_world()
            nodes += 1
            try:
                _apply_decision(gv, dec)
                m.scheduler.run_fixpoint()
            except Contradiction:
                advance = False
        else:
            while stack and stack[-1] is None:
                stack.pop()
                gv.pop_world()
            if not stack:
                if best_cost is not None:
                    return finish("optimal")
                return finish("infeasible")
            alt = stack.pop()
            gv.pop_world()
            stack.append(None)
            gv.push_world()
            nodes += 1
            try:
                _apply_decision(gv, alt)
                m.scheduler.run_fixpoint()
                advance = True
            except Contradiction:
                advance = False
