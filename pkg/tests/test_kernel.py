"""Kernel tests: domains, trailing, events, scheduler ordering."""

import random

import pytest

from hampath.kernel import (
    ARC_ENFORCED,
    ARC_REMOVED,
    Contradiction,
    GraphVar,
    Propagator,
    Scheduler,
)


def full_arcs(n, s, e):
    return [(u, v) for u in range(n) for v in range(n) if u != v]


def snapshot(gv):
    return (
        tuple(frozenset(x) for x in gv.succ),
        tuple(frozenset(x) for x in gv.msucc),
        gv.n_potential,
        gv.n_mandatory,
        gv.pmask.tobytes(),
    )


class Recorder(Propagator):
    name = "recorder"

    def __init__(self, gv, priority=0, log=None):
        super().__init__(gv)
        self.priority = priority
        self.log = log if log is not None else []
        self.seen = []

    def propagate(self):
        while self.events:
            self.seen.append(self.events.popleft())
        self.log.append(self.name)


def test_initial_domain_filters_endpoint_arcs():
    gv = GraphVar(4, 0, 3, full_arcs(4, 0, 3) + [(1, 1), (2, 0), (3, 1)])
    assert not gv.pred[0], "no arc may enter the start node"
    assert not gv.succ[3], "no arc may leave the end node"
    for u in range(4):
        assert u not in gv.succ[u]
    # 4*3 ordered pairs minus 3 into s minus 3 out of e, the (e,s) pair
    # being counted once in each group
    assert gv.n_potential == 12 - 3 - 3 + 1


def test_remove_and_enforce_semantics():
    gv = GraphVar(4, 0, 3, full_arcs(4, 0, 3))
    assert gv.remove_arc(1, 2) is True
    assert gv.remove_arc(1, 2) is False
    assert not gv.has_arc(1, 2)
    assert gv.enforce_arc(0, 1) is True
    assert gv.enforce_arc(0, 1) is False
    assert gv.has_mandatory(0, 1)
    with pytest.raises(Contradiction):
        gv.remove_arc(0, 1)
    with pytest.raises(Contradiction):
        gv.enforce_arc(1, 2)
    # mandatory stays inside potential
    for u in range(4):
        assert gv.msucc[u] <= gv.succ[u]


def test_instantiation_flag():
    gv = GraphVar(3, 0, 2, [(0, 1), (1, 2), (0, 2)])
    assert not gv.is_instantiated()
    gv.remove_arc(0, 2)
    gv.enforce_arc(0, 1)
    gv.enforce_arc(1, 2)
    assert gv.is_instantiated()


def test_events_exactly_once_fifo():
    gv = GraphVar(4, 0, 3, full_arcs(4, 0, 3))
    a = Recorder(gv)
    b = Recorder(gv)
    gv.subscribe(a)
    gv.subscribe(b)
    gv.remove_arc(1, 2)
    gv.enforce_arc(1, 3)
    gv.remove_arc(1, 2)  # no-op, must not emit
    expected = [(ARC_REMOVED, 1, 2), (ARC_ENFORCED, 1, 3)]
    assert list(a.events) == expected
    assert list(b.events) == expected


def test_push_pop_restores_bit_identical_state():
    rng = random.Random(7)
    gv = GraphVar(6, 0, 5, full_arcs(6, 0, 5))
    stack = []
    for _ in range(300):
        op = rng.random()
        if op < 0.35 and gv.depth < 6:
            stack.append(snapshot(gv))
            gv.push_world()
        elif op < 0.5 and stack:
            gv.pop_world()
            assert snapshot(gv) == stack.pop()
        else:
            u = rng.randrange(6)
            v = rng.randrange(6)
            try:
                if op < 0.8:
                    gv.remove_arc(u, v)
                else:
                    gv.enforce_arc(u, v)
            except Contradiction:
                pass
    while stack:
        gv.pop_world()
        assert snapshot(gv) == stack.pop()


def test_pop_discards_pending_events():
    gv = GraphVar(4, 0, 3, full_arcs(4, 0, 3))
    sched = Scheduler(gv)
    r = Recorder(gv)
    sched.register(r)
    gv.push_world()
    gv.remove_arc(1, 2)
    assert r.events and r.scheduled
    gv.pop_world()
    assert not r.events and not r.scheduled
    assert gv.has_arc(1, 2)


def test_scheduler_priority_and_single_pending():
    gv = GraphVar(4, 0, 3, full_arcs(4, 0, 3))
    sched = Scheduler(gv)
    log = []
    cheap = Recorder(gv, priority=0, log=log)
    cheap.name = "cheap"
    lagr = Recorder(gv, priority=5, log=log)
    lagr.name = "lagrangian"
    # registration order deliberately puts the expensive one first
    sched.register(lagr)
    sched.register(cheap)
    gv.remove_arc(1, 2)
    gv.remove_arc(2, 1)
    assert sum(1 for p in sched._buckets[5] if p is lagr) == 1
    sched.run_fixpoint()
    assert log == ["cheap", "lagrangian"]
    assert cheap.seen == [(ARC_REMOVED, 1, 2), (ARC_REMOVED, 2, 1)]


def test_lagrangian_runs_only_when_queue_otherwise_empty():
    gv = GraphVar(5, 0, 4, full_arcs(5, 0, 4))
    sched = Scheduler(gv)
    log = []

    class Chatty(Recorder):
        # removes more arcs while propagating, re-scheduling everyone
        def propagate(self):
            super().propagate()
            if gv.has_arc(2, 3):
                gv.remove_arc(2, 3)

    cheap = Chatty(gv, priority=0, log=log)
    cheap.name = "cheap"
    lagr = Recorder(gv, priority=5, log=log)
    lagr.name = "lagrangian"
    sched.register(lagr)
    sched.register(cheap)
    gv.remove_arc(1, 2)
    sched.run_fixpoint()
    assert log[-1] == "lagrangian"
    assert log.count("lagrangian") == 1
    assert all(name == "cheap" for name in log[:-1])


def test_contradiction_escapes_fixpoint():
    gv = GraphVar(3, 0, 2, [(0, 1), (1, 2)])
    sched = Scheduler(gv)

    class Moody(Propagator):
        name = "moody"

        def propagate(self):
            self.events.clear()
            self.fail("nope")

    sched.register(Moody(gv))
    gv.remove_arc(0, 1)
    with pytest.raises(Contradiction):
        sched.run_fixpoint()
