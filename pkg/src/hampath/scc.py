"""Strongly connected components and the reduced (condensed) graph.

The reduced state mirrors the potential graph of a GraphVar: an SCC partition
(sccOf plus linked member chains), the condensation adjacency with witness
counts, and per component the list of outgoing cross arcs (outArcs).  Arc
deletions are repaired incrementally: cross deletions only touch witness
counts, intra deletions mark their component dirty and Tarjan is re-run once
per dirty component, restricted to its members.  After a backtrack the state
is stale and callers rebuild from scratch (detected through gv.pop_epoch).
"""

from __future__ import annotations

from .kernel import PreconditionViolation


def tarjan_scc(nodes, succ):
    """Iterative Tarjan over `nodes` using successor callable `succ`.

    Returns a list of components, each a sorted list of nodes, in reverse
    topological discovery order.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        # explicit DFS stack: (node, iterator over its successors)
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                elif w in on_stack:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                comps.append(comp)
    return comps


class ReducedState:
    """SCC partition plus condensation of a GraphVar's potential graph."""

    def __init__(self, gv):
        self.gv = gv
        n = gv.n
        self.scc_of = [0] * n
        self.next_in = [-1] * n        # member chains, ascending node id
        self.canonical = {}            # scc id -> first (smallest) member
        self.size = {}
        self.sccs = set()
        self.radj = {}                 # scc id -> set of successor scc ids
        self.rpred = {}
        self.wit = {}                  # (x, y) -> number of witness arcs
        self.out_arcs = {}             # scc id -> set of cross arcs (u, v)
        self._next_id = 0
        self.pop_epoch = -1
        # instrumentation for the repair complexity contract
        self.last_work = 0
        self.tarjan_runs = 0

    # -- accessors ---------------------------------------------------------

    def nodes_of(self, x):
        out = []
        v = self.canonical[x]
        while v != -1:
            out.append(v)
            v = self.next_in[v]
        return out

    def members(self, x):
        v = self.canonical[x]
        while v != -1:
            yield v
            v = self.next_in[v]

    def partition(self):
        """Id-agnostic snapshot: frozenset of frozensets of nodes."""
        return frozenset(frozenset(self.nodes_of(x)) for x in self.sccs)

    def reduced_arcs(self):
        """Canonical condensation arcs keyed by smallest member node."""
        return frozenset(
            (self.canonical[x], self.canonical[y])
            for x in self.sccs for y in self.radj[x]
        )

    # -- construction ------------------------------------------------------

    def _install_comp(self, comp, scc_id):
        self.sccs.add(scc_id)
        self.canonical[scc_id] = comp[0]
        self.size[scc_id] = len(comp)
        for a, b in zip(comp, comp[1:]):
            self.next_in[a] = b
        self.next_in[comp[-1]] = -1
        for v in comp:
            self.scc_of[v] = scc_id
        self.radj[scc_id] = set()
        self.rpred[scc_id] = set()
        self.out_arcs[scc_id] = set()

    def _scan_out_row(self, x):
        """Recompute out_arcs[x] and x's rows of radj/wit from the graph."""
        for y in self.radj[x]:
            self.rpred[y].discard(x)
            self.wit.pop((x, y), None)
        self.radj[x].clear()
        row = self.out_arcs[x]
        row.clear()
        scc_of = self.scc_of
        gv = self.gv
        work = 0
        for u in self.members(x):
            work += 1
            for v in gv.succ[u]:
                work += 1
                y = scc_of[v]
                if y != x:
                    row.add((u, v))
                    self.wit[(x, y)] = self.wit.get((x, y), 0) + 1
                    self.radj[x].add(y)
                    self.rpred[y].add(x)
        return work

    def _rewit_row(self, p):
        """Refresh p's reduced arcs after head components changed id."""
        for y in self.radj[p]:
            self.rpred[y].discard(p)
            self.wit.pop((p, y), None)
        self.radj[p].clear()
        scc_of = self.scc_of
        work = 0
        for (u, v) in self.out_arcs[p]:
            work += 1
            y = scc_of[v]
            self.wit[(p, y)] = self.wit.get((p, y), 0) + 1
            self.radj[p].add(y)
            self.rpred[y].add(p)
        return work

    def rebuild(self):
        """Full Tarjan pass over the current potential graph."""
        gv = self.gv
        self.sccs.clear()
        self.canonical.clear()
        self.size.clear()
        self.radj.clear()
        self.rpred.clear()
        self.wit.clear()
        self.out_arcs.clear()
        self._next_id = 0
        comps = tarjan_scc(range(gv.n), lambda u: gv.succ[u])
        self.tarjan_runs += 1
        for comp in comps:
            self._install_comp(comp, self._next_id)
            self._next_id += 1
        work = 0
        for x in sorted(self.sccs):
            work += self._scan_out_row(x)
        self.pop_epoch = gv.pop_epoch
        self.last_work = gv.n + work
        return self

    # -- incremental repair --------------------------------------------------

    def repair_after_deletions(self, removed):
        """Update the state after arcs `removed` left the potential graph.

        The arcs must already be gone from the graph and not yet applied
        here.  Returns the list of splits as (old id, [fragment ids]) with
        the largest fragment keeping the old id.  Stale states (the graph
        backtracked since the last sync) must be rebuilt instead; calling
        repair on one raises.
        """
        gv = self.gv
        if self.pop_epoch != gv.pop_epoch:
            raise PreconditionViolation("state is stale after backtracking; rebuild")
        work = 0
        dirty = set()
        # phase A: classify against the partition as of the batch start
        for (u, v) in removed:
            work += 1
            x = self.scc_of[u]
            y = self.scc_of[v]
            if x == y:
                dirty.add(x)
                continue
            if (u, v) in self.out_arcs[x]:
                self.out_arcs[x].discard((u, v))
                c = self.wit.get((x, y), 0) - 1
                if c > 0:
                    self.wit[(x, y)] = c
                else:
                    self.wit.pop((x, y), None)
                    self.radj[x].discard(y)
                    self.rpred[y].discard(x)
        # phase B: one restricted Tarjan per dirty component
        splits = []
        affected_preds = set()
        fragments = set()
        for x in sorted(dirty):
            nodes = self.nodes_of(x)
            member = set(nodes)
            comps = tarjan_scc(nodes, lambda u: (w for w in gv.succ[u] if w in member))
            self.tarjan_runs += 1
            work += len(nodes)
            for u in nodes:
                work += len(gv.succ[u])
            if len(comps) == 1:
                continue
            # largest fragment keeps the id; ties go to the smallest member
            keep = max(comps, key=lambda c: (len(c), -c[0]))
            frag_ids = []
            affected_preds |= self.rpred[x]
            # drop the old outgoing row before the keep fragment reuses the
            # id, or stale witness entries survive the reinstall
            for y in self.radj[x]:
                self.rpred[y].discard(x)
                self.wit.pop((x, y), None)
            for comp in comps:
                if comp is keep:
                    self._install_comp(comp, x)
                    frag_ids.append(x)
                else:
                    self._install_comp(comp, self._next_id)
                    frag_ids.append(self._next_id)
                    self._next_id += 1
            splits.append((x, sorted(frag_ids)))
            fragments.update(frag_ids)
        # phase C: refresh rows against the final partition.  Fragment rows
        # are rescanned from the graph; rows of surviving predecessors only
        # need their head components remapped.
        for f in sorted(fragments):
            work += self._scan_out_row(f)
        for p in sorted(affected_preds - fragments):
            work += self._rewit_row(p)
        self.last_work = work
        return splits


def transitive_closure(state):
    """Per-node reachable sets when the reduced graph is a simple path.

    Returns a dict node -> set of nodes it can still reach (itself excluded).
    Raises PreconditionViolation when the condensation is not a path.
    """
    order = reduced_path_order(state)
    result = {}
    later = set()
    for x in reversed(order):
        block = set(state.nodes_of(x))
        reach = block | later
        for v in block:
            result[v] = reach - {v}
        later = reach
    return result


def reduced_path_order(state):
    """The SCC sequence of the reduced path, or raise if it is not a path."""
    sccs = state.sccs
    starts = [x for x in sccs if not state.rpred[x]]
    if len(starts) != 1:
        raise PreconditionViolation("reduced graph is not a path")
    order = []
    cur = starts[0]
    seen = set()
    while True:
        order.append(cur)
        seen.add(cur)
        nxt = state.radj[cur]
        if len(nxt) == 0:
            break
        if len(nxt) != 1:
            raise PreconditionViolation("reduced graph is not a path")
        (cur,) = nxt
        if cur in seen:
            raise PreconditionViolation("reduced graph is not a path")
    if len(order) != len(sccs):
        raise PreconditionViolation("reduced graph is not a path")
    return order
