"""Structural propagators for the fixed-endpoints Hamiltonian path.

Everything in here prunes the graph variable through combinatorial
arguments only; cost reasoning lives in costs.py.  The reduced-path
propagator is the workhorse: it keeps an incremental SCC condensation and
walks it to pin down the block order, pruning arcs that cross the
established cuts the wrong way.
"""

from __future__ import annotations

from .kernel import ARC_ENFORCED, ARC_REMOVED, Propagator
from .scc import ReducedState, tarjan_scc


class DegreePropagator(Propagator):
    """Each node except e has one successor, each except s one predecessor.

    Stateless: every call re-checks all degrees.  Zero potential out or in
    arcs on an interior node is a dead end, a single one is forced, and a
    mandatory arc evicts its siblings.
    """

    def __init__(self, gv):
        super().__init__(gv)
        self.name = "degree"
        self.priority = 0

    def propagate(self):
        self.events.clear()
        gv = self.gv
        for u in range(gv.n):
            if u != gv.e:
                row = gv.succ[u]
                if not row:
                    self.fail("node lost all successors")
                if len(gv.msucc[u]) > 1:
                    self.fail("two mandatory successors")
                if gv.msucc[u]:
                    (w,) = gv.msucc[u]
                    for w2 in sorted(row - {w}):
                        self.remove(u, w2)
                elif len(row) == 1:
                    (w,) = row
                    self.enforce(u, w)
            if u != gv.s:
                col = gv.pred[u]
                if not col:
                    self.fail("node lost all predecessors")
                if len(gv.mpred[u]) > 1:
                    self.fail("two mandatory predecessors")
                if gv.mpred[u]:
                    (w,) = gv.mpred[u]
                    for w2 in sorted(col - {w}):
                        self.remove(w2, u)
                elif len(col) == 1:
                    (w,) = col
                    self.enforce(w, u)


class NoCyclePropagator(Propagator):
    """Fuse mandatory arcs into chains and forbid the closing arc.

    chain_start[b] is the first node of the chain ending at b and
    chain_end[a] the last node of the chain starting at a; both are only
    meaningful at chain endpoints.  Updates are trailed so backtracking
    restores the chain structure.
    """

    def __init__(self, gv):
        super().__init__(gv)
        self.name = "nocycle"
        self.priority = 0
        self.chain_start = list(range(gv.n))
        self.chain_end = list(range(gv.n))

    def propagate(self):
        gv = self.gv
        while self.events:
            kind, u, v = self.events.popleft()
            if kind != ARC_ENFORCED:
                continue
            a = self.chain_start[u]
            b = self.chain_end[v]
            if a == v:
                self.fail("mandatory arcs close a cycle")
            cs, ce = self.chain_start, self.chain_end
            # bind per event: several merges can land on the trail from one
            # call, each undo must restore its own slots
            gv.trail.record(
                lambda a=a, b=b, oe=ce[a], os=cs[b]:
                    (ce.__setitem__(a, oe), cs.__setitem__(b, os)))
            ce[a] = b
            cs[b] = a
            # the arc from the merged chain's end back to its start would
            # close a cycle
            self.remove(b, a)


class ArborescencePropagator(Propagator):
    """Dominator-based filtering on the potential graph.

    Forward mode: every path from s to u runs through idom ancestors of u,
    so an arc (u, v) with v a proper dominator of u would revisit v.
    Reverse mode does the mirror argument with paths into e.  Nodes the
    root cannot reach are a dead end.
    """

    def __init__(self, gv, reverse=False):
        super().__init__(gv)
        self.name = "arbo-rev" if reverse else "arbo"
        self.priority = 3
        self.reverse = reverse

    def _dominators(self, root, adj, radj):
        """Lengauer-Tarjan with simple eval/link.  Returns (idom, order)."""
        n = self.gv.n
        parent = [-1] * n
        semi = [-1] * n          # starts out as the dfs number
        vertex = []
        work = [(root, iter(sorted(adj(root))))]
        semi[root] = 0
        vertex.append(root)
        while work:
            u, it = work[-1]
            advanced = False
            for w in it:
                if semi[w] == -1:
                    parent[w] = u
                    semi[w] = len(vertex)
                    vertex.append(w)
                    work.append((w, iter(sorted(adj(w)))))
                    advanced = True
                    break
            if not advanced:
                work.pop()
        if len(vertex) != n:
            self.fail("unreachable node")
        bucket = [[] for _ in range(n)]
        dom = [-1] * n
        ancestor = [-1] * n
        label = list(range(n))

        def evaluate(v):
            if ancestor[v] == -1:
                return label[v]
            # compress the link forest path above v, top first
            path = []
            u = v
            while ancestor[ancestor[u]] != -1:
                path.append(u)
                u = ancestor[u]
            while path:
                w = path.pop()
                if semi[label[ancestor[w]]] < semi[label[w]]:
                    label[w] = label[ancestor[w]]
                ancestor[w] = ancestor[ancestor[w]]
            return label[v]

        for i in range(len(vertex) - 1, 0, -1):
            w = vertex[i]
            for v in sorted(radj(w)):
                u = evaluate(v)
                if semi[u] < semi[w]:
                    semi[w] = semi[u]
            bucket[vertex[semi[w]]].append(w)
            ancestor[w] = parent[w]
            for v in bucket[parent[w]]:
                u = evaluate(v)
                dom[v] = u if semi[u] < semi[v] else parent[w]
            bucket[parent[w]] = []
        for i in range(1, len(vertex)):
            w = vertex[i]
            if dom[w] != vertex[semi[w]]:
                dom[w] = dom[dom[w]]
        dom[root] = -1
        return dom, vertex

    def propagate(self):
        self.events.clear()
        gv = self.gv
        if self.reverse:
            root = gv.e
            adj = lambda u: gv.pred[u]
            radj = lambda u: gv.succ[u]
        else:
            root = gv.s
            adj = lambda u: gv.succ[u]
            radj = lambda u: gv.pred[u]
        idom, vertex = self._dominators(root, adj, radj)
        n = gv.n
        children = [[] for _ in range(n)]
        for v in vertex:
            if idom[v] != -1:
                children[idom[v]].append(v)
        tin = [0] * n
        tout = [0] * n
        clock = 0
        stack = [(root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                tout[v] = clock
                continue
            tin[v] = clock
            clock += 1
            stack.append((v, True))
            for w in reversed(children[v]):
                stack.append((w, False))

        def properly_dominates(a, b):
            return a != b and tin[a] <= tin[b] and tout[b] <= tout[a]

        for u, v in gv.arcs():
            if self.reverse:
                # u post-dominates v: u must come after v on any path
                if properly_dominates(u, v):
                    self.remove(u, v)
            else:
                if properly_dominates(v, u):
                    self.remove(u, v)


class AllDifferentPropagator(Propagator):
    """GAC on the successor assignment via matching plus residual SCCs.

    Variables are the nodes with a successor (all but e), values the nodes
    with a predecessor (all but s).  A potential arc survives iff it lies
    in some perfect matching: matched, or inside one SCC of the residual
    digraph with unmatched arcs oriented var to value and matched ones
    value to var.
    """

    def __init__(self, gv):
        super().__init__(gv)
        self.name = "alldiff"
        self.priority = 3

    def propagate(self):
        self.events.clear()
        gv = self.gv
        n = gv.n
        left = [u for u in range(n) if u != gv.e]
        match_of_val = {}
        match_of_var = {}

        def augment(u, seen):
            for v in sorted(gv.succ[u]):
                if v in seen:
                    continue
                seen.add(v)
                w = match_of_val.get(v)
                if w is None or augment(w, seen):
                    match_of_val[v] = u
                    match_of_var[u] = v
                    return True
            return False

        for u in left:
            # seed with a mandatory successor when there is one
            if gv.msucc[u]:
                (v,) = gv.msucc[u]
                if v in match_of_val:
                    continue
                match_of_val[v] = u
                match_of_var[u] = v
        for u in left:
            if u not in match_of_var:
                if not augment(u, set()):
                    self.fail("no successor assignment")
        # residual digraph on ids: var u -> u, value v -> n + v
        nodes = []
        adj = {}
        for u in left:
            nodes.append(u)
            adj[u] = [n + v for v in gv.succ[u] if match_of_var[u] != v]
        for v in range(n):
            if v == gv.s:
                continue
            nodes.append(n + v)
            adj[n + v] = [match_of_val[v]] if v in match_of_val else []
        comp_of = {}
        for i, comp in enumerate(tarjan_scc(nodes, lambda x: adj[x])):
            for x in comp:
                comp_of[x] = i
        for u in left:
            for v in sorted(gv.succ[u]):
                if match_of_var[u] != v and comp_of[u] != comp_of[n + v]:
                    self.remove(u, v)


class PositionPropagator(Propagator):
    """Bounds on each node's position along the path, with channeling.

    lb comes from bfs depth below s, ub from bfs depth above e; when the
    block order is established the per-block offsets tighten both sides.
    A bounds-consistent alldifferent over the positions then shaves
    Hall intervals, and arcs incompatible with pos[v] = pos[u] + 1 go away.
    """

    def __init__(self, gv, reduced=None):
        super().__init__(gv)
        self.name = "positions"
        self.priority = 3
        self.reduced = reduced
        self.lb = None
        self.ub = None

    def _bfs(self, roots, rows):
        from collections import deque
        n = self.gv.n
        dist = [-1] * n
        q = deque(roots)
        for r in roots:
            dist[r] = 0
        while q:
            u = q.popleft()
            for w in rows[u]:
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    def _hall_sweep(self, lb, ub):
        """One pass of Hall interval tightening. Returns True on change."""
        n = len(lb)
        cnt = [[0] * (n + 1) for _ in range(n + 1)]
        for x in range(n):
            if lb[x] > ub[x]:
                self.fail("empty position domain")
            cnt[lb[x]][ub[x]] += 1
        # suffix over lows, prefix over highs: inside[a][b] counts domains
        # contained in [a, b]
        inside = [[0] * (n + 1) for _ in range(n + 2)]
        for a in range(n - 1, -1, -1):
            run = 0
            for b in range(n):
                run += cnt[a][b]
                inside[a][b] = inside[a + 1][b] + run
        changed = False
        for a in range(n):
            for b in range(a, n):
                k = inside[a][b]
                width = b - a + 1
                if k > width:
                    self.fail("too many nodes squeezed into an interval")
                if k == width:
                    for x in range(n):
                        if lb[x] >= a and ub[x] <= b:
                            continue
                        if a <= lb[x] <= b:
                            lb[x] = b + 1
                            changed = True
                        if a <= ub[x] <= b:
                            ub[x] = a - 1
                            changed = True
                        if lb[x] > ub[x]:
                            self.fail("empty position domain")
        return changed

    def propagate(self):
        self.events.clear()
        gv = self.gv
        n = gv.n
        dist_s = self._bfs([gv.s], gv.succ)
        dist_e = self._bfs([gv.e], gv.pred)
        if -1 in dist_s or -1 in dist_e:
            self.fail("node cut off from an endpoint")
        lb = dist_s[:]
        ub = [n - 1 - d for d in dist_e]
        ub[gv.s] = 0
        lb[gv.e] = n - 1
        rp = self.reduced
        if rp is not None and rp.path_order is not None:
            off = 0
            st = rp.state
            for x in rp.path_order:
                k = st.size[x]
                for u in st.members(x):
                    lb[u] = max(lb[u], off)
                    ub[u] = min(ub[u], off + k - 1)
                off += k
        # fixpoint over mandatory-arc coupling and hall intervals
        while True:
            changed = False
            for u, v in gv.mandatory_arcs():
                if lb[u] + 1 > lb[v]:
                    lb[v] = lb[u] + 1
                    changed = True
                if ub[v] - 1 < ub[u]:
                    ub[u] = ub[v] - 1
                    changed = True
            for x in range(n):
                if lb[x] > ub[x]:
                    self.fail("empty position domain")
            if self._hall_sweep(lb, ub):
                changed = True
            if not changed:
                break
        self.lb = lb
        self.ub = ub
        for u in range(n):
            for v in sorted(gv.succ[u]):
                if lb[u] + 1 > ub[v] or ub[u] + 1 < lb[v]:
                    self.remove(u, v)


class ReducedPathPropagator(Propagator):
    """Maintain the SCC condensation and walk it into a block path.

    The state is repaired incrementally from the deletion events; blocks
    that split are re-walked locally when the global order is already
    known, otherwise the walk restarts from the s block.  Once a block's
    successor is pinned, each of its other outgoing arcs dies, a cut with
    one witness arc enforces it, and the door rules prune inside blocks
    with a single entry or exit node.
    """

    def __init__(self, gv, door_rules=True):
        super().__init__(gv)
        self.name = "reduced-path"
        self.priority = 2
        self.door_rules = door_rules
        self.state = ReducedState(gv)
        self.path_order = None
        self.path_pos = None

    # -- plumbing ----------------------------------------------------------

    def _set_order(self, order):
        self.path_order = order
        self.path_pos = {x: i for i, x in enumerate(order)}

    def _prune_other_out(self, x, keep):
        st = self.state
        for (a, b) in sorted(st.out_arcs[x]):
            if st.scc_of[b] != keep:
                self.remove(a, b)

    def _cut_witnesses(self, x, y):
        gv = self.gv
        st = self.state
        return [(a, b) for (a, b) in sorted(st.out_arcs[x])
                if st.scc_of[b] == y and gv.has_arc(a, b)]

    def _check_cut(self, x, y):
        ws = self._cut_witnesses(x, y)
        if not ws:
            self.fail("cut between consecutive blocks is empty")
        if len(ws) == 1:
            self.enforce(*ws[0])

    # -- walks ---------------------------------------------------------------

    def _full_walk(self):
        st = self.state
        gv = self.gv
        s_block = st.scc_of[gv.s]
        e_block = st.scc_of[gv.e]
        for x in sorted(st.sccs):
            if x != s_block and not st.rpred[x]:
                self.fail("block with no way in")
        visited = {s_block}
        order = [s_block]
        x = s_block
        while x != e_block:
            cands = []
            for y in sorted(st.radj[x]):
                if y not in visited and not (st.rpred[y] - visited):
                    cands.append(y)
            if not cands:
                break
            if len(cands) > 1:
                self.fail("two blocks forced into the same slot")
            (y,) = cands
            self._prune_other_out(x, keep=y)
            self._check_cut(x, y)
            visited.add(y)
            order.append(y)
            x = y
        if x == e_block and len(order) != len(st.sccs):
            self.fail("endpoint block reached with blocks left over")
        if len(order) == len(st.sccs):
            self._set_order(order)
        else:
            self.path_order = None
            self.path_pos = None

    def _local_walk(self, frags, prev_block, next_block):
        """Order the fragments of one split between its old neighbours.

        Returns the fragment visit order, or None when it cannot be pinned
        down (the global order is then demoted).
        """
        st = self.state
        allowed = set(frags)
        placed = []
        V = {prev_block}
        x = prev_block
        while True:
            cands = []
            for y in sorted(st.radj[x]):
                if y in V:
                    continue
                if y not in allowed and y != next_block:
                    continue
                if not (st.rpred[y] - V):
                    cands.append(y)
            if not cands:
                return None
            if len(cands) > 1:
                self.fail("two blocks forced into the same slot")
            (y,) = cands
            if y == next_block:
                if len(placed) != len(frags):
                    self.fail("split fragments left unreachable")
                self._prune_other_out(x, keep=y)
                self._check_cut(x, y)
                return placed
            self._prune_other_out(x, keep=y)
            self._check_cut(x, y)
            V.add(y)
            placed.append(y)
            x = y

    # -- door rules ----------------------------------------------------------

    def _apply_doors(self, blocks):
        st = self.state
        gv = self.gv
        pos = self.path_pos
        order = self.path_order
        for r in sorted(blocks):
            if r not in pos or st.size[r] < 2:
                continue
            i = pos[r]
            prev_b, next_b = order[i - 1], order[i + 1]
            indoor = {b for (a, b) in st.out_arcs[prev_b]
                      if st.scc_of[b] == r and gv.has_arc(a, b)}
            outdoor = {a for (a, b) in st.out_arcs[r]
                       if st.scc_of[b] == next_b and gv.has_arc(a, b)}
            if not indoor or not outdoor:
                self.fail("cut between consecutive blocks is empty")
            members = st.nodes_of(r)
            if len(indoor) == 1:
                (i0,) = indoor
                for j in members:
                    if j != i0:
                        self.remove(j, i0)
            if len(outdoor) == 1:
                (o0,) = outdoor
                for j in members:
                    if j != o0:
                        self.remove(o0, j)
            doors = indoor | outdoor
            if st.size[r] > 2 and len(doors) == 2:
                a, b = sorted(doors)
                self.remove(a, b)
                self.remove(b, a)

    # -- main loop -------------------------------------------------------------

    def propagate(self):
        gv = self.gv
        st = self.state
        if st.pop_epoch != gv.pop_epoch:
            self.events.clear()
            st.rebuild()
            self.path_order = None
            self.path_pos = None
            self._full_walk()
            if self.door_rules and self.path_order is not None:
                self._apply_doors(set(self.path_order))
        while self.events:
            removed = []
            enforced = []
            while self.events:
                kind, u, v = self.events.popleft()
                if kind == ARC_REMOVED:
                    removed.append((u, v))
                else:
                    enforced.append((u, v))
            splits = st.repair_after_deletions(removed) if removed else []
            touched = set()
            cuts = set()
            for (u, v) in removed:
                x, y = st.scc_of[u], st.scc_of[v]
                if x != y:
                    cuts.add((x, y))
                    touched.update((x, y))
            if splits:
                if self.path_order is not None:
                    old_pos = self.path_pos
                    frag_seq = {}
                    ok = True
                    for old, frags in sorted(splits,
                                             key=lambda sp: old_pos[sp[0]]):
                        i = old_pos[old]
                        seq = self._local_walk(
                            frags, self.path_order[i - 1],
                            self.path_order[i + 1])
                        if seq is None:
                            ok = False
                            break
                        frag_seq[old] = seq
                        touched.update(frags)
                    if ok:
                        new_order = []
                        for b in self.path_order:
                            new_order.extend(frag_seq.get(b, [b]))
                        self._set_order(new_order)
                    else:
                        self.path_order = None
                        self.path_pos = None
                else:
                    for old, frags in splits:
                        touched.update(frags)
            if self.path_order is None:
                if removed or splits:
                    self._full_walk()
                    if self.door_rules and self.path_order is not None:
                        self._apply_doors(set(self.path_order))
                        continue
            for (u, v) in enforced:
                x, y = st.scc_of[u], st.scc_of[v]
                if x == y:
                    continue
                if self.path_pos is not None:
                    if self.path_pos[y] != self.path_pos[x] + 1:
                        self.fail("mandatory arc skips a block")
                # the path leaves x and enters y exactly once
                for (a, b) in sorted(st.out_arcs[x]):
                    if (a, b) != (u, v):
                        self.remove(a, b)
                for p in sorted(st.rpred[y]):
                    for (a, b) in sorted(st.out_arcs[p]):
                        if st.scc_of[b] == y and (a, b) != (u, v):
                            self.remove(a, b)
                touched.update((x, y))
            if self.path_pos is not None:
                for (x, y) in sorted(cuts):
                    if self.path_pos.get(y) == self.path_pos.get(x, -9) + 1:
                        self._check_cut(x, y)
                if self.door_rules and touched:
                    near = set()
                    for b in touched:
                        i = self.path_pos.get(b)
                        if i is None:
                            continue
                        near.add(b)
                        if i > 0:
                            near.add(self.path_order[i - 1])
                        if i + 1 < len(self.path_order):
                            near.add(self.path_order[i + 1])
                    self._apply_doors(near)
