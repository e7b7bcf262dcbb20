"""Explicit computation DAGs for small plans, and the structural checks the
I/O lower bounds rest on.

``build_cdag`` materializes the computation graph of a plan: global input
vertices for the factor entries, one depth-1 encoder copy per quadrant
position wiring the four quadrant entries of each factor to the seven
sub-problem operand entries, recursive sub-graphs for the children, and a
depth-1 decoder copy per position combining the seven sub-products into the
four output quadrants.  Standard leaves contribute one vertex per elementary
product plus a summation tree per output entry (left-deep for the iterative
variant, balanced for the block-recursive one).

``min_dominator_size`` computes the exact minimum size of a set of vertices
intercepting every path from a chosen source set to a chosen target set,
via a unit-vertex-capacity max-flow (vertex splitting); endpoints are
cut-eligible.  An exhaustive-search twin serves as an independent oracle on
tiny graphs.

The ``verify_*`` functions check, exhaustively or by sampling, the facts
used by the bound module: encoder output neighborhoods are pairwise
distinct; every output subset Y of an encoder reaches min(|Y|,
1 + ceil((|Y|-1)/2)) inputs through vertex-disjoint paths (a matching, as
encoder edges are single hops); dominators of Type 2 MSP output subsets
have size at least |Z|/2; and dominators of Type 1 MSP input subsets and of
elementary-product subsets obey their aggregate lower bounds.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field

from .bounds import enumerate_msps
from .plans import FastNode, FastScheme, RecursionPlan, StandardLeaf, StandardVariant

GLOBAL_INPUT = "GLOBAL_INPUT"
ENCODER_OUT = "ENCODER_OUT"
ELEM_PRODUCT = "ELEM_PRODUCT"
SUM_NODE = "SUM_NODE"
DECODER_OUT = "DECODER_OUT"
GLOBAL_OUTPUT = "GLOBAL_OUTPUT"

MAX_CDAG_SIZE = 16


@dataclass
class Cdag:
    plan: RecursionPlan
    roles: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    sub_cdag_map: list = field(default_factory=list)  # vertex -> plan path
    node_inputs: dict = field(default_factory=dict)  # path -> (a_grid, b_grid)
    node_outputs: dict = field(default_factory=dict)  # path -> grid
    leaf_products: dict = field(default_factory=dict)  # path -> {(i,k,j): vid}
    _succ: list = None
    _pred: list = None

    def add_vertex(self, role: str, path: tuple) -> int:
        self.roles.append(role)
        self.sub_cdag_map.append(path)
        return len(self.roles) - 1

    def add_edge(self, u: int, v: int):
        self.edges.append((u, v))
        self._succ = self._pred = None

    @property
    def num_vertices(self) -> int:
        return len(self.roles)

    def successors(self):
        if self._succ is None:
            self._succ = [[] for _ in range(self.num_vertices)]
            self._pred = [[] for _ in range(self.num_vertices)]
            for u, v in self.edges:
                self._succ[u].append(v)
                self._pred[v].append(u)
        return self._succ

    def predecessors(self):
        self.successors()
        return self._pred

    def global_inputs(self):
        return [v for v, r in enumerate(self.roles) if r == GLOBAL_INPUT]

    def global_outputs(self):
        return _flatten(self.node_outputs[()])

    def vertices_of(self, path: tuple):
        """All vertices owned by the sub-problem at ``path`` or below."""
        k = len(path)
        return [v for v, p in enumerate(self.sub_cdag_map) if p[:k] == path]

    def topo_order(self):
        """Topological order; raises if a cycle sneaks in."""
        pred = self.predecessors()
        indeg = [len(p) for p in pred]
        succ = self._succ
        order = []
        q = deque(v for v in range(self.num_vertices) if indeg[v] == 0)
        while q:
            v = q.popleft()
            order.append(v)
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    q.append(w)
        if len(order) != self.num_vertices:
            raise ValueError("CDAG has a cycle")
        return order

    def export_edges(self) -> str:
        """One edge per line; vertex roles as trailing comments."""
        lines = []
        for v, role in enumerate(self.roles):
            lines.append(f"# v{v} {role} path={'/'.join(map(str, self.sub_cdag_map[v])) or '.'}")
        for u, v in self.edges:
            lines.append(f"{u} {v}")
        return "\n".join(lines) + "\n"


def _flatten(grid):
    return [v for row in grid for v in row]


def build_cdag(plan: RecursionPlan) -> Cdag:
    """Materialize the plan's computation graph (sizes up to 16)."""
    n = plan.size
    if n > MAX_CDAG_SIZE:
        raise ValueError(f"CDAG construction capped at size {MAX_CDAG_SIZE}, got {n}")
    g = Cdag(plan)
    a_grid = [[g.add_vertex(GLOBAL_INPUT, ()) for _ in range(n)] for _ in range(n)]
    b_grid = [[g.add_vertex(GLOBAL_INPUT, ()) for _ in range(n)] for _ in range(n)]
    out = _build_node(g, plan, (), a_grid, b_grid)
    for v in _flatten(out):
        g.roles[v] = GLOBAL_OUTPUT
    g.node_outputs[()] = out
    return g


def _build_node(g: Cdag, node: RecursionPlan, path, a_grid, b_grid):
    g.node_inputs[path] = (a_grid, b_grid)
    if isinstance(node, StandardLeaf):
        out = _build_leaf(g, node, path, a_grid, b_grid)
    else:
        out = _build_fast(g, node, path, a_grid, b_grid)
    g.node_outputs[path] = out
    return out


def _sum_tree_iterative(g, path, terms):
    acc = terms[0]
    for t in terms[1:]:
        s = g.add_vertex(SUM_NODE, path)
        g.add_edge(acc, s)
        g.add_edge(t, s)
        acc = s
    return acc


def _sum_tree_balanced(g, path, terms):
    if len(terms) == 1:
        return terms[0]
    mid = len(terms) // 2
    left = _sum_tree_balanced(g, path, terms[:mid])
    right = _sum_tree_balanced(g, path, terms[mid:])
    s = g.add_vertex(SUM_NODE, path)
    g.add_edge(left, s)
    g.add_edge(right, s)
    return s


def _build_leaf(g: Cdag, node: StandardLeaf, path, a_grid, b_grid):
    s = node.size
    products = {}
    for i in range(s):
        for k in range(s):
            for j in range(s):
                p = g.add_vertex(ELEM_PRODUCT, path)
                g.add_edge(a_grid[i][k], p)
                g.add_edge(b_grid[k][j], p)
                products[(i, k, j)] = p
    g.leaf_products[path] = products
    tree = (_sum_tree_iterative if node.variant is StandardVariant.ITERATIVE_DEF
            else _sum_tree_balanced)
    out = [[None] * s for _ in range(s)]
    for i in range(s):
        for j in range(s):
            out[i][j] = tree(g, path, [products[(i, k, j)] for k in range(s)])
    return out


def _quad_entry(grid, qi, qj, r, c, h):
    return grid[qi * h + r][qj * h + c]


def _build_fast(g: Cdag, node: FastNode, path, a_grid, b_grid):
    s = node.size
    h = s // 2
    scheme = node.scheme
    quads = ((0, 0), (0, 1), (1, 0), (1, 1))
    # one encoder copy per factor per quadrant position
    xa = [[[None] * h for _ in range(h)] for _ in range(7)]
    xb = [[[None] * h for _ in range(h)] for _ in range(7)]
    for r in range(h):
        for c in range(h):
            for i in range(7):
                child_path = path + (i,)
                va = g.add_vertex(ENCODER_OUT, child_path)
                for q, (qi, qj) in enumerate(quads):
                    if scheme.encode_a[i][q]:
                        g.add_edge(_quad_entry(a_grid, qi, qj, r, c, h), va)
                xa[i][r][c] = va
                vb = g.add_vertex(ENCODER_OUT, child_path)
                for q, (qi, qj) in enumerate(quads):
                    if scheme.encode_b[i][q]:
                        g.add_edge(_quad_entry(b_grid, qi, qj, r, c, h), vb)
                xb[i][r][c] = vb
    m_out = [_build_node(g, node.children[i], path + (i,), xa[i], xb[i]) for i in range(7)]
    out = [[None] * s for _ in range(s)]
    for r in range(h):
        for c in range(h):
            for q, (qi, qj) in enumerate(quads):
                v = g.add_vertex(DECODER_OUT, path)
                for i in range(7):
                    if scheme.decode[q][i]:
                        g.add_edge(m_out[i][r][c], v)
                out[qi * h + r][qj * h + c] = v
    return out


# ---------------------------------------------------------------------------
# encoder graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EncoderGraph:
    """Depth-1 bipartite gadget: 4 quadrant inputs feeding 7 operand outputs."""

    edges: tuple  # (input_index, output_index), input in 0..3, output in 0..6

    @classmethod
    def from_scheme(cls, scheme: FastScheme, side: str) -> "EncoderGraph":
        rows = scheme.encode_a if side.upper() == "A" else scheme.encode_b
        return cls(tuple((q, i) for i in range(7) for q in range(4) if rows[i][q]))

    def output_neighborhood(self, i: int):
        return frozenset(q for q, o in self.edges if o == i)

    def input_neighborhood(self, q: int):
        return frozenset(o for qq, o in self.edges if qq == q)


def verify_encoder_distinct_neighborhoods(enc: EncoderGraph) -> bool:
    """True iff no two outputs read the same set of inputs."""
    hoods = [enc.output_neighborhood(i) for i in range(7)]
    return len(set(hoods)) == 7


def _max_matching(adj, outputs):
    """Maximum bipartite matching between ``outputs`` and inputs 0..3."""
    match_input = {}

    def augment(o, seen):
        for q in adj[o]:
            if q in seen:
                continue
            seen.add(q)
            if q not in match_input or augment(match_input[q], seen):
                match_input[q] = o
                return True
        return False

    size = 0
    for o in outputs:
        if augment(o, set()):
            size += 1
    return size


@dataclass
class EncoderConnectivityReport:
    passed: bool
    checked_subsets: int
    failures: list  # (subset, matching, required)
    min_margin: int  # min over subsets of matching - required

    def __bool__(self):
        return self.passed


def connectivity_requirement(y_size: int) -> int:
    return min(y_size, 1 + math.ceil((y_size - 1) / 2))


def verify_encoder_connectivity(enc: EncoderGraph) -> EncoderConnectivityReport:
    """For all 127 nonempty output subsets Y, a matching of size
    min(|Y|, 1 + ceil((|Y|-1)/2)) into the inputs must exist; in a depth-1
    bipartite graph vertex-disjoint paths are exactly matchings."""
    adj = [sorted(enc.output_neighborhood(i)) for i in range(7)]
    failures = []
    checked = 0
    min_margin = None
    for r in range(1, 8):
        for subset in itertools.combinations(range(7), r):
            checked += 1
            matching = _max_matching(adj, subset)
            required = connectivity_requirement(r)
            margin = matching - required
            if min_margin is None or margin < min_margin:
                min_margin = margin
            if matching < required:
                failures.append((subset, matching, required))
    return EncoderConnectivityReport(not failures, checked, failures, min_margin)


# ---------------------------------------------------------------------------
# dominator sets
# ---------------------------------------------------------------------------

class _Dinic:
    def __init__(self, n):
        self.n = n
        self.adj = [[] for _ in range(n)]

    def add(self, u, v, cap):
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1])

    def maxflow(self, s, t):
        flow = 0
        INF = float("inf")
        while True:
            level = [-1] * self.n
            level[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for e in self.adj[u]:
                    if e[1] > 0 and level[e[0]] < 0:
                        level[e[0]] = level[u] + 1
                        q.append(e[0])
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u, f):
                if u == t:
                    return f
                while it[u] < len(self.adj[u]):
                    e = self.adj[u][it[u]]
                    v = e[0]
                    if e[1] > 0 and level[v] == level[u] + 1:
                        d = dfs(v, min(f, e[1]))
                        if d > 0:
                            e[1] -= d
                            self.adj[v][e[2]][1] += d
                            return d
                    it[u] += 1
                return 0

            while True:
                f = dfs(s, INF)
                if f == 0:
                    break
                flow += f


def min_dominator_size(cdag: Cdag, targets, sources) -> int:
    """Exact minimum dominator size via unit-vertex-capacity max-flow.

    Every vertex, including sources and targets, may be in the dominator.
    """
    targets = set(targets)
    sources = set(sources)
    if not targets:
        return 0
    n = cdag.num_vertices
    big = n + 7
    net = _Dinic(2 * n + 2)
    s_node, t_node = 2 * n, 2 * n + 1
    for v in range(n):
        net.add(2 * v, 2 * v + 1, 1)
    for u, v in cdag.edges:
        net.add(2 * u + 1, 2 * v, big)
    for v in sources:
        net.add(s_node, 2 * v, big)
    for v in targets:
        net.add(2 * v + 1, t_node, big)
    return net.maxflow(s_node, t_node)


def _path_universe(cdag, targets, sources):
    succ = cdag.successors()
    pred = cdag.predecessors()

    def reach(starts, adj):
        seen = set(starts)
        q = deque(starts)
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    q.append(v)
        return seen

    return reach(set(sources), succ) & reach(set(targets), pred)


def min_dominator_size_exhaustive(cdag: Cdag, targets, sources) -> int:
    """Independent oracle: smallest vertex subset intercepting all paths.

    Only meant for graphs whose source-target path universe is tiny.
    """
    targets = set(targets)
    sources = set(sources)
    if not targets:
        return 0
    universe = sorted(_path_universe(cdag, targets, sources))
    succ = cdag.successors()

    def is_dominator(dom):
        live = [s for s in sources if s not in dom]
        if any(v in targets for v in live):
            return False
        seen = set(live)
        q = deque(live)
        while q:
            u = q.popleft()
            for v in succ[u]:
                if v in dom or v in seen:
                    continue
                if v in targets:
                    return False
                seen.add(v)
                q.append(v)
        return True

    for k in range(len(universe) + 1):
        for dom in itertools.combinations(universe, k):
            if is_dominator(set(dom)):
                return k
    return len(universe)


# ---------------------------------------------------------------------------
# dominator-bound verification on MSP structure
# ---------------------------------------------------------------------------

@dataclass
class DominatorCheckReport:
    passed: bool
    checked: int
    skipped: int
    failures: list  # (description, observed, required)
    min_slack: float  # min over samples of observed - required

    def __bool__(self):
        return self.passed


def _type2_output_paths(cdag: Cdag, m: int):
    msps = enumerate_msps(cdag.plan, m)
    paths = [d.path for d in msps if d.msp_type == 2]
    if not paths:
        # boundary case: a fast root whose children are already below the
        # threshold generates no MSP by definition, but its outputs still
        # obey the Type 2 dominator bound and are worth checking.
        node = cdag.plan
        if isinstance(node, FastNode) and (node.size // 2) ** 2 < 4 * m:
            paths = [()]
    return paths


def verify_dominator_type2(cdag: Cdag, m: int, max_samples: int = 64,
                           seed: int = 0) -> DominatorCheckReport:
    """Sampled check: dominators of Type 2 MSP output subsets Z with
    |Z| <= 4M satisfy |D| >= |Z|/2 against exact min-cut values."""
    paths = _type2_output_paths(cdag, m)
    z_all = []
    for p in paths:
        z_all.extend(_flatten(cdag.node_outputs[p]))
    inputs = cdag.global_inputs()
    cap = 4 * m
    rng = random.Random(seed)
    samples = []
    if z_all:
        samples.append(z_all[:cap])
        samples.extend([v] for v in z_all[:8])
        for _ in range(max_samples):
            size = rng.randint(1, min(cap, len(z_all)))
            samples.append(rng.sample(z_all, size))
    failures = []
    min_slack = None
    checked = 0
    for z in samples:
        if not z or len(z) > cap:
            continue
        checked += 1
        dom = min_dominator_size(cdag, z, inputs)
        required = len(z) / 2
        slack = dom - required
        if min_slack is None or slack < min_slack:
            min_slack = slack
        if dom < required:
            failures.append((f"|Z|={len(z)}", dom, required))
    return DominatorCheckReport(not failures, checked, 0, failures,
                                min_slack if min_slack is not None else 0.0)


def verify_dominator_type1(cdag: Cdag, m: int, max_samples: int = 48,
                           seed: int = 0) -> DominatorCheckReport:
    """Sampled check of the Type 1 MSP dominator bounds.

    Input subsets Y across MSPs: |D| >= min(2M, sum a_i / sqrt(sum b_i))
    for every valid decomposition |Y ∩ Y_i| = a_i/sqrt(b_i) with natural
    a_i >= b_i (0/0 = 0); two decompositions are instantiated per sample,
    (a_i, b_i) = (y_i, 1) and (y_i^2, y_i^2).  Product subsets T' within
    one MSP: a dominator with respect to that MSP's own inputs has size at
    least max(#A-entries touched, #B-entries touched).
    """
    msps = [d for d in enumerate_msps(cdag.plan, m) if d.msp_type == 1]
    inputs = cdag.global_inputs()
    rng = random.Random(seed)
    failures = []
    min_slack = None
    checked = 0
    skipped = 0

    y_sets = []
    for d in msps:
        ag, bg = cdag.node_inputs[d.path]
        y_sets.append(_flatten(ag) + _flatten(bg))

    if y_sets:
        samples = [[list(ys) for ys in y_sets]]  # the full input set
        for _ in range(max_samples):
            parts = []
            for ys in y_sets:
                size = rng.randint(0, len(ys))
                parts.append(rng.sample(ys, size) if size else [])
            samples.append(parts)
        for parts in samples:
            y = [v for part in parts for v in part]
            if not y:
                skipped += 1
                continue
            checked += 1
            dom = min_dominator_size(cdag, y, inputs)
            sizes = [len(part) for part in parts if part]
            bound_flat = sum(sizes) / math.sqrt(len(sizes))
            bound_l2 = math.sqrt(sum(s * s for s in sizes))
            required = min(2 * m, max(bound_flat, bound_l2))
            slack = dom - required
            if min_slack is None or slack < min_slack:
                min_slack = slack
            if dom + 1e-9 < required:
                failures.append((f"input subset sizes={sizes}", dom, required))

    for d in msps:
        prods = cdag.leaf_products.get(d.path)
        if prods is None:
            skipped += 1
            continue
        ag, bg = cdag.node_inputs[d.path]
        y_sources = _flatten(ag) + _flatten(bg)
        s = d.n_i
        keys = list(prods)
        samples = [keys]  # all products
        samples.append([(0, k, 0) for k in range(s)])  # one full dot product
        samples.append([keys[0]])
        for _ in range(max_samples // 2):
            samples.append(rng.sample(keys, rng.randint(1, len(keys))))
        for t_keys in samples:
            if not t_keys:
                continue
            checked += 1
            targets = [prods[k] for k in t_keys]
            a_touched = {(i, k) for i, k, j in t_keys}
            b_touched = {(k, j) for i, k, j in t_keys}
            required = max(len(a_touched), len(b_touched))
            dom = min_dominator_size(cdag, targets, y_sources)
            slack = dom - required
            if min_slack is None or slack < min_slack:
                min_slack = slack
            if dom < required:
                failures.append((f"product subset |T'|={len(t_keys)}", dom, required))

    return DominatorCheckReport(not failures, checked, skipped, failures,
                                min_slack if min_slack is not None else 0.0)
