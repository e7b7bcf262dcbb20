"""I/O-efficient schedule generators for plans in the two-level model.

Two generators are exposed:

``gen_standard_blocked_schedule``
    Classic square tiling for the standard algorithm with tile side t, the
    largest power of two satisfying 3*t^2 <= M.  With M = 3 the tiling
    degenerates to the definition triple loop with accumulator spills.

``gen_hybrid_schedule``
    Depth-first traversal of a recursion plan.  A sub-problem whose whole
    evaluation fits in cache is computed after a single read pass of its
    operands.  Fast nodes above that threshold stream: the seven encoded
    operand pairs are materialized in slow memory with one synchronized
    pass over the node's inputs, children recurse, and the node's output is
    stream-decoded from the seven sub-products.  Children small enough to
    fit in cache are fused instead: their operands are built directly in
    cache from the parent's quadrant blocks, skipping the slow-memory round
    trip, and single-quadrant operand blocks are kept resident between
    consecutive children that share them.

The in-cache executor frees every word at its last use (inputs
quadrant-by-quadrant, output quadrants written out as soon as they
complete), which is what lets a subtree of side s run in roughly 3*s^2
words.  All emission is budgeted: any step that would exceed M raises and
the caller falls back to a coarser strategy, so generated schedules are
legal by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .pebble import (MV_C, MV_E, MV_R, MV_W, OP_ADD, OP_CPY, OP_MUL, OP_NEG,
                     OP_SUB, MachineConfig, MemoryLayout, Schedule)
from .plans import FastScheme, RecursionPlan, StandardLeaf
from .ringmat import is_pow2

QUADS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class View:
    """Rectangular window into the slow address space (row-major)."""

    base: int
    stride: int
    rows: int
    cols: int

    def addr(self, r: int, c: int) -> int:
        return self.base + r * self.stride + c

    def row_start(self, r: int) -> int:
        return self.base + r * self.stride

    def quadrant(self, qi: int, qj: int) -> "View":
        h = self.rows // 2
        return View(self.base + qi * h * self.stride + qj * h, self.stride, h, h)

    @property
    def dense(self) -> bool:
        return self.stride == self.cols

    @property
    def words(self) -> int:
        return self.rows * self.cols


class _Budget(Exception):
    """Internal: emission would exceed the cache budget."""


class _Emitter:
    __slots__ = ("moves", "M", "B", "resident", "temp_ptr", "order_memo")

    def __init__(self, cfg: MachineConfig, temp_base: int):
        self.moves = []
        self.M = cfg.M
        self.B = cfg.B
        self.resident = set()
        self.temp_ptr = temp_base
        self.order_memo = {}

    def checkpoint(self):
        return len(self.moves), self.temp_ptr, set(self.resident)

    def rollback(self, chk):
        del self.moves[chk[0]:]
        self.temp_ptr = chk[1]
        self.resident = chk[2]

    def alloc(self, words: int) -> int:
        p = self.temp_ptr
        self.temp_ptr += words
        return p

    def alloc_view(self, rows: int, cols: int) -> View:
        return View(self.alloc(rows * cols), cols, rows, cols)

    def _grow(self, addr: int):
        res = self.resident
        if addr not in res:
            if len(res) >= self.M:
                raise _Budget()
            res.add(addr)

    def read_run(self, start: int, length: int):
        b = self.B
        a = start
        end = start + length
        moves = self.moves
        while a < end:
            k = min(b, end - a)
            moves.append((MV_R, a, k))
            for x in range(a, a + k):
                self._grow(x)
            a += k

    def write_run(self, start: int, length: int):
        b = self.B
        a = start
        end = start + length
        moves = self.moves
        while a < end:
            k = min(b, end - a)
            moves.append((MV_W, a, k))
            a += k

    def compute(self, out: int, op: int, x: int, y: int = -1):
        self.moves.append((MV_C, out, op, x, y))
        self._grow(out)

    def evict(self, addr: int):
        self.moves.append((MV_E, addr))
        self.resident.remove(addr)

    def read_view(self, v: View):
        if v.dense:
            self.read_run(v.base, v.words)
        else:
            for r in range(v.rows):
                self.read_run(v.row_start(r), v.cols)

    def write_view(self, v: View):
        if v.dense:
            self.write_run(v.base, v.words)
        else:
            for r in range(v.rows):
                self.write_run(v.row_start(r), v.cols)

    def evict_view(self, v: View):
        for r in range(v.rows):
            s = v.row_start(r)
            for a in range(s, s + v.cols):
                self.evict(a)


# ---------------------------------------------------------------------------
# blocked standard multiplication
# ---------------------------------------------------------------------------

def _tile_side(m: int, n: int) -> int:
    t = 1
    while 2 * t <= n and 3 * (2 * t) * (2 * t) <= m:
        t *= 2
    return t


def _blocked(em: _Emitter, av: View, bv: View, cv: View):
    n = av.rows
    t = _tile_side(em.M, n)
    if t == n and em.M >= 3 * n * n + 1 and n > 1:
        _blocked_full_resident(em, av, bv, cv)
        return
    if t == 1:
        _blocked_spill(em, av, bv, cv)
        return
    nt = n // t
    scratch = em.alloc(1)
    for ti in range(nt):
        for tj in range(nt):
            for tk in range(nt):
                if t == n:
                    em.read_view(bv)
                else:
                    for r in range(t):
                        em.read_run(bv.addr(tk * t + r, tj * t), t)
                for r in range(t):
                    em.read_run(av.addr(ti * t + r, tk * t), t)
                    for c in range(t):
                        c_addr = cv.addr(ti * t + r, tj * t + c)
                        for z in range(t):
                            a_addr = av.addr(ti * t + r, tk * t + z)
                            b_addr = bv.addr(tk * t + z, tj * t + c)
                            if tk == 0 and z == 0:
                                em.compute(c_addr, OP_MUL, a_addr, b_addr)
                            else:
                                em.compute(scratch, OP_MUL, a_addr, b_addr)
                                em.compute(c_addr, OP_ADD, c_addr, scratch)
                    for z in range(t):
                        em.evict(av.addr(ti * t + r, tk * t + z))
                for r in range(t):
                    for z in range(t):
                        em.evict(bv.addr(tk * t + r, tj * t + z))
            for r in range(t):
                em.write_run(cv.addr(ti * t + r, tj * t), t)
                for c in range(t):
                    em.evict(cv.addr(ti * t + r, tj * t + c))
    if scratch in em.resident:
        em.evict(scratch)


def _blocked_full_resident(em: _Emitter, av: View, bv: View, cv: View):
    # whole problem plus a scratch word fits: one read pass, one write pass
    n = av.rows
    em.read_view(av)
    em.read_view(bv)
    scratch = em.alloc(1)
    for i in range(n):
        for j in range(n):
            c_addr = cv.addr(i, j)
            em.compute(c_addr, OP_MUL, av.addr(i, 0), bv.addr(0, j))
            for k in range(1, n):
                em.compute(scratch, OP_MUL, av.addr(i, k), bv.addr(k, j))
                em.compute(c_addr, OP_ADD, c_addr, scratch)
    if scratch in em.resident:
        em.evict(scratch)
    em.write_view(cv)
    em.evict_view(av)
    em.evict_view(bv)
    em.evict_view(cv)


def _blocked_spill(em: _Emitter, av: View, bv: View, cv: View):
    # M = 3 regime: accumulators spill to slow memory between products
    n = av.rows
    scratch = em.alloc(1)
    for i in range(n):
        for j in range(n):
            c_addr = cv.addr(i, j)
            for k in range(n):
                a_addr = av.addr(i, k)
                b_addr = bv.addr(k, j)
                em.read_run(a_addr, 1)
                em.read_run(b_addr, 1)
                if k == 0:
                    em.compute(c_addr, OP_MUL, a_addr, b_addr)
                    em.evict(a_addr)
                    em.evict(b_addr)
                else:
                    em.compute(scratch, OP_MUL, a_addr, b_addr)
                    em.evict(a_addr)
                    em.evict(b_addr)
                    em.read_run(c_addr, 1)
                    em.compute(c_addr, OP_ADD, c_addr, scratch)
                    em.evict(scratch)
                em.write_run(c_addr, 1)
                em.evict(c_addr)


def gen_standard_blocked_schedule(n: int, cfg: MachineConfig) -> Schedule:
    """Tiled standard multiplication of the full problem, C = A * B."""
    if not is_pow2(n):
        raise ValueError("n must be a power of two")
    layout = MemoryLayout(n)
    em = _Emitter(cfg, layout.temp_base)
    av = View(layout.a_base, n, n, n)
    bv = View(layout.b_base, n, n, n)
    cv = View(layout.c_base, n, n, n)
    _blocked(em, av, bv, cv)
    return Schedule(em.moves, layout, label=f"blocked(n={n},M={cfg.M},B={cfg.B})")


# ---------------------------------------------------------------------------
# in-cache subtree execution
# ---------------------------------------------------------------------------

def _emit_combo_word(em, dst, srcs):
    """dst <- sum of (sign, addr) terms, all resident; one word."""
    (s0, a0) = srcs[0]
    if len(srcs) == 1:
        if dst == a0:
            if s0 == -1:
                em.compute(dst, OP_NEG, a0)
            # +1 onto itself is a no-op
            return
        em.compute(dst, OP_CPY if s0 == 1 else OP_NEG, a0)
    else:
        if dst == a0:
            s1, a1 = srcs[1]
            if s0 == 1:
                em.compute(dst, OP_ADD if s1 == 1 else OP_SUB, a0, a1)
            elif s1 == 1:
                em.compute(dst, OP_SUB, a1, a0)
            else:
                em.compute(dst, OP_NEG, a0)
                em.compute(dst, OP_SUB, dst, a1)
            rest = srcs[2:]
        else:
            em.compute(dst, OP_CPY if s0 == 1 else OP_NEG, a0)
            rest = srcs[1:]
        for s, a in rest:
            em.compute(dst, OP_ADD if s == 1 else OP_SUB, dst, a)


def _incache_leaf(em, node, a: View, b: View, out: View, write_out, own_a, own_b):
    s = node.size
    if s == 1:
        em.compute(out.base, OP_MUL, a.base, b.base)
        if own_a:
            em.evict(a.base)
        if own_b:
            em.evict(b.base)
        if write_out:
            em.write_run(out.base, 1)
            em.evict(out.base)
        return
    scratch = em.alloc(1)
    for i in range(s):
        for j in range(s):
            o = out.addr(i, j)
            em.compute(o, OP_MUL, a.addr(i, 0), b.addr(0, j))
            for k in range(1, s):
                em.compute(scratch, OP_MUL, a.addr(i, k), b.addr(k, j))
                em.compute(o, OP_ADD, o, scratch)
        if own_a:
            for k in range(s):
                em.evict(a.addr(i, k))
        if write_out:
            em.write_run(out.row_start(i), s)
            for j in range(s):
                em.evict(out.addr(i, j))
    if scratch in em.resident:
        em.evict(scratch)
    if own_b:
        em.evict_view(b)


def _build_block(em, coeffs, quads, uses, own_input):
    """Build one encoded operand block from resident quadrant blocks.

    Returns (view, owned).  Single +1 terms alias the quadrant; multi-term
    combinations go in place over a source quadrant that dies here (when
    owned), else into a fresh block.
    """
    terms = [(q, c) for q, c in enumerate(coeffs) if c]
    if len(terms) == 1 and terms[0][1] == 1:
        q = terms[0][0]
        uses[q] -= 1
        return quads[q], own_input and uses[q] == 0
    dst_q = None
    if own_input:
        for q, _ in terms:
            if uses[q] == 1:
                dst_q = q
                break
    for q, _ in terms:
        uses[q] -= 1
    h = quads[0].rows
    if dst_q is not None:
        dv = quads[dst_q]
        ordered = [(c, q) for q, c in terms if q == dst_q] + [(c, q) for q, c in terms if q != dst_q]
    else:
        dv = em.alloc_view(h, h)
        ordered = [(c, q) for q, c in terms]
    for r in range(h):
        for w in range(h):
            srcs = [(c, quads[q].addr(r, w)) for c, q in ordered]
            _emit_combo_word(em, dv.addr(r, w), srcs)
    for q, _ in terms:
        if own_input and uses[q] == 0 and q != dst_q:
            em.evict_view(quads[q])
    return dv, True


_STRASSEN_TIGHT_ORDER = (6, 4, 3, 1, 5, 0, 2)  # keeps peak residency near 3*s^2


@lru_cache(maxsize=None)
def _incache_order_candidates(scheme_id: str):
    cands = []
    if scheme_id == "strassen":
        cands.append(_STRASSEN_TIGHT_ORDER)
    cands.append(tuple(range(7)))
    cands.append(tuple(reversed(range(7))))
    return tuple(cands)


def _incache_fast_ordered(em, node, a, b, out, write_out, own_a, own_b, order):
    scheme = node.scheme
    h = node.size // 2
    aq = [a.quadrant(*qd) for qd in QUADS]
    bq = [b.quadrant(*qd) for qd in QUADS]
    a_uses = [sum(1 for i in range(7) if scheme.encode_a[i][q]) for q in range(4)]
    b_uses = [sum(1 for i in range(7) if scheme.encode_b[i][q]) for q in range(4)]
    out_q = [out.quadrant(*qd) for qd in QUADS]
    dec_remaining = [sum(1 for i in range(7) if scheme.decode[q][i]) for q in range(4)]
    dec_started = [False] * 4

    for idx in order:
        xa, own_xa = _build_block(em, scheme.encode_a[idx], aq, a_uses, own_a)
        xb, own_xb = _build_block(em, scheme.encode_b[idx], bq, b_uses, own_b)
        m_view = em.alloc_view(h, h)
        _incache_node(em, node.children[idx], xa, xb, m_view,
                      write_out=False, own_a=own_xa, own_b=own_xb)
        for q in range(4):
            coeff = scheme.decode[q][idx]
            if coeff == 0:
                continue
            oqv = out_q[q]
            if not dec_started[q]:
                dec_started[q] = True
                op = OP_CPY if coeff == 1 else OP_NEG
                for r in range(h):
                    for w in range(h):
                        em.compute(oqv.addr(r, w), op, m_view.addr(r, w))
            else:
                op = OP_ADD if coeff == 1 else OP_SUB
                for r in range(h):
                    for w in range(h):
                        em.compute(oqv.addr(r, w), op, oqv.addr(r, w), m_view.addr(r, w))
            dec_remaining[q] -= 1
            if dec_remaining[q] == 0 and write_out:
                for r in range(h):
                    em.write_run(oqv.row_start(r), h)
                    for w in range(h):
                        em.evict(oqv.addr(r, w))
        em.evict_view(m_view)


def _incache_node(em, node, a, b, out, write_out, own_a, own_b):
    """Evaluate the subtree entirely in cache.

    Operand words are resident on entry; owned operands are evicted at
    their last use.  The output lands at ``out``'s addresses and is written
    to slow memory (and evicted) when ``write_out`` is set, quadrant by
    quadrant as they complete.

    Child processing order drives the residency peak, so infeasible fixed
    orders fall through to an exhaustive permutation search; the outcome is
    memoized per (subtree, context) for the duration of one generation.
    """
    if isinstance(node, StandardLeaf):
        _incache_leaf(em, node, a, b, out, write_out, own_a, own_b)
        return
    key = (id(node), write_out, own_a, own_b, len(em.resident))
    memo = em.order_memo.get(key)
    if memo == "infeasible":
        raise _Budget()

    def attempt(order):
        chk = em.checkpoint()
        try:
            _incache_fast_ordered(em, node, a, b, out, write_out, own_a, own_b, order)
            return True
        except _Budget:
            em.rollback(chk)
            return False

    if memo is not None and attempt(memo):
        return
    tried = {memo} if memo is not None else set()
    for order in _incache_order_candidates(node.scheme.id):
        if order not in tried and attempt(order):
            em.order_memo[key] = order
            return
        tried.add(order)
    for order in itertools.permutations(range(7)):
        if order not in tried and attempt(order):
            em.order_memo[key] = order
            return
    em.order_memo[key] = "infeasible"
    raise _Budget()


# ---------------------------------------------------------------------------
# streaming fast nodes
# ---------------------------------------------------------------------------

def _single_plus_quad(coeffs):
    terms = [(q, c) for q, c in enumerate(coeffs) if c]
    if len(terms) == 1 and terms[0][1] == 1:
        return terms[0][0]
    return None


@lru_cache(maxsize=None)
def _fused_order(scheme: FastScheme):
    """Child order maximizing single-quadrant operand reuse between
    consecutive fused children; exhaustive over the 5040 orders, cached."""

    def score(order):
        s = 0
        for x, y in zip(order, order[1:]):
            qa = _single_plus_quad(scheme.encode_a[x])
            if qa is not None and scheme.encode_a[y][qa]:
                s += 1
            qb = _single_plus_quad(scheme.encode_b[x])
            if qb is not None and scheme.encode_b[y][qb]:
                s += 1
        return s

    best = max(itertools.permutations(range(7)), key=lambda o: (score(o), o))
    return best


def _build_from_slow(em, coeffs, quads, side, held):
    """Build one operand block in cache, reading quadrants from slow memory.

    ``held`` maps (side, quad) to a resident pristine quadrant block from
    the previous child; entries are consumed here.  Multi-term combos go in
    place over the first source block (its slow copy stays intact).
    """
    terms = [(q, c) for q, c in enumerate(coeffs) if c]
    views = {}
    for q, _ in terms:
        key = (side, q)
        if key in held:
            views[q] = held.pop(key)
        else:
            em.read_view(quads[q])
            views[q] = quads[q]
    if len(terms) == 1 and terms[0][1] == 1:
        return views[terms[0][0]]
    dst_q = terms[0][0]
    dv = views[dst_q]
    h = dv.rows
    ordered = [(c, q) for q, c in terms]
    for r in range(h):
        for w in range(h):
            srcs = [(c, views[q].addr(r, w)) for c, q in ordered]
            _emit_combo_word(em, dv.addr(r, w), srcs)
    for q, _ in terms[1:]:
        if views[q] is not dv:
            em.evict_view(views[q])
    return dv


def _fused_child(em, scheme, idx, child, aq, bq, m_view, held, next_idx, write_out=True):
    """Run one child of a streaming fast node entirely in cache, building
    its operands straight from the parent's quadrant arrays."""
    xa = _build_from_slow(em, scheme.encode_a[idx], aq, "A", held)
    xb = _build_from_slow(em, scheme.encode_b[idx], bq, "B", held)
    keep = []
    if next_idx is not None:
        qa = _single_plus_quad(scheme.encode_a[idx])
        if qa is not None and scheme.encode_a[next_idx][qa]:
            keep.append(("A", qa, xa))
        qb = _single_plus_quad(scheme.encode_b[idx])
        if qb is not None and scheme.encode_b[next_idx][qb]:
            keep.append(("B", qb, xb))
    own_a = not any(k[2] is xa for k in keep)
    own_b = not any(k[2] is xb for k in keep)
    _incache_node(em, child, xa, xb, m_view, write_out=write_out, own_a=own_a, own_b=own_b)
    for side, q, view in keep:
        held[(side, q)] = view


def _stream_encode(em, src_view, enc_rows, indices, dst_views):
    """Materialize the encoded operand blocks for ``indices`` in slow
    memory with one synchronized pass over the source quadrants."""
    h = src_view.rows // 2
    quads = [src_view.quadrant(*qd) for qd in QUADS]
    union = sorted({q for i in indices for q, c in enumerate(enc_rows[i]) if c})
    if em.M >= len(union) + 2:
        seg_cap = max(1, (em.M - 1) // (len(union) + 1))
        for r in range(h):
            for s0 in range(0, h, seg_cap):
                seg = min(seg_cap, h - s0)
                for q in union:
                    em.read_run(quads[q].row_start(r) + s0, seg)
                for i in indices:
                    terms = [(c, q) for q, c in enumerate(enc_rows[i]) if c]
                    dbase = dst_views[i].row_start(r) + s0
                    for w in range(seg):
                        srcs = [(c, quads[q].row_start(r) + s0 + w) for c, q in terms]
                        _emit_combo_word(em, dbase + w, srcs)
                    em.write_run(dbase, seg)
                    for w in range(seg):
                        em.evict(dbase + w)
                for q in union:
                    base = quads[q].row_start(r) + s0
                    for w in range(seg):
                        em.evict(base + w)
    else:
        # tiny cache: build each destination word by itself
        for i in indices:
            terms = [(c, q) for q, c in enumerate(enc_rows[i]) if c]
            for r in range(h):
                for w in range(h):
                    dst = dst_views[i].addr(r, w)
                    first = True
                    for c, q in terms:
                        srcw = quads[q].addr(r, w)
                        em.read_run(srcw, 1)
                        if first:
                            em.compute(dst, OP_CPY if c == 1 else OP_NEG, srcw)
                            first = False
                        else:
                            em.compute(dst, OP_ADD if c == 1 else OP_SUB, dst, srcw)
                        em.evict(srcw)
                    em.write_run(dst, 1)
                    em.evict(dst)


def _stream_decode(em, scheme, m_views, cv, resident_m=frozenset()):
    """Accumulate the node's output quadrants from the seven sub-products.

    Children in ``resident_m`` left their output in cache at the view's
    addresses; their words are consumed without a read pass.
    """
    h = m_views[0].rows
    out_q = [cv.quadrant(*qd) for qd in QUADS]
    resident_words = sum(m_views[i].words for i in resident_m)
    if em.M >= resident_words + 9:
        seg_cap = max(1, (em.M - 1 - resident_words) // (8 - len(resident_m)))
        for r in range(h):
            for s0 in range(0, h, seg_cap):
                seg = min(seg_cap, h - s0)
                for i in range(7):
                    if i not in resident_m:
                        em.read_run(m_views[i].row_start(r) + s0, seg)
                for q in range(4):
                    terms = [(c, i) for i, c in enumerate(scheme.decode[q]) if c]
                    dbase = out_q[q].row_start(r) + s0
                    for w in range(seg):
                        srcs = [(c, m_views[i].row_start(r) + s0 + w) for c, i in terms]
                        _emit_combo_word(em, dbase + w, srcs)
                    em.write_run(dbase, seg)
                    for w in range(seg):
                        em.evict(dbase + w)
                for i in range(7):
                    base = m_views[i].row_start(r) + s0
                    for w in range(seg):
                        em.evict(base + w)
    else:
        for q in range(4):
            terms = [(c, i) for i, c in enumerate(scheme.decode[q]) if c]
            for r in range(h):
                for w in range(h):
                    dst = out_q[q].addr(r, w)
                    first = True
                    for c, i in terms:
                        srcw = m_views[i].addr(r, w)
                        em.read_run(srcw, 1)
                        if first:
                            em.compute(dst, OP_CPY if c == 1 else OP_NEG, srcw)
                            first = False
                        else:
                            em.compute(dst, OP_ADD if c == 1 else OP_SUB, dst, srcw)
                        em.evict(srcw)
                    em.write_run(dst, 1)
                    em.evict(dst)


def _stream_fast(em, node, av, bv, cv):
    h = node.size // 2
    scheme = node.scheme
    aq = [av.quadrant(*qd) for qd in QUADS]
    bq = [bv.quadrant(*qd) for qd in QUADS]
    m_views = [em.alloc_view(h, h) for _ in range(7)]
    order = _fused_order(scheme)
    held = {}
    to_materialize = []
    resident_m = set()
    for pos, idx in enumerate(order):
        child = node.children[idx]
        last = pos == 6
        # (next child for operand keeping, write output to slow).  The last
        # fused child may leave its output in cache for the decode pass.
        attempts = []
        if last:
            if not to_materialize and em.M >= h * h + 9:
                attempts.append((None, False))
            attempts.append((None, True))
        else:
            attempts.append((order[pos + 1], True))
            attempts.append((None, True))
        done = False
        for next_idx, write_out in attempts:
            chk = em.checkpoint()
            held_chk = dict(held)
            try:
                _fused_child(em, scheme, idx, child, aq, bq, m_views[idx],
                             held, next_idx, write_out)
                if not write_out:
                    resident_m.add(idx)
                done = True
                break
            except _Budget:
                em.rollback(chk)
                held.clear()
                held.update(held_chk)
        if not done:
            to_materialize.append(idx)
    for view in held.values():
        em.evict_view(view)
    held.clear()
    if to_materialize:
        xa_views = {i: em.alloc_view(h, h) for i in to_materialize}
        xb_views = {i: em.alloc_view(h, h) for i in to_materialize}
        _stream_encode(em, av, scheme.encode_a, to_materialize, xa_views)
        _stream_encode(em, bv, scheme.encode_b, to_materialize, xb_views)
        for idx in to_materialize:
            _gen_node(em, node.children[idx], xa_views[idx], xb_views[idx], m_views[idx])
    _stream_decode(em, scheme, m_views, cv, frozenset(resident_m))


def _gen_node(em, node, av, bv, cv):
    if isinstance(node, StandardLeaf):
        _blocked(em, av, bv, cv)
        return
    chk = em.checkpoint()
    try:
        em.read_view(av)
        em.read_view(bv)
        _incache_node(em, node, av, bv, cv, write_out=True, own_a=True, own_b=True)
        return
    except _Budget:
        em.rollback(chk)
    _stream_fast(em, node, av, bv, cv)


def gen_hybrid_schedule(plan: RecursionPlan, cfg: MachineConfig) -> Schedule:
    """Depth-first I/O-efficient schedule executing the given plan."""
    n = plan.size
    layout = MemoryLayout(n)
    em = _Emitter(cfg, layout.temp_base)
    av = View(layout.a_base, n, n, n)
    bv = View(layout.b_base, n, n, n)
    cv = View(layout.c_base, n, n, n)
    _gen_node(em, plan, av, bv, cv)
    return Schedule(em.moves, layout, label=f"hybrid(n={n},M={cfg.M},B={cfg.B})")
