"""Execute a recursion plan on concrete matrices.

The recursion works on int64 ndarrays of shape (..., s, s): any leading axes
are broadcast through untouched, so a whole batch of matrix pairs can be run
through one plan in a single tree walk. ``execute`` is the single-pair
surface; ``execute_stacked`` exposes the same core for bulk verification.

Alongside the product the walk records a trace of block-level events
(encodes, leaf multiplications, decodes) used by the scheduling and
bound-accounting modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .plans import RecursionPlan, StandardLeaf, StandardVariant
from .ringmat import DEFAULT_MODULUS, Matrix, matmul_mod

BLOCK_ENCODE = "BLOCK_ENCODE"
LEAF_MUL = "LEAF_MUL"
BLOCK_DECODE = "BLOCK_DECODE"


@dataclass
class ExecTrace:
    """Ordered block-level events plus per-leaf elementary-product counts.

    Events are tuples:
      (BLOCK_ENCODE, level, factor, child_index)   factor in {"A", "B"}
      (LEAF_MUL, leaf_id, n_leaf)
      (BLOCK_DECODE, level, quadrant)
    """

    events: list = field(default_factory=list)
    leaf_products: list = field(default_factory=list)  # (leaf_id, n_leaf)

    def leaf_mul_count(self) -> int:
        return len(self.leaf_products)

    def total_elementary_products(self) -> int:
        return sum(s ** 3 for _, s in self.leaf_products)


def _quads(x: np.ndarray):
    h = x.shape[-1] // 2
    return (x[..., :h, :h], x[..., :h, h:], x[..., h:, :h], x[..., h:, h:])


def _combine(coeffs, quads, modulus):
    """Linear combination of quadrant blocks; coefficients in {-1, 0, 1}."""
    acc = None
    for c, q in zip(coeffs, quads):
        if c == 0:
            continue
        if acc is None:
            acc = q if c == 1 else (modulus - q)
        elif c == 1:
            acc = acc + q
        else:
            acc = acc - q
    if acc is None:
        return np.zeros_like(quads[0])
    return acc % modulus


def _standard_block_recursive(a, b, modulus):
    """Quadrant divide-and-conquer with 8 half-size products, down to n=1."""
    s = a.shape[-1]
    if s == 1:
        return (a * b) % modulus
    a11, a12, a21, a22 = _quads(a)
    b11, b12, b21, b22 = _quads(b)
    h = s // 2
    out = np.empty(a.shape, dtype=np.int64)
    rec = _standard_block_recursive
    out[..., :h, :h] = (rec(a11, b11, modulus) + rec(a12, b21, modulus)) % modulus
    out[..., :h, h:] = (rec(a11, b12, modulus) + rec(a12, b22, modulus)) % modulus
    out[..., h:, :h] = (rec(a21, b11, modulus) + rec(a22, b21, modulus)) % modulus
    out[..., h:, h:] = (rec(a21, b12, modulus) + rec(a22, b22, modulus)) % modulus
    return out


def _standard_kernel(variant: StandardVariant, a, b, modulus):
    if variant is StandardVariant.BLOCK_RECURSIVE:
        return _standard_block_recursive(a, b, modulus)
    return matmul_mod(a, b, modulus)


def execute_standard_leaf(variant: StandardVariant, a: Matrix, b: Matrix) -> Matrix:
    """Standard-class product; both variants agree exactly on the values."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    return Matrix(_standard_kernel(variant, a.data, b.data, a.modulus), a.modulus)


def _run(node: RecursionPlan, a, b, modulus, trace: ExecTrace, level: int):
    if isinstance(node, StandardLeaf):
        leaf_id = len(trace.leaf_products)
        trace.events.append((LEAF_MUL, leaf_id, node.size))
        trace.leaf_products.append((leaf_id, node.size))
        return _standard_kernel(node.variant, a, b, modulus)

    scheme = node.scheme
    aq = _quads(a)
    bq = _quads(b)
    products = []
    for i, child in enumerate(node.children):
        trace.events.append((BLOCK_ENCODE, level, "A", i))
        xa = _combine(scheme.encode_a[i], aq, modulus)
        trace.events.append((BLOCK_ENCODE, level, "B", i))
        xb = _combine(scheme.encode_b[i], bq, modulus)
        products.append(_run(child, xa, xb, modulus, trace, level + 1))

    s = node.size
    h = s // 2
    out = np.empty(a.shape[:-2] + (s, s), dtype=np.int64)
    slices = ((slice(None, h), slice(None, h)), (slice(None, h), slice(h, None)),
              (slice(h, None), slice(None, h)), (slice(h, None), slice(h, None)))
    for q in range(4):
        trace.events.append((BLOCK_DECODE, level, q))
        out[(..., *slices[q])] = _combine(scheme.decode[q], products, modulus)
    return out


def execute_stacked(plan: RecursionPlan, a: np.ndarray, b: np.ndarray,
                    modulus: int = DEFAULT_MODULUS):
    """Run the plan over stacked operands of shape (..., n, n).

    Returns (product array, trace). The trace describes the single tree
    walk, which is shared by every matrix pair in the stack.
    """
    if a.shape != b.shape or a.shape[-1] != plan.size or a.shape[-2] != plan.size:
        raise ValueError(f"operand shape {a.shape} does not match plan size {plan.size}")
    trace = ExecTrace()
    out = _run(plan, a % modulus, b % modulus, modulus, trace, 0)
    return out, trace


def execute(plan: RecursionPlan, a: Matrix, b: Matrix):
    """Multiply via the plan; returns (C, trace) with C exactly equal to the
    definition-based product."""
    if a.n != b.n or a.n != plan.size:
        raise ValueError(f"plan size {plan.size} does not match matrices of size {a.n}, {b.n}")
    out, trace = execute_stacked(plan, a.data, b.data, a.modulus)
    return Matrix(out, a.modulus), trace
