"""Recursion plans for hybrid matrix multiplication.

A plan is an explicit tree that tells the execution engine, for each
sub-problem, whether to multiply with a standard (cubic) algorithm or to
apply a fast 2x2-base scheme that encodes the four quadrant blocks of each
factor into seven half-size sub-problems and decodes the seven sub-products
back into the four quadrants of the result.

Fast schemes are stored as coefficient matrices over {-1, 0, 1}, which is
also the single source of truth for the encoder/decoder graphs used by the
CDAG module.

Plan text format (round-trip stable, one plan per line):

    plan  := fast | leaf
    fast  := "F[" scheme "](" plan (" " plan){6} ")"
    leaf  := "S[" variant ",n=" INT "]"

with scheme in {strassen, winograd} and variant in {iterative, block}.
Example: ``F[strassen](S[iterative,n=1] ... S[iterative,n=1])``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .ringmat import is_pow2


class StandardVariant(Enum):
    ITERATIVE_DEF = "iterative"
    BLOCK_RECURSIVE = "block"


@dataclass(frozen=True)
class FastScheme:
    """A 2x2-base fast multiplication scheme in coefficient form.

    ``encode_a[i]`` maps the quadrants [X11, X12, X21, X22] of A to the
    left operand of sub-problem i; ``encode_b`` likewise for B; ``decode[q]``
    maps the seven sub-products to quadrant q of C.
    """

    id: str
    encode_a: tuple  # 7 rows of 4 coefficients in {-1, 0, 1}
    encode_b: tuple
    decode: tuple  # 4 rows of 7 coefficients in {-1, 0, 1}

    def __post_init__(self):
        if len(self.encode_a) != 7 or len(self.encode_b) != 7 or len(self.decode) != 4:
            raise ValueError("scheme must have 7 encode rows per factor and 4 decode rows")
        for rows, width in ((self.encode_a, 4), (self.encode_b, 4), (self.decode, 7)):
            for r in rows:
                if len(r) != width or any(c not in (-1, 0, 1) for c in r):
                    raise ValueError("coefficients must be in {-1, 0, 1}")
        for rows, name in ((self.encode_a, "encode_a"), (self.encode_b, "encode_b")):
            if len({tuple(r) for r in rows}) != 7:
                raise ValueError(f"{name} has two identical rows")

    def support_a(self, i: int):
        """Quadrant indices feeding the left operand of sub-problem i."""
        return tuple(q for q, c in enumerate(self.encode_a[i]) if c != 0)

    def support_b(self, i: int):
        return tuple(q for q, c in enumerate(self.encode_b[i]) if c != 0)


def _rows(m):
    return tuple(tuple(r) for r in m)


# Coefficients transcribed from the classical seven-product recursion:
#   M1=(A11+A22)(B11+B22)  M2=(A21+A22)B11  M3=A11(B12-B22)  M4=A22(B21-B11)
#   M5=(A11+A12)B22  M6=(A21-A11)(B11+B12)  M7=(A12-A22)(B21+B22)
#   C11=M1+M4-M5+M7  C12=M3+M5  C21=M2+M4  C22=M1-M2+M3+M6
STRASSEN = FastScheme(
    id="strassen",
    encode_a=_rows([
        [1, 0, 0, 1],
        [0, 0, 1, 1],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [1, 1, 0, 0],
        [-1, 0, 1, 0],
        [0, 1, 0, -1],
    ]),
    encode_b=_rows([
        [1, 0, 0, 1],
        [1, 0, 0, 0],
        [0, 1, 0, -1],
        [-1, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 1, 0, 0],
        [0, 0, 1, 1],
    ]),
    decode=_rows([
        [1, 0, 0, 1, -1, 0, 1],
        [0, 0, 1, 0, 1, 0, 0],
        [0, 1, 0, 1, 0, 0, 0],
        [1, -1, 1, 0, 0, 1, 0],
    ]),
)

# Variant with fewer additions; same seven-product structure.
WINOGRAD = FastScheme(
    id="winograd",
    encode_a=_rows([
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [1, 1, -1, -1],
        [0, 0, 0, 1],
        [0, 0, 1, 1],
        [-1, 0, 1, 1],
        [1, 0, -1, 0],
    ]),
    encode_b=_rows([
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, -1, -1, 1],
        [-1, 1, 0, 0],
        [1, -1, 0, 1],
        [0, -1, 0, 1],
    ]),
    decode=_rows([
        [1, 1, 0, 0, 0, 0, 0],
        [1, 0, 1, 0, 1, 1, 0],
        [1, 0, 0, -1, 0, 1, 1],
        [1, 0, 0, 0, 1, 1, 1],
    ]),
)

SCHEMES = {s.id: s for s in (STRASSEN, WINOGRAD)}


@dataclass(frozen=True)
class StandardLeaf:
    variant: StandardVariant
    size: int

    def __post_init__(self):
        if not is_pow2(self.size):
            raise ValueError(f"leaf size must be a power of two, got {self.size}")


@dataclass(frozen=True)
class FastNode:
    scheme: FastScheme
    children: tuple  # exactly 7 plans, ordered by sub-problem index
    size: int = field(default=0)

    def __post_init__(self):
        if len(self.children) != 7:
            raise ValueError("fast node needs exactly 7 children")
        child_size = self.children[0].size
        if any(c.size != child_size for c in self.children):
            raise ValueError("children must all have the same size")
        size = 2 * child_size
        if self.size and self.size != size:
            raise ValueError(f"size {self.size} inconsistent with children of size {child_size}")
        object.__setattr__(self, "size", size)
        if self.size < 2:
            raise ValueError("fast node requires size >= 2")


RecursionPlan = Union[StandardLeaf, FastNode]


def uniform_plan(n: int, n0: int, scheme: FastScheme = STRASSEN,
                 variant: StandardVariant = StandardVariant.ITERATIVE_DEF) -> RecursionPlan:
    """Fast recursion from size n down to the cutoff: sizes <= n0 go standard.

    Equal-size subtrees share the same object, so uniform plans stay small
    in memory even when the tree has millions of leaves.
    """
    if not is_pow2(n) or not is_pow2(n0):
        raise ValueError("n and n0 must be powers of two")
    if n0 > n:
        raise ValueError(f"n0={n0} exceeds n={n}")
    node: RecursionPlan = StandardLeaf(variant, n0)
    size = n0
    while size < n:
        size *= 2
        node = FastNode(scheme, (node,) * 7)
    if n <= n0:
        return StandardLeaf(variant, n)
    return node


def random_plan(n: int, p_fast: float, seed: int, scheme: FastScheme = STRASSEN,
                variant: StandardVariant = StandardVariant.ITERATIVE_DEF) -> RecursionPlan:
    """Independently choose fast/standard at every node; size-1 nodes are leaves.

    Deterministic for a fixed seed: nodes are decided in preorder.
    """
    if not is_pow2(n):
        raise ValueError("n must be a power of two")
    rng = random.Random(seed)

    def build(size: int) -> RecursionPlan:
        if size > 1 and rng.random() < p_fast:
            return FastNode(scheme, tuple(build(size // 2) for _ in range(7)))
        return StandardLeaf(variant, size)

    return build(n)


@dataclass(frozen=True)
class PlanStats:
    fast_nodes: int
    standard_leaves: int
    leaf_sizes: dict

    def __iter__(self):  # convenient unpacking in tests
        return iter((self.fast_nodes, self.standard_leaves, self.leaf_sizes))


def plan_stats(plan: RecursionPlan) -> PlanStats:
    """Exhaustive node counts; immune to shared subtrees."""
    fast = 0
    leaves = 0
    sizes: Counter = Counter()
    stack = [plan]
    while stack:
        node = stack.pop()
        if isinstance(node, FastNode):
            fast += 1
            stack.extend(node.children)
        else:
            leaves += 1
            sizes[node.size] += 1
    return PlanStats(fast, leaves, dict(sizes))


class PlanParseError(ValueError):
    def __init__(self, pos: int, expected: str, got: str):
        self.pos = pos
        super().__init__(f"parse error at position {pos}: expected {expected}, got {got!r}")


def serialize_plan(plan: RecursionPlan) -> str:
    if isinstance(plan, StandardLeaf):
        return f"S[{plan.variant.value},n={plan.size}]"
    inner = " ".join(serialize_plan(c) for c in plan.children)
    return f"F[{plan.scheme.id}]({inner})"


def parse_plan(text: str) -> RecursionPlan:
    """Parse the plan text format; errors carry the offending position."""
    s = text
    pos = 0

    def peek():
        return s[pos] if pos < len(s) else "<end>"

    def expect(tok: str):
        nonlocal pos
        if not s.startswith(tok, pos):
            raise PlanParseError(pos, repr(tok), s[pos:pos + len(tok)] or "<end>")
        pos += len(tok)

    def skip_ws():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def parse_int() -> int:
        nonlocal pos
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise PlanParseError(pos, "integer", peek())
        return int(s[start:pos])

    def parse_name(options) -> str:
        nonlocal pos
        start = pos
        while pos < len(s) and (s[pos].isalnum() or s[pos] in "_-"):
            pos += 1
        name = s[start:pos]
        if name not in options:
            raise PlanParseError(start, f"one of {sorted(options)}", name or peek())
        return name

    def parse_node() -> RecursionPlan:
        nonlocal pos
        skip_ws()
        if peek() == "S":
            expect("S")
            expect("[")
            variant = StandardVariant(parse_name({v.value for v in StandardVariant}))
            expect(",n=")
            n = parse_int()
            expect("]")
            if not is_pow2(n):
                raise PlanParseError(pos, "power-of-two leaf size", str(n))
            return StandardLeaf(variant, n)
        if peek() == "F":
            expect("F")
            expect("[")
            scheme = SCHEMES[parse_name(set(SCHEMES))]
            expect("]")
            expect("(")
            children = []
            for i in range(7):
                children.append(parse_node())
            skip_ws()
            expect(")")
            return FastNode(scheme, tuple(children))
        raise PlanParseError(pos, "'S' or 'F'", peek())

    node = parse_node()
    skip_ws()
    if pos != len(s):
        raise PlanParseError(pos, "<end>", peek())
    return node
