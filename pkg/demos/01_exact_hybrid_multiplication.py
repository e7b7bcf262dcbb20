"""Walkthrough: exact matrices, recursion plans, and plan execution.

Everything lives in Z/pZ with p = 2^31 - 1, so results either match the
definition-based product exactly or the code is wrong; there is no epsilon.
"""

import numpy as np

from hybridmm import (Matrix, StandardLeaf, StandardVariant, execute,
                      mat_mul_naive, parse_plan, plan_stats, random_plan,
                      serialize_plan, uniform_plan)

# --- exact arithmetic ------------------------------------------------------

a = Matrix.from_rows([[1, 2], [3, 4]])
b = Matrix.from_rows([[5, 6], [7, 8]])
print("A x B (definition):", mat_mul_naive(a, b).data.tolist())

# --- plans are explicit trees ---------------------------------------------

# the classical seven-product recursion down to 2x2, then scalar products
plan = uniform_plan(8, 1)
st = plan_stats(plan)
print(f"uniform(8,1): {st.fast_nodes} fast nodes, {st.standard_leaves} leaves")

# cutoff at 2: two recursion levels, forty-nine 2x2 standard leaves
plan = uniform_plan(8, 2)
st = plan_stats(plan)
print(f"uniform(8,2): {st.fast_nodes} fast nodes, leaf sizes {st.leaf_sizes}")

# non-uniform trees mix the strategies freely, node by node
wild = random_plan(16, p_fast=0.6, seed=7)
print("random plan text:", serialize_plan(wild)[:72], "...")
assert parse_plan(serialize_plan(wild)) == wild  # round-trip stable

# --- execution matches the oracle exactly ----------------------------------

rng = np.random.default_rng(0)
A = Matrix.random(16, rng)
B = Matrix.random(16, rng)
C, trace = execute(wild, A, B)
print("matches definition:", C == mat_mul_naive(A, B))
print(f"trace: {trace.leaf_mul_count()} leaf multiplications, "
      f"{trace.total_elementary_products()} elementary products")

# both standard variants compute the same values
it = execute(StandardLeaf(StandardVariant.ITERATIVE_DEF, 16), A, B)[0]
br = execute(StandardLeaf(StandardVariant.BLOCK_RECURSIVE, 16), A, B)[0]
print("variants agree:", it == br)
