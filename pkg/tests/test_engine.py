import numpy as np
import pytest

from hybridmm.engine import (BLOCK_DECODE, BLOCK_ENCODE, LEAF_MUL, execute,
                             execute_stacked, execute_standard_leaf)
from hybridmm.plans import (STRASSEN, WINOGRAD, StandardLeaf, StandardVariant,
                            plan_stats, random_plan, uniform_plan)
from hybridmm.ringmat import DEFAULT_MODULUS, Matrix, mat_mul_naive, matmul_mod

IT = StandardVariant.ITERATIVE_DEF
BR = StandardVariant.BLOCK_RECURSIVE


def test_standard_leaf_matches_oracle():
    rng = np.random.default_rng(0)
    a = Matrix.random(8, rng)
    b = Matrix.random(8, rng)
    c, _ = execute(StandardLeaf(IT, 8), a, b)
    assert c == mat_mul_naive(a, b)


def test_strassen_2x2_frozen_example():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.from_rows([[5, 6], [7, 8]])
    c, _ = execute(uniform_plan(2, 1, STRASSEN), a, b)
    assert c == Matrix.from_rows([[19, 22], [43, 50]])


def test_uniform_16_4_oracle_50_pairs():
    rng = np.random.default_rng(1)
    plan = uniform_plan(16, 4)
    a = rng.integers(0, DEFAULT_MODULUS, size=(50, 16, 16), dtype=np.int64)
    b = rng.integers(0, DEFAULT_MODULUS, size=(50, 16, 16), dtype=np.int64)
    out, _ = execute_stacked(plan, a, b)
    assert np.array_equal(out, matmul_mod(a, b, DEFAULT_MODULUS))


def test_variants_agree():
    rng = np.random.default_rng(2)
    for _ in range(100):
        a = Matrix.random(8, rng)
        b = Matrix.random(8, rng)
        assert execute_standard_leaf(IT, a, b) == execute_standard_leaf(BR, a, b)


def test_standard_leaf_edge_cases():
    a = Matrix.from_rows([[7]])
    b = Matrix.from_rows([[9]])
    assert execute_standard_leaf(IT, a, b) == Matrix.from_rows([[63]])
    rng = np.random.default_rng(3)
    m = Matrix.random(4, rng)
    assert execute_standard_leaf(BR, m, Matrix.identity(4)) == m


def test_size_mismatch_errors():
    rng = np.random.default_rng(4)
    with pytest.raises(ValueError):
        execute(uniform_plan(4, 1), Matrix.random(8, rng), Matrix.random(8, rng))
    with pytest.raises(ValueError):
        execute_standard_leaf(IT, Matrix.random(4, rng), Matrix.random(2, rng))


def test_trace_leaf_count_matches_plan_stats():
    rng = np.random.default_rng(5)
    for plan in (uniform_plan(8, 2), random_plan(16, 0.5, seed=3),
                 StandardLeaf(BR, 8)):
        a = Matrix.random(plan.size, rng)
        b = Matrix.random(plan.size, rng)
        _, trace = execute(plan, a, b)
        assert trace.leaf_mul_count() == plan_stats(plan).standard_leaves


def test_trace_elementary_products():
    rng = np.random.default_rng(6)
    plan = uniform_plan(8, 2)
    a = Matrix.random(8, rng)
    b = Matrix.random(8, rng)
    _, trace = execute(plan, a, b)
    assert trace.total_elementary_products() == 49 * 8


def test_trace_event_shape():
    rng = np.random.default_rng(7)
    plan = uniform_plan(4, 2)
    _, trace = execute(plan, Matrix.random(4, rng), Matrix.random(4, rng))
    kinds = [e[0] for e in trace.events]
    assert kinds.count(LEAF_MUL) == 7
    assert kinds.count(BLOCK_ENCODE) == 14  # 7 children x 2 factors
    assert kinds.count(BLOCK_DECODE) == 4
    # encodes precede the child's leaf event, decodes come last
    assert kinds[0] == BLOCK_ENCODE
    assert kinds[-1] == BLOCK_DECODE


@pytest.mark.parametrize("scheme", [STRASSEN, WINOGRAD])
def test_oracle_equality_across_plans(scheme):
    rng = np.random.default_rng(8)
    plans = [uniform_plan(16, 2, scheme), uniform_plan(16, 16, scheme),
             random_plan(16, 0.7, seed=1, scheme=scheme)]
    a = rng.integers(0, DEFAULT_MODULUS, size=(20, 16, 16), dtype=np.int64)
    b = rng.integers(0, DEFAULT_MODULUS, size=(20, 16, 16), dtype=np.int64)
    want = matmul_mod(a, b, DEFAULT_MODULUS)
    for plan in plans:
        out, _ = execute_stacked(plan, a, b)
        assert np.array_equal(out, want)


def test_execute_agrees_with_stacked():
    rng = np.random.default_rng(9)
    plan = uniform_plan(8, 1)
    a = rng.integers(0, DEFAULT_MODULUS, size=(3, 8, 8), dtype=np.int64)
    b = rng.integers(0, DEFAULT_MODULUS, size=(3, 8, 8), dtype=np.int64)
    stacked, _ = execute_stacked(plan, a, b)
    for i in range(3):
        c, _ = execute(plan, Matrix(a[i]), Matrix(b[i]))
        assert np.array_equal(c.data, stacked[i])
