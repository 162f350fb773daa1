import math

import numpy as np
import pytest

from specdet import (
    BlockSymbol,
    CMatrix,
    SpectralModel,
    block_power_trace,
    block_trace,
    circle_model,
    invariant_determinant,
    lu_determinant,
    manifold_determinant,
    mat_mul,
    mat_power_trace,
    mat_trace,
    sphere2_model,
    spectral_determinant_product,
    torus2_model,
    weyl_tail_check,
)
from specdet.errors import EvaluationError, ParameterError

from support import assemble_block_diagonal, rand_cmatrix


def random_block_symbol(rng, levels=3, max_dim=4, scale=0.3):
    blocks = tuple(rand_cmatrix(rng, int(rng.integers(1, max_dim + 1)), scale=scale)
                   for _ in range(levels))
    return BlockSymbol(blocks)


def test_block_trace_zero():
    s = BlockSymbol((CMatrix.zeros(2, 2), CMatrix.zeros(3, 3)))
    assert block_trace(s) == 0


def test_block_trace_identity_counts_dimensions():
    s = BlockSymbol((CMatrix.identity(1), CMatrix.identity(2), CMatrix.identity(3)))
    assert block_trace(s) == 6


def test_block_trace_matches_assembled_diagonal():
    rng = np.random.default_rng(51)
    s = random_block_symbol(rng)
    assembled = assemble_block_diagonal(s.blocks)
    assert block_trace(s) == mat_trace(assembled)


def test_block_power_trace_diagonal_blocks():
    s = BlockSymbol((CMatrix.diagonal([0.2, -0.3]), CMatrix.diagonal([0.5])))
    expected = 0.2 ** 2 + (-0.3) ** 2 + 0.5 ** 2
    assert abs(block_power_trace(s, 2) - expected) < 1e-14


def test_block_power_trace_nilpotent():
    s = BlockSymbol((CMatrix.from_rows([[0, 1], [0, 0]]),))
    assert block_power_trace(s, 2) == 0
    assert block_power_trace(s, 3) == 0


def test_block_power_trace_matches_assembled_matrix():
    rng = np.random.default_rng(52)
    s = random_block_symbol(rng)
    assembled = assemble_block_diagonal(s.blocks)
    for m in (1, 2, 3):
        expected = mat_power_trace(assembled, m)
        got = block_power_trace(s, m)
        assert abs(got - expected) <= 1e-11 * max(1.0, abs(expected))


def test_power_symbol_equals_powered_blocks_exactly():
    rng = np.random.default_rng(53)
    s = random_block_symbol(rng)
    for m in (2, 3):
        powered = []
        for b in s.blocks:
            p = b
            for _ in range(m - 1):
                p = mat_mul(p, b)
            powered.append(p)
        assert block_power_trace(s, m) == block_trace(BlockSymbol(tuple(powered)))


def test_invariant_action_on_coordinate_vectors():
    # the assembled operator maps each level's coordinate column through
    # that level's block and nothing else
    rng = np.random.default_rng(54)
    s = random_block_symbol(rng)
    assembled = assemble_block_diagonal(s.blocks)
    offset = 0
    for block in s.blocks:
        for k in range(block.rows):
            column = CMatrix(assembled.rows, 1, tuple(
                1.0 + 0j if i == offset + k else 0j for i in range(assembled.rows)))
            image = mat_mul(assembled, column)
            level_slice = [image.at(offset + i, 0) for i in range(block.rows)]
            expected = [block.at(i, k) for i in range(block.rows)]
            assert level_slice == expected
            outside = [image.at(i, 0) for i in range(assembled.rows)
                       if not offset <= i < offset + block.rows]
            assert all(v == 0 for v in outside)
        offset += block.rows


def test_invariant_determinant_zero_symbol():
    s = BlockSymbol((CMatrix.zeros(2, 2),))
    assert invariant_determinant(s, 0.9, order=10).value == 1


def test_invariant_determinant_single_scalar_block():
    mu = 0.35 - 0.1j
    s = BlockSymbol((CMatrix.diagonal([mu]),))
    result = invariant_determinant(s, 1.0, order=40)
    assert abs(result.value - (1 + mu)) <= 1e-10


def test_invariant_determinant_example_blocks():
    s = BlockSymbol((CMatrix.from_rows([[0.2, 0.1], [0, 0.3]]),
                     CMatrix.from_rows([[0.05]])))
    result = invariant_determinant(s, 1.0, order=40)
    assert abs(result.value - 1.2 * 1.3 * 1.05) <= 1e-9


def test_invariant_determinant_factorizes_over_blocks():
    rng = np.random.default_rng(55)
    for _ in range(15):
        s = random_block_symbol(rng, levels=int(rng.integers(1, 5)))
        lam = 0.5 / max(1.0, sum(abs(z) for b in s.blocks for z in b.entries))
        result = invariant_determinant(s, lam, order=40, tol=1e-13)
        assert result.converged
        expected = 1 + 0j
        for b in s.blocks:
            shifted = CMatrix(b.rows, b.rows, tuple(
                lam * b.at(i, j) + (1.0 if i == j else 0.0)
                for i in range(b.rows) for j in range(b.rows)))
            expected *= lu_determinant(shifted)
        assert abs(result.value - expected) <= 1e-8 * max(1.0, abs(expected))


def test_manifold_determinant_trivial_spectrum():
    sp = SpectralModel([0.0], [1], nu=2.0)
    lam = 0.4 + 0.1j
    result = manifold_determinant(sp, 3.0, lam, order=40)
    assert abs(result.value - (1 + lam)) <= 1e-10
    assert result.diagnostics["weyl_tail_ratio"] == 0


def test_circle_model_matches_direct_product():
    sp = circle_model(10_000)
    lam = 0.3
    result = manifold_determinant(sp, 2.0, lam, order=30)
    product = spectral_determinant_product(sp, 2.0, lam)
    assert abs(result.value - product) <= 1e-6 * max(1.0, abs(product))


def test_sphere_trace_matches_direct_summation():
    sp = sphere2_model(2000)
    alpha = 3.0
    from specdet import spectral_trace_source

    trace = spectral_trace_source(sp, alpha).trace_power(1)
    direct = sum((2 * j + 1) * (1.0 + j * (j + 1.0)) ** -1.5 for j in range(2001))
    assert abs(trace - direct) <= 1e-10 * max(1.0, abs(direct))


def test_unit_multiplicity_model_equals_scalar_blocks():
    rng = np.random.default_rng(56)
    eigs = np.sort(rng.uniform(0.0, 30.0, size=12))
    sp = SpectralModel(eigs, np.ones(12, dtype=int), nu=2.0)
    alpha = 2.5
    lam = 0.4
    from_model = manifold_determinant(sp, alpha, lam, order=50, tol=1e-14)
    blocks = tuple(CMatrix.diagonal([(1.0 + e) ** (-alpha / 2.0)]) for e in eigs)
    from_blocks = invariant_determinant(BlockSymbol(blocks), lam, order=50, tol=1e-14)
    assert abs(from_model.value - from_blocks.value) <= 1e-12 * abs(from_blocks.value)


def test_weyl_tail_flags():
    sp = circle_model(10_000)
    assert weyl_tail_check(sp, 2.0) < 0.05
    assert weyl_tail_check(sp, 1.0) >= 0.05  # alpha = manifold dimension
    sphere = sphere2_model(10_000)
    assert weyl_tail_check(sphere, 2.0) >= 0.05


def test_manifold_determinant_warns_when_alpha_at_dimension():
    sp = circle_model(500)
    result = manifold_determinant(sp, 1.0, 0.1, order=20, manifold_dim=1)
    assert any("alpha" in w for w in result.diagnostics.get("warnings", []))
    assert result.diagnostics["weyl_flag"] == "slow/divergent"


def test_circle_model_values():
    sp = circle_model(5)
    assert sp.multiplicities.tolist() == [1, 2, 2, 2, 2, 2]
    assert sp.eigenvalues[3] == pytest.approx(4 * math.pi ** 2 * 9)


def test_sphere_model_dimension_count():
    sp = sphere2_model(60)
    assert int(sp.multiplicities.sum()) == 61 ** 2
    assert sp.eigenvalues[4] == 20


def test_torus2_model_matches_direct_enumeration():
    sp = torus2_model(20)
    bound = 12
    counts = {}
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            counts[a * a + b * b] = counts.get(a * a + b * b, 0) + 1
    norms = sorted(counts)[:21]
    assert sp.eigenvalues.tolist() == [4 * math.pi ** 2 * q for q in norms]
    assert sp.multiplicities.tolist() == [counts[q] for q in norms]


def test_negative_eigenvalue_rejected():
    with pytest.raises(EvaluationError, match="positive"):
        SpectralModel([1.0, -0.5], [1, 1], nu=2.0)


def test_bad_multiplicity_rejected():
    with pytest.raises(ParameterError):
        SpectralModel([1.0], [0], nu=2.0)


def test_alpha_must_be_positive():
    sp = circle_model(10)
    with pytest.raises(ParameterError):
        manifold_determinant(sp, 0.0, 0.1)
