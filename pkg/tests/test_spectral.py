"""Torus grids, transforms, multipliers, sampling identity, weighted norms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import scalar_oracle as oracle
from mwlp.errors import (
    BandTooLarge,
    DivergentFit,
    EmptyBand,
    GridMismatch,
    OffsetNotOnGrid,
)
from mwlp.spectral import (
    MultiplierSymbol,
    SampledVectorField,
    TorusGrid,
    apply_multiplier,
    bandlimit_check,
    constant_one,
    decay_constant,
    forward_transform,
    inverse_transform,
    load_field,
    lp_w_norm,
    make_symbol,
    raised_cosine,
    sampling_series,
    save_field,
    synthesize_bandlimited,
    triangle,
)
from mwlp.weights import WeightSpec

GRID = TorusGrid(1, 64, 512, 0.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        TorusGrid(1, 63, 512)
    with pytest.raises(ValueError):
        TorusGrid(1, 64, 100)
    with pytest.raises(ValueError):
        TorusGrid(1, 64, 512, offset=1.5)


def test_round_trip_exact():
    f = synthesize_bandlimited(GRID, 4.0, 2, seed=0)
    g = inverse_transform(GRID, forward_transform(f))
    assert np.max(np.abs(g.values - f.values)) <= 1e-13 * np.max(np.abs(f.values))


def test_transform_matches_dft_oracle():
    grid = TorusGrid(1, 16, 64, 0.5)
    f = synthesize_bandlimited(grid, 3.0, 1, seed=1)
    got = forward_transform(f)[:, 0]
    want = oracle.dft(f.values[:, 0], 16, 64, 0.5)
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


def test_parseval():
    f = synthesize_bandlimited(GRID, 6.0, 2, seed=2)
    spec = forward_transform(f)
    lhs = GRID.freq_spacing * np.sum(np.abs(spec) ** 2)
    rhs = GRID.h * np.sum(np.abs(f.values) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * rhs


def test_multiplier_on_pure_frequency():
    """phi(D) e^{i xi0 x} = phi(xi0) e^{i xi0 x}."""
    xi0 = GRID.freq_axis[260]
    vals = np.exp(1j * xi0 * GRID.x_axis)[:, np.newaxis]
    f = SampledVectorField(GRID, vals, band_radius=abs(xi0) + 1.0)
    sym = make_symbol(GRID, 8.0, raised_cosine(8.0))
    got = apply_multiplier(sym, f).values
    phi0 = raised_cosine(8.0)(np.array([[xi0]]))[0]
    assert np.max(np.abs(got - phi0 * vals)) <= 1e-12


def test_multiplier_matches_dft_oracle():
    grid = TorusGrid(1, 16, 64, 0.5)
    f = synthesize_bandlimited(grid, 3.0, 1, seed=3)
    sym = make_symbol(grid, 4.0, raised_cosine(4.0))
    got = apply_multiplier(sym, f).values[:, 0]
    want = oracle.apply_multiplier(
        f.values[:, 0], raised_cosine(4.0)(grid.freq_coords()), 16, 64, 0.5
    )
    assert np.max(np.abs(got - want)) <= 1e-10 * np.max(np.abs(want))


def test_multiplier_composition_and_linearity():
    f = synthesize_bandlimited(GRID, 6.0, 2, seed=4)
    a = make_symbol(GRID, 8.0, raised_cosine(8.0))
    b = make_symbol(GRID, 8.0, triangle(8.0))

    def prod(xi):
        return raised_cosine(8.0)(xi) * triangle(8.0)(xi)

    ab = make_symbol(GRID, 8.0, prod)
    got = apply_multiplier(a, apply_multiplier(b, f)).values
    want = apply_multiplier(ab, f).values
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(f.values))

    g = synthesize_bandlimited(GRID, 6.0, 2, seed=5)
    sum_field = SampledVectorField(GRID, f.values + 2.0 * g.values, band_radius=6.0)
    lin = apply_multiplier(a, sum_field).values
    sep = apply_multiplier(a, f).values + 2.0 * apply_multiplier(a, g).values
    assert np.max(np.abs(lin - sep)) <= 1e-12 * np.max(np.abs(sep))


def test_identity_symbol_is_identity():
    f = synthesize_bandlimited(GRID, 6.0, 1, seed=6)
    sym = make_symbol(GRID, np.inf, constant_one(), bandlimited=False)
    got = apply_multiplier(sym, f).values
    assert np.max(np.abs(got - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_synthesize_band_and_determinism():
    f = synthesize_bandlimited(GRID, 5.0, 2, seed=9, profile="decaying")
    ok, ratio = bandlimit_check(f, 5.0, 1e-10)
    assert ok and ratio <= 1e-10
    g = synthesize_bandlimited(GRID, 5.0, 2, seed=9, profile="decaying")
    assert np.array_equal(f.values, g.values)
    with pytest.raises(EmptyBand):
        synthesize_bandlimited(GRID, 2.0 * GRID.nyquist, 1, seed=0)
    with pytest.raises(EmptyBand):
        synthesize_bandlimited(GRID, 0.01, 1, seed=0, exclude_zero=True)


def test_grid_mismatch():
    f = synthesize_bandlimited(GRID, 5.0, 1, seed=0)
    other = TorusGrid(1, 64, 512, 0.5)
    sym = make_symbol(other, 5.0, raised_cosine(5.0))
    with pytest.raises(GridMismatch):
        apply_multiplier(sym, f)


@given(st.integers(0, 2**32 - 1), st.floats(0.3, 1.0))
@settings(max_examples=25, deadline=None)
def test_p_triangle_inequality(seed, p):
    """||f + g||^p <= ||f||^p + ||g||^p for the quasi-norm range p <= 1."""
    rng = np.random.default_rng(seed)
    grid = TorusGrid(1, 8, 32, 0.5)
    fv = rng.standard_normal((32, 2)) + 1j * rng.standard_normal((32, 2))
    gv = rng.standard_normal((32, 2)) + 1j * rng.standard_normal((32, 2))
    spec = WeightSpec.scalar_power(1, 2, -0.25)
    f = SampledVectorField(grid, fv)
    g = SampledVectorField(grid, gv)
    s = SampledVectorField(grid, fv + gv)
    lhs = lp_w_norm(s, spec, p) ** p
    rhs = lp_w_norm(f, spec, p) ** p + lp_w_norm(g, spec, p) ** p
    assert lhs <= rhs * (1.0 + 1e-10)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
def test_lp_w_norm_matches_scalar_oracle(p):
    grid = TorusGrid(1, 16, 64, 0.5)
    f = synthesize_bandlimited(grid, 3.0, 1, seed=11)
    spec = WeightSpec.scalar_power(1, 1, -0.5)
    got = lp_w_norm(f, spec, p)
    want = oracle.lp_norm(
        f.values[:, 0], np.abs(oracle.grid_nodes(16, 64, 0.5)) ** -0.5, 16 / 64, p
    )
    assert abs(got - want) <= 1e-12 * want


def test_lp_w_norm_diagonal_weight():
    grid = TorusGrid(1, 16, 64, 0.5)
    f = synthesize_bandlimited(grid, 3.0, 2, seed=12)
    spec = WeightSpec.diagonal_power(1, (-0.5, 0.25))
    x = oracle.grid_nodes(16, 64, 0.5)
    p = 1.0
    w_half = np.stack([np.abs(x) ** -0.5, np.abs(x) ** 0.25], axis=-1)
    mag = np.sqrt(np.sum((w_half * np.abs(f.values)) ** 2, axis=-1))
    want = (16 / 64 * np.sum(mag**p)) ** (1.0 / p)
    assert abs(lp_w_norm(f, spec, p) - want) <= 1e-12 * want


def test_decay_constant_scaling_and_fejer():
    sym = make_symbol(GRID, 8.0, raised_cosine(8.0))
    K = decay_constant(sym, 3.0)

    def doubled(xi):
        return 2.0 * raised_cosine(8.0)(xi)

    sym2 = make_symbol(GRID, 8.0, doubled)
    K2 = decay_constant(sym2, 3.0)
    assert abs(K2 - 2.0 * K) <= 1e-12 * K

    fejer = make_symbol(GRID, 8.0, triangle(8.0))
    with pytest.raises(DivergentFit):
        decay_constant(fejer, 3.0, refine_check=True)
    fejer2 = make_symbol(GRID, 8.0, triangle(8.0))
    assert decay_constant(fejer2, 2.0, refine_check=True) < np.inf


def test_sampling_series_matches_multiplier_and_offset_independence():
    """The lattice series reproduces phi(D)f at nodes, for every offset u."""
    grid = TorusGrid(1, 64, 512, 0.0)
    sym = make_symbol(grid, 1.0, raised_cosine(1.0))
    decay_constant(sym, 4.0)
    f = synthesize_bandlimited(grid, 1.0, 2, seed=13)
    g = apply_multiplier(sym, f)
    t = 3.0
    t_idx = int(np.rint((t - grid.x0) / grid.h))
    direct = g.values[t_idx]
    vals = []
    for u in (0.0, 0.5, -0.5, 0.25, grid.h * 3):
        vals.append(sampling_series(sym, f, [u], [t]))
    scale = np.max(np.abs(g.values))
    for v in vals:
        assert np.max(np.abs(v - direct)) <= 1e-9 * scale


def test_sampling_series_preconditions():
    grid = TorusGrid(1, 64, 512, 0.0)
    sym = make_symbol(grid, 1.0, raised_cosine(1.0))
    f = synthesize_bandlimited(grid, 1.0, 1, seed=14)
    wide = synthesize_bandlimited(grid, 4.0, 1, seed=14)
    with pytest.raises(BandTooLarge):
        sampling_series(sym, wide, [0.0], [1.0])
    with pytest.raises(OffsetNotOnGrid):
        sampling_series(sym, f, [0.7], [1.0])
    with pytest.raises(OffsetNotOnGrid):
        sampling_series(sym, f, [grid.h / 3.0], [1.0])
    shifted = TorusGrid(1, 64, 512, 0.5)
    sym_s = make_symbol(shifted, 1.0, raised_cosine(1.0))
    f_s = synthesize_bandlimited(shifted, 1.0, 1, seed=14)
    with pytest.raises(OffsetNotOnGrid):
        sampling_series(sym_s, f_s, [0.0], [shifted.x0])


def test_save_load_round_trip(tmp_path):
    f = synthesize_bandlimited(TorusGrid(1, 16, 64, 0.5), 3.0, 2, seed=15)
    path = tmp_path / "field.bin"
    save_field(f, path)
    g = load_field(path)
    assert g.grid == f.grid
    assert g.band_radius == f.band_radius
    assert np.array_equal(g.values, f.values)
