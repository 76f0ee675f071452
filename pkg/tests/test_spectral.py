import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gnfi import ComplexGrid, PeriodicGrid, SpectralGrid, analysis, synthesis
from gnfi.errors import InvalidFieldError, ParameterError
from gnfi.spectral import (
    direct_analysis,
    downsample,
    profile_example1,
    profile_example2,
    psi_example1,
    psi_example2,
    refine,
    tabulated_profile,
)


def rand_field(rng, n1=16, n2=16, real=False):
    g = PeriodicGrid(1.0, 1.0, n1, n2)
    v = rng.standard_normal((n1, n2))
    if not real:
        v = v + 1j * rng.standard_normal((n1, n2))
    return ComplexGrid(g, v)


@pytest.mark.parametrize("bad", [(3, 4), (4, 5), (2, 2), (0, 8)])
def test_grid_rejects_bad_sizes(bad):
    with pytest.raises(ParameterError):
        PeriodicGrid(1, 1, *bad)


def test_grid_nodes_exclude_endpoint():
    g = PeriodicGrid(2.0, 1.0, 8, 4)
    assert g.x[-1] == pytest.approx(2.0 - 0.25)
    assert g.y[1] == pytest.approx(0.25)
    X, Y = g.nodes()
    assert X.shape == (8, 4) and np.all(X[:, 0] == g.x)


def test_mode_indices_fft_order():
    g = PeriodicGrid(1, 1, 8, 8)
    n1, _ = g.mode_indices()
    assert list(n1[:, 0]) == [0, 1, 2, 3, -4, -3, -2, -1]
    assert g.index_of((-4, 3)) == (4, 3)
    with pytest.raises(ParameterError):
        g.index_of((4, 0))


def test_complex_grid_rejects_nonfinite_and_shape():
    g = PeriodicGrid(1, 1, 4, 4)
    with pytest.raises(InvalidFieldError):
        ComplexGrid(g, np.full((4, 4), np.nan))
    with pytest.raises(InvalidFieldError):
        ComplexGrid(g, np.zeros((4, 6)))


def test_constant_field():
    g = PeriodicGrid(1, 1, 16, 8)
    c = 2.5 - 1j
    spec = analysis(ComplexGrid(g, np.full(g.shape, c)))
    assert spec[(0, 0)] == pytest.approx(c, abs=1e-15)
    rest = np.abs(spec.coeffs).ravel()[1:]
    assert rest.max() < 1e-13 * abs(c)


@pytest.mark.parametrize("m", [(1, 0), (-3, 2), (-8, -8), (7, -1)])
def test_single_harmonic(m):
    g = PeriodicGrid(1.0, 2.0, 16, 16)
    X, Y = g.nodes()
    u = np.exp(1j * (2 * np.pi * m[0] * X / g.period1 + 2 * np.pi * m[1] * Y / g.period2))
    spec = analysis(ComplexGrid(g, u))
    assert spec[m] == pytest.approx(1.0, abs=1e-13)
    c = spec.coeffs.copy()
    c[g.index_of(m)] = 0
    assert np.abs(c).max() < 1e-13


def test_synthesis_zero_and_dc():
    g = PeriodicGrid(1, 1, 8, 8)
    assert np.all(synthesis(SpectralGrid(g, np.zeros(g.shape))).values == 0)
    c = np.zeros(g.shape, complex)
    c[0, 0] = 1
    np.testing.assert_allclose(synthesis(SpectralGrid(g, c)).values, 1.0, atol=1e-15)


@pytest.mark.parametrize("shape", [(4, 4), (16, 16), (8, 12)])
def test_round_trip(rng, shape):
    f = rand_field(rng, *shape)
    back = synthesis(analysis(f)).values
    assert np.abs(back - f.values).max() <= 1e-12 * np.abs(f.values).max()


@pytest.mark.parametrize("n", [4, 16])
def test_matches_direct_dft_random(rng, n):
    f = rand_field(rng, n, n)
    a = analysis(f).coeffs
    b = direct_analysis(f).coeffs
    assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()


def test_example2_matches_direct_dft_64():
    g = PeriodicGrid(1, 1, 64, 64)
    f = profile_example2(g).values
    a = analysis(f).coeffs
    b = direct_analysis(f).coeffs
    assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()


def test_parseval(rng):
    for _ in range(5):
        f = rand_field(rng, 16, 32)
        lhs = np.sum(np.abs(analysis(f).coeffs) ** 2)
        rhs = np.mean(np.abs(f.values) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_linearity(rng):
    u, v = rand_field(rng), rand_field(rng)
    a, b = 0.3 - 2j, 1.7
    lhs = analysis(ComplexGrid(u.grid, a * u.values + b * v.values)).coeffs
    rhs = a * analysis(u).coeffs + b * analysis(v).coeffs
    assert np.abs(lhs - rhs).max() <= 1e-12 * np.abs(rhs).max()
    sl = synthesis(SpectralGrid(u.grid, a * u.values + b * v.values)).values
    sr = a * synthesis(SpectralGrid(u.grid, u.values)).values + b * synthesis(SpectralGrid(v.grid, v.values)).values
    assert np.abs(sl - sr).max() <= 1e-12 * np.abs(sr).max()


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.sampled_from([(4, 4), (8, 6), (16, 16)]),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_real_input_conjugate_symmetry(vals):
    g = PeriodicGrid(1, 1, *vals.shape)
    c = analysis(ComplexGrid(g, vals)).coeffs
    n1, n2 = g.shape
    i = (-np.arange(n1)) % n1
    j = (-np.arange(n2)) % n2
    mirrored = c[np.ix_(i, j)]
    scale = max(np.abs(c).max(), 1e-300)
    assert np.abs(mirrored - np.conj(c)).max() <= 1e-12 * scale


def test_example1_hand_values():
    assert psi_example1(0.0, 0.37) == 0.0
    assert psi_example1(1 / 6, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert psi_example1(1 / 6, 1 / 4) == pytest.approx(0.5, abs=1e-14)


def test_example2_hand_values():
    assert psi_example2(0.0, 0.0) == 1.0
    assert psi_example2(0.5, 0.25) == pytest.approx(-1.0, abs=1e-14)


@pytest.mark.parametrize("maker,fn", [(profile_example1, psi_example1), (profile_example2, psi_example2)])
def test_builtin_profiles_match_formula(maker, fn):
    g = PeriodicGrid(1, 1, 32, 32)
    p = maker(g)
    X, Y = g.nodes()
    assert np.abs(p.values.values.real - fn(X, Y)).max() <= 1e-14
    assert np.all(p.values.values.imag == 0)
    assert np.abs(p.values.values).max() <= 1.0


def test_tabulated_profile_drops_imaginary_part(rng):
    f = rand_field(rng, 8, 8)
    p = tabulated_profile(f)
    assert p.kind == "tabulated"
    np.testing.assert_array_equal(p.values.values.real, f.values.real)


def test_refine_then_downsample_identity(rng):
    f = rand_field(rng, 8, 8, real=True)
    fine = refine(f, f.grid.refined(4))
    back = downsample(fine, 4)
    np.testing.assert_allclose(back.values, f.values, atol=1e-13)
    assert np.abs(fine.values.imag).max() < 1e-13
