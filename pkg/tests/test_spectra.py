import math

import numpy as np
import pytest

from relbc import spectra
from relbc.spectra import (
    SpectralAmplitude,
    disjoint_pair,
    gauss_legendre_grid,
    grid_for_amplitudes,
    grid_from_spec,
    make_amplitude,
    overlap,
    sample,
    time_profile,
)

SHAPES = spectra.SHAPES


def test_rectangular_is_flat():
    amp = make_amplitude("rectangular", 10.0, 1.0)
    k = np.array([9.6, 10.0, 10.4])
    assert np.allclose(np.abs(amp(k)) ** 2, 1.0)
    assert np.all(amp(np.array([9.4, 10.6])) == 0)


def test_phase_delay_leaves_modulus_unchanged():
    amp = make_amplitude("rectangular", 10.0, 1.0, tau0=0.5)
    k = np.linspace(9.6, 10.4, 7)
    assert np.allclose(amp(k), np.exp(0.5j * k) / math.sqrt(1.0))
    assert np.allclose(np.abs(amp(k)) ** 2, np.abs(make_amplitude("rectangular", 10.0, 1.0)(k)) ** 2)


@pytest.mark.parametrize("shape", SHAPES)
def test_unit_norm_after_sampling(shape):
    amp = make_amplitude(shape, 10.0, 1.0)
    grid = grid_for_amplitudes([amp])
    state = sample(amp, grid)
    assert abs(grid.weights @ np.abs(state.values) ** 2 - 1.0) < 1e-10


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(shape="rectangular", k_c=10.0, delta=0.0),
        dict(shape="rectangular", k_c=10.0, delta=-1.0),
        dict(shape="rectangular", k_c=0.4, delta=1.0),  # support crosses k=0
        dict(shape="lorentzian", k_c=10.0, delta=1.0),
    ],
)
def test_rejects_unphysical_amplitudes(kwargs):
    with pytest.raises(ValueError):
        SpectralAmplitude(**kwargs)


def test_disjoint_pair_supports():
    a1, a2 = disjoint_pair(12.0, 10.0, 1.0)
    assert a1.support == (11.5, 12.5)
    assert a2.support == (9.5, 10.5)


def test_disjoint_pair_touching_ok():
    a1, a2 = disjoint_pair(11.0, 10.0, 1.0)
    assert a1.support[0] == a2.support[1]


def test_disjoint_pair_overlap_rejected():
    with pytest.raises(ValueError):
        disjoint_pair(10.5, 10.0, 1.0)


def test_grid_quadrature_exactness():
    grid = gauss_legendre_grid([(9.5, 10.5), (10.5, 12.5)], 256)
    assert abs(grid.weights.sum() - 3.0) < 1e-12
    # GL nodes integrate polynomials exactly
    assert abs(grid.weights @ grid.nodes**3 - (12.5**4 - 9.5**4) / 4) < 1e-9


def test_grid_from_spec_roundtrip():
    spec = {"k_min": 9.5, "k_max": 10.5, "panels": 2, "nodes_per_panel": 256}
    g1 = grid_from_spec(spec)
    g2 = grid_from_spec(spec)
    assert np.array_equal(g1.nodes, g2.nodes)
    assert np.array_equal(g1.weights, g2.weights)


def test_amplitude_json_roundtrip():
    amp = make_amplitude("raised-cosine", 10.0, 2.0, tau0=0.3)
    assert SpectralAmplitude.from_json(amp.to_json()) == amp


def test_sample_rejects_partial_coverage():
    amp = make_amplitude("rectangular", 10.0, 1.0)
    half = gauss_legendre_grid([(9.5, 10.0)], 256)
    with pytest.raises(ValueError, match="cover"):
        sample(amp, half)


def test_sample_rejects_coarse_grid():
    amp = make_amplitude("rectangular", 10.0, 1.0)
    coarse = gauss_legendre_grid([(9.5, 10.5)], 32)
    with pytest.raises(ValueError, match="coarse"):
        sample(amp, coarse)


def test_sample_phase_invariance_of_intensity():
    grid = grid_for_amplitudes([make_amplitude("rectangular", 10.0, 1.0)])
    s0 = sample(make_amplitude("rectangular", 10.0, 1.0), grid)
    s1 = sample(make_amplitude("rectangular", 10.0, 1.0, tau0=0.5), grid)
    assert np.allclose(np.abs(s0.values) ** 2, np.abs(s1.values) ** 2)


@pytest.mark.parametrize("shape", SHAPES)
def test_disjoint_overlap_is_exactly_zero(shape):
    a1, a2 = disjoint_pair(12.0, 10.0, 1.0, shape=shape)
    grid = grid_for_amplitudes([a1, a2])
    assert overlap(sample(a1, grid), sample(a2, grid)) == 0


def test_overlap_self_and_hermiticity():
    a1, a2 = disjoint_pair(12.0, 10.0, 1.0, shape="truncated-gaussian")
    grid = grid_for_amplitudes([a1, a2])
    s1, s2 = sample(a1, grid), sample(a2, grid)
    assert abs(overlap(s1, s1) - 1.0) < 1e-8
    assert overlap(s1, s2) == np.conj(overlap(s2, s1))


def test_overlap_phase_closed_form():
    # <psi | e^{ik tau0} psi> = e^{i k_c tau0} sinc(delta tau0 / 2) for flat psi
    grid = grid_for_amplitudes([make_amplitude("rectangular", 10.0, 1.0)])
    s0 = sample(make_amplitude("rectangular", 10.0, 1.0), grid)
    s1 = sample(make_amplitude("rectangular", 10.0, 1.0, tau0=0.5), grid)
    got = overlap(s0, s1)
    expected = math.sin(0.25) / 0.25
    assert abs(abs(got) - expected) < 1e-12


def test_overlap_grid_mismatch():
    amp = make_amplitude("rectangular", 10.0, 1.0)
    s1 = sample(amp, gauss_legendre_grid([(9.5, 10.5)], 256))
    s2 = sample(amp, gauss_legendre_grid([(9.4, 10.6)], 256))
    with pytest.raises(ValueError):
        overlap(s1, s2)


@pytest.mark.parametrize("pair", [("rectangular", "raised-cosine"),
                                  ("truncated-gaussian", "rectangular")])
def test_cauchy_schwarz(pair):
    a = make_amplitude(pair[0], 10.0, 1.0)
    b = make_amplitude(pair[1], 10.2, 1.0)
    grid = gauss_legendre_grid([(9.5, 9.7), (9.7, 10.5), (10.5, 10.7)], 512)
    assert abs(overlap(sample(a, grid), sample(b, grid))) <= 1.0 + 1e-12


def test_time_profile_rectangular_envelope():
    delta, k_c = 1.0, 10.0
    amp = make_amplitude("rectangular", k_c, delta)
    grid = grid_for_amplitudes([amp])
    state = sample(amp, grid)
    taus = np.array([0.0, 1.0, 3.0, 2 * math.pi])
    got = np.abs(time_profile(state, taus)) ** 2
    x = delta * taus / 2
    expected = (delta / (2 * math.pi)) * np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1.0, x)) ** 2
    assert np.allclose(got, expected, atol=1e-12)


@pytest.mark.parametrize("shape", SHAPES)
def test_time_profile_parseval(shape):
    amp = make_amplitude(shape, 10.0, 1.0)
    # tau range covering >= 99.9% of the energy; the rectangular profile has
    # 1/tau^2 tails and needs a much wider window (and a denser k-grid to
    # push the discrete-spectrum revival time past the window edge)
    if shape == "rectangular":
        span, n_nodes, n_panels = 2000.0, 2048, 8000
    else:
        span, n_nodes, n_panels = 200.0, 256, 800
    grid = gauss_legendre_grid([amp.support], n_nodes)
    state = sample(amp, grid)
    edges = np.linspace(-span, span, n_panels + 1)
    x, w = np.polynomial.legendre.leggauss(16)
    half = 0.5 * (edges[1] - edges[0])
    taus = (half * x[None, :] + 0.5 * (edges[:-1] + edges[1:])[:, None]).ravel()
    wt = np.tile(half * w, len(edges) - 1)
    # evaluate in chunks: the full (n_tau, n_nodes) phase matrix is huge
    total = sum(
        wt[i:i + 8192] @ np.abs(time_profile(state, taus[i:i + 8192])) ** 2
        for i in range(0, len(taus), 8192)
    )
    assert abs(total - 1.0) < 1e-3


def test_time_profile_shift_theorem():
    amp0 = make_amplitude("raised-cosine", 10.0, 1.0)
    amp2 = make_amplitude("raised-cosine", 10.0, 1.0, tau0=2.0)
    grid = grid_for_amplitudes([amp0])
    taus = np.linspace(-5, 5, 41)
    p0 = np.abs(time_profile(sample(amp0, grid), taus)) ** 2
    p2 = np.abs(time_profile(sample(amp2, grid), taus + 2.0)) ** 2
    assert np.allclose(p0, p2, atol=1e-12)
