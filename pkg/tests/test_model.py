"""Model layer: presets, dispersion, phase-space split, ladder spectrum."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochnh import (
    ModelParams,
    dispersion,
    hamiltonian_split,
    identify_preset,
    kappa_grid,
    wannier_stark_eigenstate,
    wannier_stark_eigenvalue,
)

finite_g = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=3.0, allow_nan=False, allow_infinity=False
)


def test_preset_constructors():
    hn = ModelParams.hatano_nelson(1.0, 0.2, 0.1)
    assert hn.g1 == pytest.approx(math.exp(0.2))
    assert hn.g2 == pytest.approx(math.exp(-0.2))
    assert hn.g1.imag == 0.0 and hn.g2.imag == 0.0
    ic = ModelParams.imaginary_coupling(1.0, 0.1)
    assert ic.g1 == 1j and ic.g2 == 1j


def test_hermiticity_predicate():
    assert ModelParams.hatano_nelson(1.0, 0.0, 0.1).is_hermitian()
    assert not ModelParams.hatano_nelson(1.0, 0.2, 0.1).is_hermitian()
    assert not ModelParams.imaginary_coupling(1.0, 0.1).is_hermitian()
    assert ModelParams(g1=0.3 + 0.4j, g2=0.3 - 0.4j, force=0.1).is_hermitian()


def test_params_validation():
    with pytest.raises(ValueError, match="force"):
        ModelParams(g1=1.0, g2=1.0, force=math.nan)
    with pytest.raises(ValueError, match="g1"):
        ModelParams(g1=complex(math.inf, 0.0), g2=1.0, force=0.1)


def test_identify_preset_roundtrip():
    kind, g, mu = identify_preset(ModelParams.hatano_nelson(1.3, -0.4, 0.1))
    assert kind == "hatano_nelson"
    assert g == pytest.approx(1.3)
    assert mu == pytest.approx(-0.4)
    kind, g = identify_preset(ModelParams.imaginary_coupling(-0.7, 0.2))
    assert kind == "imaginary_coupling"
    assert g == pytest.approx(-0.7)


def test_identify_preset_negative_real_pair():
    kind, g, mu = identify_preset(ModelParams(g1=-2.0, g2=-0.5, force=0.1))
    assert kind == "hatano_nelson"
    assert g == pytest.approx(-1.0)
    assert mu == pytest.approx(0.5 * math.log(4.0))


@pytest.mark.parametrize(
    "g1,g2",
    [
        (1.0, -1.0),  # opposite-sign reals
        (1.0, 2.0j),  # mixed real/imaginary
        (1j, 2j),  # unequal imaginary
        (0.3 + 0.1j, 0.3 + 0.1j),  # generic complex
        (0.0, 0.0),
        (0.0, 1.0),
    ],
)
def test_identify_preset_rejects(g1, g2):
    assert identify_preset(ModelParams(g1=g1, g2=g2, force=0.1)) is None


def test_dispersion_values():
    params = ModelParams(g1=2.0, g2=0.5, force=0.1)
    assert dispersion(params, 0.0) == pytest.approx(2.5)
    assert dispersion(params, math.pi / 2) == pytest.approx(1.5j)
    kappa = np.linspace(-7.0, 7.0, 41)
    np.testing.assert_allclose(
        dispersion(params, kappa + 2.0 * math.pi), dispersion(params, kappa), atol=1e-12
    )


def test_dispersion_pt_reflections():
    # Asymmetric real hoppings: complex conjugation plus kappa -> -kappa.
    hn = ModelParams.hatano_nelson(1.0, 0.35, 0.1)
    kappa = np.linspace(0.0, 2.0 * math.pi, 37)
    np.testing.assert_allclose(
        np.conj(dispersion(hn, -kappa)), dispersion(hn, kappa), atol=1e-14
    )
    # Imaginary coupling: conjugation plus kappa -> pi - kappa.
    ic = ModelParams.imaginary_coupling(1.0, 0.1)
    np.testing.assert_allclose(
        np.conj(dispersion(ic, math.pi - kappa)), dispersion(ic, kappa), atol=1e-14
    )


@given(g1=finite_g, g2=finite_g, p=st.floats(-7.0, 7.0), q=st.floats(-50.0, 50.0))
@settings(max_examples=200, deadline=None)
def test_split_reassembles_dispersion(g1, g2, p, q):
    params = ModelParams(g1=g1, g2=g2, force=0.1)
    split = hamiltonian_split(params)
    full = complex(split.h_real(p, q)) - 1j * complex(split.h_imag(p))
    expected = dispersion(params, p) + 2.0 * params.force * q
    assert abs(full - expected) < 1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize(
    "params",
    [
        ModelParams.hatano_nelson(1.0, 0.2, 0.1),
        ModelParams.imaginary_coupling(1.0, 0.1),
        ModelParams(g1=0.8 - 0.3j, g2=-0.2 + 0.6j, force=0.07),
    ],
)
def test_split_derivatives_match_finite_differences(params):
    split = hamiltonian_split(params)
    h = 1e-6
    for p in (-2.3, 0.0, 0.4, 1.9):
        q = 3.1
        dp_num = (split.h_real(p + h, q) - split.h_real(p - h, q)) / (2.0 * h)
        dq_num = (split.h_real(p, q + h) - split.h_real(p, q - h)) / (2.0 * h)
        gp, gq = split.grad_real(p, q)
        assert gp == pytest.approx(dp_num, abs=5e-9)
        assert gq == pytest.approx(dq_num, abs=5e-9)
        di_num = (split.h_imag(p + h) - split.h_imag(p - h)) / (2.0 * h)
        ip, iq = split.grad_imag(p)
        assert ip == pytest.approx(di_num, abs=5e-9)
        assert iq == 0.0
        hess_r = (split.h_real(p + h, q) - 2.0 * split.h_real(p, q) + split.h_real(p - h, q)) / h**2
        assert split.hess_real(p)[0, 0] == pytest.approx(hess_r, abs=2e-4)
        hess_i = (split.h_imag(p + h) - 2.0 * split.h_imag(p) + split.h_imag(p - h)) / h**2
        assert split.hess_imag(p)[0, 0] == pytest.approx(hess_i, abs=2e-4)
        assert split.hess_real(p)[0, 1] == 0.0
        assert split.hess_real(p)[1, 1] == 0.0


def test_ladder_eigenvalue():
    assert abs(wannier_stark_eigenvalue(3, 0.1) - 0.6) < 1e-15
    assert wannier_stark_eigenvalue(-2, 0.25) == pytest.approx(-1.0)
    assert wannier_stark_eigenvalue(0, 0.1) == 0.0
    with pytest.raises(ValueError, match="ladder"):
        wannier_stark_eigenvalue(1, 0.0)


def test_kappa_grid_shape():
    grid = kappa_grid(8)
    assert grid[0] == 0.0
    assert grid.size == 8
    np.testing.assert_allclose(np.diff(grid), math.pi / 4.0)
    with pytest.raises(ValueError):
        kappa_grid(0)


@pytest.mark.parametrize(
    "params",
    [
        ModelParams.hatano_nelson(1.0, 0.2, 0.1),
        ModelParams.imaginary_coupling(1.0, 0.1),
        ModelParams(g1=0.4 + 0.2j, g2=0.1 - 0.5j, force=0.15),
    ],
)
@pytest.mark.parametrize("m", [-3, 0, 5])
def test_ladder_eigenstate_solves_quasimomentum_ode(params, m):
    # In the quasimomentum representation the eigenproblem reads
    # E(kappa) psi + 2 F (i d psi / d kappa) = lambda psi; differentiate
    # spectrally on the sampling grid and check the residual.
    n_pts = 128
    kappa = kappa_grid(n_pts)
    psi = wannier_stark_eigenstate(params, m, kappa)
    coeff = np.fft.ifft(psi)
    orders = np.rint(np.fft.fftfreq(n_pts, d=1.0 / n_pts)).astype(int)
    n_psi = np.fft.fft(orders * coeff)
    residual = dispersion(params, kappa) * psi + 2.0 * params.force * n_psi
    residual -= wannier_stark_eigenvalue(m, params.force) * psi
    assert np.max(np.abs(residual)) < 1e-8 * np.max(np.abs(psi))


def test_ladder_eigenstate_index_shift():
    params = ModelParams.hatano_nelson(1.0, 0.2, 0.1)
    kappa = kappa_grid(64)
    psi0 = wannier_stark_eigenstate(params, 0, kappa)
    psi4 = wannier_stark_eigenstate(params, 4, kappa)
    np.testing.assert_allclose(psi4, psi0 * np.exp(-4j * kappa), atol=1e-12)


def test_ladder_eigenstate_validation():
    params = ModelParams.hatano_nelson(1.0, 0.2, 0.1)
    with pytest.raises(ValueError, match="force = 0"):
        wannier_stark_eigenstate(ModelParams(g1=1.0, g2=1.0, force=0.0), 0, kappa_grid(16))
    with pytest.raises(ValueError, match=">= 8"):
        wannier_stark_eigenstate(params, 0, kappa_grid(4))
    with pytest.raises(ValueError, match="uniform"):
        wannier_stark_eigenstate(params, 0, np.linspace(0.0, 1.0, 16))
