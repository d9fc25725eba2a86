"""Lattice model definition: hoppings, force, dispersion, ladder spectrum.

The single-band chain has one complex hopping to the right neighbour (g1),
one to the left (g2), and a linear on-site potential 2*force*n.  The model
is Hermitian exactly when g2 is the complex conjugate of g1.  Everything
here is a pure function of the parameters; dynamics lives in quantum.py
and classical.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "HamiltonianSplit",
    "dispersion",
    "hamiltonian_split",
    "wannier_stark_eigenvalue",
    "wannier_stark_eigenstate",
    "kappa_grid",
    "identify_preset",
]


@dataclass(frozen=True)
class ModelParams:
    """Hopping amplitudes and static force of the tilted chain (hbar = 1).

    g1 multiplies the site-to-right-neighbour coupling, g2 the reverse one;
    force is half the on-site gradient, so site n carries energy 2*force*n.
    """

    g1: complex
    g2: complex
    force: float

    def __post_init__(self):
        object.__setattr__(self, "g1", complex(self.g1))
        object.__setattr__(self, "g2", complex(self.g2))
        object.__setattr__(self, "force", float(self.force))
        if not math.isfinite(self.force):
            raise ValueError(f"force must be real and finite, got {self.force!r}")
        for name in ("g1", "g2"):
            v = getattr(self, name)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite, got {v!r}")

    @property
    def g_plus(self) -> complex:
        return self.g1 + self.g2

    @property
    def g_minus(self) -> complex:
        return self.g1 - self.g2

    def is_hermitian(self) -> bool:
        """True iff g2 equals conj(g1) exactly."""
        return self.g2 == self.g1.conjugate()

    @classmethod
    def hatano_nelson(cls, g: float, mu: float, force: float) -> "ModelParams":
        """Asymmetric real hoppings g*e^{mu} and g*e^{-mu}."""
        g = float(g)
        mu = float(mu)
        return cls(g1=g * math.exp(mu), g2=g * math.exp(-mu), force=force)

    @classmethod
    def imaginary_coupling(cls, g: float, force: float) -> "ModelParams":
        """Both hoppings purely imaginary and equal, i*g."""
        g = float(g)
        return cls(g1=1j * g, g2=1j * g, force=force)


def identify_preset(params: ModelParams):
    """Recognise the two named hopping patterns from raw (g1, g2).

    Returns ("hatano_nelson", g, mu) when both hoppings are real, nonzero
    and of the same sign; ("imaginary_coupling", g) when both are purely
    imaginary and equal; None otherwise.  Used by the closed-form
    propagators and the perturbative approximants, which only exist for
    these two families.
    """
    g1, g2 = params.g1, params.g2
    if g1.imag == 0.0 and g2.imag == 0.0 and g1.real * g2.real > 0.0:
        g = math.copysign(math.sqrt(g1.real * g2.real), g1.real)
        mu = 0.5 * math.log(g1.real / g2.real)
        return ("hatano_nelson", g, mu)
    if g1.real == 0.0 and g2.real == 0.0 and g1.imag == g2.imag and g1.imag != 0.0:
        return ("imaginary_coupling", g1.imag)
    return None


def dispersion(params: ModelParams, kappa):
    """Field-free band energy g1*e^{i kappa} + g2*e^{-i kappa}.

    Accepts scalar or array kappa; 2 pi periodic.  Total function, no
    range restriction.
    """
    kappa = np.asarray(kappa, dtype=float)
    phase = np.exp(1j * kappa)
    out = params.g1 * phase + params.g2 / phase
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class HamiltonianSplit:
    """Hermitian / anti-Hermitian split H = H_R - i H_I in phase space.

    H_R(p, q) = Re(g+) cos p - Im(g-) sin p + 2 F q and
    H_I(p)    = -Im(g+) cos p - Re(g-) sin p
    are both real for real (p, q) and 2 pi periodic in p.  Gradients and
    Hessians use the index order (p, q), so the Hessians are 2x2 with only
    the (0, 0) entry nonzero (the force term is linear in q).
    """

    params: ModelParams

    def _coeffs(self):
        gp = self.params.g_plus
        gm = self.params.g_minus
        return gp.real, gp.imag, gm.real, gm.imag

    def h_real(self, p, q):
        re_gp, _, _, im_gm = self._coeffs()
        return re_gp * np.cos(p) - im_gm * np.sin(p) + 2.0 * self.params.force * q

    def h_imag(self, p):
        _, im_gp, re_gm, _ = self._coeffs()
        return -im_gp * np.cos(p) - re_gm * np.sin(p)

    def grad_real(self, p, q):
        """(dH_R/dp, dH_R/dq)."""
        re_gp, _, _, im_gm = self._coeffs()
        return (
            -re_gp * np.sin(p) - im_gm * np.cos(p),
            2.0 * self.params.force * np.ones_like(np.asarray(p, dtype=float)),
        )

    def grad_imag(self, p):
        """(dH_I/dp, dH_I/dq); the second entry is identically zero."""
        _, im_gp, re_gm, _ = self._coeffs()
        return (
            im_gp * np.sin(p) - re_gm * np.cos(p),
            np.zeros_like(np.asarray(p, dtype=float)),
        )

    def hess_real(self, p):
        re_gp, _, _, im_gm = self._coeffs()
        h = np.zeros((2, 2))
        h[0, 0] = -re_gp * math.cos(p) + im_gm * math.sin(p)
        return h

    def hess_imag(self, p):
        _, im_gp, re_gm, _ = self._coeffs()
        h = np.zeros((2, 2))
        h[0, 0] = im_gp * math.cos(p) + re_gm * math.sin(p)
        return h


def hamiltonian_split(params: ModelParams) -> HamiltonianSplit:
    return HamiltonianSplit(params)


def wannier_stark_eigenvalue(m: int, force: float) -> float:
    """Ladder eigenvalue 2*force*m; real, equidistant, hopping-independent."""
    force = float(force)
    if force == 0.0:
        raise ValueError("force = 0 has no ladder (continuous field-free band)")
    return 2.0 * force * int(m)


def kappa_grid(num_points: int) -> np.ndarray:
    """Uniform quasimomentum grid 2 pi j / N on [0, 2 pi)."""
    num_points = int(num_points)
    if num_points < 1:
        raise ValueError("grid needs at least one point")
    return 2.0 * math.pi * np.arange(num_points) / num_points


def wannier_stark_eigenstate(params: ModelParams, m: int, kappa: np.ndarray) -> np.ndarray:
    """Samples of the m-th ladder eigenstate on a uniform quasimomentum grid.

    The state is exp(-i m kappa + (g1/2F) e^{i kappa} - (g2/2F) e^{-i kappa}),
    normalised so that the discrete mean of its squared modulus over the grid
    is one (the underlying expression is only fixed up to a constant factor,
    and this convention is grid-size independent).

    Parameters
    ----------
    params : ModelParams
        Needs force != 0; the exponent has 2*force in the denominator.
    m : int
        Ladder index.
    kappa : ndarray
        Uniform grid on [0, 2 pi) with at least 8 points, e.g. kappa_grid(64).
    """
    if params.force == 0.0:
        raise ValueError("force = 0: eigenstate exponent would divide by zero")
    kappa = np.asarray(kappa, dtype=float)
    if kappa.ndim != 1 or kappa.size < 8:
        raise ValueError("kappa must be a 1-D uniform grid with >= 8 points")
    step = 2.0 * math.pi / kappa.size
    if np.max(np.abs(kappa - step * np.arange(kappa.size))) > 1e-9:
        raise ValueError("kappa must be the uniform grid 2 pi j / N on [0, 2 pi)")
    m = int(m)
    two_f = 2.0 * params.force
    phase = np.exp(1j * kappa)
    psi = np.exp(-1j * m * kappa + (params.g1 / two_f) * phase - (params.g2 / two_f) / phase)
    norm = math.sqrt(float(np.mean(np.abs(psi) ** 2)))
    return psi / norm
