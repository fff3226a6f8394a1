"""CV teleportation map, fidelity integral and ensemble averages.

The output CF of the Braunstein-Kimble protocol with gain g and homodyne
efficiency eta is

    chi_out(xi) = chi_in(g eta xi) chi_AB(xi, g eta xi*)
                  * exp(-|xi|^2 g^2 (1 - eta^2) / 2),

and the fidelity against a pure input is

    F = (1/pi) int d^2 xi chi_in(xi) chi_out(-xi).

Both are closed-form operations in the PolyGaussian class.  Ensemble
averages over coherent inputs are also closed form (the amplitude enters
the exponent linearly and is integrated as one more mode); squeezed
ensembles are averaged by deterministic polar quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .cfalgebra import CFError, PolyGaussianCF, QuadForm, mode_map, negate_args

# "1 dB" homodyne inefficiency
ETA_SQUARED_1DB = 10.0 ** (-0.1)


@dataclass(frozen=True)
class TeleportParams:
    """Gain g > 0 and homodyne efficiency amplitude eta in (0, 1]."""

    g: float
    eta: float = 1.0

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("gain must be > 0")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must be in (0, 1]")


@dataclass(frozen=True)
class InputEnsemble:
    """Gaussian ensemble of coherent amplitudes or squeezing values with
    variance sigma: P(x) = exp(-|x|^2 / sigma) / (sigma pi)."""

    kind: str
    sigma: float

    def __post_init__(self):
        if self.kind not in ("coherent", "squeezed"):
            raise ValueError("kind must be 'coherent' or 'squeezed'")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")


@dataclass(frozen=True)
class FidelityResult:
    mean_fidelity: float
    quadrature_error_estimate: float = 0.0


# ---------------------------------------------------------------------------
# input states
# ---------------------------------------------------------------------------

def input_cf_coherent(alpha):
    """exp(-|xi|^2/2 + xi alpha* - xi* alpha)."""
    alpha = complex(alpha)
    vac = PolyGaussianCF.vacuum(1)
    lin = np.array([np.conj(alpha), -alpha])
    return PolyGaussianCF.gaussian(
        1, QuadForm(0.0, lin, vac.exponent.quadratic))


def input_cf_squeezed(s):
    """exp(-|cosh(|s|) xi + e^{i arg s} sinh(|s|) xi*|^2 / 2)."""
    s = complex(s)
    zeta = abs(s)
    phase = cmath.exp(1j * cmath.phase(s)) if zeta > 0 else 1.0
    c, sh = math.cosh(zeta), math.sinh(zeta)
    vac = PolyGaussianCF.vacuum(1)
    m = mode_map(1, 1, {0: [(0, c, phase * sh)]})
    return vac.substitute(m, 1)


# ---------------------------------------------------------------------------
# teleportation map
# ---------------------------------------------------------------------------

def _resource_output_factor(resource_cf, tp, extra_modes=0):
    """chi_AB(xi, g eta xi*) times the efficiency penalty, embedded in a
    register with ``extra_modes`` spectator modes after mode 0."""
    ge = tp.g * tp.eta
    n_out = 1 + extra_modes
    collapsed = resource_cf.substitute(
        mode_map(2, n_out, {0: [(0, 1.0, 0.0)], 1: [(0, 0.0, ge)]}), n_out)
    nv = 2 * n_out
    quad = np.zeros((nv, nv), dtype=complex)
    pen = -0.5 * tp.g ** 2 * (1.0 - tp.eta ** 2)
    quad[0, 1] = quad[1, 0] = pen / 2.0
    penalty = PolyGaussianCF.gaussian(n_out, QuadForm(0.0, np.zeros(nv), quad))
    return collapsed.multiply(penalty)


def teleport(chi_in, resource, tp):
    """Output CF of teleporting a 1-mode input through a resource state."""
    if chi_in.n_modes != 1:
        raise CFError("teleport expects a single-mode input CF")
    ge = tp.g * tp.eta
    scaled_in = chi_in.substitute(mode_map(1, 1, {0: [(0, ge, 0.0)]}), 1)
    out = scaled_in.multiply(_resource_output_factor(resource.cf, tp))
    origin = out.norm_at_origin()
    if abs(origin - 1.0) > 1e-10:
        raise CFError(f"teleport output not normalized at origin: {origin}")
    return out


def fidelity(chi_in, chi_out):
    """(1/pi) int d^2 xi chi_in(xi) chi_out(-xi); valid for pure inputs."""
    product = chi_in.multiply(negate_args(chi_out))
    scalar = product.integrate_mode(0).norm_at_origin()
    if abs(scalar.imag) > 1e-10:
        raise CFError(f"fidelity has imaginary residue {scalar.imag}")
    return float(scalar.real)


def teleport_fidelity(chi_in, resource, tp):
    return fidelity(chi_in, teleport(chi_in, resource, tp))


# ---------------------------------------------------------------------------
# ensemble averages
# ---------------------------------------------------------------------------

def _coherent_mean_fidelity(sigma, resource, tp):
    """Closed-form average over the coherent ensemble.

    The amplitude alpha is carried as a second mode: the fidelity
    integrand is jointly PolyGaussian in (xi, alpha), so both integrals
    are exact.
    """
    ge = tp.g * tp.eta
    # mode 0 = xi, mode 1 = alpha;  chi_in = exp(-|xi|^2/2 + xi a* - xi* a)
    quad = np.zeros((4, 4), dtype=complex)
    quad[0, 1] = quad[1, 0] = -0.25
    quad[0, 3] = quad[3, 0] = 0.5    # + xi alpha*
    quad[1, 2] = quad[2, 1] = -0.5   # - xi* alpha
    chi_in = PolyGaussianCF.gaussian(2, QuadForm(0.0, np.zeros(4), quad))

    scaled_in = chi_in.substitute(
        mode_map(2, 2, {0: [(0, ge, 0.0)], 1: [(1, 1.0, 0.0)]}), 2)
    res_factor = _resource_output_factor(resource.cf, tp, extra_modes=1)
    chi_out = scaled_in.multiply(res_factor)

    # F(alpha): negate xi only, multiply by chi_in, integrate xi
    out_neg = chi_out.substitute(
        mode_map(2, 2, {0: [(0, -1.0, 0.0)], 1: [(1, 1.0, 0.0)]}), 2)
    f_alpha = chi_in.multiply(out_neg).integrate_mode(0)

    # average over P(alpha) = exp(-|a|^2/sigma) / (sigma pi)
    quad_w = np.zeros((2, 2), dtype=complex)
    quad_w[0, 1] = quad_w[1, 0] = -0.5 / sigma
    weight = PolyGaussianCF.gaussian(1, QuadForm(0.0, np.zeros(2), quad_w))
    total = f_alpha.multiply(weight).integrate_mode(0).norm_at_origin()
    total /= sigma
    if abs(total.imag) > 1e-10:
        raise CFError(f"mean fidelity has imaginary residue {total.imag}")
    return float(total.real)


def _squeezed_mean_fidelity(sigma, resource, tp, tol=1e-5, max_doublings=6):
    """Average over squeezed inputs by polar quadrature in s.

    Radial direction uses Gauss-Laguerre after t = |s|^2 / sigma; the
    angle uses the trapezoid rule (periodic integrand).  Node counts are
    doubled until two successive estimates agree within ``tol``.
    """
    ge = tp.g * tp.eta
    res_factor = _resource_output_factor(resource.cf, tp)
    scale_in = mode_map(1, 1, {0: [(0, ge, 0.0)]})

    def single(s):
        chi_in = input_cf_squeezed(s)
        out = chi_in.substitute(scale_in, 1).multiply(res_factor)
        return fidelity(chi_in, out)

    prev = None
    n_rad, n_ang = 8, 8
    for _ in range(max_doublings + 1):
        t_nodes, t_weights = np.polynomial.laguerre.laggauss(n_rad)
        angles = 2.0 * math.pi * np.arange(n_ang) / n_ang
        total = 0.0
        for t, wt in zip(t_nodes, t_weights):
            zeta = math.sqrt(sigma * t)
            row = 0.0
            for phi in angles:
                row += single(zeta * cmath.exp(1j * phi))
            total += wt * row / n_ang
        if prev is not None and abs(total - prev) < tol:
            return float(total), abs(total - prev)
        prev = total
        n_rad *= 2
        n_ang *= 2
    raise RuntimeError("squeezed-ensemble quadrature did not converge")


def mean_fidelity(ens, resource, tp, tol=1e-5):
    """Ensemble-average teleportation fidelity."""
    if ens.kind == "coherent":
        return FidelityResult(_coherent_mean_fidelity(ens.sigma, resource, tp))
    value, err = _squeezed_mean_fidelity(ens.sigma, resource, tp, tol=tol)
    return FidelityResult(value, err)


# ---------------------------------------------------------------------------
# classical limits
# ---------------------------------------------------------------------------

def mean_squeezing(sigma):
    """E[|s|] under the complex Gaussian ensemble: Rayleigh mean
    sqrt(pi sigma) / 2."""
    return math.sqrt(math.pi * sigma) / 2.0


def classical_limit(ens):
    """Best classical (measure-and-prepare) mean fidelity."""
    if ens.kind == "coherent":
        return 0.5
    zbar = mean_squeezing(ens.sigma)
    return math.sqrt(math.exp(zbar)) / (1.0 + math.exp(zbar))
