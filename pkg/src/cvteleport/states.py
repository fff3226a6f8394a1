"""Two-mode entangled resource states in characteristic-function form.

Families:

* ``tmsv``  -- two-mode squeezed vacuum (Gaussian baseline)
* ``ps`` / ``pa`` / ``pc`` -- photon subtraction / addition / catalysis,
  applied receiver-side (after the channel) on the transmitted mode
* ``pspa`` / ``paps`` -- sequential subtraction+addition combos sharing
  one beam-splitter transmissivity, receiver-side
* ``qs``  -- single-photon quantum scissors, transmitter-side
* ``sb``  -- squeezed Bell-like superposition (no heralded operation)

All constructions return a normalized 2-mode CF (mode 0 = kept mode A,
mode 1 = transmitted mode B) plus the pre-normalization origin value,
which is proportional to the heralding success probability.
Convention: hbar = 2, vacuum CF exp(-|xi|^2 / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cfalgebra import CFError, PolyGaussianCF, QuadForm, mode_map

FAMILIES = ("tmsv", "ps", "pa", "pc", "pspa", "paps", "qs", "sb")

# families whose non-Gaussian operation acts after the channel
RECEIVER_SIDE = frozenset({"ps", "pa", "pc", "pspa", "paps"})

# beam-splitter transmissivity above which photon catalysis is replaced
# by its exact kappa -> 1 limit (the plain noisy TMSV)
PC_TMSV_LIMIT = 1.0 - 1e-9


@dataclass(frozen=True)
class TMSVParams:
    """Two-mode squeezing magnitude r >= 0 and phase phi."""

    r: float
    phi: float = math.pi

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeezing magnitude must be >= 0")


@dataclass(frozen=True)
class ChannelParams:
    """Transmissivity T in (0, 1] and excess noise eps >= 0 (shot-noise units)."""

    T: float
    eps: float = 0.0

    def __post_init__(self):
        if not 0 < self.T <= 1:
            raise ValueError(f"transmissivity must be in (0, 1], got {self.T}")
        if self.eps < 0:
            raise ValueError("excess noise must be >= 0")


IDEAL_CHANNEL = ChannelParams(T=1.0, eps=0.0)


@dataclass(frozen=True)
class ResourceSpec:
    """Which resource family to build and its free parameters.

    kappa is the beam-splitter transmissivity of the heralded operation
    (unused for tmsv/sb); delta is the Bell-superposition angle (sb only).
    qs_gain overrides the quantum-scissors amplification parameter, whose
    default follows g = sqrt(1 + kappa) / kappa.
    """

    family: str
    tmsv: TMSVParams
    kappa: float | None = None
    delta: float | None = None
    qs_gain: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family in ("ps", "pa", "pspa", "paps", "qs"):
            if self.kappa is None or not 0 < self.kappa < 1:
                raise ValueError(f"{self.family} requires kappa in (0, 1)")
        elif self.family == "pc":
            if self.kappa is None or not 0 < self.kappa <= 1:
                raise ValueError("pc requires kappa in (0, 1]")
        if self.family == "sb":
            if self.delta is None:
                raise ValueError("sb requires delta")
        elif self.delta is not None:
            raise ValueError("delta is only meaningful for sb")
        if self.family in ("tmsv", "sb") and self.kappa is not None:
            raise ValueError(f"kappa is not a parameter of {self.family}")
        if self.family != "qs" and self.qs_gain is not None:
            raise ValueError("qs_gain is only meaningful for qs")

    @property
    def side(self):
        """Where the non-Gaussian operation acts, fixed per family."""
        if self.family in RECEIVER_SIDE:
            return "receiver"
        if self.family == "qs":
            return "transmitter"
        return "none"


@dataclass(frozen=True)
class ResourceState:
    """Normalized 2-mode resource CF plus heralding weight."""

    cf: PolyGaussianCF
    success_norm: float
    spec: ResourceSpec
    channel: ChannelParams


def qs_amplification(kappa, qs_gain=None):
    """Quantum-scissors amplification parameter for beam-splitter
    transmissivity kappa; an explicit override wins."""
    if qs_gain is not None:
        return float(qs_gain)
    return math.sqrt(1.0 + kappa) / kappa


# ---------------------------------------------------------------------------
# Gaussian building blocks
# ---------------------------------------------------------------------------

def bogoliubov_matrix(p, n_modes=2, modes=(0, 1)):
    """Two-mode squeezing argument map: xi_i' = cosh(r) xi_i + e^{i phi}
    sinh(r) xi_j*, for the mode pair ``modes`` inside an n-mode register."""
    c, s = math.cosh(p.r), math.sinh(p.r)
    e = complex(math.cos(p.phi), math.sin(p.phi))
    i, j = modes
    entries = {k: [(k, 1.0, 0.0)] for k in range(n_modes) if k not in modes}
    entries[i] = [(i, c, 0.0), (j, 0.0, e * s)]
    entries[j] = [(j, c, 0.0), (i, 0.0, e * s)]
    return mode_map(n_modes, n_modes, entries)


def tmsv_cf(p):
    """CF of the two-mode squeezed vacuum: two-mode vacuum with the
    Bogoliubov argument substitution."""
    vac = PolyGaussianCF.vacuum(2)
    return vac.substitute(bogoliubov_matrix(p), 2)


def gaussian_factor(n_modes, mode, coeff):
    """exp(coeff * |xi_mode|^2) as an n-mode CF factor."""
    nv = 2 * n_modes
    quad = np.zeros((nv, nv), dtype=complex)
    quad[2 * mode, 2 * mode + 1] = coeff / 2.0
    quad[2 * mode + 1, 2 * mode] = coeff / 2.0
    return PolyGaussianCF.gaussian(n_modes, QuadForm(0.0, np.zeros(nv), quad))


def apply_channel(cf, ch, mode):
    """Loss + excess noise on one mode:
    chi(.., xi) -> exp(-(eps + 1 - T)|xi|^2 / 2) chi(.., sqrt(T) xi)."""
    n = cf.n_modes
    entries = {k: [(k, 1.0, 0.0)] for k in range(n)}
    entries[mode] = [(mode, math.sqrt(ch.T), 0.0)]
    scaled = cf.substitute(mode_map(n, n, entries), n)
    return scaled.multiply(gaussian_factor(n, mode, -0.5 * (ch.eps + 1.0 - ch.T)))


# ---------------------------------------------------------------------------
# photon subtraction / addition / catalysis and their combos
# ---------------------------------------------------------------------------

def _f_kernel(chi_ab, kappa, third_arg):
    """Auxiliary Gaussian integral shared by the PS/PA/PC constructions.

    f(xi_A, xi_B) = int d^2 xi / (pi (1 - kappa)) chi(xi_A, xi)
        * exp[ (1 + kappa) / (2 (kappa - 1)) (|xi|^2 + |xi_B|^2)
               + third_arg / (kappa - 1) (xi_B xi* + xi_B* xi) ],

    with third_arg = sqrt(kappa) for the single operations and kappa for
    the sequential ones.  chi_ab enters with its second argument as the
    integration variable.
    """
    # register: 0 = A, 1 = B, 2 = integration variable
    big = chi_ab.embed(3, (0, 2))
    nv = 6
    quad = np.zeros((nv, nv), dtype=complex)
    g1 = (1.0 + kappa) / (2.0 * (kappa - 1.0))
    g2 = third_arg / (kappa - 1.0)
    # g1 (|xi|^2 + |xi_B|^2)
    quad[4, 5] += g1 / 2.0
    quad[5, 4] += g1 / 2.0
    quad[2, 3] += g1 / 2.0
    quad[3, 2] += g1 / 2.0
    # g2 (xi_B xi* + xi_B* xi)
    quad[2, 5] += g2 / 2.0
    quad[5, 2] += g2 / 2.0
    quad[3, 4] += g2 / 2.0
    quad[4, 3] += g2 / 2.0
    weight = PolyGaussianCF.gaussian(3, QuadForm(0.0, np.zeros(nv), quad))
    out = big.multiply(weight).integrate_mode(2)
    return out.scale(1.0 / (1.0 - kappa))


def _d_b(cf):
    return cf.differentiate(2)     # d/dxi_B


def _d_bstar(cf):
    return cf.differentiate(3)     # d/dxi_B*


def _negate_b(cf):
    """xi_B -> -xi_B.  The derivative-based operation transforms come out
    parity-flipped on the transmitted mode relative to the physical
    beam-splitter circuit (verified against the Fock oracle); this undoes
    the flip.  Sequential double operations compose two flips and need
    no correction."""
    return cf.substitute(
        mode_map(2, 2, {0: [(0, 1.0, 0.0)], 1: [(1, -1.0, 0.0)]}), 2)


def _sandwich(cf, outer_coeff, inner_coeff, order="both"):
    """exp(outer |xi_B|^2) D [ exp(inner |xi_B|^2) cf ] with D the
    requested derivative combination in xi_B, xi_B*."""
    inner = cf.multiply(gaussian_factor(2, 1, inner_coeff))
    if order == "both":
        der = _d_bstar(_d_b(inner))
    elif order == "b":
        der = _d_b(inner)
    else:
        der = _d_bstar(inner)
    return der.multiply(gaussian_factor(2, 1, outer_coeff))


def _ps_raw(chi, kappa):
    """Subtraction transform as a CF map (output still parity-flipped)."""
    f = _f_kernel(chi, kappa, math.sqrt(kappa))
    return _sandwich(f, -0.5, +0.5).scale((kappa - 1.0) / kappa)


def _pa_raw(chi, kappa):
    """Addition transform as a CF map (output still parity-flipped)."""
    f = _f_kernel(chi, kappa, math.sqrt(kappa))
    return _sandwich(f, +0.5, -0.5).scale(kappa - 1.0)


def _ps_cf(chi_noise, kappa):
    return _negate_b(_ps_raw(chi_noise, kappa))


def _pa_cf(chi_noise, kappa):
    return _negate_b(_pa_raw(chi_noise, kappa))


def _pc_cf(chi_noise, kappa):
    f = _f_kernel(chi_noise, kappa, math.sqrt(kappa))
    q = (kappa - 1.0) / kappa
    inner_both = _sandwich(f, 0.0, +0.5)
    t1 = _sandwich(inner_both, +0.5, -1.0).scale(q * q)
    inner_bs = _sandwich(f, 0.0, +0.5, order="bstar")
    t2 = _sandwich(inner_bs, +0.5, -1.0, order="b").scale(-q)
    inner_b = _sandwich(f, 0.0, +0.5, order="b")
    t3 = _sandwich(inner_b, +0.5, -1.0, order="bstar").scale(-q)
    return _negate_b(t1.add(t2).add(t3).add(f))


def _pspa_cf(chi_noise, kappa):
    """Subtraction followed by addition, both at the same kappa; the two
    transforms compose directly (their parity flips cancel)."""
    return _pa_raw(_ps_raw(chi_noise, kappa), kappa)


def _paps_cf(chi_noise, kappa):
    """Addition followed by subtraction, both at the same kappa."""
    return _ps_raw(_pa_raw(chi_noise, kappa), kappa)


# ---------------------------------------------------------------------------
# quantum scissors
# ---------------------------------------------------------------------------

def fock_transition_cf(m, n):
    """CF of |m><n| for m, n in {0, 1}: <m|D(xi)|n> as poly * Gaussian."""
    vac = PolyGaussianCF.vacuum(1)
    if (m, n) == (0, 0):
        poly = {(0, 0): 1.0 + 0.0j}
    elif (m, n) == (1, 0):
        poly = {(1, 0): 1.0 + 0.0j}
    elif (m, n) == (0, 1):
        poly = {(0, 1): -1.0 + 0.0j}
    elif (m, n) == (1, 1):
        poly = {(0, 0): 1.0 + 0.0j, (1, 1): -1.0 + 0.0j}
    else:
        raise ValueError("only single-photon transitions supported")
    return PolyGaussianCF(1, vac.exponent, poly)


def _qs_cf(chi_tmsv, kappa, qs_gain=None):
    """Quantum scissors on mode B: diagonal {1, g} truncation of the
    transmitted mode, assembled from the |m><n| transition CFs."""
    g = qs_amplification(kappa, qs_gain)
    weights = {(0, 0): 1.0, (0, 1): g, (1, 0): g, (1, 1): g * g}
    total = None
    for (m, n), weight in weights.items():
        proj = fock_transition_cf(m, n)
        # element extraction over the old mode B pairs |m><n| on the new
        # mode with |n><m| at negated argument inside the integral
        # (index order fixed by the Fock-oracle cross-check)
        extract = fock_transition_cf(n, m)
        extract_neg = extract.substitute(
            mode_map(1, 1, {0: [(0, -1.0, 0.0)]}), 1)
        integrand = chi_tmsv.multiply(extract_neg.embed(2, (1,)))
        amp = integrand.integrate_mode(1)              # 1-mode CF in xi_A
        term = amp.embed(2, (0,)).multiply(proj.embed(2, (1,)))
        term = term.scale(weight / (1.0 + g * g))
        total = term if total is None else total.add(term)
    return total


# ---------------------------------------------------------------------------
# squeezed Bell-like states
# ---------------------------------------------------------------------------

def sb_cf(p, delta):
    """CF of S12(rho)[cos(delta)|00> + sin(delta)|11>]."""
    cd, sd = math.cos(delta), math.sin(delta)
    vac = PolyGaussianCF.vacuum(2)
    # cos^2 + 2 cos sin Re{xi_A xi_B} + sin^2 (1 - |xi_A|^2)(1 - |xi_B|^2),
    # with 2 Re{xi_A xi_B} = xi_A xi_B + xi_A* xi_B*
    poly = {
        (0, 0, 0, 0): cd * cd + sd * sd + 0.0j,
        (1, 0, 1, 0): cd * sd + 0.0j,
        (0, 1, 0, 1): cd * sd + 0.0j,
        (1, 1, 0, 0): -sd * sd + 0.0j,
        (0, 0, 1, 1): -sd * sd + 0.0j,
        (1, 1, 1, 1): sd * sd + 0.0j,
    }
    raw = PolyGaussianCF(2, vac.exponent, poly)
    return raw.substitute(bogoliubov_matrix(p), 2)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def build_resource(spec, ch=IDEAL_CHANNEL):
    """Construct the normalized resource CF for a family and channel.

    Receiver-side operations consume the channel-noised TMSV; quantum
    scissors is built on the clean TMSV and the output mode is then sent
    through the channel; TMSV and SB have no heralded stage.
    """
    fam = spec.family
    if fam == "tmsv":
        raw = apply_channel(tmsv_cf(spec.tmsv), ch, 1)
    elif fam == "sb":
        raw = apply_channel(sb_cf(spec.tmsv, spec.delta), ch, 1)
    elif fam == "qs":
        raw = apply_channel(_qs_cf(tmsv_cf(spec.tmsv), spec.kappa, spec.qs_gain), ch, 1)
    elif fam in RECEIVER_SIDE:
        if fam == "pc" and spec.kappa >= PC_TMSV_LIMIT:
            raw = apply_channel(tmsv_cf(spec.tmsv), ch, 1)
        else:
            noisy = apply_channel(tmsv_cf(spec.tmsv), ch, 1)
            builder = {"ps": _ps_cf, "pa": _pa_cf, "pc": _pc_cf,
                       "pspa": _pspa_cf, "paps": _paps_cf}[fam]
            raw = builder(noisy, spec.kappa)
    else:  # pragma: no cover - guarded by ResourceSpec validation
        raise CFError(f"unhandled family {fam}")
    cf, norm = raw.normalize()
    if norm <= 0:
        raise CFError(f"{fam}: non-positive success norm {norm}")
    return ResourceState(cf=cf, success_norm=norm, spec=spec, channel=ch)
