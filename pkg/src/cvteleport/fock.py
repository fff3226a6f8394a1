"""Brute-force truncated Fock-space verifier.

Everything here is deliberately independent of the characteristic-
function pipeline: states are dense density matrices built from matrix
exponentials and beam-splitter circuits, channels act through Kraus
operators and displacement averaging, and fidelity integrals are done
by plain 2D quadrature.  Slow, but it is the ground truth the fast
closed-form path is tested against.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

DEFAULT_NMAX = 24


class TruncationError(RuntimeError):
    """Tail population of the truncated state is too large to trust."""


def destroy(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def create(dim):
    return destroy(dim).conj().T


def displacement(alpha, dim):
    a = destroy(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze(s, dim):
    """exp((s* a^2 - s a^dag^2) / 2)."""
    a = destroy(dim)
    return expm(0.5 * (np.conj(s) * (a @ a) - s * (a.conj().T @ a.conj().T)))


def two_mode_squeeze(rho, dim):
    """exp(rho* a1 a2 - rho a1^dag a2^dag) on a dim^2 space."""
    a = destroy(dim)
    eye = np.eye(dim)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    return expm(np.conj(rho) * (a1 @ a2) - rho * (a1.conj().T @ a2.conj().T))


def beamsplitter(kappa, dim):
    """Two-mode BS with transmissivity kappa: exp(theta (a b^dag - a^dag b)),
    cos(theta) = sqrt(kappa)."""
    theta = math.acos(math.sqrt(kappa))
    a = destroy(dim)
    eye = np.eye(dim)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    return expm(theta * (a1 @ a2.conj().T - a1.conj().T @ a2))


def coherent_state(alpha, dim):
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    return displacement(alpha, dim) @ v


def squeezed_state(s, dim):
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    return squeeze(s, dim) @ v


def tmsv_state(r, phi, dim):
    v = np.zeros(dim * dim, dtype=complex)
    v[0] = 1.0
    return two_mode_squeeze(r * complex(math.cos(phi), math.sin(phi)), dim) @ v


def sb_state(r, phi, delta, dim):
    """S12 applied to cos(delta)|00> + sin(delta)|11>."""
    v = np.zeros(dim * dim, dtype=complex)
    v[0] = math.cos(delta)
    v[dim + 1] = math.sin(delta)
    return two_mode_squeeze(r * complex(math.cos(phi), math.sin(phi)), dim) @ v


# ---------------------------------------------------------------------------
# heralded single-photon operations as Kraus matrices on one mode
# ---------------------------------------------------------------------------

def _conditional_kraus(kappa, dim, anc_in, anc_out):
    """<anc_out| U_BS |anc_in> on the system mode, from the explicit
    two-mode beam-splitter unitary."""
    anc_dim = max(anc_in, anc_out) + 3
    # one common dimension so photon exchange between the ports is exact
    full_dim = dim + anc_dim
    u = beamsplitter(kappa, full_dim)
    k = np.zeros((dim, dim), dtype=complex)
    for m_sys in range(dim):
        for n_sys in range(dim):
            row = m_sys * full_dim + anc_out
            col = n_sys * full_dim + anc_in
            k[m_sys, n_sys] = u[row, col]
    return k


def kraus_photon_subtraction(kappa, dim):
    """Vacuum ancilla in, one photon detected in the reflected port."""
    return _conditional_kraus(kappa, dim, anc_in=0, anc_out=1)


def kraus_photon_addition(kappa, dim):
    """Single-photon ancilla in, vacuum detected."""
    return _conditional_kraus(kappa, dim, anc_in=1, anc_out=0)


def kraus_photon_catalysis(kappa, dim):
    """Single-photon ancilla in, single photon detected."""
    return _conditional_kraus(kappa, dim, anc_in=1, anc_out=1)


def kraus_quantum_scissors_truncation(gain, dim):
    """Diagonal {1, gain} truncation onto span{|0>, |1>}, normalized so the
    maximum success amplitude structure matches the scissors state: the
    overall 1/(1 + gain^2) weight is applied to the density matrix."""
    k = np.zeros((dim, dim), dtype=complex)
    k[0, 0] = 1.0
    k[1, 1] = gain
    return k / math.sqrt(1.0 + gain * gain)


def quantum_scissors_circuit_kraus(kappa, dim, anc_dim=5):
    """Effective operator of the explicit single-photon scissors circuit.

    Ancilla photon split on BS(kappa) into modes (c, d); the input mode
    interferes with c on a 50:50 BS; one photon is detected in the first
    output and none in the second; mode d carries the output.  Returns
    the (unnormalized) dim x dim Kraus matrix.  Used to resolve the gain
    convention empirically.
    """
    d_in = dim
    # state ordering: (input b, c, d)
    dims = (d_in, anc_dim, anc_dim)

    def idx(nb, nc, nd):
        return (nb * dims[1] + nc) * dims[2] + nd

    # BS1 on (c, d) applied to |1, 0>
    u1 = beamsplitter(kappa, anc_dim)
    # BS2 50:50 on (b, c)
    bs_dim = max(d_in, anc_dim)
    u2 = beamsplitter(0.5, bs_dim)

    k = np.zeros((d_in, d_in), dtype=complex)
    for n_in in range(d_in):
        # |n_in>_b (x) BS1 |1,0>_{cd}
        amp_cd = {(nc, nd): u1[nc * anc_dim + nd, 1 * anc_dim + 0]
                  for nc in range(anc_dim) for nd in range(anc_dim)
                  if abs(u1[nc * anc_dim + nd, anc_dim]) > 1e-15}
        for (nc, nd), a_cd in amp_cd.items():
            # BS2 on (b, c): |n_in, nc> -> sum |mb, mc>
            for mb in range(bs_dim):
                for mc in range(bs_dim):
                    a2 = u2[mb * bs_dim + mc, n_in * bs_dim + nc]
                    if abs(a2) < 1e-15:
                        continue
                    # detect (1, 0) in (b, c); output is mode d
                    if mb == 1 and mc == 0 and nd < d_in:
                        k[nd, n_in] += a_cd * a2
    return k


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

def loss_kraus(T, dim, k_max=None):
    """Pure-loss Kraus set K_k = sqrt((1-T)^k / k!) T^{n/2} a^k."""
    a = destroy(dim)
    n = np.arange(dim)
    t_half = np.diag(np.power(T, n / 2.0)).astype(complex)
    ops = []
    ak = np.eye(dim, dtype=complex)
    k_max = dim - 1 if k_max is None else k_max
    for k in range(k_max + 1):
        coeff = math.sqrt((1.0 - T) ** k / math.factorial(k)) if T < 1 else (1.0 if k == 0 else 0.0)
        ops.append(coeff * (t_half @ ak))
        ak = a @ ak
    return ops


def apply_single_mode_map(rho2, ops, dim, mode):
    """Apply sum_k (K_k on one mode) rho (K_k)^dag to a two-mode state."""
    eye = np.eye(dim, dtype=complex)
    out = np.zeros_like(rho2)
    for k in ops:
        full = np.kron(k, eye) if mode == 0 else np.kron(eye, k)
        out += full @ rho2 @ full.conj().T
    return out


def apply_excess_noise(rho2, eps, dim, mode, n_grid=10):
    """Random-displacement noise with E|beta|^2 = eps/2, matching the CF
    factor exp(-eps |xi|^2 / 2).  Gauss-Hermite average over Re/Im beta."""
    if eps == 0:
        return rho2
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_grid)
    # beta components are N(0, eps/4) each so that E|beta|^2 = eps/2
    std = math.sqrt(eps / 4.0)
    eye = np.eye(dim, dtype=complex)
    out = np.zeros_like(rho2)
    wsum = 0.0
    for xr, wr in zip(nodes, weights):
        for xi, wi in zip(nodes, weights):
            beta = std * (xr + 1j * xi)
            d = displacement(beta, dim)
            full = np.kron(d, eye) if mode == 0 else np.kron(eye, d)
            out += wr * wi * (full @ rho2 @ full.conj().T)
            wsum += wr * wi
    return out / wsum


def apply_noisy_channel(rho2, T, eps, dim, mode=1):
    out = apply_single_mode_map(rho2, loss_kraus(T, dim), dim, mode)
    return apply_excess_noise(out, eps, dim, mode)


# ---------------------------------------------------------------------------
# resource-state construction
# ---------------------------------------------------------------------------

def oracle_state(spec, ch, n_max=DEFAULT_NMAX, tail_tol=1e-9, check_tail=True):
    """Density matrix + success probability for a ResourceSpec and channel.

    Mirrors the stage ordering of the CF pipeline: receiver-side Kraus
    operations act after the channel; quantum scissors acts before.
    """
    dim = n_max + 1
    fam = spec.family
    r, phi = spec.tmsv.r, spec.tmsv.phi

    if fam == "sb":
        psi = sb_state(r, phi, spec.delta, dim)
    else:
        psi = tmsv_state(r, phi, dim)
    rho = np.outer(psi, psi.conj())

    if fam == "qs":
        from .states import qs_amplification
        g = qs_amplification(spec.kappa, spec.qs_gain)
        k = kraus_quantum_scissors_truncation(g, dim)
        rho = apply_single_mode_map(rho, [k], dim, mode=1)

    rho = apply_noisy_channel(rho, ch.T, ch.eps, dim, mode=1)

    if fam in ("ps", "pa", "pc", "pspa", "paps"):
        kraus = {
            "ps": [kraus_photon_subtraction(spec.kappa, dim)],
            "pa": [kraus_photon_addition(spec.kappa, dim)],
            "pc": [kraus_photon_catalysis(spec.kappa, dim)],
        }
        if fam in kraus:
            ops = kraus[fam]
        elif fam == "pspa":
            ops = [kraus_photon_addition(spec.kappa, dim)
                   @ kraus_photon_subtraction(spec.kappa, dim)]
        else:  # paps
            ops = [kraus_photon_subtraction(spec.kappa, dim)
                   @ kraus_photon_addition(spec.kappa, dim)]
        rho = apply_single_mode_map(rho, ops, dim, mode=1)

    p_success = float(np.trace(rho).real)
    if p_success <= 1e-14:
        raise ValueError(f"{fam}: operation annihilated the state")
    rho = rho / p_success

    if check_tail:
        pops = np.real(np.diag(rho)).reshape(dim, dim)
        tail = pops[-2:, :].sum() + pops[:, -2:].sum()
        if tail > tail_tol:
            raise TruncationError(
                f"tail population {tail:.3e} exceeds {tail_tol:.1e}; raise n_max")
    return rho, p_success


# ---------------------------------------------------------------------------
# characteristic functions and fidelity by quadrature
# ---------------------------------------------------------------------------

def oracle_cf(rho, xis, dim=None):
    """Tr[rho D(xi_1) (x) D(xi_2) ...] for a 1- or 2-mode density matrix."""
    xis = np.atleast_1d(np.asarray(xis, dtype=complex))
    if dim is None:
        dim = int(round(rho.shape[0] ** (1.0 / xis.size)))
    ds = [displacement(x, dim) for x in xis]
    if len(ds) == 1:
        return complex(np.trace(rho @ ds[0]))
    # contract per-mode displacement matrices directly; a Kronecker
    # product followed by a dense dim^2 x dim^2 matmul is far slower
    r4 = rho.reshape(dim, dim, dim, dim)
    return complex(np.einsum("mnpq,pm,qn->", r4, ds[0], ds[1],
                             optimize=True))


def oracle_fidelity(chi_in, chi_out, radius=6.0, n_start=40, tol=1e-8,
                    max_doublings=5):
    """(1/pi) int d^2 xi chi_in(xi) chi_out(-xi) by tensor Gauss-Legendre
    quadrature over a square, with node doubling until converged."""
    prev = None
    n = n_start
    for _ in range(max_doublings + 1):
        x, wx = np.polynomial.legendre.leggauss(n)
        x = x * radius
        wx = wx * radius
        total = 0.0 + 0.0j
        for xv, wv in zip(x, wx):
            for yv, wv2 in zip(x, wx):
                xi = xv + 1j * yv
                total += wv * wv2 * chi_in(xi) * chi_out(-xi)
        val = total / math.pi
        if prev is not None and abs(val - prev) < tol:
            return float(val.real), abs(val - prev)
        prev = val
        n *= 2
    raise RuntimeError("fidelity quadrature did not converge")
