"""Exact arithmetic on polynomial-times-Gaussian characteristic functions.

Every state in the teleportation pipeline is represented as

    chi(xi_1, ..., xi_n) = P(xi_1, xi_1*, ..., xi_n, xi_n*) * exp(Q),

where P is a sparse complex polynomial and Q a complex quadratic form in
the 2n formal variables (xi_i and xi_i* are treated as independent
symbols; conjugation is only enforced when evaluating at numeric points
or building substitution maps).  Products, derivatives, linear argument
substitutions and Gaussian phase-space integrals all stay inside this
class, so the whole fidelity computation is closed form.

Variable ordering: mode i owns slots 2i (xi_i) and 2i+1 (xi_i*).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# coefficients smaller than this (relative to nothing, absolute) are dropped
PRUNE_TOL = 1e-14


class CFError(ValueError):
    """Raised on structurally invalid characteristic-function operations."""


class NonIntegrableError(CFError):
    """Gaussian integral diverges: real part of the mode's 2x2 form is not
    negative definite."""

    def __init__(self, mode, form):
        self.mode = mode
        self.form = np.asarray(form, dtype=float)
        super().__init__(
            f"mode {mode} not integrable; real quadratic form "
            f"[[{self.form[0, 0]:.6g}, {self.form[0, 1]:.6g}], "
            f"[{self.form[1, 0]:.6g}, {self.form[1, 1]:.6g}]] "
            "is not negative definite"
        )


@dataclass(frozen=True)
class VarIndex:
    """One of the 2n formal variables: xi_mode or its formal conjugate."""

    mode: int
    conjugated: bool = False

    def slot(self):
        return 2 * self.mode + (1 if self.conjugated else 0)


@dataclass(frozen=True)
class QuadForm:
    """constant + linear.v + v^T quadratic v over the 2n formal variables."""

    constant: complex
    linear: np.ndarray       # shape (2n,)
    quadratic: np.ndarray    # shape (2n, 2n), symmetric

    @staticmethod
    def zero(n_vars):
        return QuadForm(0.0, np.zeros(n_vars, dtype=complex),
                        np.zeros((n_vars, n_vars), dtype=complex))

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=complex)
        quad = np.asarray(self.quadratic, dtype=complex)
        quad = 0.5 * (quad + quad.T)  # stored symmetrized
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "quadratic", quad)
        if quad.shape != (lin.size, lin.size):
            raise CFError("quadratic/linear dimension mismatch")

    @property
    def n_vars(self):
        return self.linear.size

    def value(self, v):
        v = np.asarray(v, dtype=complex)
        return self.constant + self.linear @ v + v @ self.quadratic @ v

    def __add__(self, other):
        if self.n_vars != other.n_vars:
            raise CFError("quadform dimension mismatch")
        return QuadForm(self.constant + other.constant,
                        self.linear + other.linear,
                        self.quadratic + other.quadratic)


def _prune(poly):
    out = {k: c for k, c in poly.items() if abs(c) > PRUNE_TOL}
    return out


@dataclass(frozen=True)
class PolyGaussianCF:
    """A characteristic function P * exp(Q) on ``n_modes`` modes.

    ``poly`` maps exponent tuples (length 2*n_modes) to complex
    coefficients.  n_modes may be 0 for fully integrated scalars.
    """

    n_modes: int
    exponent: QuadForm
    poly: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.exponent.n_vars != 2 * self.n_modes:
            raise CFError("exponent size does not match n_modes")
        for k in self.poly:
            if len(k) != 2 * self.n_modes:
                raise CFError("monomial length does not match n_modes")

    # -- constructors -------------------------------------------------

    @staticmethod
    def gaussian(n_modes, exponent):
        """exp(Q) with unit polynomial."""
        key = (0,) * (2 * n_modes)
        return PolyGaussianCF(n_modes, exponent, {key: 1.0 + 0.0j})

    @staticmethod
    def vacuum(n_modes=1):
        """exp(-sum |xi_i|^2 / 2)."""
        nv = 2 * n_modes
        quad = np.zeros((nv, nv), dtype=complex)
        for i in range(n_modes):
            quad[2 * i, 2 * i + 1] = -0.25
            quad[2 * i + 1, 2 * i] = -0.25
        return PolyGaussianCF.gaussian(n_modes, QuadForm(0.0, np.zeros(nv), quad))

    @property
    def is_zero(self):
        return not self.poly

    # -- evaluation ---------------------------------------------------

    def evaluate(self, args):
        """Value at numeric mode arguments; xi_i* slots get conj(args[i])."""
        args = np.atleast_1d(np.asarray(args, dtype=complex))
        if args.size != self.n_modes:
            raise CFError(f"expected {self.n_modes} arguments, got {args.size}")
        v = np.empty(2 * self.n_modes, dtype=complex)
        v[0::2] = args
        v[1::2] = np.conj(args)
        return self._eval_vars(v)

    def _eval_vars(self, v):
        """Value with all 2n formal variables given independently."""
        v = np.asarray(v, dtype=complex)
        p = 0.0 + 0.0j
        for exps, coeff in self.poly.items():
            term = coeff
            for i, e in enumerate(exps):
                if e:
                    term *= v[i] ** e
            p += term
        return p * np.exp(self.exponent.value(v))

    # -- arithmetic ---------------------------------------------------

    def scale(self, factor):
        return PolyGaussianCF(self.n_modes, self.exponent,
                              _prune({k: c * factor for k, c in self.poly.items()}))

    def multiply(self, other):
        """Pointwise product: exponents add, polynomials convolve."""
        if self.n_modes != other.n_modes:
            raise CFError("multiply: mode count mismatch")
        poly = {}
        for ka, ca in self.poly.items():
            for kb, cb in other.poly.items():
                key = tuple(a + b for a, b in zip(ka, kb))
                poly[key] = poly.get(key, 0.0) + ca * cb
        return PolyGaussianCF(self.n_modes, self.exponent + other.exponent,
                              _prune(poly))

    def add(self, other, tol=1e-12):
        """Sum of two CFs sharing the same Gaussian exponent."""
        if self.n_modes != other.n_modes:
            raise CFError("add: mode count mismatch")
        de = abs(self.exponent.constant - other.exponent.constant)
        de += np.abs(self.exponent.linear - other.exponent.linear).max(initial=0.0)
        de += np.abs(self.exponent.quadratic - other.exponent.quadratic).max(initial=0.0)
        if de > tol:
            raise CFError("add: exponents differ; sum leaves the class")
        poly = dict(self.poly)
        for k, c in other.poly.items():
            poly[k] = poly.get(k, 0.0) + c
        return PolyGaussianCF(self.n_modes, self.exponent, _prune(poly))

    # -- calculus -----------------------------------------------------

    def differentiate(self, var):
        """Partial derivative with respect to one formal variable.

        (P e^Q)' = (dP + P dQ) e^Q; dQ is the degree-1 polynomial
        l_v + 2 (A v)_v.
        """
        s = var.slot() if isinstance(var, VarIndex) else int(var)
        nv = 2 * self.n_modes
        poly = {}

        def acc(key, c):
            poly[key] = poly.get(key, 0.0) + c

        lin_const = self.exponent.linear[s]
        lin_row = 2.0 * self.exponent.quadratic[s]
        for exps, coeff in self.poly.items():
            # dP term
            if exps[s] > 0:
                key = exps[:s] + (exps[s] - 1,) + exps[s + 1:]
                acc(key, coeff * exps[s])
            # P * dQ term
            if lin_const != 0:
                acc(exps, coeff * lin_const)
            for j in range(nv):
                cj = lin_row[j]
                if cj != 0:
                    key = exps[:j] + (exps[j] + 1,) + exps[j + 1:]
                    acc(key, coeff * cj)
        return PolyGaussianCF(self.n_modes, self.exponent, _prune(poly))

    # -- linear substitutions ------------------------------------------

    def substitute(self, matrix, n_modes_new, check_conjugation=True):
        """Rewrite in new variables: old variable i -> sum_j M[i, j] new_j.

        M has shape (2*n_modes, 2*n_modes_new).  Conjugation consistency
        requires M[2i+1, 2j] = conj(M[2i, 2j+1]) and
        M[2i+1, 2j+1] = conj(M[2i, 2j]).
        """
        m = np.asarray(matrix, dtype=complex)
        nv_old, nv_new = 2 * self.n_modes, 2 * n_modes_new
        if m.shape != (nv_old, nv_new):
            raise CFError(f"substitution matrix must be {nv_old}x{nv_new}")
        if check_conjugation:
            for i in range(self.n_modes):
                for j in range(n_modes_new):
                    a = m[2 * i, 2 * j]
                    b = m[2 * i, 2 * j + 1]
                    if (abs(m[2 * i + 1, 2 * j] - np.conj(b)) > 1e-12
                            or abs(m[2 * i + 1, 2 * j + 1] - np.conj(a)) > 1e-12):
                        raise CFError("substitution map is not conjugation-consistent")

        exponent = QuadForm(self.exponent.constant,
                            m.T @ self.exponent.linear,
                            m.T @ self.exponent.quadratic @ m)

        # rewrite each monomial: product over variables of linear forms
        unit = {(0,) * nv_new: 1.0 + 0.0j}
        rows = [
            {(0,) * j + (1,) + (0,) * (nv_new - j - 1): m[i, j]
             for j in range(nv_new) if m[i, j] != 0}
            for i in range(nv_old)
        ]
        row_powers = [{0: unit} for _ in range(nv_old)]

        def row_power(i, e):
            cache = row_powers[i]
            if e not in cache:
                prev = row_power(i, e - 1)
                cache[e] = _poly_mul(prev, rows[i])
            return cache[e]

        poly = {}
        for exps, coeff in self.poly.items():
            term = {(0,) * nv_new: coeff}
            for i, e in enumerate(exps):
                if e:
                    term = _poly_mul(term, row_power(i, e))
                    if not term:
                        break
            for k, c in term.items():
                poly[k] = poly.get(k, 0.0) + c
        return PolyGaussianCF(n_modes_new, exponent, _prune(poly))

    def embed(self, n_total, positions):
        """Place this CF's modes at ``positions`` inside a larger register."""
        if len(positions) != self.n_modes:
            raise CFError("positions must match mode count")
        if len(set(positions)) != len(positions):
            raise CFError("embed: position collision")
        if n_total < self.n_modes or any(p >= n_total or p < 0 for p in positions):
            raise CFError("embed: positions out of range")
        nv_new = 2 * n_total
        m = np.zeros((2 * self.n_modes, nv_new), dtype=complex)
        for i, p in enumerate(positions):
            m[2 * i, 2 * p] = 1.0
            m[2 * i + 1, 2 * p + 1] = 1.0
        return self.substitute(m, n_total)

    def restrict_mode_to_zero(self, mode):
        """Set xi_mode = xi_mode* = 0 and drop the mode from the register."""
        keep = [i for i in range(2 * self.n_modes)
                if i not in (2 * mode, 2 * mode + 1)]
        exponent = QuadForm(self.exponent.constant,
                            self.exponent.linear[keep],
                            self.exponent.quadratic[np.ix_(keep, keep)])
        poly = {}
        for exps, coeff in self.poly.items():
            if exps[2 * mode] or exps[2 * mode + 1]:
                continue
            key = tuple(exps[i] for i in keep)
            poly[key] = poly.get(key, 0.0) + coeff
        return PolyGaussianCF(self.n_modes - 1, exponent, _prune(poly))

    # -- Gaussian integration -------------------------------------------

    def integrate_mode(self, mode):
        """Closed form of integral d^2 xi_mode / pi of this CF.

        Completes the square in the real plane xi = x + iy; polynomial
        prefactors in the integrated variables are produced by
        differentiating the Gaussian result with respect to auxiliary
        linear sources.
        """
        if not 0 <= mode < self.n_modes:
            raise CFError("integrate_mode: bad mode index")
        n = self.n_modes
        u, w = 2 * mode, 2 * mode + 1  # xi, xi* slots

        max_ju = max((k[u] for k in self.poly), default=0)
        max_jw = max((k[w] for k in self.poly), default=0)
        need_sources = (max_ju + max_jw) > 0

        # extended register: original vars + two source slots (su, sw)
        nv = 2 * n
        next_ = nv + 2 if need_sources else nv
        a_ext = np.zeros((next_, next_), dtype=complex)
        l_ext = np.zeros(next_, dtype=complex)
        a_ext[:nv, :nv] = self.exponent.quadratic
        l_ext[:nv] = self.exponent.linear
        if need_sources:
            su, sw = nv, nv + 1
            a_ext[u, su] += 0.5
            a_ext[su, u] += 0.5
            a_ext[w, sw] += 0.5
            a_ext[sw, w] += 0.5

        a = a_ext[u, u]
        b = a_ext[w, w]
        c = 2.0 * a_ext[u, w]

        others = [i for i in range(next_) if i not in (u, w)]
        # linear coefficients of u and w (constants + forms in other vars)
        lu0, lw0 = l_ext[u], l_ext[w]
        lu_vec = 2.0 * a_ext[u, others]
        lw_vec = 2.0 * a_ext[w, others]

        # xi = x + iy, xi* = x - iy:  E = alpha x^2 + beta y^2 + gamma xy + ...
        alpha = a + b + c
        beta = c - a - b
        gamma = 2j * (a - b)

        re_form = np.array([[alpha.real, gamma.real / 2],
                            [gamma.real / 2, beta.real]])
        # negative definite <=> integrable
        if re_form[0, 0] >= 0 or np.linalg.det(re_form) <= 0:
            raise NonIntegrableError(mode, re_form)

        det_ms = alpha * beta - gamma * gamma / 4.0  # det(-S) = det(S)
        scale = 1.0 / np.sqrt(det_ms)
        # S^{-1} entries
        i11 = beta / det_ms
        i22 = alpha / det_ms
        i12 = -gamma / (2.0 * det_ms)

        # J = (P, Qy): P = Lu + Lw, Qy = i (Lu - Lw), each affine in others
        p0, pv = lu0 + lw0, lu_vec + lw_vec
        q0, qv = 1j * (lu0 - lw0), 1j * (lu_vec - lw_vec)

        # exp(-1/4 J^T S^{-1} J) contribution over the other variables
        n_oth = len(others)
        add_quad = np.zeros((n_oth, n_oth), dtype=complex)
        add_lin = np.zeros(n_oth, dtype=complex)
        f = -0.25
        add_quad += f * (i11 * np.outer(pv, pv)
                         + i12 * (np.outer(pv, qv) + np.outer(qv, pv))
                         + i22 * np.outer(qv, qv))
        add_lin += f * (2 * i11 * p0 * pv + 2 * i12 * (p0 * qv + q0 * pv)
                        + 2 * i22 * q0 * qv)
        add_const = f * (i11 * p0 * p0 + 2 * i12 * p0 * q0 + i22 * q0 * q0)

        quad_new = a_ext[np.ix_(others, others)] + add_quad
        lin_new = l_ext[others] + add_lin
        const_new = self.exponent.constant + add_const
        n_modes_g = n - 1 + (1 if need_sources else 0)
        exp_new = QuadForm(const_new, lin_new, quad_new)
        gauss = PolyGaussianCF.gaussian(n_modes_g, exp_new)

        # index map old slot -> position among "others"
        pos = {slot: idx for idx, slot in enumerate(others)}

        if not need_sources:
            poly = {}
            for exps, coeff in self.poly.items():
                key = tuple(exps[s] for s in others)
                poly[key] = poly.get(key, 0.0) + coeff * scale
            return PolyGaussianCF(n - 1, exp_new, _prune(poly))

        # monomials u^j w^k: apply d^j/dsu^j d^k/dsw^k, then su = sw = 0
        src_mode = n_modes_g - 1
        su_slot = pos[su]
        sw_slot = pos[sw]
        deriv_cache = {(0, 0): gauss}

        def deriv(j, k):
            if (j, k) not in deriv_cache:
                if k > 0:
                    deriv_cache[(j, k)] = deriv(j, k - 1).differentiate(sw_slot)
                else:
                    deriv_cache[(j, k)] = deriv(j - 1, 0).differentiate(su_slot)
            return deriv_cache[(j, k)]

        result = None
        for exps, coeff in self.poly.items():
            j, k = exps[u], exps[w]
            base = deriv(j, k).restrict_mode_to_zero(src_mode)
            rest = tuple(exps[s] for s in others if s not in (su, sw))
            term = {}
            for kk, cc in base.poly.items():
                key = tuple(x + y for x, y in zip(kk, rest))
                term[key] = term.get(key, 0.0) + cc * coeff * scale
            piece = PolyGaussianCF(n - 1, base.exponent, term)
            result = piece if result is None else result.add(piece)
        return PolyGaussianCF(result.n_modes, result.exponent,
                              _prune(result.poly))

    # -- normalization --------------------------------------------------

    def norm_at_origin(self):
        """chi(0, ..., 0) = P(0) * exp(Q constant)."""
        key = (0,) * (2 * self.n_modes)
        return self.poly.get(key, 0.0) * np.exp(self.exponent.constant)

    def normalize(self, imag_tol=1e-10):
        """Scale so the origin value is 1; returns (cf, norm).

        The norm is the success weight of whatever heralded operation
        produced this CF; its imaginary residue must be negligible.
        """
        norm = self.norm_at_origin()
        if abs(norm) <= 1e-14:
            raise CFError("vanishing norm: operation annihilates the state")
        if abs(norm.imag) > imag_tol * abs(norm):
            raise CFError(f"norm has non-negligible imaginary part: {norm}")
        return self.scale(1.0 / norm), float(norm.real)


def _poly_mul(pa, pb):
    out = {}
    for ka, ca in pa.items():
        for kb, cb in pb.items():
            key = tuple(a + b for a, b in zip(ka, kb))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def mode_map(n_modes_old, n_modes_new, entries):
    """Build a conjugation-consistent substitution matrix.

    ``entries`` maps old mode index -> list of (new_mode, a, b) terms
    meaning xi_old -> sum a * xi_new + b * xi_new*.  The conjugate row is
    filled in automatically.
    """
    m = np.zeros((2 * n_modes_old, 2 * n_modes_new), dtype=complex)
    for i, terms in entries.items():
        for j, a, b in terms:
            m[2 * i, 2 * j] += a
            m[2 * i, 2 * j + 1] += b
            m[2 * i + 1, 2 * j + 1] += np.conj(a)
            m[2 * i + 1, 2 * j] += np.conj(b)
    return m


def negate_args(cf):
    """chi(xi) -> chi(-xi) on every mode."""
    n = cf.n_modes
    return cf.substitute(mode_map(n, n, {i: [(i, -1.0, 0.0)] for i in range(n)}), n)
