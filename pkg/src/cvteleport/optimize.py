"""Per-channel-point maximization of mean teleportation fidelity.

Two stages: a seeded Latin-hypercube scan over the family's parameter
box, then Nelder-Mead refinement from the best scan points.  The simplex
runs in logit-warped coordinates so boundary-pinned optima (e.g. photon
catalysis driving its beam-splitter toward unity) behave well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .states import ChannelParams, ResourceSpec, TMSVParams, build_resource
from .teleport import InputEnsemble, TeleportParams, mean_fidelity

R_BOUNDS = (0.0, 2.5)
G_BOUNDS = (1e-3, 3.0)
KAPPA_BOUNDS = (0.01, 0.999)
KAPPA_BOUNDS_PC = (0.01, 1.0)
DELTA_BOUNDS = (-math.pi / 2, math.pi / 2)

BOUNDARY_PIN_TOL = 1e-6


@dataclass(frozen=True)
class ParamSpace:
    """Ordered free parameters and their box bounds for one family."""

    names: tuple
    lower: np.ndarray
    upper: np.ndarray

    @staticmethod
    def for_family(family):
        names = ["r", "g"]
        bounds = [R_BOUNDS, G_BOUNDS]
        if family in ("ps", "pa", "pspa", "paps", "qs"):
            names.append("kappa")
            bounds.append(KAPPA_BOUNDS)
        elif family == "pc":
            names.append("kappa")
            bounds.append(KAPPA_BOUNDS_PC)
        elif family == "sb":
            names.append("delta")
            bounds.append(DELTA_BOUNDS)
        elif family != "tmsv":
            raise ValueError(f"unknown family {family!r}")
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        return ParamSpace(tuple(names), lo, hi)

    @property
    def dim(self):
        return len(self.names)


@dataclass
class OptResult:
    family: str
    params: dict
    mean_fidelity: float
    evaluations: int
    converged: bool
    multistart_spread: float
    boundary_pinned: bool
    quadrature_error: float = 0.0

    def param_vector(self, space):
        return np.array([self.params[n] for n in space.names])


def make_spec(family, params):
    """ResourceSpec from a named parameter dict (phi fixed to pi)."""
    return ResourceSpec(
        family,
        TMSVParams(r=params["r"], phi=math.pi),
        kappa=params.get("kappa"),
        delta=params.get("delta"),
    )


class FidelityObjective:
    """Mean fidelity as a function of the warped parameter vector."""

    def __init__(self, family, ens, ch, eta, space=None, fixed=None):
        self.family = family
        self.ens = ens
        self.ch = ch
        self.eta = eta
        self.fixed = dict(fixed or {})
        if space is None:
            space = ParamSpace.for_family(family)
            if self.fixed:
                keep = [i for i, n in enumerate(space.names)
                        if n not in self.fixed]
                space = ParamSpace(tuple(space.names[i] for i in keep),
                                   space.lower[keep], space.upper[keep])
        self.space = space
        self.evaluations = 0
        self.last_quad_error = 0.0

    # logistic warp maps R^d onto the open parameter box
    def to_box(self, x):
        lo, hi = self.space.lower, self.space.upper
        return lo + (hi - lo) / (1.0 + np.exp(-np.asarray(x, dtype=float)))

    def to_warped(self, p):
        lo, hi = self.space.lower, self.space.upper
        frac = np.clip((np.asarray(p) - lo) / (hi - lo), 1e-12, 1 - 1e-12)
        return np.log(frac / (1.0 - frac))

    def params_dict(self, p_box):
        d = dict(zip(self.space.names, (float(v) for v in p_box)))
        d.update(self.fixed)
        return d

    def value(self, p_box):
        self.evaluations += 1
        d = self.params_dict(p_box)
        try:
            resource = build_resource(make_spec(self.family, d), self.ch)
            tp = TeleportParams(g=d["g"], eta=self.eta)
            res = mean_fidelity(self.ens, resource, tp)
        except Exception:
            return -np.inf
        self.last_quad_error = res.quadrature_error_estimate
        return res.mean_fidelity

    def neg_warped(self, x):
        v = self.value(self.to_box(x))
        return -v if np.isfinite(v) else 1e6


def _latin_hypercube(space, n, rng):
    """Stratified sample of the parameter box."""
    d = space.dim
    u = (rng.permuted(np.tile(np.arange(n), (d, 1)), axis=1).T
         + rng.random((n, d))) / n
    return space.lower + u * (space.upper - space.lower)


def optimize_point(family, ens, ch, eta, seed=0, n_scan=64, n_refine=4,
                   extra_starts=(), fixed=None, space=None, xatol=1e-5):
    """Two-stage fidelity maximization at a single channel point.

    ``extra_starts`` are additional parameter vectors (in box coordinates)
    appended to the scan, used for warm starts along a sweep. ``fixed``
    pins named parameters, removing them from the search space.
    """
    obj = FidelityObjective(family, ens, ch, eta, space=space, fixed=fixed)
    sp = obj.space
    rng = np.random.default_rng(seed)

    if sp.dim == 0:
        # every parameter pinned: a single evaluation, no search
        val = obj.value(np.empty(0))
        if not np.isfinite(val):
            raise RuntimeError(
                f"{family}: fixed-parameter evaluation failed at "
                f"T={ch.T}, eps={ch.eps}")
        return OptResult(family=family, params=dict(fixed or {}),
                         mean_fidelity=float(val),
                         evaluations=obj.evaluations, converged=True,
                         multistart_spread=0.0, boundary_pinned=False,
                         quadrature_error=obj.last_quad_error)

    candidates = list(_latin_hypercube(sp, n_scan, rng))
    candidates.extend(np.asarray(s, dtype=float) for s in extra_starts)
    scan = [(obj.value(p), p) for p in candidates]
    scan.sort(key=lambda t: -t[0])
    if not np.isfinite(scan[0][0]):
        raise RuntimeError(
            f"{family}: no scan point produced a finite fidelity at "
            f"T={ch.T}, eps={ch.eps}")

    best_val, best_p = scan[0]
    spread_vals = []
    converged = False
    for val, start in scan[:n_refine]:
        if not np.isfinite(val):
            continue
        res = minimize(obj.neg_warped, obj.to_warped(start),
                       method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": 1e-10,
                                "maxiter": 400 * sp.dim})
        f = -res.fun
        spread_vals.append(f)
        if f > best_val:
            best_val, best_p = f, obj.to_box(res.x)
            converged = bool(res.success)
        elif f == best_val:
            converged = converged or bool(res.success)

    params = obj.params_dict(best_p)
    pinned = bool(np.any(np.abs(best_p - sp.lower) < BOUNDARY_PIN_TOL)
                  or np.any(np.abs(best_p - sp.upper) < BOUNDARY_PIN_TOL))
    spread = (max(spread_vals) - min(spread_vals)) if spread_vals else 0.0
    return OptResult(family=family, params=params,
                     mean_fidelity=float(best_val),
                     evaluations=obj.evaluations, converged=converged,
                     multistart_spread=float(spread),
                     boundary_pinned=pinned,
                     quadrature_error=obj.last_quad_error)


def sweep(family, ens, channel_points, eta, seed=0, **kwargs):
    """Optimize along a channel curve, warm-starting each point with the
    previous optimum.  ``channel_points`` is a list of ChannelParams."""
    results = []
    space = ParamSpace.for_family(family)
    prev = None
    for i, ch in enumerate(channel_points):
        extra = []
        if prev is not None:
            extra.append(np.clip(prev, space.lower, space.upper))
        res = optimize_point(family, ens, ch, eta, seed=seed + i,
                             extra_starts=extra, **kwargs)
        prev = res.param_vector(space)
        results.append(res)
    return results
