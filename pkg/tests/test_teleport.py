"""Teleportation map, fidelity and ensemble-average tests."""

import cmath
import math

import numpy as np
import pytest

from cvteleport.states import (
    ChannelParams,
    IDEAL_CHANNEL,
    ResourceSpec,
    TMSVParams,
    build_resource,
)
from cvteleport.teleport import (
    InputEnsemble,
    TeleportParams,
    classical_limit,
    fidelity,
    input_cf_coherent,
    input_cf_squeezed,
    mean_fidelity,
    mean_squeezing,
    teleport,
    teleport_fidelity,
)


def tmsv_resource(r, ch=IDEAL_CHANNEL):
    return build_resource(ResourceSpec("tmsv", TMSVParams(r=r, phi=math.pi)),
                          ch)


class TestInputs:
    def test_coherent_cf_value(self):
        alpha = 0.7 - 0.3j
        cf = input_cf_coherent(alpha)
        xi = 0.4 + 0.2j
        expect = cmath.exp(-abs(xi) ** 2 / 2 + xi * alpha.conjugate()
                           - xi.conjugate() * alpha)
        assert abs(cf.evaluate([xi]) - expect) < 1e-12

    def test_squeezed_cf_reduces_to_vacuum(self):
        cf = input_cf_squeezed(0.0)
        xi = 0.5 + 0.1j
        assert abs(cf.evaluate([xi]) - math.exp(-abs(xi) ** 2 / 2)) < 1e-12

    def test_squeezed_cf_quadrature_variances(self):
        # exponent at real/imaginary xi encodes e^{-2z} and e^{+2z}
        z = 0.4
        cf = input_cf_squeezed(z)
        x = 0.3
        along_re = -2.0 * math.log(abs(cf.evaluate([x])))
        along_im = -2.0 * math.log(abs(cf.evaluate([1j * x])))
        assert abs(along_re / x ** 2 - math.exp(2 * z)) < 1e-10
        assert abs(along_im / x ** 2 - math.exp(-2 * z)) < 1e-10


class TestIdealTeleport:
    @pytest.mark.parametrize("r", [0.0, 0.25, 0.5, 1.0, 2.0])
    def test_closed_form_unit_gain(self, r):
        res = tmsv_resource(r)
        tp = TeleportParams(g=1.0, eta=1.0)
        f = teleport_fidelity(input_cf_coherent(0.8 + 0.1j), res, tp)
        assert abs(f - 1.0 / (1.0 + math.exp(-2 * r))) < 1e-9

    def test_fidelity_independent_of_alpha_at_unit_gain(self):
        res = tmsv_resource(0.7)
        tp = TeleportParams(g=1.0, eta=1.0)
        vals = [teleport_fidelity(input_cf_coherent(a), res, tp)
                for a in (0.0, 1.5, -2.0 + 1.0j)]
        assert max(vals) - min(vals) < 1e-10

    def test_output_normalized(self):
        res = tmsv_resource(0.5)
        out = teleport(input_cf_coherent(0.3), res,
                       TeleportParams(g=1.1, eta=0.9))
        assert abs(out.norm_at_origin() - 1.0) < 1e-10

    def test_fidelity_bounds(self):
        res = tmsv_resource(0.5, ChannelParams(T=0.7, eps=0.02))
        for g in (0.8, 1.0, 1.2):
            f = teleport_fidelity(input_cf_coherent(1.0),
                                  res, TeleportParams(g=g, eta=0.9))
            assert 0.0 <= f <= 1.0 + 1e-9

    def test_self_fidelity_is_one(self):
        chi = input_cf_coherent(0.6 - 0.2j)
        assert abs(fidelity(chi, chi) - 1.0) < 1e-12


class TestEnsembleAverages:
    def test_coherent_closed_form_matches_quadrature(self):
        """The closed-form alpha integral agrees with explicit averaging."""
        res = tmsv_resource(0.6, ChannelParams(T=0.8, eps=0.01))
        tp = TeleportParams(g=1.05, eta=0.93)
        sigma = 2.0
        closed = mean_fidelity(InputEnsemble("coherent", sigma), res, tp)

        # polar Gauss-Laguerre x trapezoid over alpha
        t_nodes, t_weights = np.polynomial.laguerre.laggauss(24)
        n_ang = 32
        total = 0.0
        for t, w in zip(t_nodes, t_weights):
            rad = math.sqrt(sigma * t)
            for k in range(n_ang):
                alpha = rad * cmath.exp(2j * math.pi * k / n_ang)
                total += w / n_ang * teleport_fidelity(
                    input_cf_coherent(alpha), res, tp)
        assert abs(closed.mean_fidelity - total) < 1e-6

    def test_sigma_to_zero_approaches_vacuum_fidelity(self):
        res = tmsv_resource(0.4)
        tp = TeleportParams(g=1.0, eta=1.0)
        tiny = mean_fidelity(InputEnsemble("coherent", 1e-6), res, tp)
        f0 = teleport_fidelity(input_cf_coherent(0.0), res, tp)
        assert abs(tiny.mean_fidelity - f0) < 1e-5

    def test_mean_decreases_with_sigma_at_fixed_params(self):
        res = tmsv_resource(0.4, ChannelParams(T=0.9, eps=0.0))
        tp = TeleportParams(g=1.02, eta=0.9)
        f = [mean_fidelity(InputEnsemble("coherent", s), res, tp).mean_fidelity
             for s in (1.0, 5.0, 25.0)]
        assert f[0] > f[1] > f[2]

    def test_squeezed_average_converges(self):
        res = tmsv_resource(0.5, ChannelParams(T=0.9, eps=0.01))
        tp = TeleportParams(g=1.0, eta=0.95)
        out = mean_fidelity(InputEnsemble("squeezed", 1.0), res, tp)
        assert 0.0 <= out.mean_fidelity <= 1.0 + 1e-9
        assert out.quadrature_error_estimate < 1e-5

    def test_squeezed_sigma_small_matches_vacuum_input(self):
        res = tmsv_resource(0.5)
        tp = TeleportParams(g=1.0, eta=1.0)
        out = mean_fidelity(InputEnsemble("squeezed", 1e-8), res, tp)
        f0 = teleport_fidelity(input_cf_squeezed(0.0), res, tp)
        assert abs(out.mean_fidelity - f0) < 1e-4


class TestClassicalLimits:
    def test_coherent(self):
        assert classical_limit(InputEnsemble("coherent", 123.0)) == 0.5

    def test_mean_squeezing_rayleigh(self):
        """ς̄ = E[|s|] verified against radial numerical integration of the
        complex-Gaussian density."""
        from scipy.special import roots_genlaguerre

        sigma = 1.0
        # E[|s|] = int_0^inf sqrt(sigma t) e^{-t} dt: weight t^{1/2} e^{-t}
        _, t_weights = roots_genlaguerre(40, 0.5)
        numeric = math.sqrt(sigma) * float(np.sum(t_weights))
        assert abs(mean_squeezing(sigma) - numeric) < 1e-10
        assert abs(mean_squeezing(1.0) - math.sqrt(math.pi) / 2.0) < 1e-12

    def test_squeezed_limit_value(self):
        zbar = math.sqrt(math.pi) / 2.0
        expect = math.sqrt(math.exp(zbar)) / (1.0 + math.exp(zbar))
        lim = classical_limit(InputEnsemble("squeezed", 1.0))
        assert abs(lim - expect) < 1e-12
        assert abs(lim - 0.454632) < 1e-6

    def test_squeezed_limit_continuity(self):
        lim = classical_limit(InputEnsemble("squeezed", 1e-12))
        assert abs(lim - 0.5) < 1e-6

    def test_ideal_unit_gain_r0_sits_at_coherent_limit(self):
        res = tmsv_resource(0.0)
        tp = TeleportParams(g=1.0, eta=1.0)
        f = teleport_fidelity(input_cf_coherent(0.4), res, tp)
        assert abs(f - 0.5) < 1e-12


class TestValidation:
    def test_gain_positive(self):
        with pytest.raises(ValueError):
            TeleportParams(g=0.0)

    def test_eta_range(self):
        with pytest.raises(ValueError):
            TeleportParams(g=1.0, eta=1.5)

    def test_ensemble_kind(self):
        with pytest.raises(ValueError):
            InputEnsemble("thermal", 1.0)

    def test_ensemble_sigma(self):
        with pytest.raises(ValueError):
            InputEnsemble("coherent", 0.0)
