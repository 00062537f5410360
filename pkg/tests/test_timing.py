import math

import numpy as np
import pytest
from scipy import integrate, stats

from coalsisr.model import (
    AlleleConfig,
    ConstantSize,
    ExponentialSizeChange,
    ModelError,
    ScaledParams,
    theta_at,
    theta_now,
)
from coalsisr.timing import (
    HoldingStrategy,
    integrated_hazard,
    invert_rate_integral,
    rate_components,
    rate_integral,
    sample_holding,
    sample_holding_inverse,
    sample_holding_thinning,
)

CONTRACTION = ExponentialSizeChange(ScaledParams(theta=0.4, D=0.25, theta_anc=400.0))
EXPANSION = ExponentialSizeChange(ScaledParams(theta=4.0, D=1.0, theta_anc=0.4))
NEAR_CONSTANT = ExponentialSizeChange(ScaledParams(theta=1.0, D=1.0, theta_anc=1.0 + 1e-9))


def quad_hazard(h, u, delta, demography):
    """Quadrature oracle for the closed form."""
    a, b = rate_components(h, demography)
    th = theta_now(demography)

    def rate(s):
        return a * th / theta_at(demography, u + s) + b

    kink = [] if isinstance(demography, ConstantSize) else [demography.params.D - u]
    kink = [k for k in kink if 0.0 < k < delta]
    val, err = integrate.quad(
        rate, 0.0, delta, points=kink or None, limit=200, epsabs=1e-14, epsrel=1e-12
    )
    assert err < 1e-8 * max(1.0, abs(val))
    return val


class TestIntegratedHazard:
    def test_constant_size_is_rate_times_delta(self):
        h = AlleleConfig({100: 2}, 200)
        assert integrated_hazard(h, 0.3, 0.5, ConstantSize(1.0)) == pytest.approx(4.0)

    def test_hand_derived_value_through_full_ramp(self):
        # a=6, b=0.8; integral of exp(-beta s) over [0, 0.25] = (1-1e-3)/beta
        h = AlleleConfig({100: 2}, 200)
        beta = math.log(1000.0) / 0.25
        expected = 6.0 * (1.0 - 1e-3) / beta + 0.8 * 0.25
        assert integrated_hazard(h, 0.0, 0.25, CONTRACTION) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("demography", [CONTRACTION, EXPANSION, NEAR_CONSTANT])
    def test_matches_quadrature(self, demography):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(1, 80))
            h = AlleleConfig({100: n}, 200)
            u = float(rng.uniform(0.0, 2.0))
            delta = float(rng.uniform(1e-4, 2.0))
            closed = integrated_hazard(h, u, delta, demography)
            assert closed == pytest.approx(quad_hazard(h, u, delta, demography), rel=1e-8)

    def test_additive_in_delta(self):
        h = AlleleConfig({50: 5}, 200)
        whole = integrated_hazard(h, 0.1, 0.4, CONTRACTION)
        split = integrated_hazard(h, 0.1, 0.15, CONTRACTION) + integrated_hazard(
            h, 0.25, 0.25, CONTRACTION
        )
        assert whole == pytest.approx(split, rel=1e-12)

    def test_rejects_negative_delta(self):
        h = AlleleConfig({50: 2}, 200)
        with pytest.raises(ModelError):
            integrated_hazard(h, 0.0, -0.1, CONTRACTION)


class TestInverseSampler:
    def test_constant_size_closed_form(self):
        h = AlleleConfig({100: 2}, 200)
        U = 0.8321
        want = -math.log1p(-U) / 8.0
        assert sample_holding_inverse(h, 0.0, ConstantSize(1.0), U) == pytest.approx(
            want, rel=1e-15
        )

    @pytest.mark.parametrize("demography", [CONTRACTION, EXPANSION])
    def test_solves_hazard_equation_to_tolerance(self, demography):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 60))
            h = AlleleConfig({100: n}, 200)
            u = float(rng.uniform(0.0, 1.5))
            U = float(rng.random())
            delta = sample_holding_inverse(h, u, demography, U)
            assert abs(
                integrated_hazard(h, u, delta, demography) + math.log1p(-U)
            ) <= 1e-12

    def test_deterministic_in_U(self):
        h = AlleleConfig({100: 10}, 200)
        d1 = sample_holding_inverse(h, 0.05, CONTRACTION, 0.4217)
        d2 = sample_holding_inverse(h, 0.05, CONTRACTION, 0.4217)
        assert d1 == d2

    def test_zero_uniform_gives_zero_delta(self):
        h = AlleleConfig({100: 2}, 200)
        assert sample_holding_inverse(h, 0.0, CONTRACTION, 0.0) == 0.0
        with pytest.raises(ModelError):
            sample_holding_inverse(h, 0.0, CONTRACTION, 1.0)

    def test_component_form_supports_pure_coalescence(self):
        # b = 0 is used by the data simulator (mutations handled separately)
        target = 0.7
        delta = invert_rate_integral(6.0, 0.0, 0.0, target, CONTRACTION)
        assert rate_integral(6.0, 0.0, 0.0, delta, CONTRACTION) == pytest.approx(
            target, abs=1e-12
        )


class TestThinningSampler:
    @pytest.mark.parametrize(
        "demography,n", [(CONTRACTION, 2), (CONTRACTION, 50), (EXPANSION, 3)]
    )
    def test_agrees_with_inverse_sampler(self, demography, n):
        h = AlleleConfig({100: n}, 200)
        rng = np.random.default_rng(42)
        thin = np.array(
            [sample_holding_thinning(h, 0.0, demography, rng) for _ in range(3000)]
        )
        inv = np.array(
            [sample_holding_inverse(h, 0.0, demography, rng.random()) for _ in range(3000)]
        )
        assert stats.ks_2samp(thin, inv).pvalue > 0.01

    def test_constant_size_matches_exponential_law(self):
        h = AlleleConfig({100: 2}, 200)
        rng = np.random.default_rng(9)
        draws = np.array(
            [sample_holding_thinning(h, 0.0, ConstantSize(1.0), rng) for _ in range(4000)]
        )
        assert stats.kstest(draws, "expon", args=(0.0, 1.0 / 8.0)).pvalue > 0.01


class TestDispatch:
    def test_strategies_share_marginal_law(self):
        h = AlleleConfig({100: 4}, 200)
        rng = np.random.default_rng(2)
        a = np.array(
            [sample_holding(h, 0.0, CONTRACTION, rng, HoldingStrategy.INVERSE) for _ in range(2000)]
        )
        b = np.array(
            [sample_holding(h, 0.0, CONTRACTION, rng, HoldingStrategy.THINNING) for _ in range(2000)]
        )
        assert stats.ks_2samp(a, b).pvalue > 0.01
