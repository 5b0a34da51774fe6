import math

import numpy as np
import pytest

from escortdyn import (
    Constant,
    Custom,
    DomainError,
    Exponential,
    Identity,
    Power,
    RangeError,
    Scaled,
    SimplexPoint,
    VectorValued,
    escort_distribution,
    escort_exp,
    escort_expectation,
    escort_log,
    escort_variance,
    partition_function,
)

SCALAR_FAMILIES = [
    Identity(),
    Scaled(2.0),
    Power(0.5),
    Power(2.0),
    Power(3.0),
    Constant(1.0),
    Constant(0.5),
    Exponential(),
]


def custom_quadratic():
    return Custom(lambda v: v + v * v, name="v+v^2")


X = SimplexPoint([0.5, 0.25, 0.25])


class TestPartitionFunction:
    def test_identity_sums_to_one(self):
        assert partition_function(Identity(), X) == pytest.approx(1.0, abs=1e-15)

    def test_constant_counts_types(self):
        assert partition_function(Constant(1.0), X) == 3.0

    def test_power_two_hand_sum(self):
        # 1/4 + 1/16 + 1/16
        assert partition_function(Power(2.0), X) == pytest.approx(0.375, abs=1e-15)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_strictly_positive(self, phi):
        assert partition_function(phi, X) > 0.0

    def test_negative_power_rejects_boundary(self):
        with pytest.raises(DomainError):
            partition_function(Power(-1.0), SimplexPoint([0.5, 0.5, 0.0]))


class TestEscortDistribution:
    def test_identity_is_identity_map(self):
        out = escort_distribution(Identity(), X)
        np.testing.assert_array_equal(out.coords, X.coords)

    def test_constant_maps_to_barycenter(self):
        out = escort_distribution(Constant(1.0), X)
        np.testing.assert_allclose(out.coords, [1 / 3, 1 / 3, 1 / 3], rtol=0, atol=1e-15)

    def test_power_two_hand_value(self):
        out = escort_distribution(Power(2.0), X)
        np.testing.assert_allclose(out.coords, [2 / 3, 1 / 6, 1 / 6], rtol=0, atol=1e-15)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_output_is_simplex_point(self, phi):
        out = escort_distribution(phi, X)
        assert isinstance(out, SimplexPoint)
        assert abs(out.coords.sum() - 1.0) <= 1e-12


class TestEscortExpectation:
    def test_identity_is_dot_product(self):
        f = np.array([1.0, -2.0, 0.5])
        assert escort_expectation(Identity(), X, f) == pytest.approx(float(X.coords @ f), abs=1e-15)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_constant_vector_gives_the_constant(self, phi):
        f = np.full(3, 2.5)
        assert escort_expectation(phi, X, f) == pytest.approx(2.5, abs=1e-12)

    def test_constant_escort_averages(self):
        f = np.array([0.0, 1.0, 2.0])
        assert escort_expectation(Constant(1.0), X, f) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_within_bounds(self, phi):
        rng = np.random.default_rng(3)
        for _ in range(20):
            f = rng.normal(size=3)
            m = escort_expectation(phi, X, f)
            assert f.min() - 1e-12 <= m <= f.max() + 1e-12

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_affine_equivariance(self, phi):
        rng = np.random.default_rng(4)
        f = rng.normal(size=3)
        base = escort_expectation(phi, X, f)
        for c in (-3.0, 0.1, 7.5):
            assert escort_expectation(phi, X, f + c) == pytest.approx(base + c, abs=1e-12)

    def test_rejects_wrong_length(self):
        with pytest.raises(DomainError):
            escort_expectation(Identity(), X, [1.0, 2.0])


class TestEscortVariance:
    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_constant_vector_zero(self, phi):
        assert escort_variance(phi, X, np.full(3, 4.0)) == pytest.approx(0.0, abs=1e-15)

    def test_identity_bernoulli(self):
        v = escort_variance(Identity(), SimplexPoint([0.5, 0.5]), [0.0, 1.0])
        assert v == pytest.approx(0.25, abs=1e-15)

    def test_constant_population_variance(self):
        v = escort_variance(Constant(1.0), X, [0.0, 1.0, 2.0])
        assert v == pytest.approx(2 / 3, abs=1e-15)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_nonnegative(self, phi):
        rng = np.random.default_rng(5)
        for _ in range(20):
            assert escort_variance(phi, X, rng.normal(size=3)) >= 0.0


class TestEscortLog:
    @pytest.mark.parametrize("phi", SCALAR_FAMILIES + [custom_quadratic()])
    def test_zero_at_one(self, phi):
        assert escort_log(phi, 1.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES + [custom_quadratic()])
    def test_sign_and_monotonicity(self, phi):
        us = [0.1, 0.4, 0.9, 1.0, 1.5, 3.0]
        vals = [escort_log(phi, u) for u in us]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert vals[0] < 0 and vals[2] < 0 and abs(vals[3]) < 1e-12 and vals[4] > 0

    def test_power_two_closed_form(self):
        # 1 - 1/u at u = 2
        assert escort_log(Power(2.0), 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_identity_is_ln(self):
        for u in (0.2, 1.7, 4.1):
            assert escort_log(Identity(), u) == pytest.approx(math.log(u), abs=1e-15)

    def test_scaled_divides_ln(self):
        for u in (0.2, 1.7, 4.1):
            assert escort_log(Scaled(2.0), u) == pytest.approx(0.5 * math.log(u), abs=1e-15)

    def test_constant_form(self):
        assert escort_log(Constant(0.5), 2.0) == pytest.approx(2.0, abs=1e-15)

    def test_exponential_form(self):
        for u in (0.3, 2.5):
            expected = math.exp(-1.0) - math.exp(-u)
            assert escort_log(Exponential(), u) == pytest.approx(expected, abs=1e-15)

    def test_custom_linear_matches_ln(self):
        phi = Custom(lambda v: v, name="v")
        assert escort_log(phi, math.e) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("q", [0.0, 0.5, 2.0, 3.0])
    def test_closed_form_matches_quadrature(self, q):
        phi = Power(q)
        rng = np.random.default_rng(17)
        for u in rng.uniform(0.05, 5.0, 100):
            closed = escort_log(phi, float(u))
            quad = escort_log(phi, float(u), method="quadrature")
            assert abs(closed - quad) <= 1e-9

    def test_q_near_one_continuity(self):
        eps = 1e-6
        for u in np.linspace(0.1, 10.0, 25):
            assert abs(escort_log(Power(1 + eps), float(u)) - math.log(u)) <= 1e-5
            assert abs(escort_log(Power(1 - eps), float(u)) - math.log(u)) <= 1e-5

    def test_q_degenerate_dispatch(self):
        # inside the 1e-9 window the identity form is used exactly
        assert escort_log(Power(1 + 1e-12), 2.0) == math.log(2.0)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_rejects_nonpositive(self, phi):
        with pytest.raises(DomainError):
            escort_log(phi, 0.0)
        with pytest.raises(DomainError):
            escort_log(phi, -1.0)


class TestEscortExp:
    @pytest.mark.parametrize("phi", SCALAR_FAMILIES + [custom_quadratic()])
    def test_one_at_zero(self, phi):
        assert escort_exp(phi, 0.0) == pytest.approx(1.0, abs=1e-10)

    def test_identity_gives_e(self):
        assert escort_exp(Identity(), 1.0) == pytest.approx(math.e, abs=1e-15)

    def test_power_two_inverts(self):
        assert escort_exp(Power(2.0), 0.5) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES + [custom_quadratic()])
    def test_roundtrip(self, phi):
        for u in np.linspace(0.05, 5.0, 34):
            back = escort_exp(phi, escort_log(phi, float(u)))
            assert abs(back - u) <= 1e-8

    @pytest.mark.parametrize(
        "phi,w",
        [
            (Power(2.0), 1.0),
            (Power(2.0), 1.5),
            (Power(0.5), -2.0),
            (Constant(1.0), -1.0),
            (Exponential(), math.exp(-1.0)),
            (Exponential(), 5.0),
        ],
    )
    def test_range_error_outside_attainable_values(self, phi, w):
        with pytest.raises(RangeError):
            escort_exp(phi, w)

    def test_custom_unattainable_target(self):
        # phi = e^v: log_phi is bounded above by 1/e, quadrature path included
        phi = Custom(lambda v: math.exp(v), name="e^v")
        with pytest.raises(RangeError):
            escort_exp(phi, 0.95)


class TestConstruction:
    def test_scaled_requires_positive_beta(self):
        with pytest.raises(DomainError):
            Scaled(0.0)
        with pytest.raises(DomainError):
            Scaled(-1.0)

    def test_constant_requires_positive_c(self):
        with pytest.raises(DomainError):
            Constant(0.0)

    def test_custom_positivity_screen(self):
        with pytest.raises(DomainError):
            Custom(lambda v: v - 0.5, name="bad")

    @pytest.mark.parametrize("phi", SCALAR_FAMILIES)
    def test_positive_on_unit_interval(self, phi):
        for u in np.linspace(1e-3, 1 - 1e-3, 1000):
            assert phi(float(u)) > 0.0


class TestVectorValued:
    def make(self):
        return VectorValued(lambda x: np.array([1.0, 2.0, 3.0]) * x, name="pressures")

    def test_componentwise_weights(self):
        psi = self.make()
        np.testing.assert_allclose(psi.weights(X.coords), [0.5, 0.5, 0.75])

    def test_statistics_use_vector_weights(self):
        psi = self.make()
        f = np.array([1.0, 0.0, -1.0])
        w = np.array([0.5, 0.5, 0.75])
        assert partition_function(psi, X) == pytest.approx(w.sum())
        assert escort_expectation(psi, X, f) == pytest.approx(float(w @ f / w.sum()))

    def test_log_and_exp_rejected(self):
        psi = self.make()
        with pytest.raises(DomainError):
            escort_log(psi, 0.5)
        with pytest.raises(DomainError):
            escort_exp(psi, 0.5)

    def test_positivity_enforced(self):
        psi = VectorValued(lambda x: x - 0.3, name="signed")
        with pytest.raises(DomainError):
            psi.weights(X.coords)


class TestSimplexPoint:
    def test_records_interior(self):
        assert SimplexPoint([0.5, 0.5]).interior
        assert not SimplexPoint([1.0, 0.0]).interior

    def test_rejects_bad_sum(self):
        with pytest.raises(DomainError):
            SimplexPoint([0.5, 0.6])

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            SimplexPoint([1.1, -0.1])

    def test_rejects_scalar_and_short(self):
        with pytest.raises(DomainError):
            SimplexPoint([1.0])

    def test_coords_frozen(self):
        p = SimplexPoint([0.5, 0.5])
        with pytest.raises(ValueError):
            p.coords[0] = 0.9
