import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from tasalamouti import (
    ClosedFormContext,
    CoefficientTable,
    PrecisionExhaustedError,
    Scheme,
    SystemConfig,
    closed_form_outage,
    db_to_linear,
    eps_outage_capacity,
    estimate_outage,
    expansion_coeffs,
    f1_term,
    f2_term,
    outage_breakdown,
    outage_quadrature,
    prob_nonzero_secrecy,
    psi1,
    psi2,
    psi3,
    psi4,
    w_integral,
)
from tasalamouti.closedform import MAX_ANTENNAS, _rate_underflows

# Frozen values from an independent adaptive-quadrature evaluator of
# the outage double integral (nested scipy quad, abs tol 1e-12).
POUT_ORACLE = [
    (2, 1, 1, 10.0, 3.0, 1.0, 0.376357434178871),
    (3, 3, 2, 31.6227766017, 3.16227766017, 1.0, 8.188829721104832e-05),
    (4, 3, 2, 10.0, 3.16227766017, 1.0, 0.016976078234043533),
    (4, 3, 3, 3.16227766017, 1.0, 2.0, 0.6210902756342483),
    (3, 3, 1, 10.0, 1.0, 0.0, 2.5737230210240305e-08),
    (4, 3, 2, 1.0, 3.16227766017, 0.0, 0.7296642827787825),
    (2, 2, 2, 3.16227766017, 3.16227766017, 0.0, 0.49999999999998995),
    (5, 2, 1, 31.6227766017, 1.0, 1.5, 5.223017041492143e-08),
]

# Probability of non-zero secrecy capacity, same oracle at zero rate.
PNZ_ORACLE = [
    (3, 2, 2, 10.0, 3.16227766017, 0.983089731192939),
    (4, 3, 2, 0.1, 1.0, 0.013373718317922889),
]

# Outage capacity frozen from bisection over the oracle integral.
COUT_ORACLE = [
    (4, 3, 2, 100.0, 1.0, 0.1, 6.26501756936517),
    (3, 2, 1, 31.6227766017, 3.16227766017, 0.05, 2.7279770254887588),
]


class TestExpansionCoeffs:
    def test_reference_table(self):
        table = expansion_coeffs(3, 2)
        assert list(table.as_array()) == pytest.approx([1.0, 2.0, 2.0, 1.0, 0.25])

    def test_zeroth_power(self):
        assert list(expansion_coeffs(3, 0).as_array()) == [1.0]

    def test_first_power_is_reciprocal_factorials(self):
        table = expansion_coeffs(4, 1)
        assert list(table.as_array()) == pytest.approx([1.0, 1.0, 0.5, 1.0 / 6.0])

    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=8))
    def test_length_and_leading_term(self, n_b, power):
        table = expansion_coeffs(n_b, power)
        assert len(table) == power * (n_b - 1) + 1
        assert table[0] == 1.0
        assert all(table[t] >= 0.0 for t in range(len(table)))

    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=8))
    def test_evaluation_at_one(self, n_b, power):
        # Summing the coefficients evaluates the power of the truncated
        # exponential series at z = 1.
        table = expansion_coeffs(n_b, power)
        base = sum(1.0 / math.factorial(k) for k in range(n_b))
        assert sum(table.as_array()) == pytest.approx(base**power, rel=1e-12)

    def test_table_invariants_enforced(self):
        with pytest.raises(ValueError):
            CoefficientTable(n_b=3, power=2, values=(1.0, 2.0))
        with pytest.raises(ValueError):
            CoefficientTable(n_b=2, power=1, values=(2.0, 1.0))


class TestWIntegral:
    def test_reference_values(self):
        assert w_integral(0, 2.0) == 0.5
        assert w_integral(-1, 5.0) == 0.0
        assert w_integral(3, 0.5) == pytest.approx(96.0, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            w_integral(-2, 1.0)
        with pytest.raises(ValueError):
            w_integral(0, 0.0)

    def test_matches_defining_integral(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            r = int(rng.integers(0, 12))
            u = float(rng.uniform(0.05, 12.0))
            ref, _ = integrate.quad(
                lambda x: x**r * math.exp(-u * x), 0, np.inf, limit=200
            )
            assert w_integral(r, u) == pytest.approx(ref, rel=1e-10)

    def test_large_order_survives(self):
        # Log-domain evaluation keeps huge factorials finite.
        value = w_integral(150, 3.0)
        assert math.isfinite(value) and value > 0.0


class TestFTerms:
    def test_lambda_minus_one_leaves_only_w_term(self):
        for phi in (0.5, 2.0, 7.0):
            assert f1_term(2, 0, 2, -1, phi) == pytest.approx(-1.0 / phi)

    def test_reference_value(self):
        assert f1_term(2, 0, 0, 1, 2.0) == pytest.approx(0.25)

    def test_matches_defining_integrals(self):
        rng = np.random.default_rng(22)
        for _ in range(25):
            n_e = int(rng.integers(1, 4))
            m = int(rng.integers(0, 2 * n_e))
            n = int(rng.integers(0, 3))
            lam = int(rng.integers(0, 6))
            phi = float(rng.uniform(0.2, 6.0))
            c1 = 2 * n_e - m - n - 2
            ref1, _ = integrate.quad(
                lambda x: (c1 - x) * x**lam * math.exp(-phi * x), 0, np.inf, limit=200
            )
            got1 = f1_term(n_e, m, n, lam, phi)
            assert got1 == pytest.approx(ref1, rel=1e-10, abs=1e-13)
            c2 = 2 * n_e - m - 2
            ref2, _ = integrate.quad(
                lambda x: (c2 - x) * x**lam * math.exp(-phi * x), 0, np.inf, limit=200
            )
            assert f2_term(n_e, m, lam, phi) == pytest.approx(
                ref2, rel=1e-10, abs=1e-13
            )

    def test_lambda_domain(self):
        with pytest.raises(ValueError):
            f1_term(2, 0, 0, -2, 1.0)


class TestContext:
    def test_invariants(self):
        cfg = SystemConfig(4, 3, 2, db_to_linear(10.0), db_to_linear(5.0))
        ctx = ClosedFormContext.create(cfg, rate=1.0)
        assert ctx.rho == pytest.approx(2.0 * db_to_linear(5.0) / db_to_linear(10.0))
        assert ctx.shift == pytest.approx(2.0 * 1.0 / db_to_linear(10.0))
        assert ctx.phi_two > 1.0
        for i in range(cfg.n_alice - 1):
            assert ctx.phi_one(i) > 1.0

    def test_lambda_lower_bound(self):
        # Over the index ranges the sums actually visit: m is bounded by
        # the eavesdropper diversity and n by the bracket order.
        cfg = SystemConfig(3, 2, 2, 5.0, 1.0)
        ctx = ClosedFormContext.create(cfg, rate=0.5)
        for m in range(cfg.n_eve):
            for n in range(-1, 2 * cfg.n_eve - m - 1):
                for u in range(4):
                    assert ctx.lam(u, m, n) >= -1


class TestPsiComponents:
    def test_two_antenna_identities(self):
        # With two transmit antennas the selection-tail terms vanish.
        for gb_db, ge_db, rate in [(10.0, 5.0, 1.0), (0.0, 0.0, 0.0), (20.0, 5.0, 2.0)]:
            cfg = SystemConfig(2, 3, 2, db_to_linear(gb_db), db_to_linear(ge_db))
            assert psi3(cfg, rate) == 0.0
            assert psi4(cfg, rate) == 0.0
            assert psi1(cfg, rate) != 0.0

    def test_breakdown_recomposition(self):
        cfg = SystemConfig(3, 2, 2, 10.0, 2.0)
        br = outage_breakdown(cfg, 1.0)
        p = (
            psi1(cfg, 1.0) - psi2(cfg, 1.0) + psi3(cfg, 1.0) - psi4(cfg, 1.0)
        )
        assert br.raw_value == pytest.approx(1.0 - br.prefactor * p, rel=1e-12)
        assert br.value == min(max(br.raw_value, 0.0), 1.0)
        assert br.psi == (psi1(cfg, 1.0), psi2(cfg, 1.0), psi3(cfg, 1.0), psi4(cfg, 1.0))

    def test_mc_agreement_at_reference_point(self):
        # 1e7 trials against the analytic value, binomial stderr under
        # the analytic null.
        cfg = SystemConfig(3, 3, 2, db_to_linear(15.0), db_to_linear(5.0))
        cf = closed_form_outage(cfg, 1.0)
        n = 10_000_000
        mc = estimate_outage(cfg, Scheme.TAS_ALAMOUTI, 1.0, n, seed=0)
        se = math.sqrt(cf * (1.0 - cf) / n)
        assert abs(mc.estimate - cf) <= 4.0 * se


class TestClosedFormOutage:
    @pytest.mark.parametrize("n_a,n_b,n_e,gb,ge,rate,expected", POUT_ORACLE)
    def test_frozen_oracle_values(self, n_a, n_b, n_e, gb, ge, rate, expected):
        cfg = SystemConfig(n_a, n_b, n_e, gb, ge)
        assert closed_form_outage(cfg, rate) == pytest.approx(expected, abs=5e-9)

    def test_matches_quadrature_at_reference_point(self):
        cfg = SystemConfig(4, 3, 2, db_to_linear(10.0), db_to_linear(5.0))
        cf = closed_form_outage(cfg, 1.0)
        quad = outage_quadrature(cfg, 1.0)
        assert abs(cf - quad) <= 1e-6

    def test_probability_range(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            cfg = SystemConfig(
                int(rng.integers(2, 7)),
                int(rng.integers(1, 4)),
                int(rng.integers(1, 4)),
                float(rng.uniform(0.1, 200.0)),
                float(rng.uniform(0.1, 20.0)),
            )
            value = closed_form_outage(cfg, float(rng.uniform(0.0, 3.0)))
            assert 0.0 <= value <= 1.0

    def test_monotone_in_main_snr(self):
        values = [
            closed_form_outage(
                SystemConfig(3, 3, 2, db_to_linear(g), db_to_linear(5.0)), 1.0
            )
            for g in np.linspace(0.0, 20.0, 21)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_monotone_in_rate(self):
        cfg = SystemConfig(3, 2, 2, 10.0, 2.0)
        values = [closed_form_outage(cfg, r) for r in np.linspace(0.0, 4.0, 17)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_monotone_in_antenna_counts(self):
        gb, ge = db_to_linear(10.0), db_to_linear(5.0)
        by_na = [
            closed_form_outage(SystemConfig(n_a, 3, 2, gb, ge), 1.0)
            for n_a in range(2, 8)
        ]
        assert all(b < a for a, b in zip(by_na, by_na[1:]))
        by_nb = [
            closed_form_outage(SystemConfig(4, n_b, 2, gb, ge), 1.0)
            for n_b in range(1, 4)
        ]
        assert all(b < a for a, b in zip(by_nb, by_nb[1:]))
        by_ne = [
            closed_form_outage(SystemConfig(4, 3, n_e, gb, ge), 1.0)
            for n_e in range(1, 4)
        ]
        assert all(b > a for a, b in zip(by_ne, by_ne[1:]))

    def test_rate_underflow_shortcut(self):
        cfg = SystemConfig(3, 2, 1, 2.0, 1.0)
        assert _rate_underflows(cfg, 1500.0)
        assert closed_form_outage(cfg, 1500.0) == 1.0
        assert psi1(cfg, 1500.0) == 0.0

    def test_envelope_guard(self):
        with pytest.raises(PrecisionExhaustedError):
            closed_form_outage(SystemConfig(MAX_ANTENNAS + 1, 3, 2, 10.0, 1.0), 1.0)
        with pytest.raises(PrecisionExhaustedError):
            closed_form_outage(SystemConfig(4, MAX_ANTENNAS + 1, 2, 10.0, 1.0), 1.0)
        # The boundary itself stays inside the envelope.
        value = closed_form_outage(
            SystemConfig(MAX_ANTENNAS, 3, 3, 100.0, 3.16227766017), 2.0
        )
        assert 0.0 <= value <= 1.0

    def test_rate_validation(self):
        cfg = SystemConfig(2, 1, 1, 1.0, 1.0)
        with pytest.raises(ValueError):
            closed_form_outage(cfg, -0.5)
        with pytest.raises(ValueError):
            closed_form_outage(cfg, math.nan)


class TestNonzeroSecrecy:
    @pytest.mark.parametrize("n_a,n_b,n_e,gb,ge,expected", PNZ_ORACLE)
    def test_frozen_oracle_values(self, n_a, n_b, n_e, gb, ge, expected):
        cfg = SystemConfig(n_a, n_b, n_e, gb, ge)
        assert prob_nonzero_secrecy(cfg) == pytest.approx(expected, abs=5e-9)

    def test_duality_with_zero_rate_outage(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            cfg = SystemConfig(
                int(rng.integers(2, 7)),
                int(rng.integers(1, 4)),
                int(rng.integers(1, 4)),
                float(rng.uniform(0.2, 100.0)),
                float(rng.uniform(0.2, 10.0)),
            )
            assert prob_nonzero_secrecy(cfg) == pytest.approx(
                1.0 - closed_form_outage(cfg, 0.0), abs=1e-12
            )

    def test_large_advantage_approaches_one(self):
        # Main link 40 dB above the eavesdropper.
        cfg = SystemConfig(3, 2, 2, db_to_linear(40.0), db_to_linear(0.0))
        assert prob_nonzero_secrecy(cfg) > 0.999


class TestEpsOutageCapacity:
    @pytest.mark.parametrize("n_a,n_b,n_e,gb,ge,eps,expected", COUT_ORACLE)
    def test_frozen_oracle_values(self, n_a, n_b, n_e, gb, ge, eps, expected):
        cfg = SystemConfig(n_a, n_b, n_e, gb, ge)
        assert eps_outage_capacity(cfg, eps) == pytest.approx(expected, abs=2e-6)

    def test_bisection_contract(self):
        rng = np.random.default_rng(25)
        for _ in range(10):
            cfg = SystemConfig(
                int(rng.integers(2, 6)),
                int(rng.integers(1, 4)),
                int(rng.integers(1, 4)),
                float(rng.uniform(1.0, 300.0)),
                float(rng.uniform(0.2, 10.0)),
            )
            eps = float(rng.uniform(0.005, 0.5))
            cap = eps_outage_capacity(cfg, eps)
            if cap == 0.0:
                # The budget is unreachable at any positive rate.
                assert closed_form_outage(cfg, 1e-5) > eps
            else:
                assert closed_form_outage(cfg, cap) <= eps
                assert closed_form_outage(cfg, cap + 1e-5) > eps

    def test_zero_when_budget_unreachable(self):
        cfg = SystemConfig(2, 1, 2, 0.5, 5.0)
        floor = closed_form_outage(cfg, 0.0)
        assert eps_outage_capacity(cfg, floor / 2.0) == 0.0

    def test_epsilon_domain(self):
        cfg = SystemConfig(2, 1, 1, 1.0, 1.0)
        for eps in (0.0, 1.0, -0.1, 1.5, math.nan):
            with pytest.raises(ValueError):
                eps_outage_capacity(cfg, eps)

    def test_monotone_in_epsilon(self):
        cfg = SystemConfig(4, 2, 2, 50.0, 1.0)
        caps = [eps_outage_capacity(cfg, e) for e in (0.01, 0.05, 0.1, 0.3)]
        assert all(b > a for a, b in zip(caps, caps[1:]))


@pytest.fixture(scope="module")
def numba_available():
    from tasalamouti._kernels import HAS_NUMBA

    if not HAS_NUMBA:
        pytest.skip("numba backend unavailable")


class TestBackendAgreement:
    CASES = [
        (2, 1, 1, 10.0, 3.0, 1.0),
        (4, 3, 2, 10.0, 3.16227766017, 1.0),
        (6, 3, 3, 100.0, 3.16227766017, 2.0),
        (8, 3, 3, 100.0, 3.16227766017, 2.0),
    ]

    def test_psi_components_cross_backend(self, numba_available):
        from tasalamouti._kernels import _psi_terms_impl, _psi_terms_numba
        from tasalamouti.closedform import _a_table

        for n_a, n_b, n_e, gb, ge, rate in self.CASES:
            table = _a_table(n_a, n_b)
            plain = _psi_terms_impl(n_a, n_b, n_e, gb, ge, rate, table)
            jitted = _psi_terms_numba(n_a, n_b, n_e, gb, ge, rate, table)
            for a, b in zip(plain[:4], jitted[:4]):
                scale = max(abs(a), abs(b), 1e-300)
                assert abs(a - b) / scale <= 1e-12

    def test_outage_cross_backend(self, numba_available, monkeypatch):
        from tasalamouti.closedform import _psi_cached

        for n_a, n_b, n_e, gb, ge, rate in self.CASES:
            cfg = SystemConfig(n_a, n_b, n_e, gb, ge)
            values = {}
            for backend in ("numpy", "numba"):
                monkeypatch.setenv("TASALAMOUTI_BACKEND", backend)
                _psi_cached.cache_clear()
                values[backend] = closed_form_outage(cfg, rate)
            _psi_cached.cache_clear()
            assert abs(values["numpy"] - values["numba"]) <= 1e-9

    def test_same_backend_is_bit_deterministic(self):
        cfg = SystemConfig(5, 3, 2, 31.6227766017, 3.16227766017)
        from tasalamouti.closedform import _psi_cached

        first = closed_form_outage(cfg, 1.3)
        _psi_cached.cache_clear()
        second = closed_form_outage(cfg, 1.3)
        assert first == second
