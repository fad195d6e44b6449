"""Fundamental kernels: symbols, radial profiles, propagators and norms."""
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfcx

from fracsim import (
    DomainError,
    Field,
    GridSpec,
    KernelSymbol,
    NumericalError,
    UnsupportedRangeError,
    apply_propagator,
    gaussian_field,
    lq_norm,
    ml_e_neg,
    profile,
    profile_lq_norm,
    q_critical,
    restricted_lq_norm,
    symbol_Y,
    symbol_Z,
)

GRID = GridSpec(dim=1, points=1024, half_width=50.0)


def exact_delta(grid):
    values = np.zeros(grid.shape)
    values[grid.points // 2] = 1.0 / grid.cell_volume  # unit-mass spike at x=0
    return Field(grid, values)


class TestSymbols:
    def test_z_zero_mode(self):
        assert symbol_Z(3.7, 0.0, 0.5, 0.4) == pytest.approx(1.0, abs=1e-14)

    def test_z_heat_limit(self):
        xi_sq = np.array([0.0, 0.5, 2.0])
        assert np.allclose(symbol_Z(1.3, xi_sq, 1.0, 1.0), np.exp(-xi_sq * 1.3))

    def test_z_golden_value(self):
        # |xi| = 1, t = 1: E_{1/2,1}(-1) = erfcx(1), independent oracle.
        assert symbol_Z(1.0, 1.0, 0.5, 0.4) == pytest.approx(
            float(erfcx(1.0)), abs=1e-10
        )

    def test_y_equals_z_at_alpha_one(self):
        xi_sq = np.linspace(0.0, 5.0, 11)
        assert np.allclose(
            symbol_Y(2.0, xi_sq, 1.0, 0.6), symbol_Z(2.0, xi_sq, 1.0, 0.6)
        )

    def test_y_zero_mode(self):
        assert symbol_Y(4.0, 0.0, 0.5, 0.4) == pytest.approx(
            4.0**-0.5 / math.gamma(0.5), rel=1e-12
        )
        assert symbol_Y(4.0, 0.0, 0.5, 0.4) == pytest.approx(0.2820947918, abs=1e-9)

    def test_y_integral_identity(self):
        # int_0^h Y-symbol dtau = h^a E_{a,a+1}(-lam h^a): quadrature oracle.
        a, s, lam, h = 0.5, 0.4, 2.0, 1.5
        val, _ = quad(
            lambda tau: symbol_Y(tau, lam ** (1.0 / s), a, s), 0.0, h, limit=200
        )
        exact = h**a * float(ml_e_neg(a, a + 1.0, lam * h**a))
        assert val == pytest.approx(exact, rel=1e-8)

    def test_domain_and_wrapper(self):
        with pytest.raises(DomainError):
            symbol_Z(0.0, 1.0, 0.5, 0.4)
        with pytest.raises(DomainError):
            symbol_Y(-1.0, 1.0, 0.5, 0.4)
        with pytest.raises(DomainError):
            KernelSymbol("Q", 0.5, 0.4)
        sym = KernelSymbol("Z", 0.5, 0.4)
        assert sym(1.0, 1.0) == pytest.approx(symbol_Z(1.0, 1.0, 0.5, 0.4))


class TestProfiles:
    def test_gaussian_heat_kernel(self):
        radii = np.concatenate(([0.0], np.geomspace(1e-2, 30.0, 40)))
        prof = profile("F", 1.0, 1.0, 1, radii)
        exact = (4.0 * np.pi) ** -0.5 * np.exp(-prof.radii**2 / 4.0)
        assert np.max(np.abs(prof.values - exact)) <= 1e-10
        assert prof.values[0] == pytest.approx(0.2820947918, abs=1e-9)

    @pytest.mark.parametrize(
        "dim,exact_fn",
        [
            (1, lambda r: 1.0 / (np.pi * (1.0 + r**2))),
            (2, lambda r: (1.0 + r**2) ** -1.5 / (2.0 * np.pi)),
            (3, lambda r: 1.0 / (np.pi**2 * (1.0 + r**2) ** 2)),
        ],
    )
    def test_cauchy_kernels(self, dim, exact_fn):
        # alpha = 1, s = 1/2 at t = 1: the classical Poisson kernels.
        radii = np.geomspace(1e-2, 100.0, 24)
        prof = profile("F", 1.0, 0.5, dim, radii)
        rel = np.abs(prof.values - exact_fn(prof.radii)) / exact_fn(prof.radii)
        assert np.max(rel) <= 1e-8

    def test_monotone_positive(self):
        radii = np.geomspace(1e-2, 100.0, 30)
        prof = profile("F", 0.5, 0.4, 1, radii)
        assert np.all(prof.values > 0.0)
        assert np.all(np.diff(prof.values) <= 0.0)

    def test_unit_mass(self):
        radii = np.geomspace(1e-3, 1e3, 120)
        prof = profile("F", 0.5, 0.4, 1, radii)
        assert profile_lq_norm(prof, 1.0) == pytest.approx(1.0, abs=0.02)

    def test_duhamel_profile_mass(self):
        # ||G||_{L^1} = 1/Gamma(alpha) (the Y symbol at xi = 0 is
        # t^{alpha-1}/Gamma(alpha); the profile is taken at t = 1).
        radii = np.geomspace(1e-3, 1e3, 120)
        prof = profile("G", 0.5, 0.4, 1, radii)
        assert profile_lq_norm(prof, 1.0) == pytest.approx(
            1.0 / math.gamma(0.5), rel=0.02
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            profile("X", 0.5, 0.4, 1, np.array([1.0, 2.0]))
        with pytest.raises(DomainError):
            profile("F", 0.5, 0.4, 1, np.array([2.0, 1.0]))


class TestProfileNorms:
    def test_q_critical(self):
        assert q_critical(1, 0.4) == pytest.approx(5.0, rel=1e-12)
        assert q_critical(1, 0.5) == np.inf
        assert q_critical(3, 0.7) == pytest.approx(3.0 / 1.6, rel=1e-12)

    def test_guard_above_critical(self):
        radii = np.geomspace(1e-3, 1e3, 60)
        prof = profile("F", 0.5, 0.4, 1, radii)
        with pytest.raises(UnsupportedRangeError):
            profile_lq_norm(prof, 6.0)
        # Restricted away from the origin the norm is finite again.
        assert profile_lq_norm(prof, 6.0, r_min=1.0) > 0.0

    def test_cauchy_l2_closed_form(self):
        # ||(pi (1+r^2))^{-1}||_{L^2(R)} = 1/sqrt(2 pi).
        radii = np.geomspace(1e-2, 100.0, 40)
        prof = profile("F", 1.0, 0.5, 1, radii)
        assert profile_lq_norm(prof, 2.0) == pytest.approx(
            1.0 / math.sqrt(2.0 * math.pi), rel=0.02
        )

    def test_restricted_field_norm(self):
        f = gaussian_field(GRID, 1.0, 1.0)
        full = lq_norm(f, 2.0)
        assert restricted_lq_norm(f, 2.0, 0.0) <= full
        # nested exteriors shrink the norm; far exterior is empty
        assert restricted_lq_norm(f, 2.0, 1.0) < restricted_lq_norm(f, 2.0, 0.5)
        assert restricted_lq_norm(f, 2.0, 40.0) <= 1e-100


class TestPropagator:
    def test_mass_conservation_constant(self):
        f = Field(GRID, np.full(GRID.shape, 3.0))
        out = apply_propagator("Z", 2.0, f, 0.5, 0.4)
        assert np.max(np.abs(out.values - 3.0)) <= 1e-12

    def test_heat_gaussian_spread(self):
        # alpha = s = 1: Gaussian with squared width w^2 -> w^2 + 4t.
        x = GRID.axis()
        w0, t = 2.0, 1.5
        out = apply_propagator("Z", t, gaussian_field(GRID, 1.0, w0), 1.0, 1.0)
        wt2 = w0**2 + 4.0 * t
        exact = w0 / math.sqrt(wt2) * np.exp(-(x**2) / wt2)
        assert np.max(np.abs(out.values - exact)) <= 1e-12

    def test_l2_contraction(self):
        rng = np.random.default_rng(21)
        f = Field(GRID, rng.standard_normal(GRID.shape))
        out = apply_propagator("Z", 1.0, f, 0.5, 0.4)
        assert lq_norm(out, 2.0) <= lq_norm(f, 2.0)

    def test_grid_mass_unit(self):
        d = exact_delta(GRID)
        out = apply_propagator("Z", 1.0, d, 0.5, 0.4)
        assert lq_norm(out, 1.0) == pytest.approx(1.0, abs=1e-4)

    def test_self_similarity(self):
        # t^{Na/2s} Z(t, r t^{a/2s}) is independent of t.
        a, s = 0.5, 0.4
        grid = GridSpec(dim=1, points=8192, half_width=200.0)
        d = exact_delta(grid)
        x = grid.axis()
        rs = np.array([0.5, 1.0, 2.0])
        ref = None
        for t in (0.5, 1.0, 2.0, 4.0):
            f = apply_propagator("Z", t, d, a, s)
            v = np.interp(rs * t ** (a / (2 * s)), x, f.values) * t ** (a / (2 * s))
            if ref is None:
                ref = v
            assert np.max(np.abs(v / ref - 1.0)) <= 0.01

    def test_tail_norm_scaling(self):
        # ||Z(t)||_{L^q(|x| > lam t^{a/2s})} t^{(Na/2s)(1-1/q)} is t-independent.
        a, s, q, lam = 0.5, 0.4, 2.0, 1.0
        grid = GridSpec(dim=1, points=8192, half_width=200.0)
        d = exact_delta(grid)
        vals = []
        for t in (0.5, 1.0, 2.0, 4.0):
            f = apply_propagator("Z", t, d, a, s)
            vals.append(
                restricted_lq_norm(f, q, lam * t ** (a / (2 * s)))
                * t ** ((a / (2 * s)) * (1.0 - 1.0 / q))
            )
        assert (max(vals) - min(vals)) / min(vals) <= 0.02

    def test_hoelder_in_time_bounded(self):
        # ||Y(t) - Y(t0)||_{L^1} / ((t-t0)^g t0^{a-1-g}) bounded over the time
        # grid, stably under grid refinement.
        a, s, g = 0.5, 0.4, 0.5
        d = exact_delta(GRID)

        def max_ratio(n):
            ts = np.geomspace(0.1, 10.0, n)
            fields = [apply_propagator("Y", t, d, a, s) for t in ts]
            best = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    diff = float(
                        np.sum(np.abs(fields[j].values - fields[i].values))
                    ) * GRID.cell_volume
                    best = max(
                        best, diff / ((ts[j] - ts[i]) ** g * ts[i] ** (a - 1 - g))
                    )
            return best

        m_coarse, m_fine = max_ratio(6), max_ratio(9)
        assert np.isfinite(m_fine)
        assert abs(m_fine - m_coarse) <= 0.1 * m_coarse
