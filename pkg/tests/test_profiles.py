"""Radial profile catalog: values, derivatives, domains, and the scalar
combinations feeding the Ricci decomposition."""

import numpy as np
import pytest

from finslergeo import (
    DiffConfig,
    DomainError,
    ProfilePair,
    combo_scalars,
    eval_profiles,
    ricci_coefficients,
)
from finslergeo.tensors import fd_derivative, fd_second


class TestSchwarzschildPair:
    def test_values_at_unit_radius(self):
        """c(1) = 1.25/0.75 = 5/3 and m(1) = -(1.25)^4 = -2.44140625 for xi = 1."""
        p = eval_profiles(ProfilePair.schwarzschild_isotropic(1.0), 1.0)
        assert p.c == pytest.approx(5.0 / 3.0, rel=1e-15)
        assert p.m == pytest.approx(-2.44140625, rel=1e-15)

    def test_first_derivatives_match_chain_rule(self):
        """c' = -(xi/4r^2) * 2/(1 - xi/4r)^2 and m' = (xi/r^2)(1 + xi/4r)^3."""
        xi = 1.0
        pair = ProfilePair.schwarzschild_isotropic(xi)
        for r in (0.4, 1.0, 2.5, 7.0):
            t = xi / (4.0 * r)
            p = eval_profiles(pair, r)
            assert p.c1 == pytest.approx(-(xi / (4 * r**2)) * 2.0 / (1 - t) ** 2, rel=1e-13)
            assert p.m1 == pytest.approx((xi / r**2) * (1 + t) ** 3, rel=1e-13)

    def test_second_derivatives_match_substitution_rule(self):
        """c'' = (xi/2r^3) y' + (xi^2/16r^4) y'' with y' = 2/(1-t)^2, y'' = 4/(1-t)^3."""
        xi = 1.0
        pair = ProfilePair.schwarzschild_isotropic(xi)
        for r in (0.5, 1.0, 3.0):
            t = xi / (4.0 * r)
            yp = 2.0 / (1 - t) ** 2
            ypp = 4.0 / (1 - t) ** 3
            p = eval_profiles(pair, r)
            assert p.c2 == pytest.approx(
                (xi / (2 * r**3)) * yp + (xi**2 / (16 * r**4)) * ypp, rel=1e-13
            )

    def test_domain_error_names_pole(self):
        pair = ProfilePair.schwarzschild_isotropic(1.0)
        with pytest.raises(DomainError, match="pole"):
            pair.eval(0.25)
        with pytest.raises(DomainError, match="pole"):
            pair.eval(0.1)

    def test_xi_must_be_positive(self):
        with pytest.raises(ValueError):
            ProfilePair.schwarzschild_isotropic(0.0)
        with pytest.raises(ValueError):
            ProfilePair.schwarzschild_isotropic(-2.0)


class TestConstantAndRational:
    def test_constant_pair_is_flat(self):
        p = eval_profiles(ProfilePair.constant(1.0, -1.0), 3.7)
        assert (p.c, p.m) == (1.0, -1.0)
        assert p.c1 == p.c2 == p.m1 == p.m2 == 0.0

    def test_rational_values_and_derivatives(self):
        # c = 0.8 + 0.1/r: c' = -0.1/r^2, c'' = 0.2/r^3
        pair = ProfilePair.rational((0.8, 0.1), (1.0, 0.2))
        p = eval_profiles(pair, 2.0)
        assert p.c == pytest.approx(0.85, rel=1e-15)
        assert p.c1 == pytest.approx(-0.1 / 4.0, rel=1e-14)
        assert p.c2 == pytest.approx(0.2 / 8.0, rel=1e-14)
        assert p.m == pytest.approx(1.1, rel=1e-15)

    def test_positivity_enforced_at_eval(self):
        # c = 1 - 1/r turns non-positive at r <= 1
        pair = ProfilePair.rational((1.0, -1.0), (1.0,))
        pair.eval(5.0)
        with pytest.raises(DomainError):
            pair.eval(0.9)

    def test_m_zero_rejected(self):
        pair = ProfilePair.rational((1.0,), (1.0, -1.0))
        with pytest.raises(DomainError):
            pair.eval(1.0)
        with pytest.raises(ValueError):
            ProfilePair.constant(1.0, 0.0)


class TestDerivativeOracle:
    @pytest.mark.parametrize(
        "pair",
        [
            ProfilePair.constant(0.9, 1.1),
            ProfilePair.schwarzschild_isotropic(1.0),
            ProfilePair.rational((0.8, 0.1), (1.0, 0.2)),
        ],
        ids=["constant", "schwarzschild", "rational"],
    )
    def test_jets_match_order4_differences(self, pair, rng):
        """Jet derivatives equal order-4 FD of the value channel to 1e-8
        relative at 200 random domain points."""
        cfg = DiffConfig(fd_step=1e-3, fd_order=4)
        for _ in range(200):
            r = rng.uniform(0.4, 12.0)

            def c_of(rr):
                return pair.eval(rr).c

            def m_of(rr):
                return pair.eval(rr).m

            p = pair.eval(r)
            for got1, got2, f in ((p.c1, p.c2, c_of), (p.m1, p.m2, m_of)):
                d1 = fd_derivative(f, r, cfg, scale=r)
                d2 = fd_second(f, r, cfg, scale=r)
                assert abs(got1 - d1) <= 1e-8 * max(abs(got1), 1.0)
                assert abs(got2 - d2) <= 1e-8 * max(abs(got2), 1.0)


class TestComboScalars:
    def test_constant_profiles_vanish(self):
        s = combo_scalars(ProfilePair.constant(1.4, -2.0), 2.2)
        assert s.c_curv == s.m_curv == s.m_slope == s.cross == 0.0
        n = ricci_coefficients(ProfilePair.constant(1.4, -2.0), 2.2, 4)
        assert n.as_tuple() == (0.0, 0.0, 0.0)

    def test_schwarzschild_vacuum_coefficients(self, rng):
        """All three Ricci coefficients vanish (below 1e-10 in 1/r^2 units)
        for the isotropic pair at N = 4, across 50 radii in (xi/4, 20 xi]."""
        xi = 1.0
        pair = ProfilePair.schwarzschild_isotropic(xi)
        for _ in range(50):
            r = rng.uniform(xi / 4 * 1.01 + 1e-9, 20 * xi)
            n = ricci_coefficients(pair, r, 4)
            assert max(abs(v) for v in n.as_tuple()) * r**2 < 1e-10

    def test_mixed_combination_value(self):
        """The mixed scalar c''/c - 2(c'/c)^2 - c'/(rc) - (c'/c)(m'/m) equals
        6 (1/r^2) t/(1+t)^2; at r = 1, xi = 1 that is 6 * 0.25/1.5625 = 0.96."""
        pair = ProfilePair.schwarzschild_isotropic(1.0)
        p = pair.eval(1.0)
        s = combo_scalars(pair, 1.0)
        mixed = s.c_curv - (p.c1 / p.c) * (p.m1 / p.m)
        assert mixed == pytest.approx(0.96, rel=1e-12)

    def test_pure_c_combination_identity(self, rng):
        """c''/c - 2(c'/c)^2 - c'/(rc) equals
        6 (t / r^2) [1 - (2/3) t/(1+t)] / ((1+t)(1-t)) for the isotropic pair."""
        xi = 1.0
        pair = ProfilePair.schwarzschild_isotropic(xi)
        for _ in range(25):
            r = rng.uniform(0.3, 15.0)
            t = xi / (4.0 * r)
            s = combo_scalars(pair, r)
            want = (
                (t / r**2)
                / ((1 + t) * (1 - t))
                * (6.0 - 4.0 * t / (1 + t))
            )
            assert s.c_curv == pytest.approx(want, rel=1e-10)

    def test_dimension_five_is_not_vacuum(self):
        """At N = 5 the coefficients are (0.64, -0.32, -0.96) at r = 1, xi = 1;
        the vanishing is specific to N = 4."""
        n = ricci_coefficients(ProfilePair.schwarzschild_isotropic(1.0), 1.0, 5)
        assert n.u_term == pytest.approx(0.64, rel=1e-12)
        assert n.bb_term == pytest.approx(-0.32, rel=1e-12)
        assert n.nn_term == pytest.approx(-0.96, rel=1e-12)
