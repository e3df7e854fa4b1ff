import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import meanscape as ms
from meanscape.algebra import OrderRelation

points = st.tuples(st.floats(min_value=0.1, max_value=10.0),
                   st.floats(min_value=0.1, max_value=10.0))


def off_diagonal(pair, margin=1e-3):
    x, y = pair
    return abs(x - y) > margin


class TestPhi:
    def test_phi_of_arithmetic_is_zero(self, unit_window):
        f = ms.phi(ms.make_arithmetic())
        for x, y in ms.sample_pairs(unit_window, 100, seed=1):
            assert abs(f(x, y)) < 1e-13

    def test_phi_of_geometric(self):
        f = ms.phi(ms.make_geometric())
        assert f(4.0, 1.0) == pytest.approx(math.log(2.0), abs=1e-14)
        # half the log ratio everywhere
        assert f(9.0, 1.0) == pytest.approx(0.5 * math.log(9.0), abs=1e-13)

    def test_phi_of_harmonic(self):
        f = ms.phi(ms.make_harmonic())
        assert f(math.e, 1.0) == pytest.approx(1.0, abs=1e-14)
        assert f(5.0, 2.0) == pytest.approx(math.log(5.0) - math.log(2.0), abs=1e-13)

    @given(points.filter(off_diagonal))
    def test_asymmetry(self, pair):
        x, y = pair
        for m in (ms.make_geometric(), ms.make_harmonic()):
            f = ms.phi(m)
            assert f(x, y) + f(y, x) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_guard(self):
        f = ms.phi(ms.make_geometric())
        assert f(1.0, 1.0) == 0.0
        assert f(1.0, 1.0 + 1e-14) == 0.0

    def test_invalid_mean_detected(self):
        fake = ms.MeanFunction("min", ms.ALL_REALS, lambda x, y: min(x, y))
        with pytest.raises(ms.InvalidMeanError):
            ms.phi(fake)(1.0, 2.0)


class TestPhiInverse:
    def test_zero_map_gives_arithmetic(self):
        zero = ms.AsymmetricFunction(ms.ALL_REALS, lambda x, y: 0.0, "0")
        m = ms.phi_inverse(zero)
        for x, y in [(1.0, 4.0), (-3.0, 7.0), (0.5, 2.5)]:
            assert m(x, y) == pytest.approx((x + y) / 2, rel=1e-15)

    def test_log_ratio_gives_harmonic(self, unit_window):
        f = ms.AsymmetricFunction(ms.POSITIVE_REALS,
                                  lambda x, y: math.log(x) - math.log(y), "logratio")
        m = ms.phi_inverse(f)
        H = ms.make_harmonic()
        for x, y in ms.sample_pairs(unit_window, 100, seed=2):
            assert m(x, y) == pytest.approx(H(x, y), rel=1e-12)

    @given(points.filter(off_diagonal))
    def test_round_trip_on_builtins(self, pair):
        x, y = pair
        for m in (ms.make_geometric(), ms.make_harmonic()):
            back = ms.phi_inverse(ms.phi(m))
            assert back(x, y) == pytest.approx(m(x, y), rel=1e-12)

    def test_round_trip_on_random_normal_means(self, mean_family, unit_window):
        for m in mean_family[3:]:
            back = ms.phi_inverse(ms.phi(m))
            for x, y in ms.sample_pairs(unit_window, 60, seed=9, min_gap=1e-6):
                assert back(x, y) == pytest.approx(m(x, y), rel=1e-12)

    def test_overflow_guard(self):
        big = ms.AsymmetricFunction(ms.ALL_REALS,
                                    lambda x, y: 1000.0 if x > y else -1000.0, "big")
        m = ms.phi_inverse(big)
        assert m(5.0, 2.0) == 2.0  # f -> +inf selects y
        assert m(2.0, 5.0) == 2.0


class TestStar:
    def test_neutral_element(self, mean_family, unit_window):
        A = ms.make_arithmetic()
        for m in mean_family:
            composed = ms.star(A, m)
            for x, y in ms.sample_pairs(unit_window, 40, seed=3):
                assert composed(x, y) == pytest.approx(m(x, y), rel=1e-12)

    def test_gg_is_harmonic(self, unit_window):
        G, H = ms.make_geometric(), ms.make_harmonic()
        gg = ms.star(G, G)
        for x, y in ms.sample_pairs(unit_window, 200, seed=4):
            assert abs(gg(x, y) - H(x, y)) <= 1e-12 * max(1.0, H(x, y))

    def test_gh_value(self):
        got = ms.star(ms.make_geometric(), ms.make_harmonic())(1.0, 4.0)
        assert got == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_closed_form_matches_phi_route(self, mean_family, unit_window):
        # the rational form and the transform route must agree tightly
        for m1, m2 in [(mean_family[1], mean_family[2]), (mean_family[3], mean_family[4])]:
            direct = ms.star(m1, m2)
            via_phi = ms.phi_inverse(ms.phi(m1) + ms.phi(m2))
            for x, y in ms.sample_pairs(unit_window, 60, seed=5, min_gap=1e-6):
                assert direct(x, y) == pytest.approx(via_phi(x, y), rel=1e-12)

    @given(points.filter(off_diagonal))
    def test_commutative(self, pair):
        x, y = pair
        G, H = ms.make_geometric(), ms.make_harmonic()
        assert ms.star(G, H)(x, y) == pytest.approx(ms.star(H, G)(x, y), rel=1e-12)

    def test_associative(self, mean_family, unit_window):
        m1, m2, m3 = mean_family[1], mean_family[3], mean_family[4]
        left = ms.star(ms.star(m1, m2), m3)
        right = ms.star(m1, ms.star(m2, m3))
        for x, y in ms.sample_pairs(unit_window, 60, seed=6):
            assert left(x, y) == pytest.approx(right(x, y), rel=1e-9)

    def test_homomorphism(self, mean_family, unit_window):
        m1, m2 = mean_family[1], mean_family[3]
        lhs = ms.phi(ms.star(m1, m2))
        f1, f2 = ms.phi(m1), ms.phi(m2)
        for x, y in ms.sample_pairs(unit_window, 60, seed=7, min_gap=1e-3):
            expect = f1(x, y) + f2(x, y)
            assert abs(lhs(x, y) - expect) <= 1e-9 * max(1.0, abs(expect))

    def test_domain_mismatch(self):
        left = ms.MeanFunction("L", ms.Interval.closed(0.0, 1.0), lambda x, y: (x + y) / 2)
        right = ms.MeanFunction("R", ms.Interval.closed(5.0, 6.0), lambda x, y: (x + y) / 2)
        with pytest.raises(ms.DomainError):
            ms.star(left, right)


class TestGroupInverse:
    def test_arithmetic_self_inverse(self, unit_window):
        A = ms.make_arithmetic()
        inv = ms.group_inverse(A)
        for x, y in ms.sample_pairs(unit_window, 50, seed=8):
            assert inv(x, y) == pytest.approx(A(x, y), rel=1e-15)

    def test_geometric_value(self):
        assert ms.group_inverse(ms.make_geometric())(1.0, 4.0) == pytest.approx(3.0)

    def test_inverse_law(self, mean_family, unit_window):
        A = ms.make_arithmetic()
        for m in mean_family:
            prod = ms.star(m, ms.group_inverse(m))
            for x, y in ms.sample_pairs(unit_window, 40, seed=9):
                assert prod(x, y) == pytest.approx(A(x, y), rel=1e-12)


class TestGroupSymmetry:
    def test_classical_reflections(self):
        A, G, H = ms.make_arithmetic(), ms.make_geometric(), ms.make_harmonic()
        assert ms.group_symmetry(A, G)(1.0, 4.0) == pytest.approx(3.0, rel=1e-14)
        assert ms.group_symmetry(G, A)(1.0, 4.0) == pytest.approx(1.6, rel=1e-14)
        assert ms.group_symmetry(H, A)(1.0, 2.0) == pytest.approx(1.2, rel=1e-14)

    def test_shortcut_matches_general_formula(self, mean_family, unit_window):
        # built-in m0 takes the closed form; a wrapped copy takes the
        # rational formula; they must agree
        G = ms.make_geometric()
        g_clone = ms.MeanFunction("Gc", G.domain, lambda x, y: math.sqrt(x * y))
        m1 = mean_family[3]
        short = ms.group_symmetry(G, m1)
        general = ms.group_symmetry(g_clone, m1)
        for x, y in ms.sample_pairs(unit_window, 60, seed=10, min_gap=1e-6):
            assert short(x, y) == pytest.approx(general(x, y), rel=1e-10)

    def test_matches_phi_route(self, mean_family, unit_window):
        m0, m1 = mean_family[3], mean_family[1]
        direct = ms.group_symmetry(m0, m1)
        via_phi = ms.phi_inverse(2.0 * ms.phi(m0) - ms.phi(m1))
        for x, y in ms.sample_pairs(unit_window, 60, seed=11, min_gap=1e-6):
            assert direct(x, y) == pytest.approx(via_phi(x, y), rel=1e-10)

    def test_harmonic_decomposition(self, mean_family, unit_window):
        # reflection through H composes from reflections through G and A
        A, G, H = ms.make_arithmetic(), ms.make_geometric(), ms.make_harmonic()
        for m in mean_family:
            lhs = ms.group_symmetry(H, m)
            rhs = ms.group_symmetry(G, ms.group_symmetry(A, ms.group_symmetry(G, m)))
            for x, y in ms.sample_pairs(unit_window, 40, seed=12):
                assert abs(lhs(x, y) - rhs(x, y)) <= 1e-9 * max(1.0, abs(lhs(x, y)))


class TestNormalMeans:
    def test_constant_weight_is_arithmetic(self, unit_window):
        w = ms.WeightFunction(ms.ALL_REALS, lambda t: 1.0, "1")
        m = ms.make_normal_mean(w)
        A = ms.make_arithmetic()
        for x, y in ms.sample_pairs(unit_window, 60, seed=13):
            assert m(x, y) == pytest.approx(A(x, y), rel=1e-15)

    def test_reciprocal_weight_is_harmonic(self):
        w = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / t, "1/t")
        m = ms.make_normal_mean(w)
        assert m(1.0, 3.0) == pytest.approx(1.5, rel=1e-15)

    def test_inverse_sqrt_weight_is_geometric(self, unit_window):
        w = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / math.sqrt(t), "1/sqrt(t)")
        m = ms.make_normal_mean(w)
        G = ms.make_geometric()
        for x, y in ms.sample_pairs(unit_window, 100, seed=14):
            assert m(x, y) == pytest.approx(G(x, y), rel=1e-12)

    def test_normal_means_pass_axioms(self, mean_family, unit_window):
        for m in mean_family[3:]:
            assert ms.verify_axioms(m, unit_window, 400, seed=15).all_ok

    def test_nonpositive_weight_rejected(self):
        w = ms.WeightFunction(ms.ALL_REALS, lambda t: t, "t")  # negative below 0
        m = ms.make_normal_mean(w)
        with pytest.raises(ms.InvalidMeanError):
            m(-2.0, 1.0)


class TestCompare:
    def test_classical_chain(self, unit_window):
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        inv_sqrt = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / math.sqrt(t), "1/sqrt")
        inv = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / t, "1/t")
        assert ms.compare_normal(one, inv_sqrt, unit_window) is OrderRelation.STRICTLY_GREATER
        assert ms.compare_normal(inv_sqrt, inv, unit_window) is OrderRelation.STRICTLY_GREATER
        assert ms.compare_normal(inv, one, unit_window) is OrderRelation.STRICTLY_LESS

    def test_scaling_invariance(self, unit_window):
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        two = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 2.0, "2")
        assert ms.compare_normal(one, two, unit_window) is OrderRelation.EQUAL
        inv = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / t, "1/t")
        scaled = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 17.0 / t, "17/t")
        one_vs_inv = ms.compare_normal(one, inv, unit_window)
        assert ms.compare_normal(one, scaled, unit_window) is one_vs_inv

    def test_flat_sections_give_weak_order(self, unit_window):
        # ratio falls then stays constant: non-increasing but not strict
        step = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: max(1.0, 2.0 - t), "step")
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        assert ms.compare_normal(step, one, unit_window) is OrderRelation.LESS_OR_EQUAL

    def test_incomparable(self, unit_window):
        vee = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: t + 1.0 / t, "t+1/t")
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        assert ms.compare_normal(vee, one, unit_window) is OrderRelation.INCOMPARABLE

    def test_classify_vs_arithmetic(self, unit_window):
        inv = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / t, "1/t")
        ident = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: t, "t")
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        assert ms.classify_vs_arithmetic(inv, unit_window) is OrderRelation.STRICTLY_LESS
        assert ms.classify_vs_arithmetic(ident, unit_window) is OrderRelation.STRICTLY_GREATER
        assert ms.classify_vs_arithmetic(one, unit_window) is OrderRelation.EQUAL

    def test_order_matches_sampled_means(self, unit_window):
        # the predicted strict order shows up pointwise
        inv_sqrt = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / math.sqrt(t), "1/sqrt")
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        rel = ms.compare_normal(one, inv_sqrt, unit_window)
        assert rel is OrderRelation.STRICTLY_GREATER
        m1 = ms.make_normal_mean(one)
        m2 = ms.make_normal_mean(inv_sqrt)
        for x, y in ms.sample_pairs(unit_window, 50, seed=16, min_gap=1e-6):
            assert m1(x, y) > m2(x, y)

    def test_window_outside_domain(self):
        inv = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0 / t, "1/t")
        one = ms.WeightFunction(ms.POSITIVE_REALS, lambda t: 1.0, "1")
        with pytest.raises(ms.DomainError):
            ms.compare_normal(inv, one, ms.Interval.closed(-1.0, 1.0))
