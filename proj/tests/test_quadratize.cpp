#include <cmath>
#include <random>

#include "doctest.h"
#include "qadp/errors.hpp"
#include "qadp/encoding.hpp"
#include "qadp/quadratize.hpp"

using namespace qadp;

namespace {

Polynomial x(int i) { return Polynomial::variable(i); }

// Minimum over every auxiliary assignment by plain enumeration.
double naive_min_over_aux(const Polynomial& q, std::uint64_t orig_index, int n0, int n) {
    double best = 1e300;
    for (std::uint64_t a = 0; a < (std::uint64_t(1) << (n - n0)); ++a) {
        auto s = BinaryState::from_index(orig_index | (a << n0), n);
        best = std::min(best, evaluate(q, s));
    }
    return best;
}

Polynomial random_poly(int n, int max_degree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Polynomial p;
    int terms = 1 + static_cast<int>(rng() % (2 * n));
    for (int t = 0; t < terms; ++t) {
        int d = 1 + static_cast<int>(rng() % max_degree);
        VarSet vars;
        for (int k = 0; k < d; ++k) vars.push_back(static_cast<int>(rng() % n));
        p.add_term(vars, u(rng));
    }
    return p;
}

Polynomial constraint_system() {
    return equality_constraint(x(1) + x(2) + x(3), 1.0) + equality_constraint(x(1) * x(4) + x(2) * x(5) - x(3), 0.0) +
           equality_constraint(x(1) + 2.0 * x(2) - x(3) - 2.0 * x(4), 0.0);
}

}  // namespace

TEST_CASE("reduction by substitution") {
    Polynomial p = 2.0 * x(1) * x(2) * x(3) + 4.0 * x(2) * x(3) * x(4) - 5.0 * x(2) * x(3) * x(5);
    const double g = 7.0;
    auto r = reduce_by_substitution(p, {2, 3}, g);
    Polynomial expected = 2.0 * x(1) * x(6) + 4.0 * x(6) * x(4) - 5.0 * x(6) * x(5) +
                          g * (x(2) * x(3) - 2.0 * (x(2) + x(3)) * x(6) + 3.0 * x(6));
    CHECK(r.qubo_poly == expected);
    REQUIRE(r.alloc.aux_vars.size() == 1);
    CHECK(r.alloc.aux_vars[0].id == 6);
    CHECK(r.alloc.aux_vars[0].term == VarSet{2, 3});
    CHECK(r.penalties_used == std::vector<double>{g});
    CHECK(r.qubo_poly.degree() == 2);

    Polynomial quad = x(0) * x(1) - x(2);
    auto same = reduce_by_substitution(quad, {0, 1}, 1.0);
    CHECK(same.qubo_poly == quad);
    CHECK(same.alloc.aux_vars.empty());
    CHECK(same.warnings.size() == 1);
    CHECK_THROWS_AS(reduce_by_substitution(p, {2, 3}, 0.0), std::invalid_argument);

    auto big = reduce_by_substitution(p, {2, 3}, 20.0);
    double best_orig = 1e300, best_red = 1e300;
    std::vector<std::uint64_t> arg_orig, arg_red;
    for (std::uint64_t i = 0; i < 64; ++i) {
        double a = evaluate(p, BinaryState::from_index(i, 6));
        double b = naive_min_over_aux(big.qubo_poly, i, 6, 7);
        if (a < best_orig - 1e-12) arg_orig.clear(), best_orig = a;
        if (std::abs(a - best_orig) <= 1e-12) arg_orig.push_back(i);
        if (b < best_red - 1e-12) arg_red.clear(), best_red = b;
        if (std::abs(b - best_red) <= 1e-12) arg_red.push_back(i);
    }
    CHECK(best_orig == best_red);
    CHECK(arg_orig == arg_red);
    CHECK(default_substitution_gamma(p) == 110.0);
}

TEST_CASE("negative term reduction") {
    auto q = ntr_reduce({{1, 2, 3}, -1.0}, 4);
    CHECK(q == 2.0 * x(4) - x(4) * (x(1) + x(2) + x(3)));
    for (std::uint64_t i = 0; i < 16; i += 2) {
        auto s = BinaryState::from_index(i, 4);
        CHECK(naive_min_over_aux(q, i, 4, 5) == -double(s[1] * s[2] * s[3]));
    }
    auto ones = BinaryState({0, 1, 1, 1, 1});
    CHECK(evaluate(q, ones) == -1.0);
    CHECK_THROWS_AS(ntr_reduce({{1, 2, 3}, 1.0}, 4), std::invalid_argument);
    CHECK_THROWS_AS(ntr_reduce({{1, 2}, -1.0}, 4), std::invalid_argument);
}

TEST_CASE("positive term reduction") {
    auto q = ptr_reduce({{1, 2, 3}, 1.0}, 4);
    CHECK(q == x(4) * (Polynomial(1.0) + x(1) - x(2) - x(3)) + x(2) * x(3));
    for (std::uint64_t i = 0; i < 16; i += 2) {
        auto s = BinaryState::from_index(i, 4);
        CHECK(naive_min_over_aux(q, i, 4, 5) == double(s[1] * s[2] * s[3]));
    }
    CHECK(naive_min_over_aux(q, 0, 4, 5) == 0.0);

    Monomial quintic{{0, 1, 2, 3, 4}, 2.5};
    auto q5 = ptr_reduce(quintic, 5);
    CHECK(q5.num_variables() == 8);
    for (std::uint64_t i = 0; i < 32; ++i) {
        double expected = i == 31 ? 2.5 : 0.0;
        CHECK(naive_min_over_aux(q5, i, 5, 8) == doctest::Approx(expected));
    }
    CHECK_THROWS_AS(ptr_reduce({{1, 2, 3}, -1.0}, 4), std::invalid_argument);
    CHECK_THROWS_AS(ptr_reduce({{1, 2, 3}, 1.0}, 2), std::invalid_argument);
}

TEST_CASE("deduction reduction") {
    Polynomial h = constraint_system();
    CHECK(h.coefficient({1, 2, 4, 5}) == 2.0);
    CHECK(brute_force(h, 6).min_energy == 0.0);
    std::vector<Deduction> ds{{1, 2, {}}, {2, 3, {}}, {1, 3, {}}};

    auto naive = naive_deduction_substitution(h, ds);
    Polynomial printed = -3.0 * x(1) * x(4) - 8.0 * x(2) * x(4) + x(2) * x(5) + 3.0 * x(2) + 4.0 * x(3) * x(4) + x(3) +
                         4.0 * x(4) + Polynomial(1.0);
    CHECK(naive == printed);
    auto spectrum = brute_force(naive, 6, {.keep_spectrum = true});
    bool has_m3 = false, has_m2 = false;
    for (const auto& [s, e] : *spectrum.spectrum) {
        has_m3 |= e == -3.0;
        has_m2 |= e == -2.0;
    }
    CHECK(has_m3);
    CHECK(has_m2);
    CHECK_FALSE(compare_ground(h, naive, 6).energy_preserved);

    auto one = deduction_reduce(Polynomial(2.0) * x(1) * x(2) * x(4) * x(5), Deduction{1, 2, {}});
    CHECK(one == 2.0 * x(1) * x(2));

    auto reduced = deduction_reduce(h, ds);
    CHECK(reduced.degree() == 2);
    auto g = compare_ground(h, reduced, 6);
    CHECK(g.energy_preserved);
    CHECK(g.reduced_min == 0.0);
    CHECK(g.shares_argmin);
    for (std::uint64_t i = 0; i < 64; ++i) {
        auto s = BinaryState::from_index(i, 6);
        CHECK(evaluate(reduced, s) >= evaluate(h, s) - 1e-12);
    }

    Polynomial lacking = x(0) * x(3) * x(4);
    CHECK(deduction_reduce(lacking, Deduction{1, 2, {}}) == lacking);

    Polynomial cubic = 3.0 * x(0) * x(1) * x(2) - 2.0 * x(0) * x(1) * x(3);
    auto sub = deduction_reduce(cubic, Deduction{0, 1, 4});
    for (std::uint64_t i = 0; i < 32; ++i) {
        auto s = BinaryState::from_index(i, 5);
        double a = evaluate(cubic, s), b = evaluate(sub, s);
        if (s[4] == s[0] * s[1]) {
            CHECK(b == doctest::Approx(a));
        } else {
            CHECK(b >= a);
        }
    }
}

TEST_CASE("excludable local configuration") {
    Polynomial h = x(1) * x(2) + x(2) * x(3) + x(3) * x(4) - 4.0 * x(1) * x(2) * x(3);
    ExcludedConfiguration elc{{1, 2, 3}, {1, 0, 0}};
    auto r = elc_reduce(h, elc);
    Polynomial expected = x(1) * x(2) + x(2) * x(3) + x(3) * x(4) + 4.0 * x(1) - 4.0 * x(1) * x(2) - 4.0 * x(1) * x(3);
    CHECK(r == expected);
    auto a = brute_force(h, 5), b = brute_force(r, 5);
    CHECK(a.min_energy == b.min_energy);
    CHECK(a.argmin_states == b.argmin_states);
    CHECK(evaluate(elc_penalty(elc, 4.0), BinaryState({0, 1, 0, 0, 0})) == 4.0);

    CHECK_THROWS_AS(elc_reduce(h, {{1, 2, 3}, {1, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(elc_reduce(h, {{1, 2, 3}, {1, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(elc_reduce(h, {{1, 2, 4}, {1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("full quadratization") {
    Polynomial quad = 3.0 * x(0) * x(1) - x(2) + Polynomial(1.0);
    auto id = quadratize_full(quad);
    CHECK(id.qubo_poly == quad);
    CHECK(id.alloc.aux_vars.empty());

    Polynomial mixed = -2.0 * x(0) * x(1) * x(2) + 1.5 * x(1) * x(2) * x(3) * x(4) * x(5) + x(0);
    auto r = quadratize_full(mixed);
    CHECK(r.qubo_poly.degree() == 2);
    REQUIRE(r.alloc.aux_vars.size() == 4);
    CHECK(r.alloc.aux_vars[0].method == ReductionMethod::NTR);
    CHECK(r.alloc.aux_vars[1].method == ReductionMethod::PTR);
    CHECK(r.alloc.aux_vars[0].id == 6);
    CHECK(r.alloc.aux_vars[3].id == 9);

    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        int n = trial < 20 ? 6 : 3 + trial % 8;
        auto p = random_poly(n, trial < 20 ? 4 : 5, rng);
        auto q = quadratize_full(p, n);
        REQUIRE(q.qubo_poly.degree() <= 2);
        int total = std::max(n, q.num_variables());
        if (total - n <= 6) {
            for (std::uint64_t i = 0; i < (std::uint64_t(1) << n); ++i) {
                double e = evaluate(p, BinaryState::from_index(i, n));
                REQUIRE(naive_min_over_aux(q.qubo_poly, i, n, total) == doctest::Approx(e).epsilon(1e-12));
            }
        }
        auto report = verify_quadratization(p, q);
        CHECK(report.equivalent);
    }
}

TEST_CASE("verification detects a broken reduction") {
    Polynomial p = x(0) * x(1) * x(2);
    auto r = quadratize_full(p);
    r.qubo_poly.add_term({0, 1}, -0.5);
    auto report = verify_quadratization(p, r);
    CHECK_FALSE(report.equivalent);
    REQUIRE(report.counterexample.has_value());
    CHECK(report.counterexample->to_string() == "110");
}

TEST_CASE("aux minimizer components") {
    Polynomial q = x(0) * x(2) - x(1) * x(3) + x(2) * x(3) + x(4) - x(0) * x(4);
    AuxMinimizer m(q, {2, 3, 4});
    CHECK(m.component_count() == 2);
    for (std::uint64_t i = 0; i < 4; ++i) {
        auto s = BinaryState::from_index(i, 5);
        double v = m.minimize(s);
        CHECK(v == naive_min_over_aux(q, i, 2, 5));
        CHECK(evaluate(q, s) == v);
    }
}
