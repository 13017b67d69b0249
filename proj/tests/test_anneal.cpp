// Copyright 2026 The qadp Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "qadp/anneal.hpp"
#include "qadp/errors.hpp"
#include "qadp/quadratize.hpp"

using namespace qadp;

namespace {

IsingModel two_spin_model() {
    IsingModel m(2);
    m.add_bias(0, 0.5);
    m.add_bias(1, -0.3);
    m.add_coupling(0, 1, -0.8);
    return m;
}

Polynomial h_s() {
    Polynomial p;
    p.add_term({0}, 1.0);
    p.add_term({1}, -1.0);
    p.add_term({0, 1}, -2.0);
    return p;
}

Polynomial h_c() {
    Polynomial p;
    p.add_term({2}, 2.0);
    p.add_term({0, 2}, 1.0);
    p.add_term({0, 1, 2}, -2.0);
    p.add_term({3}, 2.0);
    p.add_term({1, 3}, -1.0);
    p.add_term({0, 1, 3}, -2.0);
    return p;
}

BinaryState zeros(int n) { return BinaryState(std::vector<int>(n, 0)); }

// Dense problem Hamiltonian diagonal, independent of the engines.
Eigen::VectorXd ising_diagonal(const IsingModel& m) {
    const int n = m.num_variables();
    Eigen::VectorXd d(1 << n);
    for (int x = 0; x < (1 << n); ++x) d(x) = ising_energy(m, SpinState::from_binary(BinaryState::from_index(x, n)));
    return d;
}

double ground_probability(const IsingModel& m, double total_time) {
    SamplerRequest req;
    req.model = m;
    req.schedule = AnnealSchedule::forward(m.num_variables(), total_time);
    auto res = evolve(req, initial_state_vector(req));
    Eigen::VectorXd d = ising_diagonal(m);
    Eigen::Index best;
    d.minCoeff(&best);
    return res.state.probabilities()(best);
}

int count_state(const SampleSet& s, const BinaryState& x) {
    for (const auto& r : s.records)
        if (r.state == x) return r.occurrences;
    return 0;
}

}  // namespace

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(AnnealSchedule(10.0, {{{0.0, 0.0}, {10.0, 1.5}}}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(AnnealSchedule(10.0, {{{0.0, 0.0}, {5.0, 1.0}}}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(AnnealSchedule(10.0, {{{0.0, 0.0}, {10.0, 1.0}}}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(AnnealSchedule(10.0, {{{0.0, 0.0}, {10.0, 1.0}}}, {0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(AnnealSchedule::reverse(2, 10.0, -0.1), std::invalid_argument);

    auto f = AnnealSchedule::forward(3, 20.0);
    CHECK(f.s(2, 0.0) == 0.0);
    CHECK(f.s(1, 10.0) == doctest::Approx(0.5));
    CHECK(f.s(0, 20.0) == 1.0);
    CHECK_FALSE(f.starts_classical());
    CHECK(AnnealSchedule::reverse(2, 10.0, 0.3).starts_classical());
    CHECK(AnnealSchedule::reverse(2, 10.0, 0.3).s(0, 5.0) == doctest::Approx(0.3));
}

TEST_CASE("sequential group schedule repeats its subschedule") {
    auto s = AnnealSchedule::sequential_groups({0, 1, 0, 1}, 40.0, 2, 0.0, true);
    CHECK(s.cycles() == 2);
    CHECK(s.num_groups() == 2);
    CHECK(s.cycle_time() == doctest::Approx(20.0));
    for (double t : {0.0, 2.5, 5.0, 7.5, 12.0, 15.0, 19.0}) {
        CHECK(s.group_s(0, t) == doctest::Approx(s.group_s(0, t + 20.0)));
        CHECK(s.group_s(1, t) == doctest::Approx(s.group_s(1, t + 20.0)));
    }
    CHECK(s.group_s(0, 5.0) == doctest::Approx(0.0));
    CHECK(s.group_s(1, 5.0) == doctest::Approx(1.0));
    CHECK(s.group_s(1, 15.0) == doctest::Approx(0.0));
    CHECK(s.group_s(0, 15.0) == doctest::Approx(1.0));
    auto stages = s.activity_stages();
    REQUIRE(stages.size() == 2);
    CHECK(stages[0] == std::vector<int>{0});
    CHECK(stages[1] == std::vector<int>{1});
}

TEST_CASE("schedule csv round trip") {
    auto s = AnnealSchedule::sequential_groups({0, 1}, 30.0, 3, 0.25, false);
    std::stringstream ss;
    write_schedule_csv(ss, s);
    auto r = read_schedule_csv(ss, {0, 1}, false);
    CHECK(r.cycles() == 3);
    CHECK(r.total_time() == doctest::Approx(30.0));
    for (double t = 0.0; t <= 30.0; t += 0.7) {
        CHECK(r.group_s(0, t) == doctest::Approx(s.group_s(0, t)));
        CHECK(r.group_s(1, t) == doctest::Approx(s.group_s(1, t)));
    }
    std::stringstream bad("time_us,group,s\n0,0,0\n5,0,oops\n");
    CHECK_THROWS_AS(read_schedule_csv(bad, {0}), ParseError);
}

TEST_CASE("timing model") {
    auto t = timing_report(100, 20.0);
    CHECK(t.total == 23000.0);
    CHECK(t.t_program == 9000.0);
    CHECK(t.t_readout == 120.0);
    CHECK(timing_report(1, 5.0).total == 9125.0);
    CHECK_THROWS_AS(timing_report(1, 4.9), std::invalid_argument);
    CHECK_THROWS_AS(timing_report(0, 20.0), std::invalid_argument);
    TimingConfig cfg;
    cfg.t_program = 100.0;
    cfg.t_readout = 1.0;
    CHECK(timing_report(10, 9.0, cfg).total == 200.0);
    // Per-execution totals of 50 reads sit in the tens of milliseconds.
    double ms = timing_report(50, 20.0).total / 1000.0;
    CHECK(ms > 10.0);
    CHECK(ms < 100.0);
}

TEST_CASE("initial hamiltonian spectrum") {
    auto [e2, g2] = initial_hamiltonian_spectrum(2);
    std::vector<double> v(e2.data(), e2.data() + e2.size());
    std::sort(v.begin(), v.end());
    CHECK(v[0] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(std::abs(v[1]) < 1e-10);
    CHECK(std::abs(v[2]) < 1e-10);
    CHECK(v[3] == doctest::Approx(2.0).epsilon(1e-10));
    for (int i = 0; i < 4; ++i) CHECK(g2(i) == doctest::Approx(0.5).epsilon(1e-10));

    auto [e1, g1] = initial_hamiltonian_spectrum(1);
    CHECK(e1.minCoeff() == doctest::Approx(-1.0));
    CHECK(e1.maxCoeff() == doctest::Approx(1.0));
    CHECK(initial_hamiltonian_spectrum(3).first.minCoeff() == doctest::Approx(-3.0));
    CHECK_THROWS_AS(initial_hamiltonian_spectrum(13), CapacityError);

    for (int n = 1; n <= 6; ++n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(initial_hamiltonian_matrix(n));
        Eigen::VectorXd mine = initial_hamiltonian_spectrum(n).first;
        std::sort(mine.data(), mine.data() + mine.size());
        CHECK((es.eigenvalues() - mine).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::VectorXd ground = es.eigenvectors().col(0);
        CHECK(std::abs(std::abs(ground.sum()) - std::sqrt(double(1 << n))) < 1e-9);
    }
}

TEST_CASE("statevector forward anneal reaches the two-spin ground state") {
    SamplerRequest req;
    req.model = two_spin_model();
    req.reads = 1000;
    req.seed = 11;
    req.schedule = AnnealSchedule::forward(2, 200.0);
    auto res = evolve(req, initial_state_vector(req));
    CHECK(res.state.probabilities()(0) >= 0.99);
    CHECK(std::abs(res.state.norm_squared() - 1.0) < 1e-9);
    auto s = schrodinger_anneal(req);
    CHECK(s.lowest().state == BinaryState({0, 0}));
    CHECK(s.lowest().energy == doctest::Approx(-1.0));
    CHECK(s.total_occurrences() == 1000);
    CHECK(count_state(s, BinaryState({0, 0})) >= 980);
    REQUIRE(s.timing.has_value());
    CHECK(s.timing->total == doctest::Approx(9000.0 + 1000 * 320.0));
}

TEST_CASE("adiabatic ladder") {
    double prev = 0.0;
    for (double t : {25.0, 50.0, 100.0, 200.0}) {
        double p = ground_probability(two_spin_model(), t);
        CHECK(p >= prev - 1e-4);
        prev = p;
    }
    CHECK(prev >= 0.99);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    while (tested < 5) {
        IsingModel m(2);
        m.add_bias(0, u(rng));
        m.add_bias(1, u(rng));
        m.add_coupling(0, 1, u(rng));
        Eigen::VectorXd d = ising_diagonal(m);
        std::sort(d.data(), d.data() + d.size());
        if (d(1) - d(0) < 0.2) continue;
        ++tested;
        double last = 0.0;
        for (double t : {25.0, 50.0, 100.0, 200.0}) {
            double p = ground_probability(m, t);
            CHECK(p >= last - 1e-4);
            last = p;
        }
    }
}

TEST_CASE("zero problem measures the uniform superposition") {
    SamplerRequest req;
    req.model = IsingModel(3);
    req.reads = 8000;
    req.seed = 3;
    req.schedule = AnnealSchedule::forward(3, 1.0);
    auto s = schrodinger_anneal(req);
    CHECK(s.records.size() == 8);
    for (const auto& r : s.records) {
        CHECK(std::abs(r.occurrences - 1000) < 150);
    }
}

TEST_CASE("reverse anneal of a free qubit rotates by the transverse phase") {
    for (double t : {0.8, 1.7, 3.0}) {
        SamplerRequest req;
        req.model = IsingModel(1);
        req.schedule = AnnealSchedule::reverse(1, t, 0.0);
        req.initial_state = BinaryState({0});
        auto res = evolve(req, initial_state_vector(req));
        CHECK(res.state.probabilities()(1) == doctest::Approx(std::pow(std::sin(t / 2), 2)).epsilon(1e-3));
    }
}

TEST_CASE("measurement statistics") {
    QuantumStateVector psi;
    psi.amplitudes = Eigen::VectorXcd(8);
    const double w[8] = {0.05, 0.1, 0.2, 0.05, 0.15, 0.25, 0.12, 0.08};
    for (int i = 0; i < 8; ++i) psi.amplitudes(i) = std::polar(std::sqrt(w[i]), 0.3 * i);
    const int reads = 10000;
    auto out = measure(psi, 3, reads, 21);
    REQUIRE(out.size() == reads);
    std::vector<int> counts(8, 0);
    for (const auto& x : out) ++counts[x.to_index()];
    double chi2 = 0.0;
    for (int i = 0; i < 8; ++i) {
        double e = reads * w[i];
        chi2 += (counts[i] - e) * (counts[i] - e) / e;
    }
    CHECK(chi2 < 18.475);  // 1% critical value, 7 degrees of freedom
}

TEST_CASE("statevector capacity and reverse start") {
    SamplerRequest req;
    req.model = QuboModel(17);
    req.schedule = AnnealSchedule::forward(17, 10.0);
    CHECK_THROWS_AS(schrodinger_anneal(req), CapacityError);
    SamplerRequest rev;
    rev.model = two_spin_model();
    rev.schedule = AnnealSchedule::reverse(2, 10.0, 0.5);
    CHECK_THROWS_AS(schrodinger_anneal(rev), std::invalid_argument);
}

TEST_CASE("statevector cubic problem and norm") {
    SamplerRequest req;
    req.model = PolynomialModel(h_c(), 4);
    req.schedule = AnnealSchedule::sequential_groups({0, 1, 0, 1}, 40.0, 2, 0.0, true);
    req.initial_state = zeros(4);
    auto res = evolve(req, initial_state_vector(req));
    CHECK(std::abs(res.state.norm_squared() - 1.0) < 1e-9);
    CHECK(res.max_norm_drift < 1e-9);
}

TEST_CASE("one-cycle statevector on the stepwise problem reaches the trap state") {
    SamplerRequest req;
    req.model = PolynomialModel(h_s(), 2);
    req.reads = 1000;
    req.seed = 7;
    req.schedule = AnnealSchedule::sequential_groups({0, 1}, 20.0, 1, 0.0, true);
    req.initial_state = zeros(2);
    auto s = schrodinger_anneal(req);
    int best = 0;
    BinaryState mode = zeros(2);
    for (const auto& r : s.records) {
        if (r.occurrences > best) {
            best = r.occurrences;
            mode = r.state;
        }
    }
    CHECK(mode == BinaryState({0, 1}));
}

double ground_share(const SampleSet& s, double min_energy) {
    int hits = 0;
    for (const auto& r : s.records)
        if (std::abs(r.energy - min_energy) < 1e-9) hits += r.occurrences;
    return static_cast<double>(hits) / s.total_occurrences();
}

TEST_CASE("statevector reset at full reversal") {
    StatevectorOptions reset;
    reset.reset_on_full_reversal = true;

    SamplerRequest fwd;
    fwd.model = PolynomialModel(h_s(), 2);
    fwd.reads = 200;
    fwd.seed = 3;
    fwd.schedule = AnnealSchedule::forward(2, 5.0);
    auto a = schrodinger_anneal(fwd);
    auto b = schrodinger_anneal(fwd, reset);
    CHECK(a.reads == b.reads);

    auto run = [&](const Polynomial& p, int n, std::vector<int> groups, int cycles, double cycle_time) {
        SamplerRequest req;
        req.model = PolynomialModel(p, n);
        req.reads = 1000;
        req.seed = 7;
        req.schedule = AnnealSchedule::sequential_groups(groups, cycles * cycle_time, cycles, 0.0, true);
        req.initial_state = zeros(n);
        return schrodinger_anneal(req, reset);
    };
    const double smin = brute_force(h_s(), 2).min_energy;
    const double cmin = brute_force(h_c(), 4).min_energy;
    CHECK(run(h_s(), 2, {0, 1}, 1, 20.0).reads == run(h_s(), 2, {0, 1}, 1, 20.0).reads);

    // Slow slots approach the classical alternating minimization.
    auto slow1 = run(h_s(), 2, {0, 1}, 1, 100.0);
    auto slow2 = run(h_s(), 2, {0, 1}, 2, 100.0);
    CHECK(count_state(slow1, BinaryState({0, 1})) > 900);
    CHECK(ground_share(slow2, smin) > 0.9);

    CHECK(ground_share(run(h_s(), 2, {0, 1}, 2, 20.0), smin) > ground_share(run(h_s(), 2, {0, 1}, 1, 20.0), smin));
    CHECK(ground_share(run(h_c(), 4, {0, 1, 0, 1}, 2, 20.0), cmin) >
          ground_share(run(h_c(), 4, {0, 1, 0, 1}, 1, 20.0), cmin));
}

TEST_CASE("heuristic anneal on the two-spin model") {
    SamplerRequest req;
    req.model = two_spin_model();
    req.reads = 100;
    req.seed = 1;
    req.schedule = AnnealSchedule::forward(2, 20.0);
    auto s = heuristic_anneal(req);
    CHECK(s.lowest().state == BinaryState({0, 0}));
    CHECK(s.lowest().energy == doctest::Approx(-1.0));
    CHECK(s.total_occurrences() == 100);
    for (const auto& r : s.records) CHECK(r.energy == doctest::Approx(request_energy(req, r.state)));
}

TEST_CASE("frozen schedule returns the initial state") {
    SamplerRequest req;
    req.model = two_spin_model();
    req.reads = 25;
    req.schedule = AnnealSchedule::frozen(2, 20.0);
    req.initial_state = BinaryState({1, 0});
    auto s = heuristic_anneal(req);
    REQUIRE(s.records.size() == 1);
    CHECK(s.records[0].state == BinaryState({1, 0}));
    CHECK(s.records[0].occurrences == 25);
}

TEST_CASE("heuristic determinism") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuboModel q(12);
    for (int i = 0; i < 12; ++i)
        for (int j = i; j < 12; ++j) q.add(i, j, u(rng));
    SamplerRequest req;
    req.model = q;
    req.reads = 20;
    req.seed = 42;
    req.schedule = AnnealSchedule::forward(12, 20.0);
    auto a = heuristic_anneal(req);
    auto b = heuristic_anneal(req);
    CHECK(a.reads == b.reads);
    auto bf = brute_force(q);
    CHECK(a.lowest().energy == doctest::Approx(bf.min_energy));
}

TEST_CASE("heuristic on the cubic problem with two cycles") {
    auto bf = brute_force(h_c(), 4);
    SamplerRequest req;
    req.model = PolynomialModel(h_c(), 4);
    req.reads = 10;
    req.seed = 4;
    req.schedule = AnnealSchedule::sequential_groups({0, 1, 0, 1}, 40.0, 2, 0.0, true);
    req.initial_state = zeros(4);
    HeuristicOptions opts;
    opts.hot_factor = 1e-6;
    opts.tie_acceptance = 0.5;
    auto s = heuristic_anneal(req, opts);
    CHECK(s.lowest().energy == doctest::Approx(bf.min_energy));
}

TEST_CASE("auxiliary variables sit at their conditional minimum") {
    Polynomial p;
    p.add_term({0, 1, 2}, -3.0);
    p.add_term({0}, 1.0);
    p.add_term({1}, 1.0);
    p.add_term({2}, 0.5);
    auto red = quadratize_full(p);
    auto [q, off] = to_qubo(red.qubo_poly, red.num_variables());
    SamplerRequest req;
    req.model = q;
    req.reads = 50;
    req.seed = 2;
    req.schedule = AnnealSchedule::forward(q.num_variables(), 20.0);
    std::vector<int> aux_ids;
    req.auxiliary.assign(q.num_variables(), false);
    for (const auto& a : red.alloc.aux_vars) {
        aux_ids.push_back(a.id);
        req.auxiliary[a.id] = true;
    }
    auto s = heuristic_anneal(req);
    CHECK(s.lowest().energy + off == doctest::Approx(brute_force(p, 3).min_energy));
    AuxMinimizer am(red.qubo_poly, aux_ids);
    for (const auto& r : s.records) {
        BinaryState x = r.state;
        am.minimize(x);
        CHECK(x == r.state);
    }
    SamplerRequest bad = req;
    bad.auxiliary.pop_back();
    CHECK_THROWS_AS(heuristic_anneal(bad), std::invalid_argument);
}

TEST_CASE("sequential greedy on the two-group cycle problems") {
    const std::vector<std::vector<int>> gs = {{0}, {1}};
    auto one = sequential_greedy(PolynomialModel(h_s(), 2), gs, zeros(2), 1);
    CHECK(one == BinaryState({0, 1}));
    CHECK(evaluate(h_s(), one) == -1.0);
    auto two = sequential_greedy(PolynomialModel(h_s(), 2), gs, zeros(2), 2);
    CHECK(two == BinaryState({1, 1}));
    CHECK(evaluate(h_s(), two) == brute_force(h_s(), 2).min_energy);

    const std::vector<std::vector<int>> gc = {{0, 2}, {1, 3}};
    const double cmin = brute_force(h_c(), 4).min_energy;
    auto c1 = sequential_greedy(PolynomialModel(h_c(), 4), gc, zeros(4), 1);
    CHECK(evaluate(h_c(), c1) > cmin);
    auto c2 = sequential_greedy(PolynomialModel(h_c(), 4), gc, zeros(4), 2);
    CHECK(evaluate(h_c(), c2) == cmin);
    CHECK(c1 == BinaryState({0, 1, 0, 0}));
    CHECK(c2 == BinaryState({1, 1, 0, 1}));

    GreedyOptions keep;
    keep.perturbative_tie_break = false;
    CHECK(sequential_greedy(PolynomialModel(h_c(), 4), gc, zeros(4), 2, {}, keep) == zeros(4));
    CHECK(sequential_greedy(PolynomialModel(h_s(), 2), gs, zeros(2), 2, {}, keep) == BinaryState({1, 1}));

    for (const auto& [p, n] : {std::pair{h_s(), 2}, std::pair{h_c(), 4}}) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        auto x = sequential_greedy(PolynomialModel(p, n), {all}, zeros(n), 1);
        CHECK(evaluate(p, x) == brute_force(p, n).min_energy);
    }
}

TEST_CASE("greedy engine follows the schedule") {
    SamplerRequest req;
    req.model = PolynomialModel(h_s(), 2);
    req.reads = 3;
    req.initial_state = zeros(2);
    req.schedule = AnnealSchedule::sequential_groups({0, 1}, 20.0, 1, 0.0, true);
    auto s1 = greedy_anneal(req);
    REQUIRE(s1.records.size() == 1);
    CHECK(s1.records[0].state == BinaryState({0, 1}));
    CHECK(s1.records[0].occurrences == 3);
    req.schedule = AnnealSchedule::sequential_groups({0, 1}, 40.0, 2, 0.0, true);
    CHECK(greedy_anneal(req).lowest().state == BinaryState({1, 1}));
}
