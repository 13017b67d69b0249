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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qadp/anneal.hpp"
#include "qadp/bqm.hpp"
#include "qadp/quadratize.hpp"
#include "qadp/rbc.hpp"

using namespace qadp;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Polynomial x(int i) { return Polynomial::variable(i); }

Verdict ising_energies() {
    IsingModel m(2);
    m.add_bias(0, 0.5);
    m.add_bias(1, -0.3);
    m.add_coupling(0, 1, -0.8);
    const std::vector<std::pair<SpinState, double>> expected{{SpinState({-1, -1}), -1.0},
                                                             {SpinState({-1, 1}), 0.0},
                                                             {SpinState({1, -1}), 1.6},
                                                             {SpinState({1, 1}), -0.6}};
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> got;
    for (const auto& [s, e] : expected) got.push_back(ising_energy(m, s));
    const double elapsed = seconds_since(t0);
    bool ok = elapsed < 1e-3;
    for (std::size_t i = 0; i < got.size(); ++i) {
        char printed[32];
        std::snprintf(printed, sizeof printed, "%.1f", got[i]);
        ok = ok && std::stod(printed) == expected[i].second;
    }
    return {ok, fmt("energies (%.1f, %.1f, %.1f, %.1f) in %.1f us", got[0], got[1], got[2], got[3], elapsed * 1e6)};
}

Verdict initial_spectrum() {
    auto [values, ground] = initial_hamiltonian_spectrum(2);
    std::vector<double> v(values.data(), values.data() + values.size());
    std::sort(v.begin(), v.end());
    const std::vector<double> expected{-2.0, 0.0, 0.0, 2.0};
    double dev = 0.0;
    for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(v[i] - expected[i]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(initial_hamiltonian_matrix(2));
    for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(es.eigenvalues()(i) - expected[i]));
    double gdev = 0.0;
    for (int i = 0; i < 4; ++i) {
        gdev = std::max(gdev, std::abs(std::abs(ground(i)) - 0.5));
        gdev = std::max(gdev, std::abs(std::abs(es.eigenvectors()(i, 0)) - 0.5));
    }
    return {dev < 1e-10 && gdev < 1e-10,
            fmt("eigenvalue deviation %.1e, ground amplitude deviation %.1e", dev, gdev)};
}

// Minimum over auxiliaries by direct substitution: auxiliaries that never share a
// monomial are minimized one at a time, otherwise they are enumerated jointly.
double min_over_aux(const Polynomial& q, int n0, int total, std::uint64_t orig) {
    double constant = 0.0;
    std::vector<double> linear(total, 0.0);
    bool coupled = false;
    for (const auto& [vars, c] : q.terms()) {
        bool on = true;
        int aux = -1, aux_count = 0;
        for (int v : vars) {
            if (v < n0) {
                on = on && ((orig >> v) & 1);
            } else {
                aux = v;
                ++aux_count;
            }
        }
        if (!on) continue;
        if (aux_count == 0) constant += c;
        else if (aux_count == 1) linear[aux] += c;
        else coupled = true;
    }
    if (!coupled) {
        double m = constant;
        for (int a = n0; a < total; ++a) m += std::min(0.0, linear[a]);
        return m;
    }
    if (total - n0 > 20) throw std::runtime_error("coupled auxiliaries beyond the enumeration limit");
    double best = 1e300;
    for (std::uint64_t a = 0; a < (std::uint64_t(1) << (total - n0)); ++a)
        best = std::min(best, evaluate(q, BinaryState::from_index(orig | (a << n0), total)));
    return best;
}

Verdict quadratization_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const int terms = 1 + static_cast<int>(rng() % (2 * n));
        Polynomial p;
        for (int t = 0; t < terms; ++t) {
            const int d = 1 + static_cast<int>(rng() % 5);
            VarSet vars;
            for (int k = 0; k < d; ++k) vars.push_back(static_cast<int>(rng() % n));
            p.add_term(vars, coef(rng));
        }
        const auto r = quadratize_full(p, n);
        const int total = std::max(n, r.num_variables());
        bool ok = r.qubo_poly.degree() <= 2;
        for (std::uint64_t i = 0; ok && i < (std::uint64_t(1) << n); ++i) {
            const double e = evaluate(p, BinaryState::from_index(i, n));
            ok = std::abs(min_over_aux(r.qubo_poly, n, total, i) - e) <= 1e-9 * (1.0 + std::abs(e));
        }
        failures += ok ? 0 : 1;
    }

    // x1x2 + x2x3 + x3x4 - 4 x1x2x3 with (x1, x2, x3) = (1, 0, 0) excluded.
    const Polynomial h = x(1) * x(2) + x(2) * x(3) + x(3) * x(4) - 4.0 * x(1) * x(2) * x(3);
    const Polynomial elc = elc_reduce(h, {{1, 2, 3}, {1, 0, 0}});
    const Polynomial elc_printed =
            x(1) * x(2) + x(2) * x(3) + x(3) * x(4) + 4.0 * x(1) - 4.0 * x(1) * x(2) - 4.0 * x(1) * x(3);
    const bool elc_ok = elc == elc_printed && brute_force(h, 5).min_energy == brute_force(elc, 5).min_energy;

    auto square = [](const Polynomial& p) { return p * p; };
    const Polynomial system = square(x(1) + x(2) + x(3) - Polynomial(1.0)) + square(x(1) * x(4) + x(2) * x(5) - x(3)) +
                              square(x(1) + 2.0 * x(2) - x(3) - 2.0 * x(4));
    const std::vector<Deduction> ds{{1, 2, {}}, {2, 3, {}}, {1, 3, {}}};
    const Polynomial naive = naive_deduction_substitution(system, ds);
    const Polynomial naive_printed = -3.0 * x(1) * x(4) - 8.0 * x(2) * x(4) + x(2) * x(5) + 3.0 * x(2) +
                                     4.0 * x(3) * x(4) + x(3) + 4.0 * x(4) + Polynomial(1.0);
    const Polynomial reduced = deduction_reduce(system, ds);
    const bool ded_ok = naive == naive_printed && reduced.degree() <= 2 &&
                        brute_force(system, 6).min_energy == brute_force(reduced, 6).min_energy;
    const double elapsed = seconds_since(t0);
    return {failures == 0 && elc_ok && ded_ok && elapsed < 60.0,
            fmt("%d/100 random failures; excludable-configuration example %s; deduction example %s; %.2f s", failures,
                elc_ok ? "ok" : "MISMATCH", ded_ok ? "ok" : "MISMATCH", elapsed)};
}

bool within_factor_two(const std::array<double, 3>& got, const std::array<double, 3>& ref) {
    for (int i = 0; i < 3; ++i)
        if (!(got[i] >= ref[i] / 2.0 && got[i] <= ref[i] * 2.0)) return false;
    return true;
}

struct Algorithm2Run {
    PpiState state;
    std::array<double, 3> errors{};
    double seconds = 0.0;
};

Algorithm2Run run_algorithm2() {
    const RbcParams p;
    const auto t0 = std::chrono::steady_clock::now();
    Algorithm2Run r;
    r.state = combinatorial_ppi(p, CollocationGrid::build(p), ValuationEncodings{}, default_initial_parameters());
    r.seconds = seconds_since(t0);
    r.errors = percent_errors(r.state.params, true_parameters(p));
    return r;
}

Verdict algorithm2(const Algorithm2Run& r) {
    const std::array<double, 3> ref{0.04, 1.24, 0.14};
    const auto& e = r.errors;
    const bool iterations = r.state.converged_at == 2;
    const bool band = within_factor_two(e, ref);
    const bool order = e[1] > e[2] && e[2] > e[0];
    return {iterations && band && order && r.seconds < 300.0,
            fmt("errors (%.3f, %.3f, %.3f)%% vs (0.04, 1.24, 0.14)%%: band %s, order %s; converged after %d "
                "iterations; %.1f s",
                e[0], e[1], e[2], band ? "ok" : "missed", order ? "ok" : "differs", r.state.converged_at, r.seconds)};
}

Verdict algorithm1() {
    const RbcParams p;
    const auto s = classical_ppi(p, CollocationGrid::build(p), default_initial_parameters());
    const auto e = percent_errors(s.params, true_parameters(p));
    const std::array<double, 3> ref{1.37, 0.77, 3.74};
    const bool band = within_factor_two(e, ref);
    const bool order = e[2] > e[0] && e[0] > e[1];
    return {s.converged_at == 2 && band && order,
            fmt("errors (%.3f, %.3f, %.3f)%% vs (1.37, 0.77, 3.74)%%: band %s, order %s; converged after %d iterations",
                e[0], e[1], e[2], band ? "ok" : "missed", order ? "ok" : "differs", s.converged_at)};
}

Verdict sampler_degeneracy() {
    const RbcParams p;
    const auto grid = CollocationGrid::build(p);
    int mismatches = 0;

    HybridOptions ho;
    ho.reads = 4;
    const auto hybrid = hybrid_ppi(p, grid, ValuationEncodings{}, [](const SamplerRequest& r) { return exact_anneal(r); },
                                   default_initial_parameters(), ho);
    PpiOptions fixed;
    fixed.fixed_iterations = ho.iterations;
    const auto comb = combinatorial_ppi(p, grid, ValuationEncodings{}, default_initial_parameters(), fixed);
    for (int i = 0; i < ho.iterations; ++i) {
        const auto& a = hybrid.history[i].params;
        const auto& b = comb.history[i].params;
        mismatches += (a.x1 != b.x1 || a.x2 != b.x2 || a.x3 != b.x3) ? 1 : 0;
    }

    const auto m = build_merged_problem(p, grid);
    const Sampler greedy = [](const SamplerRequest& r) { return greedy_anneal(r); };
    const ValuationEncodings menc{m.x2, m.x3};
    auto same_valuation = [&](const Params3& d) {
        const auto v = valuation_argmin(LogValues::approx(d.x1, m.coeffs), menc, grid, p);
        return std::abs(d.x2 - v.x2) <= 1e-12 * std::abs(v.x2) && std::abs(d.x3 - v.x3) <= 1e-12 * std::abs(v.x3);
    };

    MultiAnnealOptions mo;
    mo.reads = 3;
    const auto multi = multi_anneal_ppi(m, greedy, default_initial_parameters(), mo);
    Params3 prev = m.decode(m.encode(default_initial_parameters())).params;
    for (const auto& rec : multi.history) {
        double best = 1e300, x1 = 0.0;
        for (std::uint64_t i = 0; i <= m.x1.max_integer(); ++i) {
            const double v = gp_loss(m.x1.value_at(i), prev.x3, m.coeffs, p);
            if (v < best) best = v, x1 = m.x1.value_at(i);
        }
        mismatches += (rec.params.x1 != x1 || !same_valuation(rec.params)) ? 1 : 0;
        prev = rec.params;
    }

    OneShotOptions oo;
    oo.reads = 6;
    oo.cycles = 2;
    const auto one = one_shot_ppi(m, greedy, oo);
    for (const auto& read : one.reads) mismatches += same_valuation(m.decode(read).params) ? 0 : 1;

    return {mismatches == 0, fmt("%d mismatches over %d hybrid iterations, %d multi-anneal reads and %d one-shot reads "
                                 "(merged bit counts %d/%d/%d)",
                                 mismatches, ho.iterations, mo.reads, oo.reads, m.x1.bit_count, m.x2.bit_count,
                                 m.x3.bit_count)};
}

struct GroupedProblem {
    const char* name;
    Polynomial poly;
    int n;
    std::vector<int> groups;
};

Verdict cycle_properties() {
    const std::vector<GroupedProblem> problems{
            {"stepwise", x(0) - x(1) - 2.0 * x(0) * x(1), 2, {0, 1}},
            {"coupled", x(2) * (Polynomial(2.0) + x(0) - 2.0 * x(0) * x(1)) + x(3) * (Polynomial(2.0) - x(1) - 2.0 * x(0) * x(1)),
             4, {0, 1, 0, 1}}};
    bool ok = true;
    std::string detail;
    for (const auto& pr : problems) {
        const double ground = brute_force(pr.poly, pr.n).min_energy;
        auto request = [&](int cycles) {
            SamplerRequest req;
            req.model = PolynomialModel(pr.poly, pr.n);
            req.reads = 1000;
            req.seed = 7;
            req.schedule = AnnealSchedule::sequential_groups(pr.groups, 20.0 * cycles, cycles, 0.0, true);
            req.initial_state = BinaryState::zeros(pr.n);
            return req;
        };
        const double g1 = evaluate(pr.poly, greedy_anneal(request(1)).lowest().state);
        const double g2 = evaluate(pr.poly, greedy_anneal(request(2)).lowest().state);
        const bool greedy_ok = g1 > ground && g2 == ground && (pr.n != 2 || g1 == -1.0);
        auto share = [&](int cycles, bool reset) {
            StatevectorOptions so;
            so.reset_on_full_reversal = reset;
            const auto s = schrodinger_anneal(request(cycles), so);
            int hits = 0;
            for (const auto& r : s.records)
                if (r.energy == ground) hits += r.occurrences;
            return hits / 1000.0;
        };
        const double r1 = share(1, true), r2 = share(2, true);
        const double c1 = share(1, false), c2 = share(2, false);
        ok = ok && greedy_ok && r2 > r1;
        detail += fmt("%s: greedy C=1 %g, C=2 %g (ground %g); statevector ground share C=1 %.3f, C=2 %.3f "
                      "[closed system without reset: %.3f, %.3f]; ",
                      pr.name, g1, g2, ground, r1, r2, c1, c2);
    }
    detail.resize(detail.size() - 2);
    return {ok, detail};
}

Verdict adiabatic_limit() {
    IsingModel m(2);
    m.add_bias(0, 0.5);
    m.add_bias(1, -0.3);
    m.add_coupling(0, 1, -0.8);
    // Ground state (-1, -1) is binary index 0.
    std::vector<double> probs;
    for (double t : {25.0, 50.0, 100.0, 200.0}) {
        SamplerRequest req;
        req.model = m;
        req.schedule = AnnealSchedule::forward(2, t);
        probs.push_back(evolve(req, initial_state_vector(req)).state.probabilities()(0));
    }
    bool ok = probs.back() >= 0.99;
    for (std::size_t i = 1; i < probs.size(); ++i) ok = ok && probs[i] >= probs[i - 1];
    return {ok, fmt("ground probability %.4f, %.4f, %.4f, %.4f at T = 25, 50, 100, 200 us", probs[0], probs[1], probs[2],
                    probs[3])};
}

Verdict post_processing() {
    const RbcParams p;
    const auto truth = true_parameters(p);
    const auto m = build_merged_problem(p, CollocationGrid::build(p));
    HeuristicOptions base;
    base.sweeps = 300;
    base.cold_ratio = 1e-8;
    const HeuristicOptions h = merged_heuristic_options(m, base);
    OneShotOptions o;
    o.reads = 200;
    o.seed = 0;
    const auto r = one_shot_ppi(m, [&](const SamplerRequest& req) { return heuristic_anneal(req, h); }, o, truth);
    std::array<double, 3> adj{}, unadj{};
    const std::array<double, 3> t{truth.x1, truth.x2, truth.x3};
    for (int i = 0; i < 3; ++i) {
        std::vector<double> err, a, u;
        for (const auto& out : r.report.outcomes) {
            const std::array<double, 3> v{out.params.x1, out.params.x2, out.params.x3};
            err.push_back(std::abs(v[i] - t[i]));
            a.push_back(out.adjusted_loss[i]);
            u.push_back(out.unadjusted_loss);
        }
        adj[i] = spearman(a, err);
        unadj[i] = spearman(u, err);
    }
    const bool ok = adj[0] >= 0.8 && adj[1] >= 0.8 && adj[2] >= 0.8 && adj[0] > unadj[0] && adj[2] > unadj[2];
    return {ok, fmt("rank correlation adjusted (%.3f, %.3f, %.3f), unadjusted (%.3f, %.3f, %.3f) over %zu reads", adj[0],
                    adj[1], adj[2], unadj[0], unadj[1], unadj[2], r.report.outcomes.size())};
}

Verdict consumption(const Algorithm2Run& a2) {
    const RbcParams p;
    const auto path = simulate_consumption(a2.state.params.x1, p);
    const auto worst = std::max_element(path.gap.begin(), path.gap.end()) - path.gap.begin();
    const bool ok = path.gap.size() == 10 && path.gap[worst] < 0.02 && worst == 0;
    return {ok, fmt("max gap %.4f%% in period %d of %zu", 100.0 * path.gap[worst], static_cast<int>(worst) + 1,
                    path.gap.size())};
}

Verdict timing_arithmetic() {
    const double base = timing_report(100, 20.0).total;
    bool ok = base == 23000.0;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> reads(1, 10000);
    std::uniform_real_distribution<double> anneal(5.0, 2000.0);
    const TimingConfig cfg;
    for (int i = 0; i < 20; ++i) {
        const int r = reads(rng);
        const double ta = anneal(rng);
        const auto rep = timing_report(r, ta);
        ok = ok && rep.total == cfg.t_program + r * (ta + cfg.t_readout);
    }
    return {ok, fmt("timing_report(100, 20) = %.0f us; identity checked on 20 random pairs", base)};
}

}  // namespace

int main() {
    const Algorithm2Run a2 = run_algorithm2();
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
            {"two-spin Ising energies", ising_energies},
            {"transverse-field spectrum for N=2", initial_spectrum},
            {"quadratization oracle suite", quadratization_suite},
            {"combinatorial iteration at full widths", [&] { return algorithm2(a2); }},
            {"classical iteration", algorithm1},
            {"sampler-degeneracy equivalence", sampler_degeneracy},
            {"two-group cycle properties", cycle_properties},
            {"adiabatic limit", adiabatic_limit},
            {"post-processing rank correlation", post_processing},
            {"consumption path", [&] { return consumption(a2); }},
            {"timing-model arithmetic", timing_arithmetic},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
