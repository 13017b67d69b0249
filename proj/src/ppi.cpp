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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "qadp/errors.hpp"
#include "qadp/rbc.hpp"

namespace qadp {

namespace {

double max_relative_change(const Params3& a, const Params3& b) {
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-12); };
    return std::max({rel(a.x1, b.x1), rel(a.x2, b.x2), rel(a.x3, b.x3)});
}

void check_init(const Params3& init) {
    if (!(init.x1 > 0.0 && init.x1 < 1.0)) throw std::invalid_argument("initial x1 must lie in (0, 1)");
    if (!std::isfinite(init.x2) || !std::isfinite(init.x3)) throw std::invalid_argument("initial parameters must be finite");
}

double elapsed_us(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - since).count();
}

// Shared iteration driver; step maps the previous parameters to the next
// iterate and fills its record.
template <class Step>
PpiState iterate(const Params3& init, const PpiOptions& options, Step step) {
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
    if (options.fixed_iterations < 0) throw std::invalid_argument("fixed_iterations must be nonnegative");
    PpiState state;
    state.params = init;
    const int limit = options.fixed_iterations > 0 ? options.fixed_iterations : options.max_iter;
    std::vector<Params3> iterates{init};
    const auto t0 = std::chrono::steady_clock::now();
    for (int it = 1; it <= limit; ++it) {
        IterationRecord rec = step(iterates.back());
        rec.iteration = it;
        rec.wall_us = elapsed_us(t0);
        state.iteration = it;
        state.loss_history.push_back(rec.loss);
        state.history.push_back(rec);
        iterates.push_back(rec.params);
        if (state.converged_at == 0 && it > 1 && max_relative_change(rec.params, iterates[it - 1]) < options.tol) {
            state.converged_at = it - 1;
            if (options.fixed_iterations == 0) break;
        }
    }
    if (options.fixed_iterations == 0) {
        if (state.converged_at == 0) {
            if (options.throw_on_divergence) {
                throw ConvergenceError("no convergence after " + std::to_string(limit) + " iterations");
            }
            state.params = iterates.back();
        } else {
            state.params = iterates[state.converged_at];
        }
    } else {
        state.params = iterates.back();
    }
    return state;
}

std::size_t keep_count(std::size_t n, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("keep fraction must lie in (0, 1]");
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

// Indices of the k smallest values, ties in index order.
std::vector<std::size_t> lowest(const std::vector<double>& v, std::size_t k) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    idx.resize(k);
    return idx;
}

double merged_gp(const MergedProblem& m, double x1, double x3) { return gp_loss(x1, x3, m.coeffs, m.params); }

double merged_gv(const MergedProblem& m, double x1, double x2, double x3) {
    return gv_loss(LogValues::approx(x1, m.coeffs), x2, x3, m.grid, m.params);
}

}  // namespace

Params3 default_initial_parameters() { return {0.5, -0.5, 0.5}; }

PpiState classical_ppi(const RbcParams& params, const CollocationGrid& grid, const Params3& init,
                       const PpiOptions& options) {
    params.validate();
    check_init(init);
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
    const double ab = params.alpha_beta();
    return iterate(init, options, [&](const Params3& prev) {
        IterationRecord rec;
        const double x1 = analytic_policy_update(prev.x3, params);
        const LogValues logs = LogValues::exact(x1);
        // r_n = a_n - (1 - beta) x2 + w_n x3 in least squares.
        Eigen::MatrixXd design(grid.size(), 2);
        Eigen::VectorXd target(grid.size());
        for (int i = 0; i < grid.size(); ++i) {
            const auto& n = grid.nodes[i];
            const double zeta = params.beta * n.e_ln_z_next + (ab - 1.0) * n.ln_y;
            design(i, 0) = -(1.0 - params.beta);
            design(i, 1) = zeta + ab * logs.ln_x1;
            target(i) = -(n.ln_y + logs.ln_1mx1);
        }
        const Eigen::Vector2d sol = design.colPivHouseholderQr().solve(target);
        rec.params = {x1, sol(0), sol(1)};
        rec.loss = gv_loss(logs, sol(0), sol(1), grid, params);
        return rec;
    });
}

ValuationResult valuation_argmin(const LogValues& logs, const ValuationEncodings& enc, const CollocationGrid& grid,
                                 const RbcParams& params) {
    const int bits = enc.x2.bit_count + enc.x3.bit_count;
    if (bits > 26) throw CapacityError("valuation search over " + std::to_string(bits) + " bits exceeds enumeration guard");
    const GammaConstants g = gamma_constants(logs, grid, params);
    ValuationResult best;
    std::uint64_t b2 = 0, b3 = 0;
    bool first = true;
    for (std::uint64_t i = 0; i <= enc.x2.max_integer(); ++i) {
        const double x2 = enc.x2.value_at(i);
        for (std::uint64_t j = 0; j <= enc.x3.max_integer(); ++j) {
            const double x3 = enc.x3.value_at(j);
            const double v = g.value(x2, x3);
            if (first || v < best.loss) {
                first = false;
                best.loss = v;
                best.x2 = x2;
                best.x3 = x3;
                b2 = i;
                b3 = j;
            }
        }
    }
    best.bits = BinaryState::zeros(std::max(enc.x2.end(), enc.x3.end()));
    write_bits(enc.x2, b2, best.bits);
    write_bits(enc.x3, b3, best.bits);
    return best;
}

PpiState combinatorial_ppi(const RbcParams& params, const CollocationGrid& grid, const ValuationEncodings& enc,
                           const Params3& init, const PpiOptions& options) {
    params.validate();
    check_init(init);
    return iterate(init, options, [&](const Params3& prev) {
        IterationRecord rec;
        const double x1 = analytic_policy_update(prev.x3, params);
        const auto v = valuation_argmin(LogValues::exact(x1), enc, grid, params);
        rec.params = {x1, v.x2, v.x3};
        rec.loss = v.loss;
        return rec;
    });
}

PpiState hybrid_ppi(const RbcParams& params, const CollocationGrid& grid, const ValuationEncodings& enc,
                    const Sampler& sampler, const Params3& init, const HybridOptions& options) {
    params.validate();
    check_init(init);
    if (!sampler) throw std::invalid_argument("sampler is required");
    if (options.reads < 1) throw std::invalid_argument("reads must be positive");
    if (options.iterations < 1) throw std::invalid_argument("iterations must be positive");
    const std::size_t keep = keep_count(options.reads, options.keep_fraction);
    const int n = std::max(enc.x2.end(), enc.x3.end());
    PpiOptions po;
    po.fixed_iterations = options.iterations;
    int it = 0;
    double qpu = 0.0;
    return iterate(init, po, [&](const Params3& prev) {
        IterationRecord rec;
        const double x1 = analytic_policy_update(prev.x3, params);
        const LogValues logs = LogValues::exact(x1);
        const GvPbo pbo = build_gv_pbo(logs, enc.x2, enc.x3, grid, params);
        SamplerRequest req;
        req.model = to_qubo(pbo.poly, n).first;
        req.reads = options.reads;
        req.schedule = AnnealSchedule::forward(n, options.anneal_time);
        req.seed = options.seed + static_cast<std::uint64_t>(it++);
        req.timing = options.timing;
        const SampleSet set = sampler(req);
        if (set.reads.size() != static_cast<std::size_t>(options.reads)) {
            throw std::runtime_error("sampler returned " + std::to_string(set.reads.size()) + " reads");
        }
        std::vector<double> energy;
        for (const auto& r : set.reads) energy.push_back(evaluate(pbo.poly, r));
        double x2 = 0.0, x3 = 0.0;
        for (std::size_t i : lowest(energy, keep)) {
            x2 += decode_from(enc.x2, set.reads[i]);
            x3 += decode_from(enc.x3, set.reads[i]);
        }
        x2 /= static_cast<double>(keep);
        x3 /= static_cast<double>(keep);
        rec.params = {x1, x2, x3};
        rec.loss = gv_loss(logs, x2, x3, grid, params);
        qpu += set.timing ? set.timing->total : timing_report(options.reads, options.anneal_time, options.timing).total;
        rec.qpu_us = qpu;
        return rec;
    });
}

PpiState multi_anneal_ppi(const MergedProblem& problem, const Sampler& sampler, const Params3& init,
                          const MultiAnnealOptions& options) {
    check_init(init);
    if (!sampler) throw std::invalid_argument("sampler is required");
    if (options.reads < 1) throw std::invalid_argument("reads must be positive");
    const int n = problem.num_original();
    SamplerRequest req;
    req.model = PolynomialModel(problem.merged, n);
    req.reads = options.reads;
    req.schedule = AnnealSchedule::sequential_groups(problem.variable_groups(false), options.anneal_time, 1,
                                                     options.reversal_target, false);
    req.initial_state = problem.encode(init);
    req.seed = options.seed;
    req.timing = options.timing;
    const auto t0 = std::chrono::steady_clock::now();
    const SampleSet set = sampler(req);
    const double wall = elapsed_us(t0);
    if (set.reads.size() != static_cast<std::size_t>(options.reads)) {
        throw std::runtime_error("sampler returned " + std::to_string(set.reads.size()) + " reads");
    }
    const TimingReport timing = timing_report(options.reads, options.anneal_time, options.timing);

    PpiState state;
    std::vector<double> gp, gv;
    std::vector<Params3> decoded;
    for (std::size_t r = 0; r < set.reads.size(); ++r) {
        const DecodedRead d = problem.decode(set.reads[r]);
        decoded.push_back(d.params);
        gp.push_back(evaluate(problem.g_p, set.reads[r]));
        gv.push_back(evaluate(problem.g_v, set.reads[r]));
        IterationRecord rec;
        rec.iteration = static_cast<int>(r) + 1;
        rec.params = d.params;
        rec.loss = gp.back() + gv.back();
        rec.qpu_us = timing.t_program + static_cast<double>(r + 1) * (timing.t_anneal + timing.t_readout);
        rec.wall_us = wall * static_cast<double>(r + 1) / static_cast<double>(options.reads);
        state.history.push_back(rec);
        state.loss_history.push_back(rec.loss);
    }
    const std::size_t ip = lowest(gp, 1).front();
    // Valuation losses are compared at the selected policy parameter.
    std::vector<double> gv_at;
    for (const auto& d : decoded) gv_at.push_back(merged_gv(problem, decoded[ip].x1, d.x2, d.x3));
    const std::size_t iv = lowest(gv_at, 1).front();
    state.params = {decoded[ip].x1, decoded[iv].x2, decoded[iv].x3};
    state.iteration = options.reads;
    int stable_from = options.reads;
    while (stable_from > 1 && max_relative_change(decoded[stable_from - 2], decoded[options.reads - 1]) == 0.0) {
        --stable_from;
    }
    state.converged_at = stable_from < options.reads ? stable_from : 0;
    return state;
}

LossReport losses(const std::vector<Params3>& reads, const MergedProblem& problem, double keep_fraction,
                  const std::optional<Params3>& truth) {
    if (reads.empty()) throw std::invalid_argument("no reads to score");
    const std::size_t keep = keep_count(reads.size(), keep_fraction);
    LossReport report;
    std::vector<double> unadjusted;
    for (const auto& p : reads) {
        AnnealOutcome o;
        o.params = p;
        o.unadjusted_loss = merged_gp(problem, p.x1, p.x3) + merged_gv(problem, p.x1, p.x2, p.x3);
        unadjusted.push_back(o.unadjusted_loss);
        report.outcomes.push_back(o);
    }
    Params3 ref;
    for (std::size_t i : lowest(unadjusted, keep)) {
        ref.x1 += reads[i].x1;
        ref.x2 += reads[i].x2;
        ref.x3 += reads[i].x3;
    }
    ref.x1 /= static_cast<double>(keep);
    ref.x2 /= static_cast<double>(keep);
    ref.x3 /= static_cast<double>(keep);
    report.reference_mean = ref;

    auto component = [&](const Params3& p, const Params3& others) -> std::array<double, 3> {
        return {merged_gp(problem, p.x1, others.x3), merged_gv(problem, others.x1, p.x2, others.x3),
                merged_gv(problem, others.x1, others.x2, p.x3)};
    };
    std::array<std::vector<double>, 3> adjusted;
    for (auto& o : report.outcomes) {
        o.adjusted_loss = component(o.params, ref);
        if (truth) o.minimum_loss = component(o.params, *truth);
        for (int j = 0; j < 3; ++j) adjusted[j].push_back(o.adjusted_loss[j]);
    }
    std::array<double, 3> est{};
    for (int j = 0; j < 3; ++j) {
        for (std::size_t i : lowest(adjusted[j], keep)) {
            est[j] += j == 0 ? reads[i].x1 : j == 1 ? reads[i].x2 : reads[i].x3;
        }
        est[j] /= static_cast<double>(keep);
    }
    report.estimate = {est[0], est[1], est[2]};
    return report;
}

OneShotResult one_shot_ppi(const MergedProblem& problem, const Sampler& sampler, const OneShotOptions& options,
                           const std::optional<Params3>& truth) {
    if (!sampler) throw std::invalid_argument("sampler is required");
    if (options.reads < 1) throw std::invalid_argument("reads must be positive");
    if (options.cycles < 1) throw std::invalid_argument("cycles must be at least 1");
    const int n = problem.num_original();
    SamplerRequest req;
    req.model = PolynomialModel(problem.merged, n);
    req.reads = options.reads;
    req.schedule = AnnealSchedule::sequential_groups(problem.variable_groups(false), options.anneal_time,
                                                     options.cycles, options.reversal_target, true);
    req.seed = options.seed;
    req.timing = options.timing;
    std::mt19937_64 rng(options.seed);
    std::bernoulli_distribution coin(0.5);
    for (int r = 0; r < options.reads; ++r) {
        BinaryState s = BinaryState::zeros(n);
        for (int v = 0; v < n; ++v) {
            if (v != problem.x_p && v != problem.x_v) s.set(v, coin(rng) ? 1 : 0);
        }
        req.read_initial_states.push_back(std::move(s));
    }
    const auto t0 = std::chrono::steady_clock::now();
    SampleSet set = sampler(req);
    const double wall = elapsed_us(t0);
    if (set.reads.size() != static_cast<std::size_t>(options.reads)) {
        throw std::runtime_error("sampler returned " + std::to_string(set.reads.size()) + " reads");
    }
    OneShotResult out;
    std::vector<Params3> decoded;
    for (const auto& r : set.reads) decoded.push_back(problem.decode(r).params);
    out.report = losses(decoded, problem, options.keep_fraction, truth);
    out.reads = std::move(set.reads);
    IterationRecord rec;
    rec.iteration = 1;
    rec.params = out.report.estimate;
    rec.loss = merged_gp(problem, rec.params.x1, rec.params.x3) +
               merged_gv(problem, rec.params.x1, rec.params.x2, rec.params.x3);
    rec.qpu_us = timing_report(options.reads, options.anneal_time, options.timing).total;
    rec.wall_us = wall;
    out.state.params = rec.params;
    out.state.iteration = 1;
    out.state.converged_at = 1;
    out.state.loss_history.push_back(rec.loss);
    out.state.history.push_back(rec);
    return out;
}

HeuristicOptions merged_heuristic_options(const MergedProblem& problem, const HeuristicOptions& base) {
    HeuristicOptions o = base;
    const int n = problem.num_original();
    const auto groups = problem.variable_groups(false);
    o.temperature_scale.assign(n, 0.0);
    for (const auto& [vars, c] : problem.merged.terms()) {
        const bool policy = std::binary_search(vars.begin(), vars.end(), problem.x_p);
        for (int v : vars) {
            if ((groups[v] == 0) == policy) o.temperature_scale[v] += std::abs(c);
        }
    }
    return o;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman inputs differ in length");
    if (a.size() < 2) throw std::invalid_argument("spearman needs at least two points");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r(static_cast<Eigen::Index>(idx[k])) = avg;
            i = j + 1;
        }
        return r;
    };
    Eigen::VectorXd ra = ranks(a), rb = ranks(b);
    ra.array() -= ra.mean();
    rb.array() -= rb.mean();
    const double den = ra.norm() * rb.norm();
    if (den == 0.0) throw std::invalid_argument("spearman undefined for constant input");
    return ra.dot(rb) / den;
}

ConsumptionPath simulate_consumption(double x1_hat, const RbcParams& params, const ShockScenario& scenario) {
    params.validate();
    if (!(x1_hat > 0.0 && x1_hat < 1.0)) throw std::invalid_argument("x1 must lie in (0, 1)");
    if (scenario.periods < 1) throw std::invalid_argument("periods must be positive");
    if (scenario.shock_z_index < 0 || scenario.shock_z_index >= params.z_count()) {
        throw std::out_of_range("shock z index out of range");
    }
    if (!(scenario.k0_factor > 0.0)) throw std::invalid_argument("k0_factor must be positive");
    const double ab = params.alpha_beta();
    const Eigen::Map<const Eigen::VectorXd> zg(params.z_grid.data(), params.z_count());
    Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(params.z_count());
    dist(scenario.shock_z_index) = 1.0;
    ConsumptionPath path;
    double kt = scenario.k0_factor * steady_state_capital(params);
    double kh = kt;
    for (int t = 0; t < scenario.periods; ++t) {
        const double z = dist.dot(zg);
        const double yt = z * std::pow(kt, params.alpha);
        const double yh = z * std::pow(kh, params.alpha);
        path.z.push_back(z);
        path.k_true.push_back(kt);
        path.k_hat.push_back(kh);
        path.c_true.push_back((1.0 - ab) * yt);
        path.c_hat.push_back((1.0 - x1_hat) * yh);
        path.gap.push_back(std::abs(path.c_hat.back() - path.c_true.back()) / path.c_true.back());
        kt = ab * yt;
        kh = x1_hat * yh;
        dist = dist * params.transition;
    }
    return path;
}

}  // namespace qadp
