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

#include "cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "plot.hpp"
#include "qadp/anneal.hpp"
#include "qadp/errors.hpp"
#include "qadp/quadratize.hpp"
#include "qadp/rbc.hpp"

namespace qadp::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalSettings {
    std::string config;
    std::uint64_t seed = 0;
    std::string out_dir = "qadp-out";
    std::optional<std::string> engine;
};

struct SolveSettings {
    std::string algorithm = "combinatorial";
    std::optional<int> j1, j2, j3;
    std::optional<double> s2, s3;
    std::optional<int> reads;
    int cycles = 3;
    double reversal = 0.0;
    std::optional<double> anneal_time;
    double keep = 0.1;
    int k_count = 133;
    int executions = 1;
    int iterations = 2;
    int max_iter = 10;
    double tol = 1e-3;
    bool init_true = false;
    std::optional<std::string> init;
    int sweeps = 300;
    double cold_ratio = 1e-8;
    double t_program = 9000.0;
    double t_readout = 120.0;
    std::string export_qubo;
};

struct QuadratizeSettings {
    std::string input;
    std::string method = "full";
    std::string output;
    std::optional<std::string> pair;
    std::optional<double> gamma;
    std::optional<std::string> exclude;
    std::vector<std::string> deduce;
    bool verify = false;
};

struct CycleSettings {
    std::string cycles = "1,2";
    int reads = 1000;
    double cycle_time = 20.0;
    double reversal = 0.0;
    bool reversal_reset = false;
};

struct SimulateSettings {
    std::optional<double> x1;
    std::string from;
    int periods = 10;
    int shock_z = 0;
    double k0_factor = 1.0;
};

struct BenchSettings {
    std::string algorithms = "classical,combinatorial,hybrid,multi-anneal,one-shot";
};

const std::vector<std::string> kAlgorithms{"classical", "combinatorial", "hybrid", "multi-anneal", "one-shot"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

int to_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument(what + ": '" + s + "' is not an integer");
    return v;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument(what + ": '" + s + "' is not a number");
    return v;
}

std::vector<int> to_ints(const std::string& s, const std::string& what) {
    std::vector<int> v;
    for (const auto& part : split(s, ',')) v.push_back(to_int(part, what));
    return v;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    return f;
}

void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    for (const auto& [key, value] : read_config(in)) {
        if (key == "config") throw std::invalid_argument("config files cannot name another config file");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr) throw std::invalid_argument("unknown config key '" + key + "'");
        if (opt->count() > 0) continue;
        opt->clear();
        opt->add_result(value);
        opt->run_callback();
    }
}

Sampler make_sampler(const std::string& engine, const HeuristicOptions& heuristic,
                     const StatevectorOptions& statevector = {}) {
    if (engine == "heuristic") return [heuristic](const SamplerRequest& r) { return heuristic_anneal(r, heuristic); };
    if (engine == "greedy") return [](const SamplerRequest& r) { return greedy_anneal(r); };
    if (engine == "statevector")
        return [statevector](const SamplerRequest& r) { return schrodinger_anneal(r, statevector); };
    if (engine == "exact") return [](const SamplerRequest& r) { return exact_anneal(r); };
    throw std::invalid_argument("unknown engine '" + engine + "'");
}

bool uses_merged(const std::string& algorithm) { return algorithm == "multi-anneal" || algorithm == "one-shot"; }

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---- solve --------------------------------------------------------------

struct SolveContext {
    RbcParams params;
    Params3 truth;
    CollocationGrid grid;
    Params3 init;
    ValuationEncodings enc;
    std::optional<MergedProblem> merged;
    Sampler sampler;
    TimingConfig timing;
};

void validate(const SolveSettings& s) {
    auto positive = [](int v, const char* name) {
        if (v < 1) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), s.algorithm) == kAlgorithms.end())
        throw std::invalid_argument("algorithm: unknown value '" + s.algorithm + "'");
    if (s.reads) positive(*s.reads, "reads");
    positive(s.cycles, "cycles");
    positive(s.k_count, "k-count");
    positive(s.executions, "executions");
    positive(s.iterations, "iterations");
    positive(s.max_iter, "max-iter");
    positive(s.sweeps, "sweeps");
    for (const auto& j : {s.j1, s.j2, s.j3})
        if (j && (*j < 1 || *j > 16)) throw std::invalid_argument("encoding widths must lie in [1, 16]");
    if (!(s.keep > 0.0 && s.keep <= 1.0)) throw std::invalid_argument("keep-fraction must lie in (0, 1]");
    if (!(s.reversal >= 0.0 && s.reversal < 1.0)) throw std::invalid_argument("reversal must lie in [0, 1)");
    if (s.anneal_time && !(*s.anneal_time > 0.0)) throw std::invalid_argument("anneal-time must be positive");
    if (!(s.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (!(s.cold_ratio > 0.0 && s.cold_ratio < 1.0)) throw std::invalid_argument("cold-ratio must lie in (0, 1)");
    if (s.t_program < 0.0 || s.t_readout < 0.0) throw std::invalid_argument("timing overrides must be nonnegative");
    if (s.init_true && s.init) throw std::invalid_argument("init and init-true are mutually exclusive");
}

SolveContext prepare(const SolveSettings& s, const std::string& engine, bool need_merged) {
    SolveContext ctx;
    ctx.truth = true_parameters(ctx.params);
    ctx.grid = CollocationGrid::build(ctx.params, s.k_count);
    ctx.init = default_initial_parameters();
    if (s.init_true) ctx.init = ctx.truth;
    if (s.init) {
        const auto parts = split(*s.init, ',');
        if (parts.size() != 3) throw std::invalid_argument("init: expected x1,x2,x3");
        ctx.init = {to_double(parts[0], "init"), to_double(parts[1], "init"), to_double(parts[2], "init")};
    }
    const int j2 = s.j2.value_or(ctx.enc.x2.bit_count);
    const int j3 = s.j3.value_or(ctx.enc.x3.bit_count);
    ctx.enc.x2 = BinaryEncoding(0, j2, s.s2.value_or(ctx.enc.x2.scale));
    ctx.enc.x3 = BinaryEncoding(j2, j3, s.s3.value_or(ctx.enc.x3.scale));
    ctx.timing.t_program = s.t_program;
    ctx.timing.t_readout = s.t_readout;

    HeuristicOptions heuristic;
    heuristic.sweeps = s.sweeps;
    heuristic.cold_ratio = s.cold_ratio;
    if (need_merged) {
        MergedOptions mo;
        if (s.j1) mo.j1 = *s.j1;
        if (s.j2) mo.j2 = *s.j2;
        if (s.j3) mo.j3 = *s.j3;
        if (s.s2) mo.s2 = *s.s2;
        if (s.s3) mo.s3 = *s.s3;
        ctx.merged = build_merged_problem(ctx.params, ctx.grid, mo);
        if (engine == "heuristic") heuristic = merged_heuristic_options(*ctx.merged, heuristic);
    }
    ctx.sampler = make_sampler(engine, heuristic);
    return ctx;
}

PpiState run_algorithm(const SolveContext& ctx, const SolveSettings& s, const std::string& algorithm,
                       std::uint64_t seed) {
    PpiOptions po;
    po.max_iter = s.max_iter;
    po.tol = s.tol;
    if (algorithm == "classical") return classical_ppi(ctx.params, ctx.grid, ctx.init, po);
    if (algorithm == "combinatorial") return combinatorial_ppi(ctx.params, ctx.grid, ctx.enc, ctx.init, po);
    if (algorithm == "hybrid") {
        HybridOptions o;
        o.reads = s.reads.value_or(o.reads);
        o.keep_fraction = s.keep;
        o.anneal_time = s.anneal_time.value_or(o.anneal_time);
        o.iterations = s.iterations;
        o.seed = seed;
        o.timing = ctx.timing;
        return hybrid_ppi(ctx.params, ctx.grid, ctx.enc, ctx.sampler, ctx.init, o);
    }
    if (algorithm == "multi-anneal") {
        MultiAnnealOptions o;
        o.reads = s.reads.value_or(o.reads);
        o.anneal_time = s.anneal_time.value_or(o.anneal_time);
        o.reversal_target = s.reversal;
        o.seed = seed;
        o.timing = ctx.timing;
        return multi_anneal_ppi(*ctx.merged, ctx.sampler, ctx.init, o);
    }
    OneShotOptions o;
    o.reads = s.reads.value_or(o.reads);
    o.cycles = s.cycles;
    o.keep_fraction = s.keep;
    o.anneal_time = s.anneal_time.value_or(o.anneal_time);
    o.reversal_target = s.reversal;
    o.seed = seed;
    o.timing = ctx.timing;
    return one_shot_ppi(*ctx.merged, ctx.sampler, o, ctx.truth).state;
}

void export_qubo(const SolveContext& ctx, const SolveSettings& s, const std::string& path) {
    auto f = open_output(path);
    if (ctx.merged) {
        write_model(f, ctx.merged->qubo);
        return;
    }
    if (s.algorithm == "classical") throw std::invalid_argument("export-qubo: the classical algorithm has no QUBO");
    const double x1 = analytic_policy_update(ctx.init.x3, ctx.params);
    const GvPbo pbo = build_gv_pbo(x1, ctx.enc.x2, ctx.enc.x3, ctx.grid, ctx.params);
    write_model(f, to_qubo(pbo.poly, ctx.enc.x3.end()).first);
}

struct Execution {
    PpiState state;
    std::array<double, 3> errors{};
    double wall_us = 0.0;
};

std::string summary_text(const SolveSettings& s, const std::string& engine, const GlobalSettings& g,
                         const SolveContext& ctx, const std::vector<Execution>& runs) {
    std::string t = fmt::format("algorithm: {}  engine: {}  seed: {}  executions: {}\n", s.algorithm,
                                s.algorithm == "classical" || s.algorithm == "combinatorial" ? "none" : engine,
                                g.seed, runs.size());
    if (runs.size() == 1) {
        const auto& r = runs.front();
        t += fmt::format("{:<10}{:>14}{:>14}{:>12}\n", "parameter", "estimate", "truth", "error %");
        const std::array<double, 3> est{r.state.params.x1, r.state.params.x2, r.state.params.x3};
        const std::array<double, 3> tru{ctx.truth.x1, ctx.truth.x2, ctx.truth.x3};
        for (int i = 0; i < 3; ++i)
            t += fmt::format("{:<10}{:>14.6f}{:>14.6f}{:>12.4f}\n", fmt::format("x{}", i + 1), est[i], tru[i],
                             r.errors[i]);
        t += fmt::format("iterations: {}  converged at: {}\n", r.state.iteration, r.state.converged_at);
        const double qpu = r.state.history.empty() ? 0.0 : r.state.history.back().qpu_us;
        t += fmt::format("qpu time (us): {:.0f}\n", qpu);
        return t;
    }
    std::array<std::vector<double>, 4> cols;
    for (const auto& r : runs) {
        for (int i = 0; i < 3; ++i) cols[i].push_back(r.errors[i]);
        cols[3].push_back(r.state.history.empty() ? 0.0 : r.state.history.back().qpu_us);
    }
    t += fmt::format("{:<18}{:>12}{:>12}{:>12}{:>16}\n", "statistic", "x1 error %", "x2 error %", "x3 error %",
                     "qpu total (us)");
    auto row = [&](const char* name, auto stat) {
        t += fmt::format("{:<18}{:>12.4f}{:>12.4f}{:>12.4f}{:>16.0f}\n", name, stat(cols[0]), stat(cols[1]),
                         stat(cols[2]), stat(cols[3]));
    };
    row("mean", [](const std::vector<double>& v) { return mean(v); });
    row("25th percentile", [](const std::vector<double>& v) { return percentile(v, 0.25); });
    row("75th percentile", [](const std::vector<double>& v) { return percentile(v, 0.75); });
    row("std. dev.", [](const std::vector<double>& v) { return sample_std(v); });
    return t;
}

int cmd_solve(const GlobalSettings& g, const SolveSettings& s, std::ostream& out) {
    validate(s);
    const std::string engine = g.engine.value_or("heuristic");
    const SolveContext ctx = prepare(s, engine, uses_merged(s.algorithm));
    if (!s.export_qubo.empty()) export_qubo(ctx, s, s.export_qubo);

    const bool deterministic = s.algorithm == "classical" || s.algorithm == "combinatorial";
    std::vector<Execution> runs;
    for (int e = 0; e < s.executions; ++e) {
        const auto t0 = std::chrono::steady_clock::now();
        Execution ex;
        if (deterministic && e > 0) {
            ex = runs.front();
        } else {
            ex.state = run_algorithm(ctx, s, s.algorithm, g.seed + static_cast<std::uint64_t>(e));
            ex.errors = percent_errors(ex.state.params, ctx.truth);
        }
        ex.wall_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
        runs.push_back(ex);
    }

    const fs::path dir(g.out_dir);
    fs::create_directories(dir);
    {
        auto f = open_output(dir / "iterations.csv");
        f << "execution,iteration,x1,x2,x3,x1_error_pct,x2_error_pct,x3_error_pct,loss,qpu_us\n";
        for (std::size_t e = 0; e < runs.size(); ++e) {
            for (const auto& rec : runs[e].state.history) {
                const auto err = percent_errors(rec.params, ctx.truth);
                f << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", e,
                                 rec.iteration, rec.params.x1, rec.params.x2, rec.params.x3, err[0], err[1], err[2],
                                 rec.loss, rec.qpu_us);
            }
        }
    }
    {
        auto f = open_output(dir / "result.csv");
        f << "execution,x1,x2,x3,x1_error_pct,x2_error_pct,x3_error_pct,iterations,converged_at,qpu_us\n";
        for (std::size_t e = 0; e < runs.size(); ++e) {
            const auto& r = runs[e];
            f << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{:.17g}\n", e,
                             r.state.params.x1, r.state.params.x2, r.state.params.x3, r.errors[0], r.errors[1],
                             r.errors[2], r.state.iteration, r.state.converged_at,
                             r.state.history.empty() ? 0.0 : r.state.history.back().qpu_us);
        }
    }
    const std::string summary = summary_text(s, engine, g, ctx, runs);
    open_output(dir / "summary.txt") << summary;

    LinePlot plot;
    plot.title = "Parameter error, " + s.algorithm;
    plot.y_label = "absolute error (%)";
    const char* names[] = {"x1", "x2", "x3"};
    if (runs.size() > 1 && runs.front().state.history.size() == 1) {
        plot.x_label = "execution";
        for (int i = 0; i < 3; ++i) {
            Series sr{names[i], {}, {}, true};
            for (std::size_t e = 0; e < runs.size(); ++e) {
                sr.x.push_back(static_cast<double>(e));
                sr.y.push_back(runs[e].errors[i]);
            }
            plot.series.push_back(sr);
        }
    } else {
        plot.x_label = deterministic ? "iteration" : "qpu time (us)";
        const auto& hist = runs.front().state.history;
        for (int i = 0; i < 3; ++i) {
            Series sr{names[i], {}, {}, hist.size() == 1};
            for (const auto& rec : hist) {
                sr.x.push_back(deterministic ? rec.iteration : rec.qpu_us);
                sr.y.push_back(percent_errors(rec.params, ctx.truth)[i]);
            }
            plot.series.push_back(sr);
        }
    }
    {
        auto f = open_output(dir / "errors.svg");
        write_svg(f, plot);
    }

    out << summary;
    double wall = 0.0;
    for (const auto& r : runs) wall += r.wall_us;
    out << fmt::format("wall time (us): {:.0f}\n", wall / static_cast<double>(runs.size()));
    out << "artifacts: " << dir.string() << '\n';
    return 0;
}

// ---- quadratize ---------------------------------------------------------

std::string state_text(const BinaryState& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] ? '1' : '0';
    return s;
}

int cmd_quadratize(const QuadratizeSettings& q, std::ostream& out) {
    std::ifstream in(q.input);
    if (!in) throw std::invalid_argument("cannot open '" + q.input + "'");
    Polynomial original;
    try {
        original = read_polynomial(in);
    } catch (const ParseError& e) {
        throw std::invalid_argument(q.input + ": " + e.what());
    }
    const int n = original.num_variables();
    if (q.verify && n > 12) {
        throw CapacityError("verification is limited to 12 variables; the input has " + std::to_string(n));
    }

    std::vector<std::string> report;
    report.push_back("method: " + q.method);
    Polynomial reduced;
    std::optional<ReductionResult> result;
    if (q.method == "full") {
        result = quadratize_full(original);
    } else if (q.method == "substitution") {
        if (!q.pair) throw std::invalid_argument("substitution requires --pair i,j");
        const auto ij = to_ints(*q.pair, "pair");
        if (ij.size() != 2) throw std::invalid_argument("pair: expected i,j");
        const double gamma = q.gamma.value_or(default_substitution_gamma(original));
        result = reduce_by_substitution(original, {ij[0], ij[1]}, gamma);
    } else if (q.method == "elc") {
        if (!q.exclude) throw std::invalid_argument("elc requires --exclude vars:values");
        const auto parts = split(*q.exclude, ':');
        if (parts.size() != 2) throw std::invalid_argument("exclude: expected vars:values");
        ExcludedConfiguration elc{to_ints(parts[0], "exclude"), to_ints(parts[1], "exclude")};
        reduced = elc_reduce(original, elc);
    } else if (q.method == "deduction") {
        if (q.deduce.empty()) throw std::invalid_argument("deduction requires --deduce i,j or i,j=k");
        std::vector<Deduction> ds;
        for (const auto& d : q.deduce) {
            const auto eq = split(d, '=');
            const auto ij = to_ints(eq[0], "deduce");
            if (ij.size() != 2 || eq.size() > 2) throw std::invalid_argument("deduce: expected i,j or i,j=k");
            Deduction ded{ij[0], ij[1], std::nullopt};
            if (eq.size() == 2) ded.equals = to_int(eq[1], "deduce");
            ds.push_back(ded);
        }
        reduced = deduction_reduce(original, ds);
    } else {
        throw std::invalid_argument("method: unknown value '" + q.method + "'");
    }
    if (result) {
        reduced = result->qubo_poly;
        for (const auto& aux : result->alloc.aux_vars) {
            std::string term;
            for (int v : aux.term) term += " " + std::to_string(v);
            report.push_back(fmt::format("aux {} <-{} ({})", aux.id, term, to_string(aux.method)));
        }
        for (const auto& w : result->warnings) report.push_back("warning: " + w);
    }
    report.push_back(fmt::format("degree {} -> {}, variables {} -> {}", original.degree(), reduced.degree(), n,
                                 std::max(n, reduced.num_variables())));

    if (q.verify) {
        if (result) {
            const auto v = verify_quadratization(original, *result, 12);
            if (!v.equivalent) {
                throw VerificationError(fmt::format("not equivalent at state {}: original {}, reduced minimum {}",
                                                    state_text(*v.counterexample), v.original_value, v.reduced_value));
            }
            report.push_back(fmt::format("verify: equivalent over {} assignments", v.checked));
        } else {
            const auto cmp = compare_ground(original, reduced, n);
            if (!cmp.energy_preserved || !cmp.shares_argmin) {
                const auto bf = brute_force(reduced, n);
                const BinaryState& x = bf.argmin_states.front();
                throw VerificationError(fmt::format("ground state not preserved at state {}: original {}, reduced {}",
                                                    state_text(x), evaluate(original, x), bf.min_energy));
            }
            report.push_back(fmt::format("verify: ground state preserved (minimum {})", cmp.original_min));
        }
    }

    if (q.output.empty()) {
        write_polynomial(out, reduced);
    } else {
        auto f = open_output(q.output);
        write_polynomial(f, reduced);
    }
    for (const auto& line : report) out << "# " << line << '\n';
    return 0;
}

// ---- two-group cycle problems --------------------------------------------

int cmd_cycles(const GlobalSettings& g, const CycleSettings& c, std::ostream& out) {
    const std::string engine = g.engine.value_or("greedy");
    if (engine != "greedy" && engine != "statevector" && engine != "heuristic")
        throw std::invalid_argument("engine: cycle-demo supports greedy, statevector and heuristic");
    if (c.reads < 1) throw std::invalid_argument("reads must be positive");
    if (!(c.cycle_time > 0.0)) throw std::invalid_argument("cycle-time must be positive");
    const auto cycle_counts = to_ints(c.cycles, "cycles");
    for (int k : cycle_counts)
        if (k < 1) throw std::invalid_argument("cycles must be positive");
    StatevectorOptions sv;
    sv.reset_on_full_reversal = c.reversal_reset;
    const Sampler sampler = make_sampler(engine, {}, sv);

    const fs::path dir(g.out_dir);
    auto csv = open_output(dir / "cycles.csv");
    csv << "problem,cycles,state,energy,ground_energy,ground_share,verdict\n";
    out << fmt::format("engine: {}  reads: {}  cycle time (us): {}{}\n", engine, c.reads, c.cycle_time,
                       c.reversal_reset && engine == "statevector" ? "  reset at full reversal" : "");
    out << fmt::format("{:<10}{:>8}{:>8}{:>9}{:>9}{:>14}  {}\n", "problem", "cycles", "state", "energy", "ground",
                       "ground share", "verdict");
    for (const auto& p : cycle_problems()) {
        const auto bf = brute_force(p.poly, p.n);
        for (int k : cycle_counts) {
            SamplerRequest req;
            req.model = PolynomialModel(p.poly, p.n);
            req.reads = c.reads;
            req.schedule = AnnealSchedule::sequential_groups(p.groups, k * c.cycle_time, k, c.reversal, true);
            req.initial_state = BinaryState::zeros(p.n);
            req.seed = g.seed;
            const SampleSet set = sampler(req);
            const SampleRecord* modal = &set.records.front();
            int ground = 0;
            for (const auto& r : set.records) {
                if (r.occurrences > modal->occurrences) modal = &r;
                if (std::abs(r.energy - bf.min_energy) < 1e-9) ground += r.occurrences;
            }
            const double share = static_cast<double>(ground) / static_cast<double>(set.total_occurrences());
            const bool correct = std::abs(modal->energy - bf.min_energy) < 1e-9;
            const char* verdict = correct ? "correct" : "incorrect";
            out << fmt::format("{:<10}{:>8}{:>8}{:>9.3f}{:>9.3f}{:>14.3f}  {}\n", p.name, k,
                               state_text(modal->state), modal->energy, bf.min_energy, share, verdict);
            csv << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{}\n", p.name, k, state_text(modal->state),
                               modal->energy, bf.min_energy, share, verdict);
        }
    }
    return 0;
}

// ---- simulate -----------------------------------------------------------

double x1_from_artifact(const std::string& path) {
    fs::path file(path);
    if (fs::is_directory(file)) file /= "result.csv";
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open '" + file.string() + "'");
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row))
        throw ParseError(1, file.string() + ": expected a header and one data row");
    const auto names = split(header, ',');
    const auto values = split(row, ',');
    const auto it = std::find(names.begin(), names.end(), "x1");
    if (it == names.end() || values.size() != names.size()) throw ParseError(2, file.string() + ": no x1 column");
    return to_double(values[static_cast<std::size_t>(it - names.begin())], "x1");
}

int cmd_simulate(const GlobalSettings& g, const SimulateSettings& s, std::ostream& out) {
    if (s.x1 && !s.from.empty()) throw std::invalid_argument("x1 and from are mutually exclusive");
    if (!s.x1 && s.from.empty()) throw std::invalid_argument("simulate needs --x1 or --from <solve artifact>");
    const double x1 = s.x1 ? *s.x1 : x1_from_artifact(s.from);
    RbcParams params;
    ShockScenario scenario;
    scenario.periods = s.periods;
    scenario.shock_z_index = s.shock_z;
    scenario.k0_factor = s.k0_factor;
    const ConsumptionPath path = simulate_consumption(x1, params, scenario);

    const fs::path dir(g.out_dir);
    auto csv = open_output(dir / "consumption.csv");
    csv << "period,z,k_true,k_hat,c_true,c_hat,gap_pct\n";
    LinePlot plot;
    plot.title = fmt::format("Consumption after a productivity shock, x1 = {:.6f}", x1);
    plot.x_label = "period";
    plot.y_label = "consumption";
    Series closed{"closed form", {}, {}}, estimated{"estimated", {}, {}, true};
    std::size_t worst = 0;
    for (std::size_t t = 0; t < path.z.size(); ++t) {
        csv << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t + 1, path.z[t], path.k_true[t],
                           path.k_hat[t], path.c_true[t], path.c_hat[t], 100.0 * path.gap[t]);
        closed.x.push_back(static_cast<double>(t + 1));
        closed.y.push_back(path.c_true[t]);
        estimated.x.push_back(static_cast<double>(t + 1));
        estimated.y.push_back(path.c_hat[t]);
        if (path.gap[t] > path.gap[worst]) worst = t;
    }
    plot.series = {closed, estimated};
    auto svg = open_output(dir / "consumption.svg");
    write_svg(svg, plot);
    out << fmt::format("x1: {:.6f}  periods: {}\n", x1, path.z.size());
    out << fmt::format("max gap: {:.4f}% in period {}\n", 100.0 * path.gap[worst], worst + 1);
    return 0;
}

// ---- bench --------------------------------------------------------------

int cmd_bench(const GlobalSettings& g, const SolveSettings& s, const BenchSettings& b, std::ostream& out) {
    const auto algorithms = split(b.algorithms, ',');
    bool need_merged = false;
    for (const auto& a : algorithms) {
        SolveSettings probe = s;
        probe.algorithm = a;
        validate(probe);
        need_merged = need_merged || uses_merged(a);
    }
    const std::string engine = g.engine.value_or("heuristic");
    const auto t0 = std::chrono::steady_clock::now();
    const SolveContext ctx = prepare(s, engine, need_merged);
    const double setup = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out << fmt::format("engine: {}  setup (ms): {:.1f}\n", engine, setup);
    out << fmt::format("{:<15}{:>12}{:>16}{:>12}{:>12}{:>12}\n", "algorithm", "wall (ms)", "qpu (us)", "x1 err %",
                       "x2 err %", "x3 err %");
    for (const auto& a : algorithms) {
        const auto t1 = std::chrono::steady_clock::now();
        const PpiState st = run_algorithm(ctx, s, a, g.seed);
        const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
        const auto err = percent_errors(st.params, ctx.truth);
        const double qpu = a == "classical" || a == "combinatorial" || st.history.empty() ? 0.0
                                                                                           : st.history.back().qpu_us;
        out << fmt::format("{:<15}{:>12.1f}{:>16.0f}{:>12.4f}{:>12.4f}{:>12.4f}\n", a, wall, qpu, err[0], err[1],
                           err[2]);
    }
    return 0;
}

void add_solve_options(CLI::App* sub, SolveSettings& s) {
    sub->add_option("--j1", s.j1, "policy bits (merged problem)");
    sub->add_option("--j2", s.j2, "x2 bits");
    sub->add_option("--j3", s.j3, "x3 bits");
    sub->add_option("--s2", s.s2, "x2 scale");
    sub->add_option("--s3", s.s3, "x3 scale");
    sub->add_option("--reads", s.reads);
    sub->add_option("--cycles", s.cycles)->capture_default_str();
    sub->add_option("--reversal", s.reversal)->capture_default_str();
    sub->add_option("--anneal-time", s.anneal_time, "microseconds per anneal");
    sub->add_option("--keep-fraction", s.keep)->capture_default_str();
    sub->add_option("--k-count", s.k_count, "capital nodes")->capture_default_str();
    sub->add_option("--iterations", s.iterations, "hybrid iterations")->capture_default_str();
    sub->add_option("--max-iter", s.max_iter)->capture_default_str();
    sub->add_option("--tol", s.tol)->capture_default_str();
    sub->add_flag("--init-true", s.init_true, "start from the closed-form parameters");
    sub->add_option("--init", s.init, "x1,x2,x3");
    sub->add_option("--sweeps", s.sweeps, "heuristic sweeps per anneal")->capture_default_str();
    sub->add_option("--cold-ratio", s.cold_ratio, "heuristic final/initial temperature")->capture_default_str();
    sub->add_option("--t-program", s.t_program)->capture_default_str();
    sub->add_option("--t-readout", s.t_readout)->capture_default_str();
}

}  // namespace

std::vector<GroupedProblem> cycle_problems() {
    GroupedProblem stepwise{"stepwise", {}, 2, {0, 1}};
    stepwise.poly.add_term({0}, 1.0);
    stepwise.poly.add_term({1}, -1.0);
    stepwise.poly.add_term({0, 1}, -2.0);

    GroupedProblem coupled{"coupled", {}, 4, {0, 1, 0, 1}};
    coupled.poly.add_term({2}, 2.0);
    coupled.poly.add_term({0, 2}, 1.0);
    coupled.poly.add_term({0, 1, 2}, -2.0);
    coupled.poly.add_term({3}, 2.0);
    coupled.poly.add_term({1, 3}, -1.0);
    coupled.poly.add_term({0, 1, 3}, -2.0);
    return {stepwise, coupled};
}

std::map<std::string, std::string> read_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (value.empty()) throw ParseError(lineno, "empty value for '" + key + "'");
        if (!kv.emplace(key, value).second) throw ParseError(lineno, "duplicate key '" + key + "'");
    }
    return kv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic programming by emulated quantum annealing"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalSettings g;
    app.add_option("--config", g.config, "key=value file; command-line flags take precedence");
    app.add_option("--seed", g.seed)->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "artifact directory")->capture_default_str();
    app.add_option("--engine", g.engine)->check(CLI::IsMember({"statevector", "heuristic", "greedy", "exact"}));

    SolveSettings solve;
    auto* solve_cmd = app.add_subcommand("solve", "Run a policy-iteration solver on the RBC model");
    solve_cmd->add_option("--algorithm", solve.algorithm)
        ->check(CLI::IsMember(kAlgorithms))
        ->capture_default_str();
    add_solve_options(solve_cmd, solve);
    solve_cmd->add_option("--executions", solve.executions, "independent seeded runs")->capture_default_str();
    solve_cmd->add_option("--export-qubo", solve.export_qubo, "write the annealed QUBO to this file");

    QuadratizeSettings quad;
    auto* quad_cmd = app.add_subcommand("quadratize", "Reduce a polynomial file to degree two");
    quad_cmd->add_option("input", quad.input, "polynomial file")->required();
    quad_cmd->add_option("--method", quad.method)
        ->check(CLI::IsMember({"full", "substitution", "elc", "deduction"}))
        ->capture_default_str();
    quad_cmd->add_option("--output,-o", quad.output, "reduced polynomial file (default: stdout)");
    quad_cmd->add_option("--pair", quad.pair, "i,j for substitution");
    quad_cmd->add_option("--gamma", quad.gamma, "substitution penalty");
    quad_cmd->add_option("--exclude", quad.exclude, "vars:values, e.g. 0,1,2:1,1,0");
    quad_cmd->add_option("--deduce", quad.deduce, "i,j (x_i x_j = 0) or i,j=k (x_i x_j = x_k)");
    quad_cmd->add_flag("--verify", quad.verify, "brute-force check for up to 12 variables");

    CycleSettings cyc;
    auto* cyc_cmd = app.add_subcommand("cycle-demo", "Two-group cyclic anneals of the stepwise and coupled problems");
    cyc_cmd->add_option("--cycles", cyc.cycles, "comma-separated cycle counts")->capture_default_str();
    cyc_cmd->add_option("--reads", cyc.reads)->capture_default_str();
    cyc_cmd->add_option("--cycle-time", cyc.cycle_time, "microseconds per cycle")->capture_default_str();
    cyc_cmd->add_option("--reversal", cyc.reversal)->capture_default_str();
    cyc_cmd->add_flag("--reversal-reset", cyc.reversal_reset,
                      "statevector: restart a group in the uniform superposition when it reaches s = 0");

    SimulateSettings sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Consumption path after a productivity shock");
    sim_cmd->add_option("--x1", sim.x1, "estimated policy parameter");
    sim_cmd->add_option("--from", sim.from, "result.csv or the out-dir of a solve run");
    sim_cmd->add_option("--periods", sim.periods)->capture_default_str();
    sim_cmd->add_option("--shock-z", sim.shock_z, "productivity node hit in period 1")->capture_default_str();
    sim_cmd->add_option("--k0-factor", sim.k0_factor, "initial capital over the steady state")->capture_default_str();

    SolveSettings bench_solve;
    BenchSettings bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time each solver once");
    bench_cmd->add_option("--algorithms", bench.algorithms)->capture_default_str();
    add_solve_options(bench_cmd, bench_solve);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        CLI::App* sub = app.get_subcommands().front();
        if (!g.config.empty()) apply_config(app, sub, g.config);
        if (sub == solve_cmd) return cmd_solve(g, solve, out);
        if (sub == quad_cmd) return cmd_quadratize(quad, out);
        if (sub == cyc_cmd) return cmd_cycles(g, cyc, out);
        if (sub == sim_cmd) return cmd_simulate(g, sim, out);
        return cmd_bench(g, bench_solve, bench, out);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const VerificationError& e) {
        err << "verification failed: " << e.what() << '\n';
        return 3;
    } catch (const CapacityError& e) {
        err << "capacity: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qadp::cli
