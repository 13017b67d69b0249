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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qadp/anneal.hpp"
#include "qadp/encoding.hpp"
#include "qadp/polynomial.hpp"
#include "qadp/quadratize.hpp"

namespace qadp {

struct RbcParams {
    double alpha = 0.33;
    double beta = 0.95;
    double delta = 1.0;
    std::vector<double> z_grid{0.9792, 0.9896, 1.0000, 1.0106, 1.0212};
    Eigen::MatrixXd transition;

    RbcParams();

    double alpha_beta() const { return alpha * beta; }
    int z_count() const { return static_cast<int>(z_grid.size()); }
    void validate() const;
};

// Fixed point of pi = pi * transition by power iteration.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, double tol = 1e-15, int max_iter = 1000000);

double steady_state_capital(const RbcParams& params);
double expected_log_z_next(const RbcParams& params, int z_index);

struct CollocationNode {
    double k = 0.0;
    int z_index = 0;
    double z = 0.0;
    double y = 0.0;
    double ln_y = 0.0;
    double e_ln_z_next = 0.0;
};

struct CollocationGrid {
    std::vector<double> k_nodes;
    std::vector<CollocationNode> nodes;

    // k_count capital nodes uniform on [lo * kbar, hi * kbar] crossed with the
    // listed productivity indices (all when empty).
    static CollocationGrid build(const RbcParams& params, int k_count = 133, std::vector<int> z_indices = {},
                                 double lo = 0.5, double hi = 1.5);
    int size() const { return static_cast<int>(nodes.size()); }
};

struct Params3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

// Consumption and next-period capital under the optimal rule (delta = 1).
std::pair<double, double> closed_form_step(double k, int z_index, const RbcParams& params);
Params3 true_parameters(const RbcParams& params);
std::array<double, 3> percent_errors(const Params3& estimate, const Params3& truth);

double analytic_policy_update(double x3_bar, const RbcParams& params);

// Policy objective -ln(1 - x1) - alpha beta x3 ln(x1) with both logarithms
// replaced by their polynomial approximations over enc1.
Polynomial build_gp_pbo(double x3_bar, const BinaryEncoding& enc1, const LogApproxCoefficients& coeffs,
                        const RbcParams& params);
double gp_loss(double x1, double x3, const LogApproxCoefficients& coeffs, const RbcParams& params);

struct LogValues {
    double ln_x1 = 0.0;
    double ln_1mx1 = 0.0;

    static LogValues exact(double x1);
    static LogValues approx(double x1, const LogApproxCoefficients& coeffs);
};

// Sums over the collocation grid, except gamma22 which is the per-node
// coefficient of x2^2 (multiplied by node_count in the objective).
struct GammaConstants {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    double gamma23 = 0.0;
    double gamma22 = 0.0;
    double gamma33 = 0.0;
    double zeta = 0.0;
    int node_count = 0;

    double value(double x2, double x3) const;
};

GammaConstants gamma_constants(const LogValues& logs, const CollocationGrid& grid, const RbcParams& params);

struct GvPbo {
    Polynomial poly;
    GammaConstants gamma;
};

GvPbo build_gv_pbo(double x1_bar, const BinaryEncoding& enc2, const BinaryEncoding& enc3, const CollocationGrid& grid,
                   const RbcParams& params);
GvPbo build_gv_pbo(const LogValues& logs, const BinaryEncoding& enc2, const BinaryEncoding& enc3,
                   const CollocationGrid& grid, const RbcParams& params);
// Sum of squared valuation residuals over the grid.
double gv_loss(const LogValues& logs, double x2, double x3, const CollocationGrid& grid, const RbcParams& params);

struct ValuationEncodings {
    BinaryEncoding x2{0, 10, -0.035};
    BinaryEncoding x3{10, 10, 0.003};
};

struct IterationRecord {
    int iteration = 0;
    Params3 params;
    double loss = 0.0;
    // Both cumulative from the start of the run.
    double qpu_us = 0.0;
    double wall_us = 0.0;
};

struct PpiState {
    Params3 params;
    int iteration = 0;
    // Iteration after which the parameters stopped moving; 0 when the
    // convergence rule never fired.
    int converged_at = 0;
    std::vector<double> loss_history;
    std::vector<IterationRecord> history;
};

struct PpiOptions {
    int max_iter = 10;
    double tol = 1e-3;
    // Run exactly this many iterations when positive.
    int fixed_iterations = 0;
    bool throw_on_divergence = true;
};

Params3 default_initial_parameters();

PpiState classical_ppi(const RbcParams& params, const CollocationGrid& grid, const Params3& init,
                       const PpiOptions& options = {});
PpiState combinatorial_ppi(const RbcParams& params, const CollocationGrid& grid, const ValuationEncodings& enc,
                           const Params3& init, const PpiOptions& options = {});

// Valuation-step argmin for a given x1 by exhaustive search over the joint
// bit states; returns the decoded (x2, x3) and the loss.
struct ValuationResult {
    double x2 = 0.0;
    double x3 = 0.0;
    double loss = 0.0;
    BinaryState bits;
};
ValuationResult valuation_argmin(const LogValues& logs, const ValuationEncodings& enc, const CollocationGrid& grid,
                                 const RbcParams& params);

using Sampler = std::function<SampleSet(const SamplerRequest&)>;

struct HybridOptions {
    int reads = 100;
    double keep_fraction = 0.1;
    double anneal_time = 20.0;
    int iterations = 2;
    std::uint64_t seed = 0;
    TimingConfig timing;
};

PpiState hybrid_ppi(const RbcParams& params, const CollocationGrid& grid, const ValuationEncodings& enc,
                    const Sampler& sampler, const Params3& init, const HybridOptions& options = {});

struct MergedOptions {
    int j1 = 6;
    int j2 = 6;
    int j3 = 6;
    // Defaults keep the value-parameter ranges of the 10-bit encodings.
    double s2 = -0.035 * 1023.0 / 127.0;
    double s3 = 0.003 * 1023.0 / 127.0;
    // When unset, fitted by least squares over the x1 grid points in [fit_lo, fit_hi].
    std::optional<LogApproxCoefficients> coeffs;
    double fit_lo = 0.2;
    double fit_hi = 0.45;
    double bias_margin = 0.01;
};

struct DecodedRead {
    Params3 params;
    bool x_p = false;
    bool x_v = false;
};

struct MergedProblem {
    RbcParams params;
    CollocationGrid grid;
    LogApproxCoefficients coeffs;
    BinaryEncoding x1;
    BinaryEncoding x2;
    BinaryEncoding x3;
    int x_p = 0;
    int x_v = 0;
    Polynomial g_p;     // over x1 and x3 bits
    Polynomial g_v;     // over x1, x2 and x3 bits
    Polynomial merged;  // x_p (g_p + bias_p) + x_v (g_v + bias_v)
    double bias_p = 0.0;
    double bias_v = 0.0;
    ReductionResult reduced;
    int p_aux_count = 0;
    int v_aux_count = 0;
    QuboModel qubo;
    double offset = 0.0;

    int num_original() const { return x_v + 1; }
    int num_variables() const { return qubo.num_variables(); }
    std::vector<bool> auxiliary_mask() const;
    // Group 0: x1 bits, x_p and their auxiliaries; group 1: the rest.
    std::vector<int> variable_groups(bool include_aux) const;
    DecodedRead decode(const BinaryState& x) const;
    BinaryState encode(const Params3& p, bool x_p_on = false, bool x_v_on = false) const;
};

MergedProblem build_merged_problem(const RbcParams& params, const CollocationGrid& grid,
                                   const MergedOptions& options = {});

struct MultiAnnealOptions {
    int reads = 50;
    double anneal_time = 23.0;
    double reversal_target = 0.0;
    std::uint64_t seed = 0;
    TimingConfig timing;
};

PpiState multi_anneal_ppi(const MergedProblem& problem, const Sampler& sampler, const Params3& init,
                          const MultiAnnealOptions& options = {});

struct AnnealOutcome {
    Params3 params;
    double unadjusted_loss = 0.0;
    std::array<double, 3> adjusted_loss{};
    std::optional<std::array<double, 3>> minimum_loss;
};

struct LossReport {
    std::vector<AnnealOutcome> outcomes;
    Params3 reference_mean;  // mean over the lowest-unadjusted-loss subset
    Params3 estimate;        // per-parameter mean over the lowest-adjusted-loss subset
};

LossReport losses(const std::vector<Params3>& reads, const MergedProblem& problem, double keep_fraction,
                  const std::optional<Params3>& truth = std::nullopt);

struct OneShotOptions {
    int reads = 200;
    int cycles = 3;
    double keep_fraction = 0.1;
    double anneal_time = 115.0;
    double reversal_target = 0.0;
    std::uint64_t seed = 0;
    TimingConfig timing;
};

struct OneShotResult {
    PpiState state;
    LossReport report;
    std::vector<BinaryState> reads;
};

OneShotResult one_shot_ppi(const MergedProblem& problem, const Sampler& sampler, const OneShotOptions& options = {},
                           const std::optional<Params3>& truth = std::nullopt);

// Heuristic sampler with per-block hot temperatures for the merged problem.
HeuristicOptions merged_heuristic_options(const MergedProblem& problem, const HeuristicOptions& base = {});

// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct ShockScenario {
    int periods = 10;
    int shock_z_index = 0;
    // Capital at the start of period 1, as a multiple of the steady state.
    double k0_factor = 1.0;
};

struct ConsumptionPath {
    std::vector<double> z;
    std::vector<double> k_true;
    std::vector<double> k_hat;
    std::vector<double> c_true;
    std::vector<double> c_hat;
    std::vector<double> gap;  // |c_hat - c_true| / c_true
};

// z hits the shock node in period 1 and then follows its expected path under
// the transition matrix.
ConsumptionPath simulate_consumption(double x1_hat, const RbcParams& params, const ShockScenario& scenario = {});

}  // namespace qadp
