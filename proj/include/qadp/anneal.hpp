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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qadp/bqm.hpp"
#include "qadp/polynomial.hpp"

namespace qadp {

struct SchedulePoint {
    double time = 0.0;  // microseconds within one cycle
    double s = 0.0;     // anneal fraction
};

using SchedulePath = std::vector<SchedulePoint>;

// Per-group piecewise-linear anneal-fraction paths over one cycle. The cycle
// is repeated `cycles` times within total_time.
class AnnealSchedule {
  public:
    AnnealSchedule(double total_time, std::vector<SchedulePath> group_paths, std::vector<int> variable_group,
                   int cycles = 1, double reversal_target = 0.0, bool reinitialize = true);

    static AnnealSchedule forward(int n, double total_time);
    static AnnealSchedule frozen(int n, double total_time);
    // 1 -> reversal_target -> 1 for every variable.
    static AnnealSchedule reverse(int n, double total_time, double reversal_target, bool reinitialize = true);
    // Within each cycle, groups take turns: group g reverses to reversal_target
    // and re-anneals during slot g while all other groups hold at s = 1.
    static AnnealSchedule sequential_groups(std::vector<int> variable_group, double total_time, int cycles,
                                            double reversal_target, bool reinitialize);

    double total_time() const { return total_time_; }
    double cycle_time() const { return total_time_ / cycles_; }
    int cycles() const { return cycles_; }
    double reversal_target() const { return reversal_target_; }
    bool reinitialize() const { return reinitialize_; }
    int num_variables() const { return static_cast<int>(variable_group_.size()); }
    int num_groups() const { return static_cast<int>(paths_.size()); }
    const std::vector<int>& variable_group() const { return variable_group_; }
    const SchedulePath& group_path(int g) const { return paths_.at(g); }

    double group_s(int group, double t) const;
    double s(int var, double t) const { return group_s(variable_group_.at(var), t); }
    // True when some variable starts above s = 0, i.e. from a classical state.
    bool starts_classical() const;
    // Groups ordered by the first time they leave s = 1 within a cycle; groups
    // with the same activity window share a stage.
    std::vector<std::vector<int>> activity_stages() const;

    AnnealSchedule with_reinitialize(bool value) const;

  private:
    double total_time_;
    std::vector<SchedulePath> paths_;
    std::vector<int> variable_group_;
    int cycles_;
    double reversal_target_;
    bool reinitialize_;
};

// CSV rows (time_us, variable_group, anneal_fraction) covering every cycle.
void write_schedule_csv(std::ostream& out, const AnnealSchedule& schedule);
AnnealSchedule read_schedule_csv(std::istream& in, std::vector<int> variable_group, bool reinitialize = true);

struct TimingConfig {
    double t_program = 9000.0;
    double t_readout = 120.0;
    double min_anneal = 5.0;
};

struct TimingReport {
    double t_program = 0.0;
    double t_anneal = 0.0;
    double t_readout = 0.0;
    int reads = 0;
    double total = 0.0;
};

TimingReport timing_report(int reads, double t_anneal, const TimingConfig& config = {});

struct SampleRecord {
    BinaryState state;
    double energy = 0.0;
    int occurrences = 0;
};

struct SampleSet {
    std::vector<SampleRecord> records;  // ascending energy, then state
    std::vector<BinaryState> reads;     // terminal state of every read, in read order
    std::optional<TimingReport> timing;

    const SampleRecord& lowest() const;
    int total_occurrences() const;
};

enum class TransverseConvention { Standard, PaperLiteral };

struct StatevectorOptions {
    TransverseConvention convention = TransverseConvention::Standard;
    double energy_scale = 1.0;
    int max_variables = 16;
    int min_steps = 64;
    int max_steps = 1 << 20;
    double convergence_tol = 1e-4;
    double norm_tol = 1e-6;
    // When a group enters s = 0 inside the schedule, the register is measured
    // and that group restarts in the uniform superposition; every read then
    // follows its own trajectory.
    bool reset_on_full_reversal = false;
};

struct HeuristicOptions {
    int sweeps = 1000;
    double hot_factor = 1.0;
    double cold_ratio = 1e-4;
    // Probability of accepting a move that leaves the energy unchanged.
    double tie_acceptance = 0.0;
    // Per-variable hot temperature; defaults to the summed magnitude of the
    // coefficients a flip can touch.
    std::vector<double> temperature_scale;
};

struct GreedyOptions {
    bool perturbative_tie_break = true;
    int max_group_bits = 24;
};

// Binary polynomial of any degree over variables 0 .. n-1.
struct PolynomialModel {
    Polynomial poly;
    int n = 0;

    PolynomialModel() = default;
    PolynomialModel(Polynomial p, int n);
    int num_variables() const { return n; }
};

using SamplerModel = std::variant<QuboModel, IsingModel, PolynomialModel>;

struct SamplerRequest {
    SamplerModel model;
    int reads = 1;
    AnnealSchedule schedule = AnnealSchedule::forward(0, 20.0);
    std::optional<BinaryState> initial_state;
    // Optional per-read classical starting states; overrides initial_state.
    std::vector<BinaryState> read_initial_states;
    std::uint64_t seed = 0;
    // Variables that are never sampled: they are held at their conditional
    // minimum given the others (ties resolved to 0). They must not interact
    // with each other.
    std::vector<bool> auxiliary;
    TimingConfig timing;
};

int model_size(const SamplerRequest& req);
double request_energy(const SamplerRequest& req, const BinaryState& x);

// Eigenvalues of H0 = -sum_i sigma_x^i in ascending order and its normalized
// ground vector.
std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_hamiltonian_spectrum(int n);
Eigen::MatrixXd initial_hamiltonian_matrix(int n);

struct QuantumStateVector {
    Eigen::VectorXcd amplitudes;

    double norm_squared() const { return amplitudes.squaredNorm(); }
    Eigen::VectorXd probabilities() const { return amplitudes.cwiseAbs2(); }
};

struct EvolutionResult {
    QuantumStateVector state;
    int steps = 0;
    double max_norm_drift = 0.0;
};

// Integrates one anneal from the given starting vector.
EvolutionResult evolve(const SamplerRequest& req, const QuantumStateVector& start, const StatevectorOptions& options = {});
QuantumStateVector initial_state_vector(const SamplerRequest& req);

// Draws reads measurement outcomes from |amplitudes|^2.
std::vector<BinaryState> measure(const QuantumStateVector& psi, int n, int reads, std::uint64_t seed);

SampleSet schrodinger_anneal(const SamplerRequest& req, const StatevectorOptions& options = {});
SampleSet heuristic_anneal(const SamplerRequest& req, const HeuristicOptions& options = {});
// Sequential-greedy idealization driven by the schedule's activity stages.
SampleSet greedy_anneal(const SamplerRequest& req, const GreedyOptions& options = {});

// Exhaustive minimum over the non-auxiliary variables; every read returns it
// (the lowest index among exact ties).
SampleSet exact_anneal(const SamplerRequest& req, int max_variables = 26);

BinaryState sequential_greedy(const SamplerModel& model, const std::vector<std::vector<int>>& groups,
                              const BinaryState& initial, int cycles, const std::vector<bool>& auxiliary = {},
                              const GreedyOptions& options = {});

}  // namespace qadp
