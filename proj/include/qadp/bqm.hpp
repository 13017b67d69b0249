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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qadp {

class BinaryState;

class SpinState {
  public:
    SpinState() = default;
    explicit SpinState(const std::vector<int>& values);

    static SpinState from_binary(const BinaryState& x);

    std::size_t size() const { return values_.size(); }
    int operator[](std::size_t i) const { return values_[i]; }
    const std::vector<std::int8_t>& values() const { return values_; }

    friend bool operator==(const SpinState&, const SpinState&) = default;
    friend auto operator<=>(const SpinState&, const SpinState&) = default;

  private:
    std::vector<std::int8_t> values_;
};

class BinaryState {
  public:
    BinaryState() = default;
    explicit BinaryState(const std::vector<int>& values);

    static BinaryState zeros(std::size_t n);
    // Bit i of the state is bit i of index.
    static BinaryState from_index(std::uint64_t index, std::size_t n);
    static BinaryState from_spins(const SpinState& s);

    std::uint64_t to_index() const;

    std::size_t size() const { return values_.size(); }
    int operator[](std::size_t i) const { return values_[i]; }
    void set(std::size_t i, int bit);
    void flip(std::size_t i) { values_[i] ^= 1; }
    const std::vector<std::uint8_t>& values() const { return values_; }

    std::string to_string() const;

    friend bool operator==(const BinaryState&, const BinaryState&) = default;
    friend auto operator<=>(const BinaryState&, const BinaryState&) = default;

  private:
    std::vector<std::uint8_t> values_;
};

using VarPair = std::pair<int, int>;

class IsingModel {
  public:
    explicit IsingModel(int n = 0);

    int num_variables() const { return static_cast<int>(biases_.size()); }

    void add_bias(int i, double h);
    // Stored under (min, max); repeated insertions accumulate.
    void add_coupling(int i, int j, double value);

    double bias(int i) const { return biases_.at(i); }
    double coupling(int i, int j) const;

    const std::vector<double>& biases() const { return biases_; }
    const std::map<VarPair, double>& couplings() const { return couplings_; }

    friend bool operator==(const IsingModel&, const IsingModel&) = default;

  private:
    std::vector<double> biases_;
    std::map<VarPair, double> couplings_;
};

class QuboModel {
  public:
    explicit QuboModel(int n = 0);

    int num_variables() const { return n_; }

    // Diagonal keys hold linear terms.
    void add(int i, int j, double value);
    double get(int i, int j) const;

    const std::map<VarPair, double>& terms() const { return q_; }

    friend bool operator==(const QuboModel&, const QuboModel&) = default;

  private:
    int n_;
    std::map<VarPair, double> q_;
};

double ising_energy(const IsingModel& model, const SpinState& s);
double qubo_energy(const QuboModel& model, const BinaryState& x);

std::pair<QuboModel, double> ising_to_qubo(const IsingModel& model);
std::pair<IsingModel, double> qubo_to_ising(const QuboModel& model);

template <class State>
struct SpectrumResult {
    double min_energy = 0.0;
    std::vector<State> argmin_states;
    std::optional<std::vector<std::pair<State, double>>> spectrum;
};

struct BruteForceOptions {
    bool keep_spectrum = false;
    int max_variables = 26;
    int max_spectrum_variables = 20;
};

SpectrumResult<BinaryState> brute_force(const QuboModel& model, const BruteForceOptions& options = {});
SpectrumResult<SpinState> brute_force(const IsingModel& model, const BruteForceOptions& options = {});

struct ProblemGraph {
    std::vector<int> vertices;
    std::vector<VarPair> edges;

    bool is_connected() const;
    std::size_t degree(int v) const;
};

ProblemGraph graph_of(const IsingModel& model);
ProblemGraph graph_of(const QuboModel& model);

using AnyModel = std::variant<QuboModel, IsingModel>;

void write_model(std::ostream& out, const QuboModel& model);
void write_model(std::ostream& out, const IsingModel& model);
std::string to_text(const QuboModel& model);
std::string to_text(const IsingModel& model);
AnyModel read_model(std::istream& in);
AnyModel model_from_text(const std::string& text);

}  // namespace qadp
