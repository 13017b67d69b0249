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

#include "qadp/bqm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qadp/errors.hpp"

namespace qadp {

SpinState::SpinState(const std::vector<int>& values) {
    values_.reserve(values.size());
    for (int v : values) {
        if (v != -1 && v != 1) {
            throw std::invalid_argument("spin values must be -1 or +1");
        }
        values_.push_back(static_cast<std::int8_t>(v));
    }
}

SpinState SpinState::from_binary(const BinaryState& x) {
    std::vector<int> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = 2 * x[i] - 1;
    return SpinState(v);
}

BinaryState::BinaryState(const std::vector<int>& values) {
    values_.reserve(values.size());
    for (int v : values) {
        if (v != 0 && v != 1) {
            throw std::invalid_argument("binary values must be 0 or 1");
        }
        values_.push_back(static_cast<std::uint8_t>(v));
    }
}

BinaryState BinaryState::zeros(std::size_t n) {
    BinaryState x;
    x.values_.assign(n, 0);
    return x;
}

BinaryState BinaryState::from_index(std::uint64_t index, std::size_t n) {
    BinaryState x = zeros(n);
    for (std::size_t i = 0; i < n && i < 64; ++i) x.values_[i] = (index >> i) & 1U;
    return x;
}

BinaryState BinaryState::from_spins(const SpinState& s) {
    BinaryState x = zeros(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) x.values_[i] = s[i] > 0 ? 1 : 0;
    return x;
}

std::uint64_t BinaryState::to_index() const {
    if (values_.size() > 64) throw std::invalid_argument("state too long for an index");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) idx |= std::uint64_t(values_[i]) << i;
    return idx;
}

void BinaryState::set(std::size_t i, int bit) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("binary values must be 0 or 1");
    values_.at(i) = static_cast<std::uint8_t>(bit);
}

std::string BinaryState::to_string() const {
    std::string s;
    s.reserve(values_.size());
    for (auto v : values_) s.push_back(v ? '1' : '0');
    return s;
}

IsingModel::IsingModel(int n) {
    if (n < 0) throw std::invalid_argument("negative variable count");
    biases_.assign(n, 0.0);
}

void IsingModel::add_bias(int i, double h) {
    if (i < 0 || i >= num_variables()) throw std::out_of_range("bias index out of range");
    biases_[i] += h;
}

void IsingModel::add_coupling(int i, int j, double value) {
    if (i == j) throw std::invalid_argument("self-coupling is not allowed in an Ising model");
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= num_variables()) throw std::out_of_range("coupling index out of range");
    couplings_[{i, j}] += value;
}

double IsingModel::coupling(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = couplings_.find({i, j});
    return it == couplings_.end() ? 0.0 : it->second;
}

QuboModel::QuboModel(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("negative variable count");
}

void QuboModel::add(int i, int j, double value) {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_) throw std::out_of_range("QUBO index out of range");
    q_[{i, j}] += value;
}

double QuboModel::get(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = q_.find({i, j});
    return it == q_.end() ? 0.0 : it->second;
}

double ising_energy(const IsingModel& model, const SpinState& s) {
    if (static_cast<int>(s.size()) != model.num_variables()) {
        throw std::invalid_argument("spin state length does not match model size");
    }
    double e = 0.0;
    for (int i = 0; i < model.num_variables(); ++i) e += model.biases()[i] * s[i];
    for (const auto& [key, J] : model.couplings()) e += J * s[key.first] * s[key.second];
    return e;
}

double qubo_energy(const QuboModel& model, const BinaryState& x) {
    if (static_cast<int>(x.size()) != model.num_variables()) {
        throw std::invalid_argument("binary state length does not match model size");
    }
    double e = 0.0;
    for (const auto& [key, q] : model.terms()) {
        if (x[key.first] && x[key.second]) e += q;
    }
    return e;
}

std::pair<QuboModel, double> ising_to_qubo(const IsingModel& model) {
    QuboModel q(model.num_variables());
    double offset = 0.0;
    for (int i = 0; i < model.num_variables(); ++i) {
        double h = model.biases()[i];
        if (h == 0.0) continue;
        q.add(i, i, 2.0 * h);
        offset -= h;
    }
    for (const auto& [key, J] : model.couplings()) {
        if (J == 0.0) continue;
        q.add(key.first, key.second, 4.0 * J);
        q.add(key.first, key.first, -2.0 * J);
        q.add(key.second, key.second, -2.0 * J);
        offset += J;
    }
    return {q, offset};
}

std::pair<IsingModel, double> qubo_to_ising(const QuboModel& model) {
    IsingModel m(model.num_variables());
    double offset = 0.0;
    for (const auto& [key, v] : model.terms()) {
        if (v == 0.0) continue;
        if (key.first == key.second) {
            m.add_bias(key.first, v / 2.0);
            offset += v / 2.0;
        } else {
            m.add_coupling(key.first, key.second, v / 4.0);
            m.add_bias(key.first, v / 4.0);
            m.add_bias(key.second, v / 4.0);
            offset += v / 4.0;
        }
    }
    return {m, offset};
}

namespace {

// Gray-code sweep with incremental local fields. Returns the indices whose
// incrementally tracked energy lies within a tolerance of the running minimum;
// callers re-evaluate them exactly.
std::vector<std::uint64_t> gray_code_candidates(const QuboModel& model) {
    const int n = model.num_variables();
    std::vector<double> field(n, 0.0);
    std::vector<std::vector<std::pair<int, double>>> nbrs(n);
    double scale = 0.0;
    for (const auto& [key, v] : model.terms()) {
        scale += std::abs(v);
        if (key.first == key.second) {
            field[key.first] += v;
        } else {
            nbrs[key.first].push_back({key.second, v});
            nbrs[key.second].push_back({key.first, v});
        }
    }
    const double tol = 1e-9 * (1.0 + scale);

    std::vector<std::uint8_t> x(n, 0);
    double energy = 0.0;
    double best = 0.0;
    std::vector<std::uint64_t> cand{0};
    std::uint64_t index = 0;
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        int k = std::countr_zero(g);
        double sign = x[k] ? -1.0 : 1.0;
        energy += sign * field[k];
        x[k] ^= 1;
        index ^= std::uint64_t(1) << k;
        for (const auto& [j, v] : nbrs[k]) field[j] += sign * v;
        if (energy < best - tol) {
            best = energy;
            cand.clear();
            cand.push_back(index);
        } else if (energy <= best + tol) {
            if (energy < best) best = energy;
            cand.push_back(index);
        }
    }
    return cand;
}

void check_capacity(int n, const BruteForceOptions& options) {
    if (n > options.max_variables || n > 62) {
        throw CapacityError("brute force refused: " + std::to_string(n) + " variables exceeds guard of " +
                            std::to_string(options.max_variables));
    }
    if (options.keep_spectrum && n > options.max_spectrum_variables) {
        throw CapacityError("full spectrum refused: " + std::to_string(n) + " variables");
    }
}

}  // namespace

SpectrumResult<BinaryState> brute_force(const QuboModel& model, const BruteForceOptions& options) {
    const int n = model.num_variables();
    check_capacity(n, options);
    auto cand = gray_code_candidates(model);
    SpectrumResult<BinaryState> result;
    std::vector<std::pair<BinaryState, double>> exact;
    result.min_energy = 0.0;
    bool first = true;
    for (auto idx : cand) {
        BinaryState x = BinaryState::from_index(idx, n);
        double e = qubo_energy(model, x);
        if (first || e < result.min_energy) result.min_energy = e;
        first = false;
        exact.emplace_back(std::move(x), e);
    }
    for (auto& [x, e] : exact) {
        if (e == result.min_energy) result.argmin_states.push_back(std::move(x));
    }
    std::sort(result.argmin_states.begin(), result.argmin_states.end());
    if (options.keep_spectrum) {
        std::vector<std::pair<BinaryState, double>> all;
        for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
            BinaryState x = BinaryState::from_index(idx, n);
            double e = qubo_energy(model, x);
            all.emplace_back(std::move(x), e);
        }
        result.spectrum = std::move(all);
    }
    return result;
}

SpectrumResult<SpinState> brute_force(const IsingModel& model, const BruteForceOptions& options) {
    const int n = model.num_variables();
    check_capacity(n, options);
    auto [qubo, offset] = ising_to_qubo(model);
    (void)offset;
    auto cand = gray_code_candidates(qubo);
    SpectrumResult<SpinState> result;
    std::vector<std::pair<SpinState, double>> exact;
    bool first = true;
    for (auto idx : cand) {
        SpinState s = SpinState::from_binary(BinaryState::from_index(idx, n));
        double e = ising_energy(model, s);
        if (first || e < result.min_energy) result.min_energy = e;
        first = false;
        exact.emplace_back(std::move(s), e);
    }
    for (auto& [s, e] : exact) {
        if (e == result.min_energy) result.argmin_states.push_back(std::move(s));
    }
    std::sort(result.argmin_states.begin(), result.argmin_states.end());
    if (options.keep_spectrum) {
        std::vector<std::pair<SpinState, double>> all;
        for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
            SpinState s = SpinState::from_binary(BinaryState::from_index(idx, n));
            double e = ising_energy(model, s);
            all.emplace_back(std::move(s), e);
        }
        result.spectrum = std::move(all);
    }
    return result;
}

bool ProblemGraph::is_connected() const {
    if (vertices.empty()) return true;
    std::map<int, int> pos;
    for (std::size_t i = 0; i < vertices.size(); ++i) pos[vertices[i]] = static_cast<int>(i);
    std::vector<int> parent(vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    std::size_t components = vertices.size();
    for (const auto& [u, v] : edges) {
        int a = find(pos.at(u));
        int b = find(pos.at(v));
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

std::size_t ProblemGraph::degree(int v) const {
    return std::count_if(edges.begin(), edges.end(), [v](const VarPair& e) { return e.first == v || e.second == v; });
}

ProblemGraph graph_of(const IsingModel& model) {
    ProblemGraph g;
    g.vertices.resize(model.num_variables());
    std::iota(g.vertices.begin(), g.vertices.end(), 0);
    for (const auto& [key, J] : model.couplings()) {
        if (J != 0.0) g.edges.push_back(key);
    }
    return g;
}

ProblemGraph graph_of(const QuboModel& model) {
    ProblemGraph g;
    g.vertices.resize(model.num_variables());
    std::iota(g.vertices.begin(), g.vertices.end(), 0);
    for (const auto& [key, v] : model.terms()) {
        if (key.first != key.second && v != 0.0) g.edges.push_back(key);
    }
    return g;
}

namespace {

std::string format_coeff(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_model(std::ostream& out, const QuboModel& model) {
    out << "qubo n=" << model.num_variables() << "\n";
    for (const auto& [key, v] : model.terms()) {
        out << key.first << " " << key.second << " " << format_coeff(v) << "\n";
    }
}

void write_model(std::ostream& out, const IsingModel& model) {
    out << "ising n=" << model.num_variables() << "\n";
    for (int i = 0; i < model.num_variables(); ++i) {
        if (model.biases()[i] != 0.0) out << i << " " << i << " " << format_coeff(model.biases()[i]) << "\n";
    }
    for (const auto& [key, v] : model.couplings()) {
        out << key.first << " " << key.second << " " << format_coeff(v) << "\n";
    }
}

std::string to_text(const QuboModel& model) {
    std::ostringstream ss;
    write_model(ss, model);
    return ss.str();
}

std::string to_text(const IsingModel& model) {
    std::ostringstream ss;
    write_model(ss, model);
    return ss.str();
}

AnyModel read_model(std::istream& in) {
    std::string line;
    int lineno = 0;
    std::optional<AnyModel> model;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!model) {
            std::string size;
            if ((first != "qubo" && first != "ising") || !(ls >> size) || size.rfind("n=", 0) != 0) {
                throw ParseError(lineno, "expected header 'qubo n=<N>' or 'ising n=<N>'");
            }
            int n = 0;
            try {
                std::size_t used = 0;
                n = std::stoi(size.substr(2), &used);
                if (used != size.size() - 2 || n < 0) throw std::invalid_argument("n");
            } catch (const std::exception&) {
                throw ParseError(lineno, "invalid variable count '" + size + "'");
            }
            if (first == "qubo") {
                model = QuboModel(n);
            } else {
                model = IsingModel(n);
            }
            continue;
        }
        int i = 0, j = 0;
        double v = 0.0;
        std::string extra;
        std::istringstream term(line);
        if (!(term >> i >> j >> v) || (term >> extra)) {
            throw ParseError(lineno, "expected 'i j coefficient'");
        }
        try {
            if (auto* q = std::get_if<QuboModel>(&*model)) {
                q->add(i, j, v);
            } else {
                auto& m = std::get<IsingModel>(*model);
                if (i == j) {
                    m.add_bias(i, v);
                } else {
                    m.add_coupling(i, j, v);
                }
            }
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
    }
    if (!model) throw ParseError(lineno, "missing model header");
    return *model;
}

AnyModel model_from_text(const std::string& text) {
    std::istringstream ss(text);
    return read_model(ss);
}

}  // namespace qadp
