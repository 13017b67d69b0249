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
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "compiled_model.hpp"
#include "qadp/anneal.hpp"

namespace qadp {

namespace detail {

void validate_request(const SamplerRequest& req) {
    const int n = model_size(req);
    if (req.reads < 1) throw std::invalid_argument("reads must be at least 1");
    if (req.schedule.num_variables() != n) throw std::invalid_argument("schedule does not cover the model's variables");
    if (req.initial_state && static_cast<int>(req.initial_state->size()) != n) {
        throw std::invalid_argument("initial_state length does not match model size");
    }
    if (!req.read_initial_states.empty()) {
        if (static_cast<int>(req.read_initial_states.size()) != req.reads) {
            throw std::invalid_argument("read_initial_states must hold one state per read");
        }
        for (const auto& s : req.read_initial_states) {
            if (static_cast<int>(s.size()) != n) throw std::invalid_argument("read initial state has wrong length");
        }
    }
    if (!req.auxiliary.empty() && static_cast<int>(req.auxiliary.size()) != n) {
        throw std::invalid_argument("auxiliary mask length does not match model size");
    }
    if (req.schedule.starts_classical() && !req.initial_state && req.read_initial_states.empty()) {
        throw std::invalid_argument("a schedule starting from a classical state requires initial_state");
    }
}

std::optional<BinaryState> start_state(const SamplerRequest& req, int r, const std::optional<BinaryState>& previous) {
    if (!req.read_initial_states.empty()) return req.read_initial_states[r];
    if (!req.schedule.reinitialize() && previous) return previous;
    if (req.initial_state) return req.initial_state;
    return std::nullopt;
}

SampleSet assemble(const SamplerRequest& req, std::vector<BinaryState> reads) {
    SampleSet set;
    std::map<BinaryState, int> counts;
    for (const auto& x : reads) ++counts[x];
    for (const auto& [x, c] : counts) set.records.push_back({x, request_energy(req, x), c});
    std::stable_sort(set.records.begin(), set.records.end(),
                     [](const SampleRecord& a, const SampleRecord& b) { return a.energy < b.energy; });
    set.reads = std::move(reads);
    if (req.schedule.total_time() >= req.timing.min_anneal) {
        set.timing = timing_report(req.reads, req.schedule.total_time(), req.timing);
    }
    return set;
}

}  // namespace detail

SampleSet heuristic_anneal(const SamplerRequest& req, const HeuristicOptions& options) {
    detail::validate_request(req);
    if (options.sweeps < 1) throw std::invalid_argument("sweeps must be at least 1");
    if (!(options.cold_ratio > 0.0 && options.cold_ratio <= 1.0)) throw std::invalid_argument("cold_ratio must be in (0, 1]");
    if (options.tie_acceptance < 0.0 || options.tie_acceptance > 1.0) {
        throw std::invalid_argument("tie_acceptance must be a probability");
    }
    detail::CompiledModel cm(req);
    const int n = cm.size();
    if (!options.temperature_scale.empty() && static_cast<int>(options.temperature_scale.size()) != n) {
        throw std::invalid_argument("temperature_scale length does not match model size");
    }
    std::vector<double> hot(n);
    for (int i = 0; i < n; ++i) {
        double base = options.temperature_scale.empty() ? cm.flip_scale(i) : options.temperature_scale[i];
        hot[i] = base * options.hot_factor;
    }
    const auto& schedule = req.schedule;
    const double tie_tol = 1e-12 * (1.0 + cm.coefficient_scale());
    const double log_cold = std::log(options.cold_ratio);
    std::vector<double> group_s(schedule.num_groups());
    std::vector<std::pair<int, std::uint8_t>> changes;

    std::vector<BinaryState> reads;
    std::optional<BinaryState> previous;
    for (int r = 0; r < req.reads; ++r) {
        std::mt19937_64 rng(req.seed + static_cast<std::uint64_t>(r));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<std::uint8_t> x(n, 0);
        if (auto start = detail::start_state(req, r, previous)) {
            x = start->values();
        } else {
            for (int i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>(rng() & 1U);
        }
        cm.settle_aux(x);
        for (int k = 0; k < options.sweeps; ++k) {
            const double t = (k + 0.5) / options.sweeps * schedule.total_time();
            for (int g = 0; g < schedule.num_groups(); ++g) group_s[g] = schedule.group_s(g, t);
            for (int i = 0; i < n; ++i) {
                if (cm.is_aux(i)) continue;
                const double s = group_s[schedule.variable_group()[i]];
                if (s >= 1.0) continue;
                const double temp = hot[i] * std::exp(s * log_cold);
                const double d = cm.flip(i, x, changes);
                bool accept;
                if (d < -tie_tol) {
                    accept = true;
                } else if (d <= tie_tol) {
                    accept = options.tie_acceptance > 0.0 && unif(rng) < options.tie_acceptance;
                } else {
                    accept = temp > 0.0 && unif(rng) < std::exp(-d / temp);
                }
                if (!accept) detail::CompiledModel::revert(x, changes);
            }
        }
        BinaryState terminal(std::vector<int>(x.begin(), x.end()));
        previous = terminal;
        reads.push_back(std::move(terminal));
    }
    return detail::assemble(req, std::move(reads));
}

}  // namespace qadp
