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
#include <bit>
#include <cmath>
#include <stdexcept>

#include "compiled_model.hpp"
#include "qadp/anneal.hpp"
#include "qadp/errors.hpp"

namespace qadp {

namespace {

using State = std::vector<std::uint8_t>;

void set_group(const detail::CompiledModel& cm, const std::vector<int>& vars, std::uint64_t pattern, State& x) {
    for (std::size_t b = 0; b < vars.size(); ++b) x[vars[b]] = (pattern >> b) & 1U;
    for (int v : vars) {
        for (int a : cm.adjacent_aux(v)) x[a] = static_cast<std::uint8_t>(cm.aux_optimum(a, x));
    }
}

// Replaces the group's variables by the joint assignment of lowest energy.
// Degenerate minima are ranked by the second-order transverse-field shift,
// sum over raising single flips within the group of 1 / (E_n - E_0); then the
// current assignment is preferred, then the lowest pattern.
void optimize_group(const detail::CompiledModel& cm, const std::vector<int>& vars, State& x, const GreedyOptions& options) {
    const int k = static_cast<int>(vars.size());
    if (k == 0) return;
    if (k > options.max_group_bits) {
        throw CapacityError("greedy group of " + std::to_string(k) + " variables exceeds enumeration guard");
    }
    std::uint64_t current = 0;
    for (int b = 0; b < k; ++b) current |= std::uint64_t(x[vars[b]]) << b;

    const double scale = 1.0 + cm.coefficient_scale();
    const double loose = 1e-9 * scale;
    const double tight = 1e-12 * scale;
    std::vector<std::pair<int, std::uint8_t>> changes;
    double energy = 0.0, best = 0.0;
    std::vector<std::uint64_t> cand{current};
    std::uint64_t pattern = current;
    for (std::uint64_t g = 1; g < (std::uint64_t(1) << k); ++g) {
        const int b = std::countr_zero(g);
        energy += cm.flip(vars[b], x, changes);
        pattern ^= std::uint64_t(1) << b;
        if (energy < best - loose) {
            best = energy;
            cand.assign(1, pattern);
        } else if (energy <= best + loose) {
            best = std::min(best, energy);
            cand.push_back(pattern);
        }
    }

    std::vector<double> exact(cand.size());
    double min_exact = 0.0;
    for (std::size_t c = 0; c < cand.size(); ++c) {
        set_group(cm, vars, cand[c], x);
        exact[c] = cm.energy(x);
        if (c == 0 || exact[c] < min_exact) min_exact = exact[c];
    }
    std::vector<std::uint64_t> ties;
    for (std::size_t c = 0; c < cand.size(); ++c) {
        if (exact[c] <= min_exact + tight) ties.push_back(cand[c]);
    }
    std::sort(ties.begin(), ties.end());

    std::uint64_t chosen = ties.front();
    if (ties.size() > 1) {
        std::vector<double> score(ties.size(), 0.0);
        if (options.perturbative_tie_break) {
            for (std::size_t c = 0; c < ties.size(); ++c) {
                set_group(cm, vars, ties[c], x);
                for (int v : vars) {
                    double d = cm.flip(v, x, changes);
                    detail::CompiledModel::revert(x, changes);
                    if (d > tight) score[c] += 1.0 / d;
                }
            }
        }
        const double top = *std::max_element(score.begin(), score.end());
        const double band = 1e-12 * std::max(1.0, std::abs(top));
        std::vector<std::uint64_t> best_ties;
        for (std::size_t c = 0; c < ties.size(); ++c) {
            if (score[c] >= top - band) best_ties.push_back(ties[c]);
        }
        chosen = std::find(best_ties.begin(), best_ties.end(), current) != best_ties.end() ? current : best_ties.front();
    }
    set_group(cm, vars, chosen, x);
}

BinaryState run_greedy(const detail::CompiledModel& cm, const std::vector<std::vector<int>>& groups, State x, int cycles,
                       const GreedyOptions& options) {
    cm.settle_aux(x);
    for (int c = 0; c < cycles; ++c) {
        for (const auto& g : groups) optimize_group(cm, g, x, options);
    }
    return BinaryState(std::vector<int>(x.begin(), x.end()));
}

std::vector<std::vector<int>> clean_groups(const detail::CompiledModel& cm, const std::vector<std::vector<int>>& groups) {
    std::vector<int> seen(cm.size(), 0);
    std::vector<std::vector<int>> out;
    for (const auto& g : groups) {
        std::vector<int> vars;
        for (int v : g) {
            if (v < 0 || v >= cm.size()) throw std::invalid_argument("group variable out of range");
            if (seen[v]++) throw std::invalid_argument("groups must not overlap");
            if (!cm.is_aux(v)) vars.push_back(v);
        }
        out.push_back(std::move(vars));
    }
    return out;
}

}  // namespace

BinaryState sequential_greedy(const SamplerModel& model, const std::vector<std::vector<int>>& groups,
                              const BinaryState& initial, int cycles, const std::vector<bool>& auxiliary,
                              const GreedyOptions& options) {
    if (cycles < 1) throw std::invalid_argument("cycles must be at least 1");
    detail::CompiledModel cm(model, auxiliary);
    if (static_cast<int>(initial.size()) != cm.size()) throw std::invalid_argument("initial state has wrong length");
    auto clean = clean_groups(cm, groups);
    std::vector<int> covered(cm.size(), 0);
    for (const auto& g : groups)
        for (int v : g) covered[v] = 1;
    for (int v = 0; v < cm.size(); ++v) {
        if (!cm.is_aux(v) && !covered[v]) throw std::invalid_argument("groups must cover every non-auxiliary variable");
    }
    return run_greedy(cm, clean, initial.values(), cycles, options);
}

SampleSet greedy_anneal(const SamplerRequest& req, const GreedyOptions& options) {
    detail::validate_request(req);
    detail::CompiledModel cm(req);
    const auto& schedule = req.schedule;
    std::vector<std::vector<int>> groups;
    for (const auto& stage : schedule.activity_stages()) {
        std::vector<int> vars;
        for (int v = 0; v < cm.size(); ++v) {
            if (std::find(stage.begin(), stage.end(), schedule.variable_group()[v]) != stage.end()) vars.push_back(v);
        }
        groups.push_back(std::move(vars));
    }
    groups = clean_groups(cm, groups);
    std::vector<BinaryState> reads;
    std::optional<BinaryState> previous;
    for (int r = 0; r < req.reads; ++r) {
        auto start = detail::start_state(req, r, previous);
        State x = start ? start->values() : State(cm.size(), 0);
        BinaryState terminal = run_greedy(cm, groups, std::move(x), schedule.cycles(), options);
        previous = terminal;
        reads.push_back(std::move(terminal));
    }
    return detail::assemble(req, std::move(reads));
}

}  // namespace qadp
