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
#include <optional>
#include <utility>
#include <vector>

#include "qadp/anneal.hpp"

namespace qadp::detail {

// Binary polynomial energy with incremental single-flip updates. Auxiliary
// variables are kept at their conditional minimum after every flip.
class CompiledModel {
  public:
    explicit CompiledModel(const SamplerRequest& req);
    CompiledModel(const SamplerModel& model, const std::vector<bool>& auxiliary);

    int size() const { return n_; }
    bool is_aux(int v) const { return aux_[v]; }
    const std::vector<int>& adjacent_aux(int v) const { return adj_aux_[v]; }
    // Summed coefficient magnitude of every term a flip of v can change.
    double flip_scale(int v) const;
    double coefficient_scale() const { return scale_; }

    double energy(const std::vector<std::uint8_t>& x) const;
    int aux_optimum(int a, const std::vector<std::uint8_t>& x) const;
    void settle_aux(std::vector<std::uint8_t>& x) const;

    // Flips v (re-settling its adjacent auxiliaries) and returns the energy
    // change. The previous values are recorded in changes for revert().
    double flip(int v, std::vector<std::uint8_t>& x, std::vector<std::pair<int, std::uint8_t>>& changes) const;
    static void revert(std::vector<std::uint8_t>& x, const std::vector<std::pair<int, std::uint8_t>>& changes);

  private:
    struct Term {
        int begin;
        int end;
        double c;
    };

    void build(const Polynomial& p, int n, const std::vector<bool>& auxiliary);
    double term_value(const Term& t, const std::vector<std::uint8_t>& x) const {
        for (int k = t.begin; k < t.end; ++k) {
            if (!x[vars_[k]]) return 0.0;
        }
        return t.c;
    }
    double local(const std::vector<int>& ids, const std::vector<std::uint8_t>& x) const;

    int n_ = 0;
    double offset_ = 0.0;
    double scale_ = 0.0;
    std::vector<Term> terms_;
    std::vector<int> vars_;
    std::vector<std::vector<int>> incident_;
    std::vector<bool> aux_;
    std::vector<std::vector<int>> adj_aux_;
    std::vector<std::vector<int>> affected_;
};

// Starting classical state for read r: per-read states, then the previous
// terminal state when not reinitializing, then initial_state. Returns nullopt
// when none applies.
std::optional<BinaryState> start_state(const SamplerRequest& req, int r, const std::optional<BinaryState>& previous);

void validate_request(const SamplerRequest& req);

SampleSet assemble(const SamplerRequest& req, std::vector<BinaryState> reads);

}  // namespace qadp::detail
