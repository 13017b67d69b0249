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
#include <string>
#include <vector>

#include "qadp/polynomial.hpp"

namespace qadp {

enum class ReductionMethod { Substitution, NTR, PTR };

std::string to_string(ReductionMethod method);

struct AuxVariable {
    int id = 0;
    VarSet term;
    ReductionMethod method = ReductionMethod::PTR;
};

struct AuxAllocation {
    int original_n = 0;
    std::vector<AuxVariable> aux_vars;

    int next_id() const;
    bool is_aux(int var) const;
};

struct ReductionResult {
    Polynomial qubo_poly;
    AuxAllocation alloc;
    std::vector<double> penalties_used;
    std::vector<std::string> warnings;

    int num_variables() const { return alloc.next_id(); }
};

double default_substitution_gamma(const Polynomial& p);

// Replaces the pair (i, j) by a fresh auxiliary in every monomial containing it.
// A pair that occurs in no monomial of degree >= 3 leaves p unchanged and
// records a warning.
ReductionResult reduce_by_substitution(const Polynomial& p, VarPair pair, double gamma,
                                       std::optional<int> aux_id = std::nullopt);

Polynomial ntr_reduce(const Monomial& term, int aux_id);
Polynomial ptr_reduce(const Monomial& term, int first_aux_id);

// x_i x_j = 0 in the ground state, or x_i x_j = x_k when equals is set.
struct Deduction {
    int i = 0;
    int j = 0;
    std::optional<int> equals;
};

Polynomial deduction_reduce(const Polynomial& p, const Deduction& deduction);
Polynomial deduction_reduce(const Polynomial& p, const std::vector<Deduction>& deductions);
// Global substitution without compensating penalties; generally not ground-state preserving.
Polynomial naive_deduction_substitution(const Polynomial& p, const std::vector<Deduction>& deductions);

struct ExcludedConfiguration {
    VarSet vars;
    std::vector<int> values;
};

Polynomial elc_penalty(const ExcludedConfiguration& elc, double weight);
Polynomial elc_reduce(const Polynomial& p, const ExcludedConfiguration& elc, bool check_excludable = true);

ReductionResult quadratize_full(const Polynomial& p, std::optional<int> first_aux_id = std::nullopt);

// Minimizes a polynomial over a designated set of auxiliary variables for
// fixed values of the remaining variables. Auxiliaries are split into
// independent components, each enumerated exhaustively.
class AuxMinimizer {
  public:
    AuxMinimizer(const Polynomial& p, const std::vector<int>& aux_vars, int max_component = 20);

    // x must cover every variable; auxiliary entries are overwritten with the
    // minimizing values (ties resolved toward zero) and the minimum returned.
    double minimize(BinaryState& x) const;

    std::size_t component_count() const { return components_.size(); }

  private:
    struct Component {
        std::vector<int> vars;
        std::vector<Monomial> monomials;
    };
    std::vector<Monomial> fixed_;
    std::vector<Component> components_;
};

struct VerificationReport {
    bool equivalent = true;
    std::uint64_t checked = 0;
    std::optional<BinaryState> counterexample;
    double original_value = 0.0;
    double reduced_value = 0.0;
};

// Exhaustive check that, for every assignment of the original variables, the
// minimum over auxiliaries of the reduced polynomial equals the original.
VerificationReport verify_quadratization(const Polynomial& original, const ReductionResult& result,
                                         int max_original_variables = 20);

struct GroundComparison {
    double original_min = 0.0;
    double reduced_min = 0.0;
    bool energy_preserved = false;
    bool shares_argmin = false;
};

GroundComparison compare_ground(const Polynomial& original, const Polynomial& reduced, int n);

}  // namespace qadp
