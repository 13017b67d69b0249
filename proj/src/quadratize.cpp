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

#include "qadp/quadratize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "qadp/errors.hpp"

namespace qadp {

std::string to_string(ReductionMethod method) {
    switch (method) {
        case ReductionMethod::Substitution:
            return "substitution";
        case ReductionMethod::NTR:
            return "ntr";
        case ReductionMethod::PTR:
            return "ptr";
    }
    return "unknown";
}

int AuxAllocation::next_id() const {
    int id = original_n;
    for (const auto& a : aux_vars) id = std::max(id, a.id + 1);
    return id;
}

bool AuxAllocation::is_aux(int var) const {
    return std::any_of(aux_vars.begin(), aux_vars.end(), [var](const AuxVariable& a) { return a.id == var; });
}

double default_substitution_gamma(const Polynomial& p) {
    double s = 0.0;
    for (const auto& [vars, c] : p.terms()) s += std::abs(c);
    return 10.0 * s;
}

namespace {

bool contains(const VarSet& vars, int v) { return std::binary_search(vars.begin(), vars.end(), v); }

VarSet without(const VarSet& vars, int a, int b) {
    VarSet out;
    for (int v : vars) {
        if (v != a && v != b) out.push_back(v);
    }
    return out;
}

}  // namespace

ReductionResult reduce_by_substitution(const Polynomial& p, VarPair pair, double gamma, std::optional<int> aux_id) {
    if (!(gamma > 0.0)) throw std::invalid_argument("substitution gamma must be positive");
    auto [i, j] = pair;
    if (i == j) throw std::invalid_argument("substitution pair must name two distinct variables");
    ReductionResult result;
    result.alloc.original_n = std::max({p.num_variables(), i + 1, j + 1});
    bool present = false;
    for (const auto& [vars, c] : p.terms()) {
        if (vars.size() >= 3 && contains(vars, i) && contains(vars, j)) present = true;
    }
    if (!present) {
        result.qubo_poly = p;
        result.warnings.push_back("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") occurs in no higher-order monomial; nothing substituted");
        return result;
    }
    const int a = aux_id.value_or(result.alloc.original_n);
    if (a < result.alloc.original_n) throw std::invalid_argument("auxiliary id collides with original variables");
    Polynomial out;
    for (const auto& [vars, c] : p.terms()) {
        if (contains(vars, i) && contains(vars, j)) {
            VarSet v = without(vars, i, j);
            v.push_back(a);
            out.add_term(std::move(v), c);
        } else {
            out.add_term(vars, c);
        }
    }
    out.add_term({i, j}, gamma);
    out.add_term({i, a}, -2.0 * gamma);
    out.add_term({j, a}, -2.0 * gamma);
    out.add_term({a}, 3.0 * gamma);
    result.qubo_poly = std::move(out);
    result.alloc.aux_vars.push_back({a, {std::min(i, j), std::max(i, j)}, ReductionMethod::Substitution});
    result.penalties_used.push_back(gamma);
    return result;
}

Polynomial ntr_reduce(const Monomial& term, int aux_id) {
    if (!(term.coeff < 0.0)) throw std::invalid_argument("negative term reduction needs a negative coefficient");
    const int d = term.degree();
    if (d < 3) throw std::invalid_argument("negative term reduction needs degree >= 3");
    if (contains(term.vars, aux_id)) throw std::invalid_argument("auxiliary id collides with term variables");
    const double w = -term.coeff;
    Polynomial p;
    p.add_term({aux_id}, w * (d - 1));
    for (int v : term.vars) p.add_term({v, aux_id}, -w);
    return p;
}

Polynomial ptr_reduce(const Monomial& term, int first_aux_id) {
    if (!(term.coeff > 0.0)) throw std::invalid_argument("positive term reduction needs a positive coefficient");
    const int d = term.degree();
    if (d < 3) throw std::invalid_argument("positive term reduction needs degree >= 3");
    for (int k = 0; k < d - 2; ++k) {
        if (contains(term.vars, first_aux_id + k)) throw std::invalid_argument("auxiliary ids collide with term variables");
    }
    const double w = term.coeff;
    const auto& x = term.vars;
    Polynomial p;
    for (int i = 1; i <= d - 2; ++i) {
        const int a = first_aux_id + i - 1;
        p.add_term({a}, w * (d - i - 1));
        p.add_term({a, x[i - 1]}, w);
        for (int j = i + 1; j <= d; ++j) p.add_term({a, x[j - 1]}, -w);
    }
    p.add_term({x[d - 2], x[d - 1]}, w);
    return p;
}

Polynomial deduction_reduce(const Polynomial& p, const Deduction& d) {
    if (d.i == d.j) throw std::invalid_argument("deduction pair must name two distinct variables");
    if (d.equals && (*d.equals == d.i || *d.equals == d.j)) {
        throw std::invalid_argument("deduction target must differ from the pair");
    }
    Polynomial out;
    for (const auto& [vars, c] : p.terms()) {
        if (vars.size() < 3 || !contains(vars, d.i) || !contains(vars, d.j)) {
            out.add_term(vars, c);
            continue;
        }
        if (!d.equals) {
            if (c > 0.0) out.add_term({d.i, d.j}, c);
            continue;
        }
        const int k = *d.equals;
        VarSet v = without(vars, d.i, d.j);
        v.push_back(k);
        out.add_term(std::move(v), c);
        const double w = std::abs(c);
        out.add_term({d.i, d.j}, w);
        out.add_term({d.i, k}, -2.0 * w);
        out.add_term({d.j, k}, -2.0 * w);
        out.add_term({k}, 3.0 * w);
    }
    return out;
}

Polynomial deduction_reduce(const Polynomial& p, const std::vector<Deduction>& deductions) {
    Polynomial out = p;
    for (const auto& d : deductions) out = deduction_reduce(out, d);
    return out;
}

Polynomial naive_deduction_substitution(const Polynomial& p, const std::vector<Deduction>& deductions) {
    Polynomial cur = p;
    for (const auto& d : deductions) {
        Polynomial out;
        for (const auto& [vars, c] : cur.terms()) {
            if (!contains(vars, d.i) || !contains(vars, d.j)) {
                out.add_term(vars, c);
            } else if (d.equals) {
                VarSet v = without(vars, d.i, d.j);
                v.push_back(*d.equals);
                out.add_term(std::move(v), c);
            }
        }
        cur = std::move(out);
    }
    return cur;
}

Polynomial elc_penalty(const ExcludedConfiguration& elc, double weight) {
    if (elc.vars.size() != elc.values.size()) throw std::invalid_argument("configuration size mismatch");
    Polynomial psi(weight);
    for (std::size_t k = 0; k < elc.vars.size(); ++k) {
        const int v = elc.vars[k];
        Polynomial factor;
        if (elc.values[k] == 1) {
            factor = Polynomial::variable(v);
        } else if (elc.values[k] == 0) {
            factor = Polynomial(1.0) - Polynomial::variable(v);
        } else {
            throw std::invalid_argument("configuration values must be 0 or 1");
        }
        psi = psi * factor;
    }
    return psi;
}

Polynomial elc_reduce(const Polynomial& p, const ExcludedConfiguration& elc, bool check_excludable) {
    VarSet sorted = elc.vars;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("configuration repeats a variable");
    }
    const double zeta = p.coefficient(sorted);
    if (zeta == 0.0) throw std::invalid_argument("no monomial over the configuration's variables");
    const int zeros = static_cast<int>(std::count(elc.values.begin(), elc.values.end(), 0));
    const double top = std::abs(zeta) * ((zeros % 2) ? -1.0 : 1.0);
    if (top != -zeta) {
        throw std::invalid_argument("configuration parity does not cancel the higher-order term");
    }
    if (check_excludable) {
        const int n = p.num_variables();
        if (n > 20) throw CapacityError("excludability check refused above 20 variables");
        auto ground = brute_force(p, n);
        for (const auto& s : ground.argmin_states) {
            bool match = true;
            for (std::size_t k = 0; k < elc.vars.size(); ++k) {
                if (s[elc.vars[k]] != elc.values[k]) match = false;
            }
            if (match) throw std::invalid_argument("configuration is attained by a ground state");
        }
    }
    return p + elc_penalty(elc, std::abs(zeta));
}

ReductionResult quadratize_full(const Polynomial& p, std::optional<int> first_aux_id) {
    ReductionResult result;
    result.alloc.original_n = p.num_variables();
    int next = first_aux_id.value_or(result.alloc.original_n);
    if (next < result.alloc.original_n) throw std::invalid_argument("auxiliary id collides with original variables");
    Polynomial out;
    for (const auto& [vars, c] : p.terms()) {
        if (vars.size() <= 2) {
            out.add_term(vars, c);
            continue;
        }
        Monomial m{vars, c};
        if (c < 0.0) {
            out += ntr_reduce(m, next);
            result.alloc.aux_vars.push_back({next, vars, ReductionMethod::NTR});
            ++next;
        } else {
            out += ptr_reduce(m, next);
            for (int k = 0; k < m.degree() - 2; ++k) {
                result.alloc.aux_vars.push_back({next, vars, ReductionMethod::PTR});
                ++next;
            }
        }
    }
    result.qubo_poly = std::move(out);
    return result;
}

AuxMinimizer::AuxMinimizer(const Polynomial& p, const std::vector<int>& aux_vars, int max_component) {
    std::vector<int> sorted = aux_vars;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    auto index_of = [&](int v) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        return (it != sorted.end() && *it == v) ? static_cast<int>(it - sorted.begin()) : -1;
    };
    std::vector<int> parent(sorted.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& [vars, c] : p.terms()) {
        int first = -1;
        for (int v : vars) {
            int k = index_of(v);
            if (k < 0) continue;
            if (first < 0) {
                first = k;
            } else {
                parent[find(k)] = find(first);
            }
        }
    }
    std::vector<int> comp_of_root(sorted.size(), -1);
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        int r = find(static_cast<int>(k));
        if (comp_of_root[r] < 0) {
            comp_of_root[r] = static_cast<int>(components_.size());
            components_.emplace_back();
        }
        components_[comp_of_root[r]].vars.push_back(sorted[k]);
    }
    for (const auto& [vars, c] : p.terms()) {
        int k = -1;
        for (int v : vars) {
            k = index_of(v);
            if (k >= 0) break;
        }
        if (k < 0) {
            fixed_.push_back({vars, c});
        } else {
            components_[comp_of_root[find(k)]].monomials.push_back({vars, c});
        }
    }
    for (const auto& comp : components_) {
        if (static_cast<int>(comp.vars.size()) > max_component) {
            throw CapacityError("auxiliary component of size " + std::to_string(comp.vars.size()) +
                                " exceeds enumeration guard");
        }
    }
}

double AuxMinimizer::minimize(BinaryState& x) const {
    auto value = [&](const std::vector<Monomial>& monos) {
        double e = 0.0;
        for (const auto& m : monos) {
            bool on = true;
            for (int v : m.vars) {
                if (!x[v]) {
                    on = false;
                    break;
                }
            }
            if (on) e += m.coeff;
        }
        return e;
    };
    double total = value(fixed_);
    for (const auto& comp : components_) {
        const std::size_t k = comp.vars.size();
        std::uint64_t best_idx = 0;
        double best = 0.0;
        for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << k); ++idx) {
            for (std::size_t b = 0; b < k; ++b) x.set(comp.vars[b], (idx >> b) & 1U);
            double e = value(comp.monomials);
            if (idx == 0 || e < best) {
                best = e;
                best_idx = idx;
            }
        }
        for (std::size_t b = 0; b < k; ++b) x.set(comp.vars[b], (best_idx >> b) & 1U);
        total += best;
    }
    return total;
}

VerificationReport verify_quadratization(const Polynomial& original, const ReductionResult& result,
                                         int max_original_variables) {
    const int n0 = std::max(result.alloc.original_n, original.num_variables());
    if (n0 > max_original_variables) {
        throw CapacityError("verification refused: " + std::to_string(n0) + " original variables");
    }
    const int n = std::max(result.alloc.next_id(), result.qubo_poly.num_variables());
    std::vector<int> aux;
    for (const auto& a : result.alloc.aux_vars) aux.push_back(a.id);
    AuxMinimizer minimizer(result.qubo_poly, aux);
    double scale = 0.0;
    for (const auto& [vars, c] : original.terms()) scale += std::abs(c);
    const double tol = 1e-9 * (1.0 + scale);
    VerificationReport report;
    BinaryState x = BinaryState::zeros(n);
    for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n0); ++idx) {
        for (int v = 0; v < n0; ++v) x.set(v, (idx >> v) & 1U);
        double reduced = minimizer.minimize(x);
        BinaryState orig = BinaryState::from_index(idx, n0);
        double value = evaluate(original, orig);
        ++report.checked;
        if (std::abs(reduced - value) > tol) {
            report.equivalent = false;
            report.counterexample = orig;
            report.original_value = value;
            report.reduced_value = reduced;
            break;
        }
    }
    return report;
}

GroundComparison compare_ground(const Polynomial& original, const Polynomial& reduced, int n) {
    auto a = brute_force(original, n);
    auto b = brute_force(reduced, n);
    GroundComparison g;
    g.original_min = a.min_energy;
    g.reduced_min = b.min_energy;
    g.energy_preserved = std::abs(a.min_energy - b.min_energy) <= 1e-9 * (1.0 + std::abs(a.min_energy));
    for (const auto& s : a.argmin_states) {
        if (std::binary_search(b.argmin_states.begin(), b.argmin_states.end(), s)) g.shares_argmin = true;
    }
    return g;
}

}  // namespace qadp
