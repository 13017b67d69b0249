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

#include "qadp/polynomial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qadp/errors.hpp"

namespace qadp {

namespace {

void canonicalize(VarSet& vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (!vars.empty() && vars.front() < 0) throw std::invalid_argument("negative variable id");
}

VarSet merge_sets(const VarSet& a, const VarSet& b) {
    VarSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

Polynomial::Polynomial(double constant) { add_term({}, constant); }

Polynomial Polynomial::variable(int i, double coeff) {
    Polynomial p;
    p.add_term({i}, coeff);
    return p;
}

Polynomial Polynomial::from_monomials(const std::vector<Monomial>& monomials) {
    Polynomial p;
    for (const auto& m : monomials) p.add_term(m.vars, m.coeff);
    return p;
}

void Polynomial::add_term(VarSet vars, double coeff) {
    if (!std::isfinite(coeff)) throw std::invalid_argument("non-finite polynomial coefficient");
    if (coeff == 0.0) return;
    canonicalize(vars);
    auto [it, inserted] = terms_.try_emplace(std::move(vars), coeff);
    if (!inserted) it->second += coeff;
    if (std::abs(it->second) <= kPruneTolerance) terms_.erase(it);
}

double Polynomial::coefficient(VarSet vars) const {
    canonicalize(vars);
    auto it = terms_.find(vars);
    return it == terms_.end() ? 0.0 : it->second;
}

std::vector<Monomial> Polynomial::monomials() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& [vars, c] : terms_) out.push_back({vars, c});
    return out;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [vars, c] : terms_) d = std::max<int>(d, static_cast<int>(vars.size()));
    return d;
}

int Polynomial::num_variables() const {
    int n = 0;
    for (const auto& [vars, c] : terms_) {
        if (!vars.empty()) n = std::max(n, vars.back() + 1);
    }
    return n;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const auto& [vars, c] : other.terms_) add_term(vars, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    for (const auto& [vars, c] : other.terms_) add_term(vars, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double scalar) {
    if (scalar == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= scalar;
        if (std::abs(it->second) <= kPruneTolerance) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [va, ca] : a.terms_) {
        for (const auto& [vb, cb] : b.terms_) out.add_term(merge_sets(va, vb), ca * cb);
    }
    return out;
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial poly_mul(const Polynomial& p, const Polynomial& q) { return p * q; }

double evaluate(const Polynomial& p, std::span<const std::uint8_t> x) {
    if (static_cast<int>(x.size()) < p.num_variables()) {
        throw std::invalid_argument("state does not cover all polynomial variables");
    }
    double e = 0.0;
    for (const auto& [vars, c] : p.terms()) {
        bool on = true;
        for (int v : vars) {
            if (!x[v]) {
                on = false;
                break;
            }
        }
        if (on) e += c;
    }
    return e;
}

double evaluate(const Polynomial& p, const BinaryState& x) { return evaluate(p, std::span(x.values())); }

Polynomial substitute(const Polynomial& p, int var, int value) {
    if (value != 0 && value != 1) throw std::invalid_argument("substituted value must be 0 or 1");
    Polynomial out;
    for (const auto& [vars, c] : p.terms()) {
        auto it = std::find(vars.begin(), vars.end(), var);
        if (it == vars.end()) {
            out.add_term(vars, c);
        } else if (value == 1) {
            VarSet rest(vars.begin(), it);
            rest.insert(rest.end(), it + 1, vars.end());
            out.add_term(std::move(rest), c);
        }
    }
    return out;
}

std::pair<QuboModel, double> to_qubo(const Polynomial& p, int n) {
    if (p.degree() > 2) throw std::invalid_argument("polynomial degree exceeds 2");
    if (p.num_variables() > n) throw std::invalid_argument("polynomial uses variables beyond n");
    QuboModel q(n);
    double offset = 0.0;
    for (const auto& [vars, c] : p.terms()) {
        if (vars.empty()) {
            offset += c;
        } else if (vars.size() == 1) {
            q.add(vars[0], vars[0], c);
        } else {
            q.add(vars[0], vars[1], c);
        }
    }
    return {q, offset};
}

Polynomial from_qubo(const QuboModel& q, double offset) {
    Polynomial p(offset);
    for (const auto& [key, v] : q.terms()) {
        if (key.first == key.second) {
            p.add_term({key.first}, v);
        } else {
            p.add_term({key.first, key.second}, v);
        }
    }
    return p;
}

SpectrumResult<BinaryState> brute_force(const Polynomial& p, int n, const BruteForceOptions& options) {
    if (p.num_variables() > n) throw std::invalid_argument("polynomial uses variables beyond n");
    if (n > options.max_variables || n > 62) {
        throw CapacityError("brute force refused: " + std::to_string(n) + " variables exceeds guard of " +
                            std::to_string(options.max_variables));
    }
    if (options.keep_spectrum && n > options.max_spectrum_variables) {
        throw CapacityError("full spectrum refused: " + std::to_string(n) + " variables");
    }
    auto monos = p.monomials();
    std::vector<std::vector<int>> incident(n);
    double scale = 0.0;
    for (std::size_t m = 0; m < monos.size(); ++m) {
        scale += std::abs(monos[m].coeff);
        for (int v : monos[m].vars) incident[v].push_back(static_cast<int>(m));
    }
    const double tol = 1e-9 * (1.0 + scale);
    std::vector<std::uint8_t> x(n, 0);
    double energy = p.constant();
    double best = energy;
    std::vector<std::uint64_t> cand{0};
    std::uint64_t index = 0;
    for (std::uint64_t g = 1; g < (std::uint64_t(1) << n); ++g) {
        int k = std::countr_zero(g);
        double delta = 0.0;
        for (int m : incident[k]) {
            bool on = true;
            for (int v : monos[m].vars) {
                if (v != k && !x[v]) {
                    on = false;
                    break;
                }
            }
            if (on) delta += monos[m].coeff;
        }
        energy += x[k] ? -delta : delta;
        x[k] ^= 1;
        index ^= std::uint64_t(1) << k;
        if (energy < best - tol) {
            best = energy;
            cand.assign(1, index);
        } else if (energy <= best + tol) {
            best = std::min(best, energy);
            cand.push_back(index);
        }
    }
    SpectrumResult<BinaryState> result;
    std::vector<std::pair<BinaryState, double>> exact;
    bool first = true;
    for (auto idx : cand) {
        BinaryState s = BinaryState::from_index(idx, n);
        double e = evaluate(p, s);
        if (first || e < result.min_energy) result.min_energy = e;
        first = false;
        exact.emplace_back(std::move(s), e);
    }
    for (auto& [s, e] : exact) {
        if (e == result.min_energy) result.argmin_states.push_back(std::move(s));
    }
    std::sort(result.argmin_states.begin(), result.argmin_states.end());
    if (options.keep_spectrum) {
        std::vector<std::pair<BinaryState, double>> all;
        for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
            BinaryState s = BinaryState::from_index(idx, n);
            double e = evaluate(p, s);
            all.emplace_back(std::move(s), e);
        }
        result.spectrum = std::move(all);
    }
    return result;
}

void write_polynomial(std::ostream& out, const Polynomial& p) {
    char buf[64];
    for (const auto& [vars, c] : p.terms()) {
        std::snprintf(buf, sizeof buf, "%.17g", c);
        out << buf;
        for (int v : vars) out << " " << v;
        out << "\n";
    }
}

std::string to_text(const Polynomial& p) {
    std::ostringstream ss;
    write_polynomial(ss, p);
    return ss.str();
}

Polynomial read_polynomial(std::istream& in) {
    Polynomial p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        double c = 0.0;
        try {
            std::size_t used = 0;
            c = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError(lineno, "invalid coefficient '" + tok + "'");
        }
        VarSet vars;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                int v = std::stoi(tok, &used);
                if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
                vars.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(lineno, "invalid variable id '" + tok + "'");
            }
        }
        try {
            p.add_term(std::move(vars), c);
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return p;
}

Polynomial polynomial_from_text(const std::string& text) {
    std::istringstream ss(text);
    return read_polynomial(ss);
}

}  // namespace qadp
