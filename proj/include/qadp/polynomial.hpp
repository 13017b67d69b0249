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
#include <span>
#include <string>
#include <vector>

#include "qadp/bqm.hpp"

namespace qadp {

using VarSet = std::vector<int>;

inline constexpr double kPruneTolerance = 1e-12;

struct Monomial {
    VarSet vars;
    double coeff = 0.0;

    int degree() const { return static_cast<int>(vars.size()); }
};

// Multilinear pseudo-Boolean polynomial. Variable sets are kept sorted and
// duplicate-free; coefficients with magnitude at or below kPruneTolerance are
// dropped.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(double constant);

    static Polynomial variable(int i, double coeff = 1.0);
    static Polynomial from_monomials(const std::vector<Monomial>& monomials);

    void add_term(VarSet vars, double coeff);

    double coefficient(VarSet vars) const;
    double constant() const { return coefficient({}); }

    const std::map<VarSet, double>& terms() const { return terms_; }
    std::vector<Monomial> monomials() const;

    int degree() const;
    // One past the largest variable id.
    int num_variables() const;
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(double scalar);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

  private:
    std::map<VarSet, double> terms_;
};

Polynomial poly_add(const Polynomial& p, const Polynomial& q);
Polynomial poly_mul(const Polynomial& p, const Polynomial& q);

double evaluate(const Polynomial& p, std::span<const std::uint8_t> x);
double evaluate(const Polynomial& p, const BinaryState& x);

// Fixes variable var to value and returns the reduced polynomial.
Polynomial substitute(const Polynomial& p, int var, int value);

// Exact conversion of a degree-2 polynomial over n variables. The constant
// term is returned separately.
std::pair<QuboModel, double> to_qubo(const Polynomial& p, int n);
Polynomial from_qubo(const QuboModel& q, double offset = 0.0);

SpectrumResult<BinaryState> brute_force(const Polynomial& p, int n, const BruteForceOptions& options = {});

void write_polynomial(std::ostream& out, const Polynomial& p);
std::string to_text(const Polynomial& p);
Polynomial read_polynomial(std::istream& in);
Polynomial polynomial_from_text(const std::string& text);

}  // namespace qadp
