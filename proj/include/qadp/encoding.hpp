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

#include "qadp/bqm.hpp"
#include "qadp/polynomial.hpp"

namespace qadp {

// x = scale * sum_j 2^j b_j over bits var_base .. var_base + bit_count - 1.
struct BinaryEncoding {
    int var_base = 0;
    int bit_count = 1;
    double scale = 1.0;

    BinaryEncoding() = default;
    BinaryEncoding(int var_base, int bit_count, double scale);

    int var(int j) const { return var_base + j; }
    int end() const { return var_base + bit_count; }
    std::uint64_t max_integer() const { return (std::uint64_t(1) << bit_count) - 1; }
    double step() const;
    double lower() const;
    double upper() const;
    double value_at(std::uint64_t integer) const { return scale * static_cast<double>(integer); }
};

double encode_value(const BinaryEncoding& enc, const BinaryState& bits);
// Reads the encoded bits out of a full problem state.
double decode_from(const BinaryEncoding& enc, const BinaryState& full);
std::uint64_t integer_from(const BinaryEncoding& enc, const BinaryState& full);
void write_bits(const BinaryEncoding& enc, std::uint64_t integer, BinaryState& full);

struct NearestBits {
    BinaryState bits;
    std::uint64_t integer = 0;
    bool clamped = false;
};

NearestBits nearest_bits(const BinaryEncoding& enc, double value);

Polynomial linear_poly(const BinaryEncoding& enc);

struct LogApproxCoefficients {
    double a0 = -0.10905;
    double a1 = 0.57570;
    double a2 = -1.38445;
    double at0 = -0.22278;
    double at1 = -0.28375;

    // Least-squares fit of ln(x) and ln(1-x) over the encoded grid points in [lo, hi].
    static LogApproxCoefficients fit(const BinaryEncoding& enc, double lo, double hi);

    double ln_x(double x) const { return a0 + a1 * x + a2 * x * x; }
    double ln_1mx(double x) const { return at0 + at1 * x; }

    friend bool operator==(const LogApproxCoefficients&, const LogApproxCoefficients&) = default;
};

Polynomial ln_x_poly(const BinaryEncoding& enc, const LogApproxCoefficients& coeffs);
Polynomial ln_1mx_poly(const BinaryEncoding& enc, const LogApproxCoefficients& coeffs);

struct ApproxError {
    double max_abs_error = 0.0;
    double at_value = 0.0;
};

// Exhaustive comparison against the exact logarithm on the encoded grid,
// skipping points where the logarithm is undefined.
ApproxError ln_x_grid_error(const BinaryEncoding& enc, const LogApproxCoefficients& coeffs);
ApproxError ln_1mx_grid_error(const BinaryEncoding& enc, const LogApproxCoefficients& coeffs);

class PenaltySpec {
  public:
    PenaltySpec(double gamma, Polynomial constraint_poly);

    double gamma() const { return gamma_; }
    const Polynomial& constraint_poly() const { return constraint_; }

  private:
    double gamma_;
    Polynomial constraint_;
};

Polynomial add_penalty(const Polynomial& objective, const PenaltySpec& penalty);
// (lhs - rhs)^2, zero exactly where lhs == rhs.
Polynomial equality_constraint(const Polynomial& lhs, double rhs);

}  // namespace qadp
