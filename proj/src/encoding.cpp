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

#include "qadp/encoding.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qadp {

BinaryEncoding::BinaryEncoding(int var_base, int bit_count, double scale)
        : var_base(var_base), bit_count(bit_count), scale(scale) {
    if (var_base < 0) throw std::invalid_argument("encoding var_base must be nonnegative");
    if (bit_count < 1 || bit_count > 52) throw std::invalid_argument("encoding bit_count must be in [1, 52]");
    if (!std::isfinite(scale) || scale == 0.0) throw std::invalid_argument("encoding scale must be finite and nonzero");
}

double BinaryEncoding::step() const { return std::abs(scale); }

double BinaryEncoding::lower() const { return scale > 0 ? 0.0 : value_at(max_integer()); }

double BinaryEncoding::upper() const { return scale > 0 ? value_at(max_integer()) : 0.0; }

double encode_value(const BinaryEncoding& enc, const BinaryState& bits) {
    if (static_cast<int>(bits.size()) != enc.bit_count) {
        throw std::invalid_argument("bit vector length does not match encoding");
    }
    std::uint64_t k = 0;
    for (int j = 0; j < enc.bit_count; ++j) k |= std::uint64_t(bits[j]) << j;
    return enc.value_at(k);
}

std::uint64_t integer_from(const BinaryEncoding& enc, const BinaryState& full) {
    if (static_cast<int>(full.size()) < enc.end()) throw std::invalid_argument("state does not cover encoding");
    std::uint64_t k = 0;
    for (int j = 0; j < enc.bit_count; ++j) k |= std::uint64_t(full[enc.var(j)]) << j;
    return k;
}

double decode_from(const BinaryEncoding& enc, const BinaryState& full) { return enc.value_at(integer_from(enc, full)); }

void write_bits(const BinaryEncoding& enc, std::uint64_t integer, BinaryState& full) {
    if (integer > enc.max_integer()) throw std::invalid_argument("integer exceeds encoding range");
    for (int j = 0; j < enc.bit_count; ++j) full.set(enc.var(j), (integer >> j) & 1U);
}

NearestBits nearest_bits(const BinaryEncoding& enc, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("value must be finite");
    const double r = value / enc.scale;
    NearestBits out;
    const double max = static_cast<double>(enc.max_integer());
    double k = std::floor(r);
    if (r - k > 0.5) k += 1.0;
    if (r < 0.0 || r > max) out.clamped = true;
    k = std::clamp(k, 0.0, max);
    out.integer = static_cast<std::uint64_t>(k);
    out.bits = BinaryState::from_index(out.integer, enc.bit_count);
    return out;
}

Polynomial linear_poly(const BinaryEncoding& enc) {
    Polynomial p;
    for (int j = 0; j < enc.bit_count; ++j) p.add_term({enc.var(j)}, enc.scale * std::ldexp(1.0, j));
    return p;
}

LogApproxCoefficients LogApproxCoefficients::fit(const BinaryEncoding& enc, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("fit window must satisfy lo < hi");
    std::vector<double> xs;
    for (std::uint64_t k = 0; k <= enc.max_integer(); ++k) {
        double x = enc.value_at(k);
        if (x >= lo && x <= hi && x > 0.0 && x < 1.0) xs.push_back(x);
    }
    if (xs.size() < 3) throw std::invalid_argument("fit window contains fewer than three grid points");
    const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd quad(m, 3), lin(m, 2);
    Eigen::VectorXd lnx(m), ln1mx(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double x = xs[i];
        quad.row(i) << 1.0, x, x * x;
        lin.row(i) << 1.0, x;
        lnx(i) = std::log(x);
        ln1mx(i) = std::log1p(-x);
    }
    Eigen::Vector3d a = quad.colPivHouseholderQr().solve(lnx);
    Eigen::Vector2d at = lin.colPivHouseholderQr().solve(ln1mx);
    return {a(0), a(1), a(2), at(0), at(1)};
}

Polynomial ln_x_poly(const BinaryEncoding& enc, const LogApproxCoefficients& c) {
    Polynomial p(c.a0);
    const double s = enc.scale;
    for (int j = 0; j < enc.bit_count; ++j) {
        double w = std::ldexp(1.0, j);
        p.add_term({enc.var(j)}, c.a1 * s * w + c.a2 * s * s * w * w);
        for (int i = 0; i < j; ++i) {
            p.add_term({enc.var(i), enc.var(j)}, 2.0 * c.a2 * s * s * std::ldexp(1.0, i + j));
        }
    }
    return p;
}

Polynomial ln_1mx_poly(const BinaryEncoding& enc, const LogApproxCoefficients& c) {
    Polynomial p(c.at0);
    for (int j = 0; j < enc.bit_count; ++j) p.add_term({enc.var(j)}, c.at1 * enc.scale * std::ldexp(1.0, j));
    return p;
}

namespace {

template <class Approx, class Exact, class Valid>
ApproxError grid_error(const BinaryEncoding& enc, Approx approx, Exact exact, Valid valid) {
    ApproxError err;
    for (std::uint64_t k = 0; k <= enc.max_integer(); ++k) {
        double x = enc.value_at(k);
        if (!valid(x)) continue;
        double e = std::abs(approx(x) - exact(x));
        if (e > err.max_abs_error) {
            err.max_abs_error = e;
            err.at_value = x;
        }
    }
    return err;
}

}  // namespace

ApproxError ln_x_grid_error(const BinaryEncoding& enc, const LogApproxCoefficients& c) {
    return grid_error(
            enc, [&](double x) { return c.ln_x(x); }, [](double x) { return std::log(x); },
            [](double x) { return x > 0.0; });
}

ApproxError ln_1mx_grid_error(const BinaryEncoding& enc, const LogApproxCoefficients& c) {
    return grid_error(
            enc, [&](double x) { return c.ln_1mx(x); }, [](double x) { return std::log1p(-x); },
            [](double x) { return x < 1.0; });
}

PenaltySpec::PenaltySpec(double gamma, Polynomial constraint_poly)
        : gamma_(gamma), constraint_(std::move(constraint_poly)) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("penalty gamma must be positive");
}

Polynomial add_penalty(const Polynomial& objective, const PenaltySpec& penalty) {
    return objective + penalty.gamma() * penalty.constraint_poly();
}

Polynomial equality_constraint(const Polynomial& lhs, double rhs) {
    Polynomial r = lhs - Polynomial(rhs);
    return r * r;
}

}  // namespace qadp
