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
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "qadp/errors.hpp"
#include "qadp/rbc.hpp"

namespace qadp {

RbcParams::RbcParams() : transition(5, 5) {
    transition << 0.9727, 0.0273, 0.0, 0.0, 0.0,  //
        0.0041, 0.9806, 0.0153, 0.0, 0.0,         //
        0.0, 0.0082, 0.9837, 0.0082, 0.0,         //
        0.0, 0.0, 0.0153, 0.9806, 0.0041,         //
        0.0, 0.0, 0.0, 0.0273, 0.9727;
    // The printed middle row sums to 1.0001.
    for (Eigen::Index r = 0; r < transition.rows(); ++r) transition.row(r) /= transition.row(r).sum();
}

void RbcParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (z_grid.empty()) throw std::invalid_argument("z_grid is empty");
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        if (!(z_grid[i] > 0.0)) throw std::invalid_argument("z_grid values must be positive");
        if (i > 0 && !(z_grid[i] > z_grid[i - 1])) throw std::invalid_argument("z_grid must be strictly increasing");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(z_grid.size());
    if (transition.rows() != m || transition.cols() != m) throw std::invalid_argument("transition matrix has wrong shape");
    if ((transition.array() < 0.0).any()) throw std::invalid_argument("transition matrix has negative entries");
    for (Eigen::Index r = 0; r < m; ++r) {
        if (std::abs(transition.row(r).sum() - 1.0) > 1e-12) throw std::invalid_argument("transition rows must sum to 1");
    }
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, double tol, int max_iter) {
    const Eigen::Index m = transition.rows();
    if (m == 0 || transition.cols() != m) throw std::invalid_argument("transition matrix must be square");
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(m, 1.0 / static_cast<double>(m));
    for (int it = 0; it < max_iter; ++it) {
        Eigen::RowVectorXd next = pi * transition;
        next /= next.sum();
        const double change = (next - pi).cwiseAbs().maxCoeff();
        pi = next;
        if (change < tol) return pi.transpose();
    }
    throw ConvergenceError("stationary distribution did not converge");
}

double steady_state_capital(const RbcParams& params) {
    return std::pow(params.alpha_beta(), 1.0 / (1.0 - params.alpha));
}

double expected_log_z_next(const RbcParams& params, int z_index) {
    double e = 0.0;
    for (int j = 0; j < params.z_count(); ++j) e += params.transition(z_index, j) * std::log(params.z_grid[j]);
    return e;
}

CollocationGrid CollocationGrid::build(const RbcParams& params, int k_count, std::vector<int> z_indices, double lo,
                                       double hi) {
    params.validate();
    if (k_count < 1) throw std::invalid_argument("k_count must be positive");
    if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("invalid capital range");
    if (z_indices.empty()) {
        for (int i = 0; i < params.z_count(); ++i) z_indices.push_back(i);
    }
    CollocationGrid g;
    const double kbar = steady_state_capital(params);
    for (int i = 0; i < k_count; ++i) {
        const double f = k_count == 1 ? 0.5 : static_cast<double>(i) / (k_count - 1);
        g.k_nodes.push_back(kbar * (lo + (hi - lo) * f));
    }
    for (int zi : z_indices) {
        if (zi < 0 || zi >= params.z_count()) throw std::out_of_range("z index out of range");
        const double e = expected_log_z_next(params, zi);
        for (double k : g.k_nodes) {
            CollocationNode n;
            n.k = k;
            n.z_index = zi;
            n.z = params.z_grid[zi];
            n.y = n.z * std::pow(k, params.alpha);
            n.ln_y = std::log(n.y);
            n.e_ln_z_next = e;
            g.nodes.push_back(n);
        }
    }
    return g;
}

std::pair<double, double> closed_form_step(double k, int z_index, const RbcParams& params) {
    if (!(k > 0.0)) throw std::invalid_argument("capital must be positive");
    if (params.delta != 1.0) throw std::invalid_argument("closed form requires full depreciation");
    const double y = params.z_grid.at(z_index) * std::pow(k, params.alpha);
    return {(1.0 - params.alpha_beta()) * y, params.alpha_beta() * y};
}

Params3 true_parameters(const RbcParams& params) {
    if (params.delta != 1.0) throw std::invalid_argument("closed form requires full depreciation");
    params.validate();
    const double ab = params.alpha_beta();
    Eigen::VectorXd pi = stationary_distribution(params.transition);
    double e_ln_z = 0.0;
    for (int j = 0; j < params.z_count(); ++j) e_ln_z += pi(j) * std::log(params.z_grid[j]);
    Params3 t;
    t.x1 = ab;
    t.x3 = 1.0 / (1.0 - ab);
    t.x2 = (std::log(1.0 - ab) + params.beta * t.x3 * e_ln_z + ab * t.x3 * std::log(ab)) / (1.0 - params.beta);
    return t;
}

std::array<double, 3> percent_errors(const Params3& e, const Params3& t) {
    return {100.0 * std::abs(e.x1 - t.x1) / std::abs(t.x1), 100.0 * std::abs(e.x2 - t.x2) / std::abs(t.x2),
            100.0 * std::abs(e.x3 - t.x3) / std::abs(t.x3)};
}

double analytic_policy_update(double x3_bar, const RbcParams& params) {
    if (!(x3_bar > 0.0)) throw std::invalid_argument("x3 must be positive");
    const double c = params.alpha_beta() * x3_bar;
    return c / (1.0 + c);
}

Polynomial build_gp_pbo(double x3_bar, const BinaryEncoding& enc1, const LogApproxCoefficients& coeffs,
                        const RbcParams& params) {
    if (!(x3_bar > 0.0)) throw std::invalid_argument("x3 must be positive");
    Polynomial p = ln_1mx_poly(enc1, coeffs) * -1.0;
    p += ln_x_poly(enc1, coeffs) * (-params.alpha_beta() * x3_bar);
    return p;
}

double gp_loss(double x1, double x3, const LogApproxCoefficients& coeffs, const RbcParams& params) {
    return -coeffs.ln_1mx(x1) - params.alpha_beta() * x3 * coeffs.ln_x(x1);
}

LogValues LogValues::exact(double x1) {
    if (!(x1 > 0.0 && x1 < 1.0)) throw std::invalid_argument("x1 must lie in (0, 1)");
    return {std::log(x1), std::log(1.0 - x1)};
}

LogValues LogValues::approx(double x1, const LogApproxCoefficients& coeffs) {
    return {coeffs.ln_x(x1), coeffs.ln_1mx(x1)};
}

double GammaConstants::value(double x2, double x3) const {
    return gamma0 + gamma1 - gamma2 * x2 + gamma3 * x3 - gamma23 * x2 * x3 + node_count * gamma22 * x2 * x2 +
           gamma33 * x3 * x3;
}

GammaConstants gamma_constants(const LogValues& logs, const CollocationGrid& grid, const RbcParams& params) {
    const double ab = params.alpha_beta();
    const double b = params.beta;
    const double l1 = logs.ln_1mx1;
    GammaConstants g;
    g.gamma22 = (1.0 - b) * (1.0 - b);
    g.node_count = grid.size();
    for (const auto& n : grid.nodes) {
        const double ly = n.ln_y;
        const double zeta = b * n.e_ln_z_next + (ab - 1.0) * ly;
        const double w = zeta + ab * logs.ln_x1;
        g.gamma0 += ly * ly;
        g.gamma1 += 2.0 * ly * l1 + l1 * l1;
        g.gamma2 += 2.0 * (1.0 - b) * (ly + l1);
        g.gamma3 += 2.0 * (ly + l1) * w;
        g.gamma23 += 2.0 * (1.0 - b) * w;
        g.gamma33 += w * w;
        g.zeta += zeta;
    }
    return g;
}

GvPbo build_gv_pbo(double x1_bar, const BinaryEncoding& enc2, const BinaryEncoding& enc3, const CollocationGrid& grid,
                   const RbcParams& params) {
    if (!(x1_bar > 0.0 && x1_bar < 1.0)) throw std::invalid_argument("x1 must lie in (0, 1)");
    return build_gv_pbo(LogValues::exact(x1_bar), enc2, enc3, grid, params);
}

GvPbo build_gv_pbo(const LogValues& logs, const BinaryEncoding& enc2, const BinaryEncoding& enc3,
                   const CollocationGrid& grid, const RbcParams& params) {
    GvPbo out;
    out.gamma = gamma_constants(logs, grid, params);
    const auto& g = out.gamma;
    const Polynomial x2 = linear_poly(enc2);
    const Polynomial x3 = linear_poly(enc3);
    Polynomial p;
    p.add_term({}, g.gamma0 + g.gamma1);
    p += x2 * -g.gamma2;
    p += x3 * g.gamma3;
    p += (x2 * x3) * -g.gamma23;
    p += (x2 * x2) * (g.node_count * g.gamma22);
    p += (x3 * x3) * g.gamma33;
    out.poly = std::move(p);
    return out;
}

double gv_loss(const LogValues& logs, double x2, double x3, const CollocationGrid& grid, const RbcParams& params) {
    const double ab = params.alpha_beta();
    double s = 0.0;
    for (const auto& n : grid.nodes) {
        const double zeta = params.beta * n.e_ln_z_next + (ab - 1.0) * n.ln_y;
        const double r = n.ln_y + logs.ln_1mx1 - (1.0 - params.beta) * x2 + (zeta + ab * logs.ln_x1) * x3;
        s += r * r;
    }
    return s;
}

std::vector<bool> MergedProblem::auxiliary_mask() const {
    std::vector<bool> mask(num_variables(), false);
    for (const auto& a : reduced.alloc.aux_vars) mask[a.id] = true;
    return mask;
}

std::vector<int> MergedProblem::variable_groups(bool include_aux) const {
    const int n = include_aux ? num_variables() : num_original();
    std::vector<int> g(n, 1);
    for (int j = 0; j < x1.bit_count; ++j) g[x1.var(j)] = 0;
    g[x_p] = 0;
    if (include_aux) {
        for (const auto& a : reduced.alloc.aux_vars) {
            const bool policy = std::find(a.term.begin(), a.term.end(), x_p) != a.term.end();
            g[a.id] = policy ? 0 : 1;
        }
    }
    return g;
}

DecodedRead MergedProblem::decode(const BinaryState& x) const {
    DecodedRead d;
    d.params = {decode_from(x1, x), decode_from(x2, x), decode_from(x3, x)};
    d.x_p = x[x_p] != 0;
    d.x_v = x[x_v] != 0;
    return d;
}

BinaryState MergedProblem::encode(const Params3& p, bool x_p_on, bool x_v_on) const {
    BinaryState s(std::vector<int>(num_original(), 0));
    write_bits(x1, nearest_bits(x1, p.x1).integer, s);
    write_bits(x2, nearest_bits(x2, p.x2).integer, s);
    write_bits(x3, nearest_bits(x3, p.x3).integer, s);
    s.set(x_p, x_p_on ? 1 : 0);
    s.set(x_v, x_v_on ? 1 : 0);
    return s;
}

MergedProblem build_merged_problem(const RbcParams& params, const CollocationGrid& grid, const MergedOptions& options) {
    params.validate();
    if (options.j1 < 0 || options.j2 < 0 || options.j3 < 0) throw std::invalid_argument("bit widths must be nonnegative");
    if (!(options.bias_margin > 0.0)) throw std::invalid_argument("bias margin must be positive");
    MergedProblem m;
    m.params = params;
    m.grid = grid;
    const int b1 = options.j1 + 1;
    const int b2 = options.j2 + 1;
    const int b3 = options.j3 + 1;
    m.x1 = BinaryEncoding(0, b1, 1.0 / std::ldexp(1.0, b1));
    m.x2 = BinaryEncoding(b1, b2, options.s2);
    m.x3 = BinaryEncoding(b1 + b2, b3, options.s3);
    m.x_p = b1 + b2 + b3;
    m.x_v = m.x_p + 1;
    m.coeffs = options.coeffs ? *options.coeffs : LogApproxCoefficients::fit(m.x1, options.fit_lo, options.fit_hi);

    const double ab = params.alpha_beta();
    const double b = params.beta;
    const Polynomial lx = ln_x_poly(m.x1, m.coeffs);
    const Polynomial l1 = ln_1mx_poly(m.x1, m.coeffs);
    const Polynomial X2 = linear_poly(m.x2);
    const Polynomial X3 = linear_poly(m.x3);

    m.g_p = l1 * -1.0 + (X3 * lx) * -ab;

    // Residual at node n is A_n + P + zeta_n X3 with P shared by all nodes.
    double sa = 0.0, saa = 0.0, sz = 0.0, saz = 0.0, szz = 0.0;
    for (const auto& n : grid.nodes) {
        const double zeta = b * n.e_ln_z_next + (ab - 1.0) * n.ln_y;
        sa += n.ln_y;
        saa += n.ln_y * n.ln_y;
        sz += zeta;
        saz += n.ln_y * zeta;
        szz += zeta * zeta;
    }
    const Polynomial P = l1 + X2 * -(1.0 - b) + (X3 * lx) * ab;
    Polynomial gv = (P * P) * static_cast<double>(grid.size());
    gv += P * (2.0 * sa);
    gv += (X3 * P) * (2.0 * sz);
    gv.add_term({}, saa);
    gv += X3 * (2.0 * saz);
    gv += (X3 * X3) * szz;
    m.g_v = std::move(gv);

    const int n_orig = m.num_original();
    double gp_min = std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i <= m.x1.max_integer(); ++i) {
        for (std::uint64_t j = 0; j <= m.x3.max_integer(); ++j) {
            gp_min = std::min(gp_min, gp_loss(m.x1.value_at(i), m.x3.value_at(j), m.coeffs, params));
        }
    }
    m.bias_p = options.bias_margin + std::max(0.0, -gp_min);
    m.bias_v = options.bias_margin;

    Polynomial act_p;
    act_p.add_term({m.x_p}, 1.0);
    Polynomial act_v;
    act_v.add_term({m.x_v}, 1.0);
    Polynomial gp_b = m.g_p;
    gp_b.add_term({}, m.bias_p);
    Polynomial gv_b = m.g_v;
    gv_b.add_term({}, m.bias_v);
    const Polynomial block_p = act_p * gp_b;
    const Polynomial block_v = act_v * gv_b;
    m.merged = block_p + block_v;

    ReductionResult rp = quadratize_full(block_p, n_orig);
    ReductionResult rv = quadratize_full(block_v, std::max(n_orig, rp.alloc.next_id()));
    m.p_aux_count = static_cast<int>(rp.alloc.aux_vars.size());
    m.v_aux_count = static_cast<int>(rv.alloc.aux_vars.size());
    m.reduced.qubo_poly = rp.qubo_poly + rv.qubo_poly;
    m.reduced.alloc.original_n = n_orig;
    m.reduced.alloc.aux_vars = rp.alloc.aux_vars;
    m.reduced.alloc.aux_vars.insert(m.reduced.alloc.aux_vars.end(), rv.alloc.aux_vars.begin(), rv.alloc.aux_vars.end());
    if (m.reduced.qubo_poly.degree() > 2) throw std::logic_error("merged problem is not quadratic");
    auto [q, off] = to_qubo(m.reduced.qubo_poly, m.reduced.num_variables());
    m.qubo = std::move(q);
    m.offset = off;
    return m;
}

}  // namespace qadp
