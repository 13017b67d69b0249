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
#include <complex>
#include <map>
#include <random>
#include <stdexcept>

#include "compiled_model.hpp"
#include "qadp/anneal.hpp"
#include "qadp/errors.hpp"

namespace qadp {

std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_hamiltonian_spectrum(int n) {
    if (n < 1) throw std::invalid_argument("need at least one qubit");
    if (n > 12) throw CapacityError("initial Hamiltonian spectrum limited to 12 qubits");
    const Eigen::Index dim = Eigen::Index(1) << n;
    // In the Hadamard basis H0 is diagonal with entries -(n - 2|b|).
    Eigen::VectorXd eig(dim);
    for (Eigen::Index b = 0; b < dim; ++b) eig(b) = -(n - 2.0 * std::popcount(static_cast<std::uint64_t>(b)));
    std::sort(eig.data(), eig.data() + dim);
    Eigen::VectorXd ground = Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    return {eig, ground};
}

Eigen::MatrixXd initial_hamiltonian_matrix(int n) {
    if (n < 1) throw std::invalid_argument("need at least one qubit");
    if (n > 10) throw CapacityError("dense initial Hamiltonian limited to 10 qubits");
    const Eigen::Index dim = Eigen::Index(1) << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x)
        for (int i = 0; i < n; ++i) h(x, x ^ (Eigen::Index(1) << i)) -= 1.0;
    return h;
}

namespace {

using cd = std::complex<double>;

struct Hamiltonian {
    int n = 0;
    std::vector<std::vector<int>> signatures;  // sorted group lists
    std::vector<Eigen::VectorXd> diagonals;
    std::vector<double> transverse;  // per-qubit base amplitude
};

// Spin-product expansion of the problem: each binary monomial prod (1 + s_i) / 2
// contributes to every spin product over a subset of its variables.
std::map<VarSet, double> spin_terms(const SamplerModel& model) {
    std::map<VarSet, double> out;
    if (auto* m = std::get_if<IsingModel>(&model)) {
        for (int i = 0; i < m->num_variables(); ++i) {
            if (m->biases()[i] != 0.0) out[{i}] += m->biases()[i];
        }
        for (const auto& [key, J] : m->couplings()) {
            if (J != 0.0) out[{key.first, key.second}] += J;
        }
        return out;
    }
    Polynomial p;
    if (auto* q = std::get_if<QuboModel>(&model)) {
        p = from_qubo(*q);
    } else {
        p = std::get<PolynomialModel>(model).poly;
    }
    for (const auto& [vars, c] : p.terms()) {
        const std::size_t d = vars.size();
        const double w = std::ldexp(c, -static_cast<int>(d));
        for (std::uint64_t sub = 1; sub < (std::uint64_t(1) << d); ++sub) {
            VarSet s;
            for (std::size_t b = 0; b < d; ++b)
                if ((sub >> b) & 1U) s.push_back(vars[b]);
            out[s] += w;
        }
    }
    return out;
}

Hamiltonian build_hamiltonian(const SamplerRequest& req, const StatevectorOptions& options) {
    Hamiltonian h;
    h.n = model_size(req);
    const Eigen::Index dim = Eigen::Index(1) << h.n;
    const auto& vg = req.schedule.variable_group();
    const bool literal = options.convention == TransverseConvention::PaperLiteral;
    h.transverse.assign(h.n, literal ? 0.0 : 1.0);
    std::map<std::vector<int>, Eigen::VectorXd> diag;
    for (const auto& [vars, c] : spin_terms(req.model)) {
        if (std::abs(c) <= kPruneTolerance) continue;
        if (literal && vars.size() == 1) {
            h.transverse[vars[0]] += c;
            continue;
        }
        std::vector<int> sig;
        for (int v : vars) sig.push_back(vg[v]);
        std::sort(sig.begin(), sig.end());
        auto it = diag.find(sig);
        if (it == diag.end()) it = diag.emplace(sig, Eigen::VectorXd::Zero(dim)).first;
        auto& d = it->second;
        for (Eigen::Index x = 0; x < dim; ++x) {
            double sign = 1.0;
            for (int v : vars) sign *= ((x >> v) & 1) ? 1.0 : -1.0;
            d(x) += c * sign;
        }
    }
    for (auto& [sig, d] : diag) {
        h.signatures.push_back(sig);
        h.diagonals.push_back(std::move(d));
    }
    return h;
}

void apply_diagonal(Eigen::VectorXcd& psi, const Eigen::VectorXd& d, double factor) {
    for (Eigen::Index x = 0; x < psi.size(); ++x) psi(x) *= std::polar(1.0, -d(x) * factor);
}

void apply_transverse(Eigen::VectorXcd& psi, int i, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const cd is(0.0, s);
    const Eigen::Index bit = Eigen::Index(1) << i;
    for (Eigen::Index x = 0; x < psi.size(); ++x) {
        if (x & bit) continue;
        const cd a = psi(x), b = psi(x | bit);
        psi(x) = c * a + is * b;
        psi(x | bit) = is * a + c * b;
    }
}

EvolutionResult integrate(const Hamiltonian& h, const AnnealSchedule& schedule, const QuantumStateVector& start,
                          double t0, double t1, int steps, const StatevectorOptions& options) {
    EvolutionResult out;
    out.state = start;
    out.steps = steps;
    auto& psi = out.state.amplitudes;
    const double dt = (t1 - t0) / steps;
    const double scale = options.energy_scale;
    std::vector<double> gs(schedule.num_groups());
    Eigen::VectorXd d(psi.size());
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + (k + 0.5) * dt;
        for (int g = 0; g < schedule.num_groups(); ++g) gs[g] = schedule.group_s(g, t);
        d.setZero();
        for (std::size_t c = 0; c < h.signatures.size(); ++c) {
            double w = 0.0;
            for (int g : h.signatures[c]) w += gs[g];
            w /= static_cast<double>(h.signatures[c].size());
            if (w != 0.0) d += w * h.diagonals[c];
        }
        apply_diagonal(psi, d, scale * dt / 2);
        for (int i = 0; i < h.n; ++i) {
            const double a = (1.0 - gs[schedule.variable_group()[i]]) * h.transverse[i];
            if (a != 0.0) apply_transverse(psi, i, a * scale * dt);
        }
        apply_diagonal(psi, d, scale * dt / 2);
        const double drift = std::abs(psi.squaredNorm() - 1.0);
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (drift > options.norm_tol) {
            throw IntegrationError("state-vector norm drifted by " + std::to_string(drift));
        }
    }
    return out;
}

void check_capacity(int n, const StatevectorOptions& options) {
    if (n > options.max_variables) {
        throw CapacityError("state-vector simulation limited to " + std::to_string(options.max_variables) + " qubits, got " +
                            std::to_string(n));
    }
}

QuantumStateVector basis_vector(int n, const BinaryState& x) {
    QuantumStateVector v;
    v.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
    v.amplitudes(static_cast<Eigen::Index>(x.to_index())) = 1.0;
    return v;
}

QuantumStateVector uniform_vector(int n) {
    QuantumStateVector v;
    const Eigen::Index dim = Eigen::Index(1) << n;
    v.amplitudes = Eigen::VectorXcd::Constant(dim, cd(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    return v;
}

}  // namespace

QuantumStateVector initial_state_vector(const SamplerRequest& req) {
    const int n = model_size(req);
    if (!req.schedule.starts_classical()) return uniform_vector(n);
    if (!req.read_initial_states.empty()) return basis_vector(n, req.read_initial_states.front());
    if (!req.initial_state) throw std::invalid_argument("a schedule starting from a classical state requires initial_state");
    return basis_vector(n, *req.initial_state);
}

namespace {

EvolutionResult refine(const Hamiltonian& h, const AnnealSchedule& schedule, const QuantumStateVector& start, double t0,
                       double t1, const StatevectorOptions& options) {
    int steps = std::max(1, options.min_steps);
    EvolutionResult coarse = integrate(h, schedule, start, t0, t1, steps, options);
    while (true) {
        if (steps * 2 > options.max_steps) {
            throw IntegrationError("step refinement did not converge within " + std::to_string(options.max_steps) + " steps");
        }
        steps *= 2;
        EvolutionResult fine = integrate(h, schedule, start, t0, t1, steps, options);
        const double diff = (fine.state.probabilities() - coarse.state.probabilities()).cwiseAbs().maxCoeff();
        if (diff < options.convergence_tol) {
            fine.max_norm_drift = std::max(fine.max_norm_drift, coarse.max_norm_drift);
            return fine;
        }
        coarse = std::move(fine);
    }
}

}  // namespace

EvolutionResult evolve(const SamplerRequest& req, const QuantumStateVector& start, const StatevectorOptions& options) {
    const int n = model_size(req);
    check_capacity(n, options);
    if (start.amplitudes.size() != (Eigen::Index(1) << n)) throw std::invalid_argument("state vector has wrong dimension");
    return refine(build_hamiltonian(req, options), req.schedule, start, 0.0, req.schedule.total_time(), options);
}

namespace {

BinaryState draw(const Eigen::VectorXd& p, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, p.sum());
    double u = unif(rng);
    Eigen::Index last = 0;
    for (Eigen::Index x = 0; x < p.size(); ++x) {
        if (p(x) <= 0.0) continue;
        last = x;
        u -= p(x);
        if (u < 0.0) return BinaryState::from_index(static_cast<std::uint64_t>(x), n);
    }
    return BinaryState::from_index(static_cast<std::uint64_t>(last), n);
}

// Times at which a group enters s = 0 strictly inside the schedule.
std::vector<std::pair<double, int>> full_reversals(const AnnealSchedule& schedule) {
    std::vector<std::pair<double, int>> out;
    for (int c = 0; c < schedule.cycles(); ++c) {
        for (int g = 0; g < schedule.num_groups(); ++g) {
            const auto& path = schedule.group_path(g);
            for (std::size_t i = 1; i < path.size(); ++i) {
                const double t = c * schedule.cycle_time() + path[i].time;
                if (path[i].s == 0.0 && path[i - 1].s > 0.0 && t > 0.0 && t < schedule.total_time()) {
                    out.emplace_back(t, g);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Basis state x with the qubits of group g replaced by |+>.
QuantumStateVector reset_group(int n, std::uint64_t x, const std::vector<int>& variable_group, int g) {
    std::vector<int> members;
    std::uint64_t mask = 0;
    for (int i = 0; i < n; ++i) {
        if (variable_group[i] == g) {
            members.push_back(i);
            mask |= std::uint64_t(1) << i;
        }
    }
    QuantumStateVector v;
    v.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
    const std::uint64_t base = x & ~mask;
    const double amp = std::pow(2.0, -0.5 * static_cast<double>(members.size()));
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << members.size()); ++m) {
        std::uint64_t idx = base;
        for (std::size_t k = 0; k < members.size(); ++k)
            if (m >> k & 1) idx |= std::uint64_t(1) << members[k];
        v.amplitudes(static_cast<Eigen::Index>(idx)) = amp;
    }
    return v;
}

SampleSet trajectories(const SamplerRequest& req, const StatevectorOptions& options,
                       const std::vector<std::pair<double, int>>& resets) {
    const int n = model_size(req);
    const Hamiltonian h = build_hamiltonian(req, options);
    std::vector<double> bounds{0.0};
    for (const auto& r : resets) bounds.push_back(r.first);
    bounds.push_back(req.schedule.total_time());
    const bool classical = req.schedule.starts_classical();

    // Keyed by segment and starting basis index (-1 for the uniform start).
    std::map<std::pair<std::size_t, std::int64_t>, Eigen::VectorXd> memo;
    std::vector<BinaryState> reads;
    std::optional<BinaryState> previous;
    for (int r = 0; r < req.reads; ++r) {
        std::mt19937_64 rng(req.seed + static_cast<std::uint64_t>(r));
        std::int64_t key = classical ? static_cast<std::int64_t>(detail::start_state(req, r, previous)->to_index()) : -1;
        for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
            auto it = memo.find({seg, key});
            if (it == memo.end()) {
                QuantumStateVector start;
                if (seg == 0) {
                    start = key < 0 ? uniform_vector(n) : basis_vector(n, BinaryState::from_index(key, n));
                } else {
                    start = reset_group(n, static_cast<std::uint64_t>(key), req.schedule.variable_group(),
                                        resets[seg - 1].second);
                }
                auto result = refine(h, req.schedule, start, bounds[seg], bounds[seg + 1], options);
                it = memo.emplace(std::make_pair(seg, key), result.state.probabilities()).first;
            }
            key = static_cast<std::int64_t>(draw(it->second, n, rng).to_index());
        }
        previous = BinaryState::from_index(static_cast<std::uint64_t>(key), n);
        reads.push_back(*previous);
    }
    return detail::assemble(req, std::move(reads));
}

}  // namespace

std::vector<BinaryState> measure(const QuantumStateVector& psi, int n, int reads, std::uint64_t seed) {
    if (psi.amplitudes.size() != (Eigen::Index(1) << n)) throw std::invalid_argument("state vector has wrong dimension");
    const Eigen::VectorXd p = psi.probabilities();
    std::vector<BinaryState> out;
    out.reserve(reads);
    for (int r = 0; r < reads; ++r) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r));
        out.push_back(draw(p, n, rng));
    }
    return out;
}

SampleSet schrodinger_anneal(const SamplerRequest& req, const StatevectorOptions& options) {
    detail::validate_request(req);
    const int n = model_size(req);
    check_capacity(n, options);
    if (!req.auxiliary.empty() && std::find(req.auxiliary.begin(), req.auxiliary.end(), true) != req.auxiliary.end()) {
        throw std::invalid_argument("the state-vector engine does not minimize out auxiliary variables");
    }
    if (options.reset_on_full_reversal) {
        const auto resets = full_reversals(req.schedule);
        if (!resets.empty()) return trajectories(req, options, resets);
    }
    const bool classical = req.schedule.starts_classical();
    std::vector<BinaryState> reads;
    if (!classical) {
        auto result = evolve(req, uniform_vector(n), options);
        reads = measure(result.state, n, req.reads, req.seed);
        return detail::assemble(req, std::move(reads));
    }
    std::map<BinaryState, Eigen::VectorXd> memo;
    std::optional<BinaryState> previous;
    for (int r = 0; r < req.reads; ++r) {
        BinaryState start = *detail::start_state(req, r, previous);
        auto it = memo.find(start);
        if (it == memo.end()) {
            auto result = evolve(req, basis_vector(n, start), options);
            it = memo.emplace(start, result.state.probabilities()).first;
        }
        std::mt19937_64 rng(req.seed + static_cast<std::uint64_t>(r));
        BinaryState outcome = draw(it->second, n, rng);
        previous = outcome;
        reads.push_back(std::move(outcome));
    }
    return detail::assemble(req, std::move(reads));
}

}  // namespace qadp
