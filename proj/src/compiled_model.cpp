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

#include "compiled_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qadp::detail {

CompiledModel::CompiledModel(const SamplerRequest& req) : CompiledModel(req.model, req.auxiliary) {}

CompiledModel::CompiledModel(const SamplerModel& model, const std::vector<bool>& auxiliary) {
    if (auto* q = std::get_if<QuboModel>(&model)) {
        build(from_qubo(*q), q->num_variables(), auxiliary);
    } else if (auto* p = std::get_if<PolynomialModel>(&model)) {
        build(p->poly, p->n, auxiliary);
    } else {
        auto [q, offset] = ising_to_qubo(std::get<IsingModel>(model));
        build(from_qubo(q, offset), q.num_variables(), auxiliary);
    }
}

void CompiledModel::build(const Polynomial& p, int n, const std::vector<bool>& auxiliary) {
    n_ = n;
    if (!auxiliary.empty() && static_cast<int>(auxiliary.size()) != n_) {
        throw std::invalid_argument("auxiliary mask length does not match model size");
    }
    aux_ = auxiliary.empty() ? std::vector<bool>(n_, false) : auxiliary;
    incident_.assign(n_, {});
    adj_aux_.assign(n_, {});
    for (const auto& [vars, c] : p.terms()) {
        if (vars.empty()) {
            offset_ += c;
            continue;
        }
        const int id = static_cast<int>(terms_.size());
        const int begin = static_cast<int>(vars_.size());
        int aux_count = 0;
        for (int v : vars) {
            vars_.push_back(v);
            incident_[v].push_back(id);
            aux_count += aux_[v] ? 1 : 0;
        }
        if (aux_count > 1) throw std::invalid_argument("auxiliary variables must not interact with each other");
        terms_.push_back({begin, static_cast<int>(vars_.size()), c});
        if (aux_count == 1) {
            int a = *std::find_if(vars.begin(), vars.end(), [&](int v) { return aux_[v]; });
            for (int v : vars) {
                if (v != a) adj_aux_[v].push_back(a);
            }
        }
        scale_ += std::abs(c);
    }
    affected_.assign(n_, {});
    for (int v = 0; v < n_; ++v) {
        auto& adj = adj_aux_[v];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        auto& aff = affected_[v];
        aff = incident_[v];
        for (int a : adj) aff.insert(aff.end(), incident_[a].begin(), incident_[a].end());
        std::sort(aff.begin(), aff.end());
        aff.erase(std::unique(aff.begin(), aff.end()), aff.end());
    }
}

double CompiledModel::flip_scale(int v) const {
    double s = 0.0;
    for (int id : affected_[v]) s += std::abs(terms_[id].c);
    return s;
}

double CompiledModel::energy(const std::vector<std::uint8_t>& x) const {
    double e = offset_;
    for (const auto& t : terms_) e += term_value(t, x);
    return e;
}

int CompiledModel::aux_optimum(int a, const std::vector<std::uint8_t>& x) const {
    double field = 0.0;
    for (int id : incident_[a]) {
        const auto& t = terms_[id];
        bool on = true;
        for (int k = t.begin; k < t.end; ++k) {
            int v = vars_[k];
            if (v != a && !x[v]) {
                on = false;
                break;
            }
        }
        if (on) field += t.c;
    }
    return field < 0.0 ? 1 : 0;
}

void CompiledModel::settle_aux(std::vector<std::uint8_t>& x) const {
    for (int a = 0; a < n_; ++a) {
        if (aux_[a]) x[a] = static_cast<std::uint8_t>(aux_optimum(a, x));
    }
}

double CompiledModel::local(const std::vector<int>& ids, const std::vector<std::uint8_t>& x) const {
    double e = 0.0;
    for (int id : ids) e += term_value(terms_[id], x);
    return e;
}

double CompiledModel::flip(int v, std::vector<std::uint8_t>& x, std::vector<std::pair<int, std::uint8_t>>& changes) const {
    const auto& aff = affected_[v];
    const double before = local(aff, x);
    changes.clear();
    changes.emplace_back(v, x[v]);
    x[v] ^= 1;
    for (int a : adj_aux_[v]) {
        auto nv = static_cast<std::uint8_t>(aux_optimum(a, x));
        if (nv != x[a]) {
            changes.emplace_back(a, x[a]);
            x[a] = nv;
        }
    }
    return local(aff, x) - before;
}

void CompiledModel::revert(std::vector<std::uint8_t>& x, const std::vector<std::pair<int, std::uint8_t>>& changes) {
    for (auto it = changes.rbegin(); it != changes.rend(); ++it) x[it->first] = it->second;
}

}  // namespace qadp::detail
