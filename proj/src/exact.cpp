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

#include <bit>
#include <string>

#include "compiled_model.hpp"
#include "qadp/anneal.hpp"
#include "qadp/errors.hpp"

namespace qadp {

SampleSet exact_anneal(const SamplerRequest& req, int max_variables) {
    detail::validate_request(req);
    detail::CompiledModel cm(req);
    std::vector<int> free;
    for (int v = 0; v < cm.size(); ++v) {
        if (!cm.is_aux(v)) free.push_back(v);
    }
    const int k = static_cast<int>(free.size());
    if (k > max_variables) {
        throw CapacityError("exact search over " + std::to_string(k) + " variables exceeds enumeration guard");
    }
    std::vector<std::uint8_t> x(cm.size(), 0);
    cm.settle_aux(x);
    std::vector<std::pair<int, std::uint8_t>> changes;
    double energy = cm.energy(x);
    double best = energy;
    std::vector<std::uint8_t> best_x = x;
    std::uint64_t best_index = 0;
    std::uint64_t index = 0;
    const double tol = 1e-9 * (1.0 + cm.coefficient_scale());
    for (std::uint64_t g = 1; g < (std::uint64_t(1) << k); ++g) {
        const int b = std::countr_zero(g);
        energy += cm.flip(free[b], x, changes);
        index ^= std::uint64_t(1) << b;
        if (energy > best + tol) continue;
        energy = cm.energy(x);
        if (energy < best || (energy == best && index < best_index)) {
            best = energy;
            best_x = x;
            best_index = index;
        }
    }
    BinaryState state(std::vector<int>(best_x.begin(), best_x.end()));
    return detail::assemble(req, std::vector<BinaryState>(req.reads, state));
}

}  // namespace qadp
