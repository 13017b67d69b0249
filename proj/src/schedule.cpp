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
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qadp/anneal.hpp"
#include "qadp/errors.hpp"

namespace qadp {

namespace {

void validate_path(const SchedulePath& path, double cycle) {
    if (path.size() < 2) throw std::invalid_argument("schedule path needs at least two points");
    if (path.front().time != 0.0) throw std::invalid_argument("schedule path must start at time 0");
    if (std::abs(path.back().time - cycle) > 1e-9 * std::max(1.0, cycle)) {
        throw std::invalid_argument("schedule path must end at the cycle length");
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (!(path[k].s >= 0.0 && path[k].s <= 1.0)) throw std::invalid_argument("anneal fraction outside [0, 1]");
        if (k > 0 && path[k].time < path[k - 1].time) throw std::invalid_argument("schedule times must not decrease");
    }
}

double interpolate(const SchedulePath& path, double tau) {
    if (tau <= path.front().time) return path.front().s;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (tau <= path[k].time) {
            const auto& a = path[k - 1];
            const auto& b = path[k];
            if (b.time == a.time) return b.s;
            return a.s + (b.s - a.s) * (tau - a.time) / (b.time - a.time);
        }
    }
    return path.back().s;
}

SchedulePath dedupe(SchedulePath p) {
    p.erase(std::unique(p.begin(), p.end(),
                        [](const SchedulePoint& a, const SchedulePoint& b) { return a.time == b.time && a.s == b.s; }),
            p.end());
    return p;
}

}  // namespace

AnnealSchedule::AnnealSchedule(double total_time, std::vector<SchedulePath> group_paths, std::vector<int> variable_group,
                               int cycles, double reversal_target, bool reinitialize)
        : total_time_(total_time),
          paths_(std::move(group_paths)),
          variable_group_(std::move(variable_group)),
          cycles_(cycles),
          reversal_target_(reversal_target),
          reinitialize_(reinitialize) {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) throw std::invalid_argument("total_time must be positive");
    if (cycles < 1) throw std::invalid_argument("cycles must be at least 1");
    if (!(reversal_target >= 0.0 && reversal_target <= 1.0)) {
        throw std::invalid_argument("reversal_target must lie in [0, 1]");
    }
    if (paths_.empty()) throw std::invalid_argument("schedule needs at least one group path");
    for (const auto& p : paths_) validate_path(p, cycle_time());
    for (int g : variable_group_) {
        if (g < 0 || g >= num_groups()) throw std::invalid_argument("variable group out of range");
    }
}

AnnealSchedule AnnealSchedule::forward(int n, double total_time) {
    return AnnealSchedule(total_time, {{{0.0, 0.0}, {total_time, 1.0}}}, std::vector<int>(n, 0));
}

AnnealSchedule AnnealSchedule::frozen(int n, double total_time) {
    return AnnealSchedule(total_time, {{{0.0, 1.0}, {total_time, 1.0}}}, std::vector<int>(n, 0), 1, 1.0);
}

AnnealSchedule AnnealSchedule::reverse(int n, double total_time, double reversal_target, bool reinitialize) {
    return AnnealSchedule(total_time, {{{0.0, 1.0}, {total_time / 2, reversal_target}, {total_time, 1.0}}},
                          std::vector<int>(n, 0), 1, reversal_target, reinitialize);
}

AnnealSchedule AnnealSchedule::sequential_groups(std::vector<int> variable_group, double total_time, int cycles,
                                                 double reversal_target, bool reinitialize) {
    if (cycles < 1) throw std::invalid_argument("cycles must be at least 1");
    int groups = 0;
    for (int g : variable_group) groups = std::max(groups, g + 1);
    groups = std::max(groups, 1);
    const double cycle = total_time / cycles;
    const double slot = cycle / groups;
    std::vector<SchedulePath> paths;
    for (int g = 0; g < groups; ++g) {
        SchedulePath p{{0.0, 1.0}, {g * slot, 1.0}, {g * slot + slot / 2, reversal_target}, {(g + 1) * slot, 1.0}};
        if (g + 1 == groups) {
            p.back().time = cycle;
        } else {
            p.push_back({cycle, 1.0});
        }
        paths.push_back(dedupe(std::move(p)));
    }
    return AnnealSchedule(total_time, std::move(paths), std::move(variable_group), cycles, reversal_target,
                          reinitialize);
}

double AnnealSchedule::group_s(int group, double t) const {
    const auto& path = paths_.at(group);
    const double cycle = cycle_time();
    double tau;
    if (t <= 0.0) {
        tau = 0.0;
    } else if (t >= total_time_) {
        tau = cycle;
    } else {
        tau = std::fmod(t, cycle);
    }
    return interpolate(path, tau);
}

bool AnnealSchedule::starts_classical() const {
    for (int g : variable_group_) {
        if (paths_[g].front().s > 0.0) return true;
    }
    return false;
}

std::vector<std::vector<int>> AnnealSchedule::activity_stages() const {
    std::vector<bool> used(paths_.size(), false);
    for (int g : variable_group_) used[g] = true;
    std::map<std::pair<double, double>, std::vector<int>> windows;
    for (int g = 0; g < num_groups(); ++g) {
        if (!used[g]) continue;
        const auto& p = paths_[g];
        double start = -1.0, end = -1.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k].s < 1.0) {
                double begin = (k > 0 && p[k - 1].s >= 1.0) ? p[k - 1].time : p[k].time;
                if (start < 0.0) start = begin;
                double finish = (k + 1 < p.size() && p[k + 1].s >= 1.0) ? p[k + 1].time : p[k].time;
                end = std::max(end, finish);
            }
        }
        if (start >= 0.0) windows[{start, end}].push_back(g);
    }
    std::vector<std::vector<int>> stages;
    for (auto& [w, gs] : windows) stages.push_back(gs);
    return stages;
}

AnnealSchedule AnnealSchedule::with_reinitialize(bool value) const {
    AnnealSchedule copy = *this;
    copy.reinitialize_ = value;
    return copy;
}

void write_schedule_csv(std::ostream& out, const AnnealSchedule& schedule) {
    out << "# cycles=" << schedule.cycles() << "\n";
    out << "time_us,variable_group,anneal_fraction\n";
    const double cycle = schedule.cycle_time();
    for (int g = 0; g < schedule.num_groups(); ++g) {
        const auto& p = schedule.group_path(g);
        for (int c = 0; c < schedule.cycles(); ++c) {
            for (std::size_t k = (c == 0 ? 0 : 1); k < p.size(); ++k) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", p[k].time + c * cycle, g, p[k].s);
                out << buf;
            }
        }
    }
}

AnnealSchedule read_schedule_csv(std::istream& in, std::vector<int> variable_group, bool reinitialize) {
    std::map<int, SchedulePath> paths;
    std::string line;
    int lineno = 0;
    double total = 0.0;
    double lowest = 1.0;
    int cycles = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("# cycles=", 0) == 0) {
            try {
                cycles = std::stoi(line.substr(9));
            } catch (const std::exception&) {
                throw ParseError(lineno, "bad cycles header");
            }
            if (cycles < 1) throw ParseError(lineno, "cycles must be at least 1");
            continue;
        }
        if (line.empty() || line[0] == '#' || line.rfind("time_us", 0) == 0) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t = 0.0, s = 0.0;
        int g = 0;
        std::string extra;
        if (!(ls >> t >> g >> s) || (ls >> extra)) throw ParseError(lineno, "expected time_us,variable_group,anneal_fraction");
        if (g < 0) throw ParseError(lineno, "negative group id");
        auto& p = paths[g];
        if (!p.empty() && t == p.back().time && s == p.back().s) continue;
        p.push_back({t, s});
        total = std::max(total, t);
        lowest = std::min(lowest, s);
    }
    if (paths.empty()) throw ParseError(lineno, "schedule has no breakpoints");
    std::vector<SchedulePath> ordered;
    for (int g = 0; g <= paths.rbegin()->first; ++g) {
        auto it = paths.find(g);
        if (it == paths.end()) throw ParseError(lineno, "missing group " + std::to_string(g));
        ordered.push_back(it->second);
    }
    if (cycles > 1) {
        const double cycle = total / cycles;
        for (auto& p : ordered) {
            std::erase_if(p, [&](const SchedulePoint& q) { return q.time > cycle * (1.0 + 1e-12); });
            if (p.empty() || std::abs(p.back().time - cycle) > 1e-9 * (1.0 + cycle)) {
                throw ParseError(lineno, "breakpoints do not repeat per cycle");
            }
            p.back().time = cycle;
        }
    }
    return AnnealSchedule(total, std::move(ordered), std::move(variable_group), cycles, lowest, reinitialize);
}

TimingReport timing_report(int reads, double t_anneal, const TimingConfig& config) {
    if (reads < 1) throw std::invalid_argument("reads must be at least 1");
    if (!(t_anneal >= config.min_anneal)) {
        throw std::invalid_argument("anneal time below the hardware minimum");
    }
    TimingReport r;
    r.t_program = config.t_program;
    r.t_anneal = t_anneal;
    r.t_readout = config.t_readout;
    r.reads = reads;
    r.total = r.t_program + reads * (r.t_anneal + r.t_readout);
    return r;
}

const SampleRecord& SampleSet::lowest() const {
    if (records.empty()) throw std::logic_error("empty sample set");
    return records.front();
}

int SampleSet::total_occurrences() const {
    int total = 0;
    for (const auto& r : records) total += r.occurrences;
    return total;
}

int model_size(const SamplerRequest& req) {
    return std::visit([](const auto& m) { return m.num_variables(); }, req.model);
}

double request_energy(const SamplerRequest& req, const BinaryState& x) {
    if (auto* q = std::get_if<QuboModel>(&req.model)) return qubo_energy(*q, x);
    if (auto* p = std::get_if<PolynomialModel>(&req.model)) {
        if (static_cast<int>(x.size()) != p->n) throw std::invalid_argument("state length does not match model size");
        return evaluate(p->poly, x);
    }
    return ising_energy(std::get<IsingModel>(req.model), SpinState::from_binary(x));
}

PolynomialModel::PolynomialModel(Polynomial p, int n) : poly(std::move(p)), n(n) {
    if (poly.num_variables() > n) throw std::invalid_argument("polynomial uses variables beyond n");
}

}  // namespace qadp
