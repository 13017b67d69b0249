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

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qadp/polynomial.hpp"

namespace qadp::cli {

// Small problem whose variables are annealed in turns, one group per slot.
struct GroupedProblem {
    std::string name;
    Polynomial poly;
    int n = 0;
    std::vector<int> groups;
};

// The stepwise problem (a trap at energy -1 under a single cycle) and the
// coupled problem.
std::vector<GroupedProblem> cycle_problems();

// key=value lines; '#' starts a comment. Keys are returned with '_' mapped to '-'.
std::map<std::string, std::string> read_config(std::istream& in);

// Arguments exclude the program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qadp::cli
