// Copyright 2026 The echo-lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace echolab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct PaperCheckOptions {
    std::uint64_t seed = 20250101;
    unsigned workers = 1;
};

CriterionResult check_witness_table();
CriterionResult check_efficiency_theory();
CriterionResult check_echo_oracle();
CriterionResult check_coincidence_profile(const PaperCheckOptions& opt);
CriterionResult check_five_peaks(const PaperCheckOptions& opt);
CriterionResult check_classical_bounds(const PaperCheckOptions& opt);
CriterionResult check_multiplexing();
CriterionResult check_storage_optimizer();
CriterionResult check_determinism(const PaperCheckOptions& opt);

// All criteria in order.
std::vector<CriterionResult> run_paper_check(const PaperCheckOptions& opt = {});

// "PASS  3 echo-oracle  <detail>"
std::string format_result(const CriterionResult& r);

} // namespace echolab
