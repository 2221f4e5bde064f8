#pragma once

// Randomized / exhaustive property checks shared by the property test binary
// and the acceptance run. Every check is deterministic (fixed seeds).

#include <string>
#include <vector>

namespace props {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

CheckResult poisson_inversion_oracle();
CheckResult projection_law();
CheckResult randomization_uniformity();
CheckResult discrepancy_subset_identity();
CheckResult sorter_laws();
CheckResult oslaif_exactness();
CheckResult hilbert_continuity();
CheckResult array_rqmc_unbiasedness();
CheckResult thread_reproducibility();

std::vector<CheckResult> run_all();

}  // namespace props
