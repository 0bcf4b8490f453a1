#pragma once

#include <string>
#include <vector>

namespace akd::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double elapsed_s = 0.0;
};

// Bias propagation exactness: 50 random biased teachers and students built as
// f* plus L1-bounded noise must land inside the propagated balls, every time.
// Also returns the companion bound check on the propagated-center count.
std::pair<CheckResult, CheckResult> check_bias_propagation();

// Projected-gradient minimization of lambda*CE + (1-lambda)*KL over the
// simplex must land on the weighted arithmetic mean.
CheckResult check_optimal_target_oracle();

// Incremental greedy selection must match step-by-step brute force.
CheckResult check_greedy_oracle();

// Analytic training gradients vs central finite differences.
CheckResult check_gradients();

// All of the above, in reporting order.
std::vector<CheckResult> run_all();

}  // namespace akd::verify
