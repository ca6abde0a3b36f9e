#pragma once

#include <string>

namespace symh {

struct CheckResult {
    std::string report; // one PASS/FAIL line per check plus a summary
    bool all_pass = false;
};

// Fast cross-module invariant suite on 128x128 grids. The report text is a
// pure function of the library build: thread count only changes how the
// deterministic reductions are scheduled, never their results, so reports
// from different thread counts are byte-identical.
CheckResult run_checks(int threads = 1);

} // namespace symh
