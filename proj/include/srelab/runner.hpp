#pragma once

#include <functional>
#include <string>

#include "srelab/config.hpp"

namespace srelab {

// exit codes: 0 ok, 1 validation error, 2 solver non-convergence, 3 verification failure
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitNonConvergence = 2,
    kExitVerification = 3,
};

// Executes one configured run; writes artifacts (CSV/JSON plus run_meta.json)
// atomically under cfg.io.out_dir.
int run(const RunConfig& cfg);

// Deterministic work queue: results are assembled by task index regardless of
// completion order.
void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn);

// Identity battery used by verify mode; returns true when every residual is
// within its tolerance and appends one report line per identity.
struct VerifyOutcome {
    bool passed = true;
    std::string report;  // one line per identity, with max residuals
};
VerifyOutcome run_identity_battery(const RunConfig& cfg);

}  // namespace srelab
