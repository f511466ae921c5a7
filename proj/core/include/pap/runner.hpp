#ifndef PAP_RUNNER_HPP
#define PAP_RUNNER_HPP

#include <string>
#include <vector>

#include "pap/config.hpp"

namespace pap {

struct RunOptions {
    int threads = 1;
    bool check = false;           // promote failed built-in checks to exit code 4
    std::string out_override;     // --out; empty = config's output_dir
};

struct RunOutcome {
    int exit_code = 0;            // 0 ok, 2 config, 3 numerical, 4 checks failed
    std::string out_dir;
    std::vector<std::string> files;          // data files written (manifest not listed)
    std::vector<std::string> failed_checks;  // names of built-in checks that failed
    std::string error;                       // non-empty when exit_code is 2 or 3
};

// Runs one subcommand with a parsed config: computes everything, then writes
// the data files, summary.json and manifest.json atomically into the output
// directory. All pap errors are mapped to exit codes and recorded in the
// manifest instead of thrown.
RunOutcome run_subcommand(const std::string& subcommand, const RunConfig& config,
                          const RunOptions& options);

// Output directory resolution: --out beats config.output_dir; a relative
// result is rooted at $PAPSIM_OUT_ROOT when that is set.
std::string resolve_output_dir(const RunConfig& config, const RunOptions& options);

}  // namespace pap

#endif
