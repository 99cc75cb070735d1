#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nestedot {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /// Path to the CLI binary. When set, criterion 14 exercises the real
    /// process (byte-identical reruns, selftest exit code); when empty it
    /// checks serialization round-trips in-process.
    std::string cli_path;
};

/// Runs the full acceptance suite; one result per criterion, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

bool all_passed(const std::vector<CriterionResult>& results);

/// One pass/fail line per criterion. The payload is deterministic; wall
/// times go to `timing` (pass a null pointer to drop them), keeping stdout
/// byte-identical across runs.
void print_table(const std::vector<CriterionResult>& results, std::ostream& out,
                 std::ostream* timing = nullptr);

}  // namespace nestedot
