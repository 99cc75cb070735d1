// Acceptance suite runner: one pass/fail line per criterion, exit 1 on any
// failure. Pass the CLI binary path as argv[1] to include the process-level
// determinism checks.
#include <iostream>

#include "nestedot/selftest.hpp"

int main(int argc, char** argv) {
    nestedot::AcceptanceOptions options;
    if (argc > 1) options.cli_path = argv[1];
    const auto results = nestedot::run_acceptance(options);
    nestedot::print_table(results, std::cout, &std::cerr);
    if (!nestedot::all_passed(results)) {
        std::cout << "ACCEPTANCE: FAIL\n";
        return 1;
    }
    std::cout << "ACCEPTANCE: PASS\n";
    return 0;
}
