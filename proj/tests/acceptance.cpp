// Prints one line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>

#include "frackit/acceptance.hpp"

int main() {
    bool ok = true;
    for (const auto& r : frackit::run_acceptance()) {
        std::printf("%s\n", frackit::format_result(r).c_str());
        ok = ok && r.passed;
    }
    std::printf("%s\n", ok ? "acceptance: all criteria passed" : "acceptance: FAILED");
    return ok ? 0 : 1;
}
