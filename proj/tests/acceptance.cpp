#include <cstdio>
#include <cstdlib>
#include <string>

#include "qnsk/checks.hpp"

// Runs acceptance criteria 1..13 (or those listed on the command line) and prints one line each.
int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int i = 1; i <= 13; ++i) ids.push_back(i);
    int failed = 0;
    for (int id : ids) {
        const qnsk::CheckResult r = qnsk::run_criterion(id);
        std::printf("criterion %2d %s  %-10s %-20s %7.2f s  %s\n", id, r.passed ? "PASS" : "FAIL", r.family.c_str(),
                    r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        failed += r.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
    return failed == 0 ? 0 : 1;
}
