// Acceptance runner: executes the reproduction suite and prints one PASS/FAIL
// line per criterion. Exit code 0 iff everything passed.

#include <algorithm>
#include <cstdio>

#include "lamptf/reproduce.hpp"

int main() {
    const lamptf::ReproduceReport report = lamptf::run_reproduction();
    for (const auto& r : report.results) {
        std::printf("%s criterion %2d: %s%s%s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.details.empty() ? "" : " -- ", r.details.c_str());
    }
    std::printf("%d/%zu criteria passed in %.2fs\n",
                static_cast<int>(std::count_if(report.results.begin(), report.results.end(),
                                               [](const auto& r) { return r.pass; })),
                report.results.size(), report.elapsed_s);
    return report.all_pass ? 0 : 1;
}
