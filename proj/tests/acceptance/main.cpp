#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <set>
#include <sstream>
#include <string>

#include "criteria.hpp"
#include "qcvv/diagnostics.hpp"

namespace acceptance {

std::string fmt(double x, int precision) {
    std::ostringstream os;
    os.precision(precision);
    os << x;
    return os.str();
}

}  // namespace acceptance

int main(int argc, char** argv) {
    using namespace acceptance;
    qcvv::set_warnings_enabled(false);
    // usage: qcvv_acceptance [--known-failure id]... [id]...
    std::set<int> only, known;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--known-failure" && i + 1 < argc) {
            known.insert(std::atoi(argv[++i]));
        } else {
            only.insert(std::atoi(argv[i]));
        }
    }

    std::vector<Criterion> all;
    for (auto group : {rb_criteria(), gst_criteria(), determinism_criteria()})
        all.insert(all.end(), group.begin(), group.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    int failures = 0, tolerated = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > c.time_limit_s) {
            o.pass = false;
            o.detail += "; runtime over limit";
        }
        std::printf("[%s] criterion %2d %s: %s (%.1f s / %.0f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), elapsed, c.time_limit_s);
        std::fflush(stdout);
        if (!o.pass) (known.count(c.id) ? tolerated : failures) += 1;
    }
    std::printf("%d failed, %d known failure%s tolerated\n", failures, tolerated, tolerated == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
