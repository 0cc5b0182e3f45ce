#include "qcvv/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>

namespace qcvv {

namespace {
std::mutex g_mutex;
std::vector<std::string> g_seen;
std::atomic<bool> g_enabled{true};
}  // namespace

void warn_once(std::string_view key, std::string_view message) {
    std::lock_guard lock(g_mutex);
    if (std::find(g_seen.begin(), g_seen.end(), key) != g_seen.end()) return;
    g_seen.emplace_back(key);
    if (g_enabled) std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) {
    g_enabled = enabled;
}

std::vector<std::string> raised_warnings() {
    std::lock_guard lock(g_mutex);
    return g_seen;
}

}  // namespace qcvv
