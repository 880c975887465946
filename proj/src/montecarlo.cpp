// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/montecarlo.hpp"

#include <cstdio>

namespace cointoss {

namespace {
std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}
}  // namespace

std::string Statistics::to_text() const {
    std::string out;
    out += "n=" + std::to_string(n) + "\n";
    out += "alice_wins=" + std::to_string(alice_wins) + "\n";
    out += "alice_freq=" + fixed6(alice_freq) + "\n";
    out += "mean_height=" + fixed6(mean_height) + "\n";
    out += "max_height=" + std::to_string(max_height) + "\n";
    out += "violations=" + std::to_string(violations) + "\n";
    for (const auto& [reason, count] : outcomes)
        out += "outcome_" + reason + "=" + std::to_string(count) + "\n";
    return out;
}

Statistics monte_carlo(const SessionConfig& config_template, std::uint64_t n) {
    Statistics stats;
    stats.n = n;
    std::uint64_t height_sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        SessionConfig config = config_template;
        config.rng_seed = config_template.rng_seed + i;
        SessionTrace trace = run_session(config);
        if (trace.alice_net > 0) ++stats.alice_wins;
        height_sum += trace.end_height;
        stats.max_height = std::max(stats.max_height, trace.end_height);
        stats.violations += audit_trace(trace, config).size() + trace.ledger_violations.size();
        ++stats.outcomes[trace.reason];
    }
    stats.alice_freq = n ? static_cast<double>(stats.alice_wins) / static_cast<double>(n) : 0.0;
    stats.mean_height = n ? static_cast<double>(height_sum) / static_cast<double>(n) : 0.0;
    return stats;
}

}  // namespace cointoss
