// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_MONTECARLO_HPP
#define COINTOSS_MONTECARLO_HPP

#include <cstdint>
#include <map>
#include <string>

#include "cointoss/session.hpp"

namespace cointoss {

struct Statistics {
    std::uint64_t n = 0;
    std::uint64_t alice_wins = 0;
    double alice_freq = 0.0;
    double mean_height = 0.0;
    std::uint32_t max_height = 0;
    std::uint64_t violations = 0;         // audit_trace + ledger audit, all sessions
    std::map<std::string, std::uint64_t> outcomes;  // termination reason histogram

    /// key=value lines, one per statistic; deterministic.
    std::string to_text() const;
};

/// Runs n sessions with seeds rng_seed + 0 .. rng_seed + n - 1 and
/// aggregates. Sessions are independent; each owns its ledger.
Statistics monte_carlo(const SessionConfig& config_template, std::uint64_t n);

}  // namespace cointoss

#endif  // COINTOSS_MONTECARLO_HPP
