// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_SESSION_HPP
#define COINTOSS_SESSION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cointoss/protocol.hpp"
#include "cointoss/strategy.hpp"

namespace cointoss {

struct SessionConfig {
    BetParams params;
    StrategySpec strategy_alice;
    StrategySpec strategy_bob;
    std::uint32_t max_height = 0;  // 0 = 2 * bet_locktime + 10
    std::uint64_t rng_seed = 1;
    std::uint32_t reorg_budget = 3;

    std::uint32_t effective_max_height() const {
        return max_height ? max_height : 2 * params.bet_locktime + 10;
    }
};

struct TraceEvent {
    std::uint32_t height = 0;
    std::string actor;  // Alice | Bob | Ledger
    std::string kind;
    std::vector<std::pair<std::string, std::string>> kv;
};

/// Per-transaction record kept alongside the textual trace so audits do
/// not need to re-parse text.
struct TxRecord {
    std::string kind;
    std::string actor;
    std::vector<Outpoint> spends;
    std::uint32_t locktime = 0;
    std::optional<PubKey> dest;  // single-output payout destination
    std::optional<std::uint32_t> confirm_height;
    bool in_final_history = false;
};

struct SessionTrace {
    std::vector<TraceEvent> events;
    std::map<Bytes, TxRecord> txs;  // txid bytes -> record

    Secret a_secret;
    Secret b_secret;
    PubKey pk_alice;
    PubKey pk_bob;

    // Locktimes observed in the refund signature requests.
    std::optional<std::uint32_t> refund_bet_locktime;
    std::optional<std::uint32_t> refund_reveal_locktime;

    std::int64_t alice_net = 0;
    std::int64_t bob_net = 0;
    std::uint32_t end_height = 0;
    std::string reason;  // completed | refunded | no-stake | stalled | horizon

    std::vector<std::string> ledger_violations;  // end-of-session ledger audit

    std::string to_text() const;
};

/// Runs one full session on a fresh ledger and returns its trace.
SessionTrace run_session(const SessionConfig& config);

struct Violation {
    std::string cls;  // zero-sum | honest-loss | double-spend | locktime-order
    std::string detail;
};

std::string to_string(const Violation& v);

/// Post-hoc checks over a finished trace: zero-sum outcomes, honest-party
/// safety, no confirmed double spends, and locktime ordering when
/// unsound_mode is off.
std::vector<Violation> audit_trace(const SessionTrace& trace, const SessionConfig& config);

}  // namespace cointoss

#endif  // COINTOSS_SESSION_HPP
