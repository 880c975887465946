// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_STRATEGY_HPP
#define COINTOSS_STRATEGY_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cointoss/protocol.hpp"

namespace cointoss {

enum class StrategyKind {
    Honest,
    AbortAtStep,       // arg = step 1..10
    WithholdReveal,    // Bob never redeems the reveal
    WithholdSecret,    // losing Alice never discloses her secret
    RefundThenReveal,  // Bob claims his refund, then tries the late redeem
    ReorgDoubleSpend,  // arg = reorg depth
};

struct StrategySpec {
    StrategyKind kind = StrategyKind::Honest;
    int arg = 0;

    std::string name() const;
    static StrategySpec parse(const std::string& name);  // throws DomainError

    auto operator<=>(const StrategySpec&) const = default;
};

/// Deterministic attack catalog: AbortAtStep(1..10), WithholdReveal,
/// WithholdSecret, RefundThenReveal, ReorgDoubleSpend(1), ReorgDoubleSpend(2).
std::vector<StrategySpec> enumerate_adversaries();

/// Reorg request raised by an adversarial strategy; the session driver
/// forwards it to the ledger.
struct ActReorg {
    std::uint32_t depth = 0;
    std::vector<Transaction> replacement;
    std::string kind;  // trace tag for the replacement txs
};
using StrategyAction = std::variant<ActSend, ActBroadcast, ActReorg>;

/// A decision procedure driving one party. Strategies own the PartyState
/// and may deviate from the honest machine in timing and content, but act
/// only through messages and the ledger.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual const PartyState& state() const = 0;
    virtual void set_net_outcome(std::int64_t net) = 0;

    /// Called once per tick after message delivery.
    virtual std::vector<StrategyAction> on_tick(const std::vector<Message>& inbox,
                                                std::uint32_t height, const LedgerState& ledger) = 0;
};

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, PartyState initial,
                                        const BetParams& params);

}  // namespace cointoss

#endif  // COINTOSS_STRATEGY_HPP
