// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/strategy.hpp"

#include <algorithm>

#include "cointoss/errors.hpp"

namespace cointoss {

std::string StrategySpec::name() const {
    switch (kind) {
        case StrategyKind::Honest: return "honest";
        case StrategyKind::AbortAtStep: return "abort-" + std::to_string(arg);
        case StrategyKind::WithholdReveal: return "withhold-reveal";
        case StrategyKind::WithholdSecret: return "withhold-secret";
        case StrategyKind::RefundThenReveal: return "refund-then-reveal";
        case StrategyKind::ReorgDoubleSpend: return "reorg-double-spend-" + std::to_string(arg);
    }
    return "unknown";
}

StrategySpec StrategySpec::parse(const std::string& name) {
    if (name == "honest") return {StrategyKind::Honest, 0};
    if (name == "withhold-reveal") return {StrategyKind::WithholdReveal, 0};
    if (name == "withhold-secret") return {StrategyKind::WithholdSecret, 0};
    if (name == "refund-then-reveal") return {StrategyKind::RefundThenReveal, 0};
    if (name.starts_with("abort-")) {
        int n = std::stoi(name.substr(6));
        if (n < 1 || n > 10) throw DomainError("abort step must be 1..10");
        return {StrategyKind::AbortAtStep, n};
    }
    if (name.starts_with("reorg-double-spend-")) {
        int d = std::stoi(name.substr(19));
        if (d < 1) throw DomainError("reorg depth must be >= 1");
        return {StrategyKind::ReorgDoubleSpend, d};
    }
    throw DomainError("unknown strategy '" + name + "'");
}

std::vector<StrategySpec> enumerate_adversaries() {
    std::vector<StrategySpec> list;
    for (int n = 1; n <= 10; ++n) list.push_back({StrategyKind::AbortAtStep, n});
    list.push_back({StrategyKind::WithholdReveal, 0});
    list.push_back({StrategyKind::WithholdSecret, 0});
    list.push_back({StrategyKind::RefundThenReveal, 0});
    list.push_back({StrategyKind::ReorgDoubleSpend, 1});
    list.push_back({StrategyKind::ReorgDoubleSpend, 2});
    return list;
}

namespace {

Transaction build_funding_double_spend(const PartyState& st) {
    Transaction tx;
    std::uint64_t total = 0;
    for (const FundingSource& f : st.funding) {
        tx.inputs.push_back(TxInput{f.outpoint, {}});
        total += f.value;
    }
    tx.outputs.push_back(Output{total, script_sig(derive_pubkey(st.sk))});
    tx.locktime = 0;
    attach_signature(tx, sign(st.sk, txid(tx)));
    return tx;
}

class HonestBase : public Strategy {
public:
    HonestBase(PartyState st, BetParams params) : st_(std::move(st)), params_(params) {}

    const PartyState& state() const override { return st_; }
    void set_net_outcome(std::int64_t net) override { st_.net_outcome = net; }

    std::vector<StrategyAction> on_tick(const std::vector<Message>& inbox, std::uint32_t height,
                                        const LedgerState& ledger) override {
        std::vector<StrategyAction> out;
        if (halted_) {
            for (const Action& a : refund_only_actions(st_, params_, height, ledger))
                out.push_back(to_strategy(a));
        } else {
            std::vector<Action> emitted;
            try {
                for (const Message& msg : inbox) run_step(Observation{ObsMessage{msg}}, emitted);
                run_step(Observation{ObsTick{height, &ledger}}, emitted);
            } catch (const ProtocolViolation&) {
                halted_ = true;  // refuse the session; fall back to refunds
            }
            for (const Action& a : emitted) {
                if (allow_action(a)) {
                    out.push_back(to_strategy(a));
                } else if (freeze_on_suppress()) {
                    halted_ = true;
                    break;
                }
            }
        }
        post_actions(height, ledger, out);
        return out;
    }

protected:
    virtual bool allow_action(const Action&) { return true; }
    virtual bool freeze_on_suppress() const { return false; }
    virtual void post_actions(std::uint32_t, const LedgerState&, std::vector<StrategyAction>&) {}

    void run_step(const Observation& obs, std::vector<Action>& emitted) {
        StepResult r = step_party(st_, params_, obs);
        st_ = std::move(r.state);
        emitted.insert(emitted.end(), r.actions.begin(), r.actions.end());
    }

    static StrategyAction to_strategy(const Action& a) {
        return std::visit([](const auto& x) -> StrategyAction { return x; }, a);
    }

    static int step_of(const Action& a) {
        return std::visit([](const auto& x) { return x.step; }, a);
    }

    PartyState st_;
    BetParams params_;
    bool halted_ = false;
};

class HonestStrategy final : public HonestBase {
    using HonestBase::HonestBase;
};

/// Performs the protocol honestly before step n, then goes silent apart
/// from claiming its own refunds.
class AbortStrategy final : public HonestBase {
public:
    AbortStrategy(PartyState st, BetParams params, int step)
        : HonestBase(std::move(st), params), step_(step) {}

protected:
    bool allow_action(const Action& a) override {
        int s = step_of(a);
        return s == 0 || s < step_;
    }
    bool freeze_on_suppress() const override { return true; }

private:
    int step_;
};

/// Bob never redeems the reveal; everyone falls back to refunds.
class WithholdRevealStrategy final : public HonestBase {
    using HonestBase::HonestBase;

protected:
    bool allow_action(const Action& a) override { return step_of(a) != 9; }
};

/// A losing Alice never discloses her secret; the winner must wait for
/// his refund instead of redeeming the bet.
class WithholdSecretStrategy final : public HonestBase {
    using HonestBase::HonestBase;

protected:
    bool allow_action(const Action& a) override {
        const auto* send = std::get_if<ActSend>(&a);
        return !(send && std::holds_alternative<MsgSecretDisclosure>(send->msg));
    }
};

/// Bob withholds the reveal redemption, claims his bet refund at its
/// locktime, and only then tries to redeem the reveal.
class RefundThenRevealStrategy final : public HonestBase {
    using HonestBase::HonestBase;

protected:
    bool allow_action(const Action& a) override { return step_of(a) != 9; }

    void post_actions(std::uint32_t, const LedgerState& ledger,
                      std::vector<StrategyAction>& out) override {
        if (st_.role != Party::Bob || late_redeem_done_) return;
        if (!st_.refund_bet || !st_.refund_fully_signed || !st_.reveal_txid) return;
        if (!ledger.confirm_height(txid(*st_.refund_bet))) return;
        auto reveal = ledger.find_tx(*st_.reveal_txid);
        if (!reveal) return;
        std::map<std::string, Bytes> preimages{
            {"B", Bytes(st_.own_secret.bytes.begin(), st_.own_secret.bytes.end())}};
        Transaction redeem =
            build_redeem_transaction(*reveal, 0, preimages, st_.sk, derive_pubkey(st_.sk));
        late_redeem_done_ = true;
        out.push_back(ActBroadcast{redeem, "redeem_reveal", 9});
    }

private:
    bool late_redeem_done_ = false;
};

/// Plays honestly until the counterparty acts on a transaction with few
/// confirmations, then rewrites recent history to double-spend its own
/// funding. Falls back to honest play when the target is out of reach.
class ReorgDoubleSpendStrategy final : public HonestBase {
public:
    ReorgDoubleSpendStrategy(PartyState st, BetParams params, std::uint32_t depth)
        : HonestBase(std::move(st), params), depth_(depth) {}

    std::vector<StrategyAction> on_tick(const std::vector<Message>& inbox, std::uint32_t height,
                                        const LedgerState& ledger) override {
        if (!decided_ && triggered(ledger)) {
            decided_ = true;
            if (reachable(height, ledger)) {
                attacked_ = true;
                halted_ = true;  // the honest machine is done; act manually
                return launch(height, ledger);
            }
        }
        if (attacked_) return post_attack(ledger);
        return HonestBase::on_tick(inbox, height, ledger);
    }

private:
    const Digest* victim_txid(const LedgerState&) const {
        // The transaction this party funded and would revert.
        return st_.role == Party::Alice ? (st_.reveal_txid ? &*st_.reveal_txid : nullptr)
                                        : (st_.bet_txid ? &*st_.bet_txid : nullptr);
    }

    bool triggered(const LedgerState& ledger) const {
        if (st_.role == Party::Alice) {
            // Bob spent the reveal while it is still shallow.
            if (!st_.reveal_txid || !ledger.confirm_height(*st_.reveal_txid)) return false;
            Outpoint op{*st_.reveal_txid, 0};
            return ledger.spent_in_mempool(op) || !ledger.output_unspent(op);
        }
        // Alice broadcast the reveal on top of lightly confirmed bet funds.
        if (!st_.bet_txid || !ledger.confirm_height(*st_.bet_txid)) return false;
        return st_.reveal_txid && ledger.confirmations(*st_.reveal_txid).has_value();
    }

    bool reachable(std::uint32_t height, const LedgerState& ledger) const {
        if (depth_ > ledger.max_reorg_depth()) return false;
        const Digest* victim = victim_txid(ledger);
        if (!victim) return false;
        auto h = ledger.confirm_height(*victim);
        return h && *h + depth_ > height;
    }

    std::vector<StrategyAction> launch(std::uint32_t, const LedgerState& ledger) {
        std::vector<StrategyAction> out;
        if (st_.role == Party::Alice && st_.their_commit)
            captured_ = find_revealed_secret(ledger, *st_.their_commit);
        out.push_back(ActReorg{depth_, {build_funding_double_spend(st_)}, "double_spend"});
        if (st_.role == Party::Alice && captured_ && st_.bet_txid) {
            // With the stake recovered and the counterparty secret in hand,
            // take the pot when the parity branch allows it.
            if (winner(st_.own_secret, *captured_) == Party::Alice) {
                if (auto bet = ledger.find_tx(*st_.bet_txid)) {
                    std::map<std::string, Bytes> preimages{
                        {"A", Bytes(st_.own_secret.bytes.begin(), st_.own_secret.bytes.end())},
                        {"B", Bytes(captured_->bytes.begin(), captured_->bytes.end())}};
                    Transaction redeem =
                        build_redeem_transaction(*bet, 0, preimages, st_.sk, derive_pubkey(st_.sk));
                    out.push_back(ActBroadcast{redeem, "redeem_bet", 10});
                }
            }
        }
        return out;
    }

    std::vector<StrategyAction> post_attack(const LedgerState& ledger) {
        std::vector<StrategyAction> out;
        if (st_.role == Party::Bob && !late_redeem_done_ && st_.reveal_txid) {
            if (ledger.confirm_height(*st_.reveal_txid) &&
                ledger.output_unspent({*st_.reveal_txid, 0})) {
                if (auto reveal = ledger.find_tx(*st_.reveal_txid)) {
                    std::map<std::string, Bytes> preimages{
                        {"B", Bytes(st_.own_secret.bytes.begin(), st_.own_secret.bytes.end())}};
                    Transaction redeem = build_redeem_transaction(*reveal, 0, preimages, st_.sk,
                                                                  derive_pubkey(st_.sk));
                    late_redeem_done_ = true;
                    out.push_back(ActBroadcast{redeem, "redeem_reveal", 9});
                }
            }
        }
        return out;
    }

    std::uint32_t depth_;
    bool decided_ = false;
    bool attacked_ = false;
    bool late_redeem_done_ = false;
    std::optional<Secret> captured_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, PartyState initial,
                                        const BetParams& params) {
    switch (spec.kind) {
        case StrategyKind::Honest:
            return std::make_unique<HonestStrategy>(std::move(initial), params);
        case StrategyKind::AbortAtStep:
            return std::make_unique<AbortStrategy>(std::move(initial), params, spec.arg);
        case StrategyKind::WithholdReveal:
            return std::make_unique<WithholdRevealStrategy>(std::move(initial), params);
        case StrategyKind::WithholdSecret:
            return std::make_unique<WithholdSecretStrategy>(std::move(initial), params);
        case StrategyKind::RefundThenReveal:
            return std::make_unique<RefundThenRevealStrategy>(std::move(initial), params);
        case StrategyKind::ReorgDoubleSpend:
            return std::make_unique<ReorgDoubleSpendStrategy>(std::move(initial), params,
                                                              static_cast<std::uint32_t>(spec.arg));
    }
    throw DomainError("unknown strategy kind");
}

}  // namespace cointoss
