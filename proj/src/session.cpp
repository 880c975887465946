// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/session.hpp"

#include <algorithm>
#include <utility>

#include "cointoss/errors.hpp"

namespace cointoss {

namespace {

std::string short_id(const Digest& id) { return id.hex().substr(0, 16); }

/// Deterministic per-session material: SHA256(seed_be || index_be).
std::array<std::uint8_t, 32> seed_material(std::uint64_t seed, std::uint64_t index) {
    Bytes buf;
    put_u64_be(buf, seed);
    put_u64_be(buf, index);
    Digest d = sha256(buf);
    std::array<std::uint8_t, 32> out{};
    std::copy(d.bytes.begin(), d.bytes.end(), out.begin());
    return out;
}

bool has_sig_top(const ScriptExpr& e) { return std::holds_alternative<SigNode>(e.node); }

bool any_locked_output(const LedgerState& ledger) {
    for (const auto& [op, out] : ledger.utxos())
        if (!has_sig_top(*out.script)) return true;
    return false;
}

std::optional<PubKey> payout_dest(const Transaction& tx) {
    if (tx.outputs.size() != 1) return std::nullopt;
    const auto* sig = std::get_if<SigNode>(&tx.outputs[0].script->node);
    if (!sig) return std::nullopt;
    return sig->pubkey;
}

class Recorder {
public:
    explicit Recorder(SessionTrace& trace) : trace_(trace) {}

    void event(std::uint32_t height, const std::string& actor, const std::string& kind,
               std::vector<std::pair<std::string, std::string>> kv) {
        trace_.events.push_back(TraceEvent{height, actor, kind, std::move(kv)});
    }

    void record_tx(const Transaction& tx, const std::string& kind, const std::string& actor) {
        TxRecord rec;
        rec.kind = kind;
        rec.actor = actor;
        rec.locktime = tx.locktime;
        for (const TxInput& in : tx.inputs) rec.spends.push_back(in.prev);
        rec.dest = payout_dest(tx);
        trace_.txs[txid(tx).bytes] = std::move(rec);
    }

    void sync_confirmations(const LedgerState& ledger) {
        for (auto& [id, rec] : trace_.txs) {
            auto h = ledger.confirm_height(Digest{id});
            rec.confirm_height = h;
            rec.in_final_history = h.has_value();
        }
    }

private:
    SessionTrace& trace_;
};

std::string spends_summary(const Transaction& tx) {
    if (tx.inputs.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        if (i) s += ',';
        s += short_id(tx.inputs[i].prev.txid) + ":" + std::to_string(tx.inputs[i].prev.index);
    }
    return s;
}

}  // namespace

std::string SessionTrace::to_text() const {
    std::string out;
    for (const TraceEvent& ev : events) {
        out += std::to_string(ev.height);
        out += ' ';
        out += ev.actor;
        out += ' ';
        out += ev.kind;
        for (const auto& [k, v] : ev.kv) {
            out += ' ';
            out += k;
            out += '=';
            out += v;
        }
        out += '\n';
    }
    out += "RESULT alice_net=" + std::to_string(alice_net) + " bob_net=" + std::to_string(bob_net) +
           " height=" + std::to_string(end_height) + " reason=" + reason + "\n";
    return out;
}

SessionTrace run_session(const SessionConfig& config) {
    SessionTrace trace;
    Recorder rec(trace);

    BetParams params = config.params;
    params.validate();
    if (config.effective_max_height() <= params.bet_locktime)
        throw DomainError("max_height must exceed the bet locktime or refunds are unreachable");

    KeyRegistry registry;
    SecretKey sk_alice = seed_material(config.rng_seed, 0);
    SecretKey sk_bob = seed_material(config.rng_seed, 1);
    Secret a_secret{seed_material(config.rng_seed, 2)};
    Secret b_secret{seed_material(config.rng_seed, 3)};
    params.pk_alice = registry.register_secret(sk_alice);
    params.pk_bob = registry.register_secret(sk_bob);

    trace.a_secret = a_secret;
    trace.b_secret = b_secret;
    trace.pk_alice = params.pk_alice;
    trace.pk_bob = params.pk_bob;

    const std::uint64_t alice_grant = params.alice_stake();
    const std::uint64_t bob_grant = params.pot();
    const std::uint32_t max_height = config.effective_max_height();

    rec.event(0, "Ledger", "config",
              {{"stake", std::to_string(params.stake_x)},
               {"bet_locktime", std::to_string(params.bet_locktime)},
               {"reveal_locktime", std::to_string(params.reveal_locktime)},
               {"confirmation_depth", std::to_string(params.confirmation_depth)},
               {"unsound", params.unsound_mode ? "1" : "0"},
               {"bias", params.bias ? std::to_string(params.bias->k_bits) + ":" +
                                          std::to_string(params.bias->threshold) + ":" +
                                          std::to_string(params.bias->alice_stake) + ":" +
                                          std::to_string(params.bias->bob_stake)
                                    : "none"},
               {"seed", std::to_string(config.rng_seed)},
               {"reorg_budget", std::to_string(config.reorg_budget)},
               {"max_height", std::to_string(max_height)},
               {"alice", config.strategy_alice.name()},
               {"bob", config.strategy_bob.name()}});
    rec.event(0, "Alice", "setup",
              {{"pubkey", params.pk_alice.hex()},
               {"secret", hex_encode(a_secret.bytes)},
               {"commit", commit(a_secret).hex()}});
    rec.event(0, "Bob", "setup",
              {{"pubkey", params.pk_bob.hex()},
               {"secret", hex_encode(b_secret.bytes)},
               {"commit", commit(b_secret).hex()}});

    LedgerState ledger(registry, config.reorg_budget);

    Transaction faucet;
    faucet.outputs.push_back(Output{alice_grant, script_sig(params.pk_alice)});
    faucet.outputs.push_back(Output{bob_grant, script_sig(params.pk_bob)});
    faucet.locktime = 0;
    Digest faucet_id = txid(faucet);
    rec.record_tx(faucet, "faucet", "Ledger");
    ledger.submit_transaction(faucet);
    ledger.advance_blocks(1);
    rec.sync_confirmations(ledger);
    rec.event(1, "Ledger", "confirm",
              {{"tx", short_id(faucet_id)}, {"kind", "faucet"}, {"spends", "none"}});

    PartyState alice_init = PartyState::init(Party::Alice, sk_alice, a_secret,
                                             {FundingSource{{faucet_id, 0}, alice_grant}});
    PartyState bob_init = PartyState::init(Party::Bob, sk_bob, b_secret,
                                           {FundingSource{{faucet_id, 1}, bob_grant}});
    auto alice = make_strategy(config.strategy_alice, std::move(alice_init), params);
    auto bob = make_strategy(config.strategy_bob, std::move(bob_init), params);

    std::vector<Message> queue_to_alice, queue_to_bob;
    bool horizon = false;

    while (true) {
        std::uint32_t h = ledger.height();
        if (h >= max_height) {
            horizon = true;
            break;
        }

        std::vector<Message> inbox_alice = std::exchange(queue_to_alice, {});
        std::vector<Message> inbox_bob = std::exchange(queue_to_bob, {});
        bool activity = !inbox_alice.empty() || !inbox_bob.empty();

        struct Seat {
            Strategy* strat;
            const char* name;
            std::vector<Message>* inbox;
            std::vector<Message>* out_queue;
        };
        // Bob acts first within a tick; the order is part of the
        // deterministic contract.
        Seat seats[2] = {{bob.get(), "Bob", &inbox_bob, &queue_to_alice},
                         {alice.get(), "Alice", &inbox_alice, &queue_to_bob}};

        for (Seat& seat : seats) {
            std::vector<StrategyAction> actions = seat.strat->on_tick(*seat.inbox, h, ledger);
            activity |= !actions.empty();
            for (const StrategyAction& act : actions) {
                if (const auto* send = std::get_if<ActSend>(&act)) {
                    std::visit(
                        [&](const auto& m) {
                            using T = std::decay_t<decltype(m)>;
                            if constexpr (std::is_same_v<T, MsgCommit>) {
                                rec.event(h, seat.name, "send",
                                          {{"kind", "commit"}, {"value", m.commitment.hex()}});
                            } else if constexpr (std::is_same_v<T, MsgRefundSignatureRequest>) {
                                bool bet_refund = std::string(seat.name) == "Bob";
                                if (bet_refund)
                                    trace.refund_bet_locktime = m.refund.locktime;
                                else
                                    trace.refund_reveal_locktime = m.refund.locktime;
                                rec.event(h, seat.name, "send",
                                          {{"kind", "refund_sig_request"},
                                           {"tx", short_id(txid(m.refund))},
                                           {"parent", spends_summary(m.refund)},
                                           {"locktime", std::to_string(m.refund.locktime)}});
                            } else if constexpr (std::is_same_v<T, MsgRefundSignature>) {
                                rec.event(h, seat.name, "send",
                                          {{"kind", "refund_sig"},
                                           {"tx", short_id(m.token.message)}});
                            } else {
                                rec.event(h, seat.name, "send",
                                          {{"kind", "secret"}, {"value", hex_encode(m.secret.bytes)}});
                            }
                        },
                        send->msg);
                    seat.out_queue->push_back(send->msg);
                } else if (const auto* bc = std::get_if<ActBroadcast>(&act)) {
                    Digest id = txid(bc->tx);
                    SubmitResult res = ledger.submit_transaction(bc->tx);
                    if (res.accepted) rec.record_tx(bc->tx, bc->kind, seat.name);
                    rec.event(h, seat.name, "broadcast",
                              {{"kind", bc->kind},
                               {"tx", short_id(id)},
                               {"spends", spends_summary(bc->tx)},
                               {"result", res.accepted
                                              ? std::string("accept")
                                              : std::string("reject:") + to_string(res.reason)}});
                } else if (const auto* rg = std::get_if<ActReorg>(&act)) {
                    ReorgResult res = ledger.reorg(rg->depth, rg->replacement);
                    std::string evicted = "none";
                    if (res.accepted && !res.evicted.empty()) {
                        evicted.clear();
                        for (std::size_t i = 0; i < res.evicted.size(); ++i) {
                            if (i) evicted += ',';
                            evicted += short_id(res.evicted[i]);
                        }
                    }
                    std::string replaced = "none";
                    if (!rg->replacement.empty()) {
                        replaced.clear();
                        for (std::size_t i = 0; i < rg->replacement.size(); ++i) {
                            if (i) replaced += ',';
                            replaced += short_id(txid(rg->replacement[i]));
                        }
                    }
                    if (res.accepted) {
                        for (const Transaction& r : rg->replacement)
                            rec.record_tx(r, rg->kind, seat.name);
                        rec.sync_confirmations(ledger);
                    }
                    rec.event(h, seat.name, "reorg",
                              {{"depth", std::to_string(rg->depth)},
                               {"result", res.accepted
                                              ? std::string("accept")
                                              : std::string("reject:") + to_string(res.reason)},
                               {"replacement", replaced},
                               {"evicted", evicted}});
                }
            }
        }

        ledger.advance_blocks(1);
        std::uint32_t new_height = ledger.height();
        const std::vector<Transaction>& block = ledger.blocks().back();
        for (const Transaction& tx : block) {
            Digest id = txid(tx);
            auto it = trace.txs.find(id.bytes);
            if (it == trace.txs.end()) {
                rec.record_tx(tx, "unknown", "Ledger");
                it = trace.txs.find(id.bytes);
            }
            it->second.confirm_height = new_height;
            it->second.in_final_history = true;
            rec.event(new_height, "Ledger", "confirm",
                      {{"tx", short_id(id)},
                       {"kind", it->second.kind},
                       {"spends", spends_summary(tx)}});
        }
        activity |= !block.empty();

        if (!activity && queue_to_alice.empty() && queue_to_bob.empty() &&
            ledger.mempool().empty() && !any_locked_output(ledger)) {
            break;
        }
    }

    rec.sync_confirmations(ledger);
    trace.end_height = ledger.height();
    trace.alice_net = static_cast<std::int64_t>(ledger.balance_of(params.pk_alice)) -
                      static_cast<std::int64_t>(alice_grant);
    trace.bob_net = static_cast<std::int64_t>(ledger.balance_of(params.pk_bob)) -
                    static_cast<std::int64_t>(bob_grant);

    alice->set_net_outcome(trace.alice_net);
    bob->set_net_outcome(trace.bob_net);

    bool bet_redeemed = false;
    bool refunded = false;
    bool staked = false;
    for (const auto& [id, r] : trace.txs) {
        if (!r.in_final_history) continue;
        if (r.kind == "redeem_bet") bet_redeemed = true;
        if (r.kind == "refund_bet" || r.kind == "refund_reveal") refunded = true;
        if (r.kind == "bet" || r.kind == "reveal") staked = true;
    }
    if (horizon && any_locked_output(ledger))
        trace.reason = "horizon";
    else if (bet_redeemed)
        trace.reason = "completed";
    else if (refunded)
        trace.reason = "refunded";
    else if (!staked)
        trace.reason = "no-stake";
    else
        trace.reason = "stalled";

    trace.ledger_violations = ledger.audit();
    rec.event(trace.end_height, "Ledger", "audit",
              {{"violations", std::to_string(trace.ledger_violations.size())}});
    return trace;
}

std::string to_string(const Violation& v) { return v.cls + ": " + v.detail; }

std::vector<Violation> audit_trace(const SessionTrace& trace, const SessionConfig& config) {
    std::vector<Violation> out;
    const BetParams& params = config.params;

    // (a) zero-sum outcomes.
    if (trace.alice_net + trace.bob_net != 0) {
        out.push_back({"zero-sum", "alice_net " + std::to_string(trace.alice_net) + " + bob_net " +
                                       std::to_string(trace.bob_net) + " != 0"});
    }

    // (b) honest-party safety.
    Party true_winner = params.bias ? biased_winner(trace.a_secret, trace.b_secret,
                                                    params.bias->k_bits, params.bias->threshold)
                                    : winner(trace.a_secret, trace.b_secret);
    auto check_honest = [&](Party seat, std::int64_t net, std::uint64_t stake) {
        if (net < -static_cast<std::int64_t>(stake)) {
            out.push_back({"honest-loss", std::string(to_string(seat)) + " net " +
                                              std::to_string(net) + " below stake floor -" +
                                              std::to_string(stake)});
            return;
        }
        if (net == -static_cast<std::int64_t>(stake)) {
            Party counterparty = other(seat);
            // The redemption that realizes this seat's loss: Alice's stake
            // leaves through the reveal redemption, Bob's through the bet
            // redemption. A later refund of the other output is fine.
            const std::string losing_kind = seat == Party::Alice ? "redeem_reveal" : "redeem_bet";
            const PubKey& cp_pk = counterparty == Party::Alice ? trace.pk_alice : trace.pk_bob;
            bool paid_out = false;
            for (const auto& [id, r] : trace.txs) {
                if (r.in_final_history && r.kind == losing_kind && r.dest && *r.dest == cp_pk)
                    paid_out = true;
            }
            if (true_winner != counterparty || !paid_out) {
                out.push_back({"honest-loss",
                               std::string(to_string(seat)) +
                                   " lost its stake without a completed losing toss"});
            }
        }
    };
    if (config.strategy_alice.kind == StrategyKind::Honest)
        check_honest(Party::Alice, trace.alice_net, params.alice_stake());
    if (config.strategy_bob.kind == StrategyKind::Honest)
        check_honest(Party::Bob, trace.bob_net, params.bob_stake());

    // (c) no confirmed double spends in the final history.
    std::map<std::pair<Bytes, std::uint32_t>, int> spend_count;
    for (const auto& [id, r] : trace.txs) {
        if (!r.in_final_history) continue;
        for (const Outpoint& op : r.spends) ++spend_count[{op.txid.bytes, op.index}];
    }
    for (const auto& [op, n] : spend_count) {
        if (n > 1) {
            out.push_back({"double-spend", "outpoint " + hex_encode(op.first).substr(0, 16) + ":" +
                                               std::to_string(op.second) + " spent " +
                                               std::to_string(n) + " times"});
        }
    }

    // (d) locktime ordering, unless the session deliberately ran unsound.
    if (!params.unsound_mode && trace.refund_bet_locktime && trace.refund_reveal_locktime) {
        if (*trace.refund_reveal_locktime >= *trace.refund_bet_locktime) {
            out.push_back({"locktime-order",
                           "refund_reveal locktime " + std::to_string(*trace.refund_reveal_locktime) +
                               " >= refund_bet locktime " +
                               std::to_string(*trace.refund_bet_locktime)});
        }
    }
    return out;
}

}  // namespace cointoss
