// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/protocol.hpp"

#include <algorithm>

#include "cointoss/errors.hpp"

namespace cointoss {

const char* to_string(Party p) { return p == Party::Alice ? "Alice" : "Bob"; }

Party other(Party p) { return p == Party::Alice ? Party::Bob : Party::Alice; }

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Init: return "Init";
        case Phase::CommitSent: return "CommitSent";
        case Phase::CommitExchanged: return "CommitExchanged";
        case Phase::RefundBetSigned: return "RefundBetSigned";
        case Phase::BetBroadcast: return "BetBroadcast";
        case Phase::RefundRevealSigned: return "RefundRevealSigned";
        case Phase::RevealBroadcast: return "RevealBroadcast";
        case Phase::RevealRedeemed: return "RevealRedeemed";
        case Phase::BetRedeemed: return "BetRedeemed";
        case Phase::Refunded: return "Refunded";
        case Phase::Done: return "Done";
    }
    return "Unknown";
}

Digest commit(const Secret& secret) { return sha256(secret.bytes); }

Party winner(const Secret& a_secret, const Secret& b_secret) {
    unsigned p = parity(a_secret.bytes) ^ parity(b_secret.bytes);
    return p == 0 ? Party::Alice : Party::Bob;
}

Party biased_winner(const Secret& a_secret, const Secret& b_secret, std::uint32_t k_bits,
                    std::uint32_t threshold) {
    if (k_bits < 1 || k_bits > 16) throw DomainError("k_bits must be in [1, 16]");
    if (threshold > (1u << k_bits)) throw DomainError("threshold must be in [0, 2^k]");
    auto last_two = [](const Secret& s) {
        return static_cast<std::uint32_t>(s.bytes[30]) << 8 | s.bytes[31];
    };
    std::uint32_t v = (last_two(a_secret) ^ last_two(b_secret)) & ((1u << k_bits) - 1u);
    return v < threshold ? Party::Alice : Party::Bob;
}

BiasSpec make_bias(std::uint64_t stake_x, std::uint32_t k_bits, std::uint32_t threshold) {
    if (k_bits < 1 || k_bits > 16) throw DomainError("k_bits must be in [1, 16]");
    std::uint64_t denom = 1ull << k_bits;
    if (threshold > denom) throw DomainError("threshold must be in [0, 2^k]");
    std::uint64_t pot = 2 * stake_x;
    std::uint64_t alice = pot * threshold / denom;  // floor
    std::uint64_t bob = pot - alice;
    if (alice == 0 || bob == 0) throw DomainError("stakes round to zero for this bias");
    return BiasSpec{k_bits, threshold, alice, bob};
}

void BetParams::validate() const {
    if (!unsound_mode && reveal_locktime >= bet_locktime)
        throw DomainError("reveal locktime must be shorter than bet locktime");
    if (bet_locktime == 0 || reveal_locktime == 0) throw DomainError("locktimes must be positive");
    if (stake_x == 0) throw DomainError("stake must be positive");
    if (bias) {
        if (bias->k_bits < 1 || bias->k_bits > 16) throw DomainError("k_bits must be in [1, 16]");
        if (bias->threshold > (1ull << bias->k_bits))
            throw DomainError("threshold must be in [0, 2^k]");
        if (bias->alice_stake == 0 || bias->bob_stake == 0)
            throw DomainError("bias stakes must be positive");
    }
}

// --- builders ---------------------------------------------------------------

namespace {

std::vector<TxInput> inputs_from(const std::vector<FundingSource>& funding) {
    std::vector<TxInput> inputs;
    inputs.reserve(funding.size());
    for (const FundingSource& f : funding) inputs.push_back(TxInput{f.outpoint, {}});
    return inputs;
}

std::uint64_t total_of(const std::vector<FundingSource>& funding) {
    std::uint64_t sum = 0;
    for (const FundingSource& f : funding) sum += f.value;
    return sum;
}

ScriptRef cooperative_branch(const BetParams& params) {
    return script_and(script_sig(params.pk_alice), script_sig(params.pk_bob));
}

}  // namespace

Transaction build_bet_transaction(const BetParams& params, const std::vector<FundingSource>& funding,
                                  const Digest& a_commit, const Digest& b_commit) {
    if (total_of(funding) != params.pot())
        throw FundingMismatch("bet funding must sum to the pot of " + std::to_string(params.pot()));
    ScriptRef preimages =
        script_and(script_preimage("A", a_commit), script_preimage("B", b_commit));
    ScriptRef winner_branch =
        script_or(script_and(script_parity({"A", "B"}, 0), script_sig(params.pk_alice)),
                  script_and(script_parity({"A", "B"}, 1), script_sig(params.pk_bob)));
    ScriptRef script =
        script_or(cooperative_branch(params), script_and(preimages, winner_branch));
    Transaction tx;
    tx.inputs = inputs_from(funding);
    tx.outputs.push_back(Output{params.pot(), script});
    tx.locktime = 0;
    return tx;
}

Transaction build_reveal_transaction(const BetParams& params,
                                     const std::vector<FundingSource>& funding,
                                     const Digest& b_commit) {
    if (total_of(funding) != params.alice_stake())
        throw FundingMismatch("reveal funding must sum to the stake of " +
                              std::to_string(params.alice_stake()));
    ScriptRef script = script_or(cooperative_branch(params),
                                 script_and(script_preimage("B", b_commit), script_sig(params.pk_bob)));
    Transaction tx;
    tx.inputs = inputs_from(funding);
    tx.outputs.push_back(Output{params.alice_stake(), script});
    tx.locktime = 0;
    return tx;
}

Transaction build_refund_transaction(const Transaction& parent, std::uint32_t output_index,
                                     std::uint32_t locktime_offset, std::uint32_t current_height,
                                     const PubKey& dest_pk) {
    if (output_index >= parent.outputs.size()) throw BadIndex("refund output index out of range");
    Transaction tx;
    tx.inputs.push_back(TxInput{{txid(parent), output_index}, {}});
    tx.outputs.push_back(Output{parent.outputs[output_index].value, script_sig(dest_pk)});
    tx.locktime = current_height + locktime_offset;
    return tx;
}

Transaction build_redeem_transaction(const Transaction& parent, std::uint32_t output_index,
                                     const std::map<std::string, Bytes>& preimages,
                                     const SecretKey& signer, const PubKey& dest_pk) {
    if (output_index >= parent.outputs.size()) throw BadIndex("redeem output index out of range");
    Transaction tx;
    tx.inputs.push_back(TxInput{{txid(parent), output_index}, {}});
    tx.outputs.push_back(Output{parent.outputs[output_index].value, script_sig(dest_pk)});
    tx.locktime = 0;
    tx.inputs[0].witness.slots = preimages;
    tx.inputs[0].witness.signatures.push_back(sign(signer, txid(tx)));
    return tx;
}

void attach_signature(Transaction& tx, const SignatureToken& token) {
    for (TxInput& in : tx.inputs) in.witness.signatures.push_back(token);
}

// --- state machine ----------------------------------------------------------

PartyState PartyState::init(Party role, const SecretKey& sk, const Secret& secret,
                            std::vector<FundingSource> funding) {
    PartyState st;
    st.role = role;
    st.sk = sk;
    st.own_secret = secret;
    st.funding = std::move(funding);
    return st;
}

bool actionable(const LedgerState& ledger, const Digest& id, std::uint32_t confirmation_depth) {
    auto confs = ledger.confirmations(id);
    if (!confs) return false;
    if (confirmation_depth == 0) return true;  // mempool presence is enough
    return *confs >= confirmation_depth + 1;
}

std::optional<Secret> find_revealed_secret(const LedgerState& ledger, const Digest& commitment) {
    auto scan_tx = [&](const Transaction& tx) -> std::optional<Secret> {
        for (const TxInput& in : tx.inputs) {
            for (const auto& [label, value] : in.witness.slots) {
                if (value.size() == 32 && sha256(value) == commitment) {
                    Secret s;
                    std::copy(value.begin(), value.end(), s.bytes.begin());
                    return s;
                }
            }
        }
        return std::nullopt;
    };
    for (const Transaction& tx : ledger.mempool())
        if (auto s = scan_tx(tx)) return s;
    for (const auto& block : ledger.blocks())
        for (const Transaction& tx : block)
            if (auto s = scan_tx(tx)) return s;
    return std::nullopt;
}

namespace {

void advance_phase(PartyState& st, Phase p) {
    if (static_cast<int>(p) > static_cast<int>(st.phase)) st.phase = p;
}

bool spends_own_funding(const Transaction& tx, const PartyState& st) {
    for (const TxInput& in : tx.inputs)
        for (const FundingSource& f : st.funding)
            if (in.prev == f.outpoint) return true;
    return false;
}

/// Winner of the toss by the on-chain parity rule; decides which key can
/// sign the winner branch.
Party script_winner(const PartyState& st, const Secret& theirs) {
    const Secret& a = st.role == Party::Alice ? st.own_secret : theirs;
    const Secret& b = st.role == Party::Alice ? theirs : st.own_secret;
    return winner(a, b);
}

/// Party owed the pot: the biased winner when a bias is configured,
/// otherwise the parity winner.
Party payout_winner(const PartyState& st, const BetParams& params, const Secret& theirs) {
    const Secret& a = st.role == Party::Alice ? st.own_secret : theirs;
    const Secret& b = st.role == Party::Alice ? theirs : st.own_secret;
    if (params.bias) return biased_winner(a, b, params.bias->k_bits, params.bias->threshold);
    return winner(a, b);
}

void handle_message(PartyState& st, const BetParams& params, const Message& msg,
                    std::vector<Action>& actions) {
    if (const auto* c = std::get_if<MsgCommit>(&msg)) {
        if (st.their_commit) {
            if (*st.their_commit != c->commitment)
                throw ProtocolViolation("conflicting commitment from counterparty");
            return;  // duplicate of the known commitment
        }
        st.their_commit = c->commitment;
        if (st.role == Party::Bob) {
            actions.push_back(ActSend{MsgCommit{commit(st.own_secret)}, 2});
            advance_phase(st, Phase::CommitExchanged);
        } else if (st.phase >= Phase::CommitSent) {
            advance_phase(st, Phase::CommitExchanged);
        }
        return;
    }
    if (const auto* req = std::get_if<MsgRefundSignatureRequest>(&msg)) {
        if (st.signed_their_refund) return;  // one counterparty refund per session
        if (req->refund.inputs.empty()) return;
        if (spends_own_funding(req->refund, st)) return;  // never authorize own coins blindly
        st.signed_their_refund = true;
        const Outpoint& parent = req->refund.inputs[0].prev;
        int step;
        if (st.role == Party::Alice) {
            st.bet_txid = parent.txid;  // learned from the refund it spends
            advance_phase(st, Phase::RefundBetSigned);
            step = 4;
        } else {
            st.reveal_txid = parent.txid;
            advance_phase(st, Phase::RefundRevealSigned);
            step = 7;
        }
        actions.push_back(ActSend{MsgRefundSignature{sign(st.sk, txid(req->refund))}, step});
        return;
    }
    if (const auto* sig = std::get_if<MsgRefundSignature>(&msg)) {
        std::optional<Transaction>& own =
            st.role == Party::Bob ? st.refund_bet : st.refund_reveal;
        if (!own || st.refund_fully_signed) return;
        if (sig->token.message != txid(*own)) return;  // not for our refund
        attach_signature(*own, sig->token);
        st.refund_fully_signed = true;
        if (st.role == Party::Bob) {
            advance_phase(st, Phase::RefundBetSigned);
            Transaction bet = *st.bet_tx;
            attach_signature(bet, sign(st.sk, txid(bet)));
            st.bet_tx = bet;
            actions.push_back(ActBroadcast{bet, "bet", 5});
        } else {
            advance_phase(st, Phase::RefundRevealSigned);
        }
        return;
    }
    if (const auto* disc = std::get_if<MsgSecretDisclosure>(&msg)) {
        if (st.role != Party::Bob) return;
        if (!st.their_commit || commit(disc->secret) != *st.their_commit) return;
        st.their_secret = disc->secret;
        if (!st.redeem_broadcast_done && st.bet_tx && script_winner(st, disc->secret) == Party::Bob) {
            Party dest = payout_winner(st, params, disc->secret);
            std::map<std::string, Bytes> preimages{
                {"A", Bytes(disc->secret.bytes.begin(), disc->secret.bytes.end())},
                {"B", Bytes(st.own_secret.bytes.begin(), st.own_secret.bytes.end())}};
            Transaction redeem =
                build_redeem_transaction(*st.bet_tx, 0, preimages, st.sk,
                                         dest == Party::Alice ? params.pk_alice : params.pk_bob);
            st.redeem_broadcast_done = true;
            advance_phase(st, Phase::BetRedeemed);
            actions.push_back(ActBroadcast{redeem, "redeem_bet", 10});
        }
        return;
    }
}

void alice_tick(PartyState& st, const BetParams& params, std::uint32_t height,
                const LedgerState& ledger, std::vector<Action>& actions) {
    if (st.phase == Phase::Init) {
        actions.push_back(ActSend{MsgCommit{commit(st.own_secret)}, 1});
        advance_phase(st, st.their_commit ? Phase::CommitExchanged : Phase::CommitSent);
        return;
    }

    // Steps 6-7: once the bet is visible, stake the reveal and get its
    // refund signed before broadcasting anything.
    if (st.phase >= Phase::RefundBetSigned && !st.reveal_tx && st.bet_txid &&
        ledger.confirmations(*st.bet_txid).has_value() && st.their_commit) {
        Transaction reveal = build_reveal_transaction(params, st.funding, *st.their_commit);
        st.reveal_tx = reveal;
        st.reveal_txid = txid(reveal);
        Transaction refund = build_refund_transaction(reveal, 0, params.reveal_locktime, height,
                                                      params.pk_alice);
        attach_signature(refund, sign(st.sk, txid(refund)));
        st.refund_reveal = refund;
        actions.push_back(ActSend{MsgRefundSignatureRequest{refund}, 7});
    }

    // Step 8: broadcast the reveal once the refund is signed and the bet
    // has enough confirmations.
    if (st.refund_fully_signed && !st.reveal_broadcast_done && st.reveal_tx && st.bet_txid &&
        actionable(ledger, *st.bet_txid, params.confirmation_depth)) {
        Transaction reveal = *st.reveal_tx;
        attach_signature(reveal, sign(st.sk, txid(reveal)));
        st.reveal_tx = reveal;
        st.reveal_broadcast_done = true;
        advance_phase(st, Phase::RevealBroadcast);
        actions.push_back(ActBroadcast{reveal, "reveal", 8});
    }

    // Step 10: act on the disclosed counterparty secret.
    if (st.phase == Phase::RevealBroadcast && !st.their_secret && st.their_commit) {
        if (auto revealed = find_revealed_secret(ledger, *st.their_commit)) {
            st.their_secret = revealed;
            if (script_winner(st, *revealed) == Party::Alice) {
                if (!st.redeem_broadcast_done && st.bet_txid) {
                    if (auto bet = ledger.find_tx(*st.bet_txid)) {
                        Party dest = payout_winner(st, params, *revealed);
                        std::map<std::string, Bytes> preimages{
                            {"A", Bytes(st.own_secret.bytes.begin(), st.own_secret.bytes.end())},
                            {"B", Bytes(revealed->bytes.begin(), revealed->bytes.end())}};
                        Transaction redeem = build_redeem_transaction(
                            *bet, 0, preimages, st.sk,
                            dest == Party::Alice ? params.pk_alice : params.pk_bob);
                        st.redeem_broadcast_done = true;
                        advance_phase(st, Phase::BetRedeemed);
                        actions.push_back(ActBroadcast{redeem, "redeem_bet", 10});
                    }
                }
            } else if (!st.disclosure_sent) {
                st.disclosure_sent = true;
                actions.push_back(ActSend{MsgSecretDisclosure{st.own_secret}, 10});
                advance_phase(st, Phase::Done);
            }
        }
    }

    if (st.phase == Phase::BetRedeemed && st.redeem_broadcast_done) {
        // Settled once the redeem confirms.
        if (st.bet_txid && !ledger.output_unspent({*st.bet_txid, 0}) &&
            ledger.confirm_height(*st.bet_txid))
            advance_phase(st, Phase::Done);
    }
}

void bob_tick(PartyState& st, const BetParams& params, std::uint32_t height,
              const LedgerState& ledger, std::vector<Action>& actions) {
    // Steps 3-4: build the bet and ask for the refund signature.
    if (st.phase == Phase::CommitExchanged && !st.bet_tx && st.their_commit) {
        Transaction bet =
            build_bet_transaction(params, st.funding, *st.their_commit, commit(st.own_secret));
        st.bet_tx = bet;
        st.bet_txid = txid(bet);
        Transaction refund =
            build_refund_transaction(bet, 0, params.bet_locktime, height, params.pk_bob);
        attach_signature(refund, sign(st.sk, txid(refund)));
        st.refund_bet = refund;
        actions.push_back(ActSend{MsgRefundSignatureRequest{refund}, 4});
    }

    if (st.phase == Phase::RefundBetSigned && st.bet_txid && ledger.confirm_height(*st.bet_txid))
        advance_phase(st, Phase::BetBroadcast);

    // Step 9: redeem the reveal, disclosing the secret on-chain.
    if (!st.reveal_redeem_done && st.reveal_txid &&
        actionable(ledger, *st.reveal_txid, params.confirmation_depth) &&
        ledger.output_unspent({*st.reveal_txid, 0})) {
        if (auto reveal = ledger.find_tx(*st.reveal_txid)) {
            std::map<std::string, Bytes> preimages{
                {"B", Bytes(st.own_secret.bytes.begin(), st.own_secret.bytes.end())}};
            Transaction redeem =
                build_redeem_transaction(*reveal, 0, preimages, st.sk, params.pk_bob);
            st.reveal_redeem_done = true;
            advance_phase(st, Phase::RevealRedeemed);
            actions.push_back(ActBroadcast{redeem, "redeem_reveal", 9});
        }
    }

    if (st.phase == Phase::BetRedeemed && st.redeem_broadcast_done) {
        if (st.bet_txid && !ledger.output_unspent({*st.bet_txid, 0}) &&
            ledger.confirm_height(*st.bet_txid))
            advance_phase(st, Phase::Done);
    } else if (st.phase == Phase::RevealRedeemed && st.bet_txid &&
               ledger.confirm_height(*st.bet_txid) && !ledger.output_unspent({*st.bet_txid, 0}) &&
               !st.refund_broadcast_done) {
        advance_phase(st, Phase::Done);  // counterparty redeemed the bet
    }
}

}  // namespace

std::vector<Action> refund_only_actions(const PartyState& st, const BetParams&,
                                        std::uint32_t height, const LedgerState& ledger) {
    std::vector<Action> actions;
    const std::optional<Transaction>& refund =
        st.role == Party::Bob ? st.refund_bet : st.refund_reveal;
    if (!refund || !st.refund_fully_signed) return actions;
    const Outpoint& parent = refund->inputs[0].prev;
    if (ledger.output_unspent(parent) && !ledger.spent_in_mempool(parent) &&
        refund->locktime <= height + 1) {
        actions.push_back(
            ActBroadcast{*refund, st.role == Party::Bob ? "refund_bet" : "refund_reveal", 0});
    }
    return actions;
}

StepResult step_party(const PartyState& state, const BetParams& params, const Observation& obs) {
    StepResult result{state, {}};
    PartyState& st = result.state;

    if (const auto* m = std::get_if<ObsMessage>(&obs)) {
        handle_message(st, params, m->msg, result.actions);
        return result;
    }

    const auto& tick = std::get<ObsTick>(obs);
    if (tick.ledger == nullptr) throw ProtocolViolation("tick observation without a ledger view");

    if (st.role == Party::Alice)
        alice_tick(st, params, tick.height, *tick.ledger, result.actions);
    else
        bob_tick(st, params, tick.height, *tick.ledger, result.actions);

    // Locktime refunds are a standing duty in every phase.
    if (!st.refund_broadcast_done) {
        std::vector<Action> refunds = refund_only_actions(st, params, tick.height, *tick.ledger);
        if (!refunds.empty()) {
            st.refund_broadcast_done = true;
            advance_phase(st, Phase::Refunded);
            result.actions.insert(result.actions.end(), refunds.begin(), refunds.end());
        }
    }
    return result;
}

}  // namespace cointoss
