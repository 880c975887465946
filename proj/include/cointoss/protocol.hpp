// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_PROTOCOL_HPP
#define COINTOSS_PROTOCOL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cointoss/keys.hpp"
#include "cointoss/ledger.hpp"
#include "cointoss/transaction.hpp"

namespace cointoss {

enum class Party { Alice, Bob };

const char* to_string(Party p);
Party other(Party p);

/// 32 uniformly random bytes committed to by its SHA256 digest.
struct Secret {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Secret&) const = default;
};

Digest commit(const Secret& secret);

/// Alice wins iff parity(a) XOR parity(b) == 0.
Party winner(const Secret& a_secret, const Secret& b_secret);

/// Alice wins iff the low k bits of the big-endian XOR of the secrets'
/// last two bytes are < threshold; her win probability over uniform
/// secrets is threshold / 2^k.
Party biased_winner(const Secret& a_secret, const Secret& b_secret, std::uint32_t k_bits,
                    std::uint32_t threshold);

/// Stakes for a biased toss. alice_stake : bob_stake == T : (2^k - T);
/// the winner takes the whole pot (alice_stake + bob_stake).
struct BiasSpec {
    std::uint32_t k_bits = 1;
    std::uint32_t threshold = 1;
    std::uint64_t alice_stake = 0;
    std::uint64_t bob_stake = 0;
};

/// Splits a pot of 2 * stake_x as floor(pot * T / 2^k) for Alice and the
/// remainder for Bob; throws DomainError if either share rounds to zero
/// or the (k, T) ranges are violated.
BiasSpec make_bias(std::uint64_t stake_x, std::uint32_t k_bits, std::uint32_t threshold);

struct BetParams {
    std::uint64_t stake_x = 50;
    std::uint32_t bet_locktime = 20;     // refund_bet offset, blocks
    std::uint32_t reveal_locktime = 10;  // refund_reveal offset, blocks
    PubKey pk_alice;
    PubKey pk_bob;
    std::optional<BiasSpec> bias;
    std::uint32_t confirmation_depth = 1;
    bool unsound_mode = false;

    std::uint64_t alice_stake() const { return bias ? bias->alice_stake : stake_x; }
    std::uint64_t bob_stake() const { return bias ? bias->bob_stake : stake_x; }
    std::uint64_t pot() const { return alice_stake() + bob_stake(); }

    /// Throws DomainError unless reveal_locktime < bet_locktime (or
    /// unsound_mode is set) and any bias spec is in range.
    void validate() const;
};

// --- transaction builders -------------------------------------------------

struct FundingSource {
    Outpoint outpoint;
    std::uint64_t value = 0;
};

/// Bob's bet: one output worth the whole pot, spendable cooperatively or
/// by the toss winner once both preimages are public.
Transaction build_bet_transaction(const BetParams& params, const std::vector<FundingSource>& funding,
                                  const Digest& a_commit, const Digest& b_commit);

/// Alice's reveal: one output worth her stake, spendable cooperatively or
/// by Bob against disclosure of his preimage.
Transaction build_reveal_transaction(const BetParams& params,
                                     const std::vector<FundingSource>& funding,
                                     const Digest& b_commit);

/// Spends parent[output_index] entirely to sig(dest_pk) with locktime
/// current_height + locktime_offset. Signatures are attached later via
/// the message exchange.
Transaction build_refund_transaction(const Transaction& parent, std::uint32_t output_index,
                                     std::uint32_t locktime_offset, std::uint32_t current_height,
                                     const PubKey& dest_pk);

/// Spends parent[output_index] to sig(dest_pk) with the given preimages
/// and a signature over the new transaction's id.
Transaction build_redeem_transaction(const Transaction& parent, std::uint32_t output_index,
                                     const std::map<std::string, Bytes>& preimages,
                                     const SecretKey& signer, const PubKey& dest_pk);

/// Adds `token` to every input witness of tx.
void attach_signature(Transaction& tx, const SignatureToken& token);

// --- party state machine ---------------------------------------------------

enum class Phase {
    Init,
    CommitSent,
    CommitExchanged,
    RefundBetSigned,
    BetBroadcast,
    RefundRevealSigned,
    RevealBroadcast,
    RevealRedeemed,
    BetRedeemed,
    Refunded,
    Done,
};

const char* to_string(Phase p);

struct MsgCommit {
    Digest commitment;
};
struct MsgRefundSignatureRequest {
    Transaction refund;
};
struct MsgRefundSignature {
    SignatureToken token;
};
struct MsgSecretDisclosure {
    Secret secret;
};
using Message = std::variant<MsgCommit, MsgRefundSignatureRequest, MsgRefundSignature, MsgSecretDisclosure>;

/// Protocol step the action implements; 0 marks locktime refunds, which
/// are not a numbered step.
struct ActSend {
    Message msg;
    int step = 0;
};
struct ActBroadcast {
    Transaction tx;
    std::string kind;  // bet, reveal, refund_bet, refund_reveal, redeem_reveal, redeem_bet
    int step = 0;
};
using Action = std::variant<ActSend, ActBroadcast>;

struct ObsMessage {
    Message msg;
};
/// One block tick with a full-node view of the chain.
struct ObsTick {
    std::uint32_t height = 0;
    const LedgerState* ledger = nullptr;
};
using Observation = std::variant<ObsMessage, ObsTick>;

struct PartyState {
    Party role = Party::Alice;
    Phase phase = Phase::Init;
    SecretKey sk{};
    Secret own_secret;
    std::vector<FundingSource> funding;

    std::optional<Digest> their_commit;
    std::optional<Secret> their_secret;

    std::optional<Transaction> bet_tx;  // Bob only; Alice tracks the id
    std::optional<Digest> bet_txid;
    std::optional<Transaction> reveal_tx;  // Alice only; Bob tracks the id
    std::optional<Digest> reveal_txid;
    std::optional<Transaction> refund_bet;     // Bob's, signed by both when ready
    std::optional<Transaction> refund_reveal;  // Alice's
    bool refund_fully_signed = false;          // the refund this party owns
    bool signed_their_refund = false;

    bool reveal_broadcast_done = false;
    bool reveal_redeem_done = false;
    bool redeem_broadcast_done = false;
    bool refund_broadcast_done = false;
    bool disclosure_sent = false;

    std::optional<std::int64_t> net_outcome;  // set by the session driver when terminal

    static PartyState init(Party role, const SecretKey& sk, const Secret& secret,
                           std::vector<FundingSource> funding);
};

struct StepResult {
    PartyState state;
    std::vector<Action> actions;
};

/// Pure transition of the honest protocol. Throws ProtocolViolation on an
/// observation that is impossible in the current phase (e.g. two
/// different commitments from the same counterparty).
StepResult step_party(const PartyState& state, const BetParams& params, const Observation& obs);

/// Locktime-refund duties only: the actions an otherwise silent party
/// still performs out of self-interest. Subset of step_party's tick
/// handling; used by aborting strategies.
std::vector<Action> refund_only_actions(const PartyState& state, const BetParams& params,
                                        std::uint32_t height, const LedgerState& ledger);

/// True once the tx may be acted on under the party's confirmation
/// policy: depth 0 trusts mempool presence, depth d waits for d + 1
/// confirmations.
bool actionable(const LedgerState& ledger, const Digest& id, std::uint32_t confirmation_depth);

/// Scans mempool and confirmed witnesses for a preimage of `commitment`.
std::optional<Secret> find_revealed_secret(const LedgerState& ledger, const Digest& commitment);

}  // namespace cointoss

#endif  // COINTOSS_PROTOCOL_HPP
