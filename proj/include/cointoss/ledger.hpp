// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_LEDGER_HPP
#define COINTOSS_LEDGER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cointoss/keys.hpp"
#include "cointoss/transaction.hpp"

namespace cointoss {

enum class RejectReason {
    InputMissing,
    InputSpent,
    ScriptFailed,
    ValueMismatch,
    LocktimeNotReached,
    DepthExceeded,
    InvalidReplacement,
};

const char* to_string(RejectReason r);

struct SubmitResult {
    bool accepted = false;
    RejectReason reason = RejectReason::InputMissing;
};

struct ReorgResult {
    bool accepted = false;
    RejectReason reason = RejectReason::DepthExceeded;
    std::vector<Digest> evicted;  // unwound txids that did not re-enter history or mempool
};

/// Single-node Bitcoin-like ledger: confirmed chain, UTXO set, mempool,
/// and a bounded reorg capability. A transaction with locktime L is
/// accepted when it can enter the next block (L <= height + 1) and is
/// never part of a block at height < L. Mempool transactions may spend
/// outputs of earlier mempool transactions; blocks store parents before
/// children, ascending txid among independents.
class LedgerState {
public:
    explicit LedgerState(const SignatureAuthority& authority, std::uint32_t max_reorg_depth = 3);

    std::uint32_t height() const { return height_; }
    std::uint32_t max_reorg_depth() const { return max_reorg_depth_; }
    std::uint64_t total_issued() const { return total_issued_; }

    SubmitResult submit_transaction(const Transaction& tx);
    std::uint32_t advance_blocks(std::uint32_t n);
    ReorgResult reorg(std::uint32_t depth, const std::vector<Transaction>& replacement);

    /// Sum of confirmed unspent outputs paying exactly sig(pk).
    std::uint64_t balance_of(const PubKey& pk) const;

    // Views
    const std::vector<std::vector<Transaction>>& blocks() const { return blocks_; }
    const std::vector<Transaction>& mempool() const { return mempool_; }
    const std::map<Outpoint, Output>& utxos() const { return utxos_; }

    bool in_mempool(const Digest& id) const;
    std::optional<std::uint32_t> confirm_height(const Digest& id) const;
    /// 0 while in mempool; nullopt if unknown.
    std::optional<std::uint32_t> confirmations(const Digest& id) const;
    std::optional<Transaction> find_tx(const Digest& id) const;  // confirmed or mempool
    bool output_unspent(const Outpoint& op) const { return utxos_.count(op) != 0; }
    /// True if a mempool transaction spends the outpoint.
    bool spent_in_mempool(const Outpoint& op) const;

    /// One UTXO per line, `<txid-hex>:<index> <value> <script-text>`,
    /// sorted lexicographically.
    std::string dump_utxos() const;

    /// Replays the confirmed history from genesis with full validation and
    /// compares the rebuilt UTXO set with the incremental one. Returns
    /// human-readable violations (empty when sound).
    std::vector<std::string> audit() const;

private:
    struct ConfirmedTx {
        Transaction tx;
        std::uint32_t height = 0;
    };

    std::optional<RejectReason> validate(const Transaction& tx,
                                         const std::map<Outpoint, Output>& utxos,
                                         const std::vector<Transaction>& prior_pending,
                                         std::uint32_t block_height) const;
    void apply(const Transaction& tx, std::uint32_t height);
    void unapply(const Transaction& tx);
    std::vector<Transaction> order_for_block(const std::vector<Transaction>& pending) const;

    const SignatureAuthority* authority_;
    std::uint32_t max_reorg_depth_;
    std::uint32_t height_ = 0;
    std::vector<std::vector<Transaction>> blocks_;  // blocks_[i] confirmed at height i+1
    std::map<Outpoint, Output> utxos_;
    std::vector<Transaction> mempool_;  // first-seen order
    std::map<Bytes, ConfirmedTx> tx_index_;
    std::uint64_t total_issued_ = 0;
};

}  // namespace cointoss

#endif  // COINTOSS_LEDGER_HPP
