// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/ledger.hpp"

#include <algorithm>
#include <set>

#include "cointoss/errors.hpp"

namespace cointoss {

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::InputMissing: return "InputMissing";
        case RejectReason::InputSpent: return "InputSpent";
        case RejectReason::ScriptFailed: return "ScriptFailed";
        case RejectReason::ValueMismatch: return "ValueMismatch";
        case RejectReason::LocktimeNotReached: return "LocktimeNotReached";
        case RejectReason::DepthExceeded: return "DepthExceeded";
        case RejectReason::InvalidReplacement: return "InvalidReplacement";
    }
    return "Unknown";
}

LedgerState::LedgerState(const SignatureAuthority& authority, std::uint32_t max_reorg_depth)
    : authority_(&authority), max_reorg_depth_(max_reorg_depth) {}

std::optional<RejectReason> LedgerState::validate(const Transaction& tx,
                                                  const std::map<Outpoint, Output>& utxos,
                                                  const std::vector<Transaction>& prior_pending,
                                                  std::uint32_t block_height) const {
    // Outputs created by pending parents, net of pending spends.
    std::map<Outpoint, Output> pending_outputs;
    std::set<Outpoint> pending_spends;
    for (const Transaction& p : prior_pending) {
        Digest pid = txid(p);
        for (std::uint32_t i = 0; i < p.outputs.size(); ++i)
            pending_outputs[{pid, i}] = p.outputs[i];
        for (const TxInput& in : p.inputs) pending_spends.insert(in.prev);
    }

    Digest id = txid(tx);
    std::uint64_t in_sum = 0;
    std::set<Outpoint> seen;
    for (const TxInput& in : tx.inputs) {
        const Output* out = nullptr;
        if (auto it = utxos.find(in.prev); it != utxos.end())
            out = &it->second;
        else if (auto pit = pending_outputs.find(in.prev); pit != pending_outputs.end())
            out = &pit->second;
        if (out == nullptr) return RejectReason::InputMissing;
        if (pending_spends.count(in.prev) || !seen.insert(in.prev).second)
            return RejectReason::InputSpent;
        bool ok = false;
        try {
            ok = eval_script(*out->script, in.witness, id, *authority_);
        } catch (const MalformedScript&) {
            ok = false;
        }
        if (!ok) return RejectReason::ScriptFailed;
        in_sum += out->value;
    }

    if (!tx.inputs.empty()) {
        std::uint64_t out_sum = 0;
        for (const Output& o : tx.outputs) out_sum += o.value;
        if (in_sum != out_sum) return RejectReason::ValueMismatch;
    }

    if (tx.locktime > block_height) return RejectReason::LocktimeNotReached;
    return std::nullopt;
}

SubmitResult LedgerState::submit_transaction(const Transaction& tx) {
    if (auto bad = validate(tx, utxos_, mempool_, height_ + 1)) return {false, *bad};
    mempool_.push_back(tx);
    return {true, RejectReason::InputMissing};
}

void LedgerState::apply(const Transaction& tx, std::uint32_t height) {
    Digest id = txid(tx);
    for (const TxInput& in : tx.inputs) utxos_.erase(in.prev);
    for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) utxos_[{id, i}] = tx.outputs[i];
    if (tx.inputs.empty()) {
        for (const Output& o : tx.outputs) total_issued_ += o.value;
    }
    tx_index_[id.bytes] = ConfirmedTx{tx, height};
}

void LedgerState::unapply(const Transaction& tx) {
    Digest id = txid(tx);
    for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) utxos_.erase({id, i});
    for (auto it = tx.inputs.rbegin(); it != tx.inputs.rend(); ++it) {
        const auto& parent = tx_index_.at(it->prev.txid.bytes).tx;
        utxos_[it->prev] = parent.outputs.at(it->prev.index);
    }
    if (tx.inputs.empty()) {
        for (const Output& o : tx.outputs) total_issued_ -= o.value;
    }
    tx_index_.erase(id.bytes);
}

std::vector<Transaction> LedgerState::order_for_block(const std::vector<Transaction>& pending) const {
    // Parents before children; ascending txid among the currently placeable.
    std::vector<std::pair<Digest, const Transaction*>> remaining;
    remaining.reserve(pending.size());
    for (const Transaction& tx : pending) remaining.emplace_back(txid(tx), &tx);
    std::set<Bytes> unplaced;
    for (const auto& [id, tx] : remaining) unplaced.insert(id.bytes);

    std::vector<Transaction> ordered;
    while (!remaining.empty()) {
        std::size_t pick = remaining.size();
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            bool ready = true;
            for (const TxInput& in : remaining[i].second->inputs) {
                if (unplaced.count(in.prev.txid.bytes)) {
                    ready = false;
                    break;
                }
            }
            if (ready && (pick == remaining.size() ||
                          remaining[i].first.bytes < remaining[pick].first.bytes))
                pick = i;
        }
        // A cycle is impossible: children are accepted only after parents.
        ordered.push_back(*remaining[pick].second);
        unplaced.erase(remaining[pick].first.bytes);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return ordered;
}

std::uint32_t LedgerState::advance_blocks(std::uint32_t n) {
    for (std::uint32_t i = 0; i < n; ++i) {
        ++height_;
        std::vector<Transaction> block = order_for_block(mempool_);
        for (const Transaction& tx : block) apply(tx, height_);
        blocks_.push_back(std::move(block));
        mempool_.clear();
    }
    return height_;
}

ReorgResult LedgerState::reorg(std::uint32_t depth, const std::vector<Transaction>& replacement) {
    if (depth > max_reorg_depth_ || depth > height_) return {false, RejectReason::DepthExceeded, {}};

    LedgerState scratch = *this;
    std::vector<Transaction> unwound;
    for (std::uint32_t d = 0; d < depth; ++d) {
        std::vector<Transaction> block = std::move(scratch.blocks_.back());
        scratch.blocks_.pop_back();
        for (auto it = block.rbegin(); it != block.rend(); ++it) scratch.unapply(*it);
        unwound.insert(unwound.begin(), block.begin(), block.end());
        --scratch.height_;
    }

    std::vector<Transaction> accepted;
    for (const Transaction& r : replacement) {
        if (scratch.validate(r, scratch.utxos_, accepted, scratch.height_ + 1))
            return {false, RejectReason::InvalidReplacement, {}};
        accepted.push_back(r);
    }
    ++scratch.height_;
    for (const Transaction& r : accepted) scratch.apply(r, scratch.height_);
    scratch.blocks_.push_back(accepted);
    for (std::uint32_t d = 1; d < depth; ++d) {
        ++scratch.height_;
        scratch.blocks_.emplace_back();
    }

    std::set<Bytes> replaced_ids;
    for (const Transaction& r : replacement) replaced_ids.insert(txid(r).bytes);

    // Unwound transactions that do not conflict return to the mempool,
    // ahead of the previously pending ones; everything is revalidated.
    std::vector<Transaction> candidates = unwound;
    candidates.insert(candidates.end(), scratch.mempool_.begin(), scratch.mempool_.end());
    scratch.mempool_.clear();
    std::set<Bytes> pooled;
    for (const Transaction& tx : candidates) {
        Digest id = txid(tx);
        if (replaced_ids.count(id.bytes) || pooled.count(id.bytes)) continue;
        if (!scratch.validate(tx, scratch.utxos_, scratch.mempool_, scratch.height_ + 1)) {
            scratch.mempool_.push_back(tx);
            pooled.insert(id.bytes);
        }
    }

    ReorgResult result{true, RejectReason::DepthExceeded, {}};
    for (const Transaction& tx : unwound) {
        Digest id = txid(tx);
        if (!replaced_ids.count(id.bytes) && !pooled.count(id.bytes)) result.evicted.push_back(id);
    }
    *this = std::move(scratch);
    return result;
}

std::uint64_t LedgerState::balance_of(const PubKey& pk) const {
    std::uint64_t sum = 0;
    for (const auto& [op, out] : utxos_) {
        if (is_pay_to_pubkey(*out.script, pk)) sum += out.value;
    }
    return sum;
}

bool LedgerState::in_mempool(const Digest& id) const {
    return std::any_of(mempool_.begin(), mempool_.end(),
                       [&](const Transaction& tx) { return txid(tx) == id; });
}

std::optional<std::uint32_t> LedgerState::confirm_height(const Digest& id) const {
    auto it = tx_index_.find(id.bytes);
    if (it == tx_index_.end()) return std::nullopt;
    return it->second.height;
}

std::optional<std::uint32_t> LedgerState::confirmations(const Digest& id) const {
    if (auto h = confirm_height(id)) return height_ - *h + 1;
    if (in_mempool(id)) return 0;
    return std::nullopt;
}

std::optional<Transaction> LedgerState::find_tx(const Digest& id) const {
    if (auto it = tx_index_.find(id.bytes); it != tx_index_.end()) return it->second.tx;
    for (const Transaction& tx : mempool_)
        if (txid(tx) == id) return tx;
    return std::nullopt;
}

bool LedgerState::spent_in_mempool(const Outpoint& op) const {
    for (const Transaction& tx : mempool_)
        for (const TxInput& in : tx.inputs)
            if (in.prev == op) return true;
    return false;
}

std::string LedgerState::dump_utxos() const {
    std::vector<std::string> lines;
    lines.reserve(utxos_.size());
    for (const auto& [op, out] : utxos_) {
        lines.push_back(op.txid.hex() + ":" + std::to_string(op.index) + " " +
                        std::to_string(out.value) + " " + encode_script(*out.script));
    }
    std::sort(lines.begin(), lines.end());
    std::string dump;
    for (const std::string& line : lines) {
        dump += line;
        dump += '\n';
    }
    return dump;
}

std::vector<std::string> LedgerState::audit() const {
    std::vector<std::string> violations;
    LedgerState rebuilt(*authority_, max_reorg_depth_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        std::uint32_t h = static_cast<std::uint32_t>(b + 1);
        std::vector<Transaction> prior;
        for (const Transaction& tx : blocks_[b]) {
            if (auto bad = rebuilt.validate(tx, rebuilt.utxos_, prior, h)) {
                violations.push_back("replay: tx " + txid(tx).hex() + " invalid at height " +
                                     std::to_string(h) + ": " + to_string(*bad));
            }
            prior.push_back(tx);
        }
        ++rebuilt.height_;
        for (const Transaction& tx : prior) rebuilt.apply(tx, h);
        rebuilt.blocks_.push_back(blocks_[b]);

        std::uint64_t supply = 0;
        for (const auto& [op, out] : rebuilt.utxos_) supply += out.value;
        if (supply != rebuilt.total_issued_) {
            violations.push_back("conservation: height " + std::to_string(h) + " supply " +
                                 std::to_string(supply) + " != issued " +
                                 std::to_string(rebuilt.total_issued_));
        }
    }
    if (height_ != blocks_.size())
        violations.push_back("height " + std::to_string(height_) + " != block count " +
                             std::to_string(blocks_.size()));
    if (rebuilt.utxos_ != utxos_ || rebuilt.dump_utxos() != dump_utxos())
        violations.push_back("rebuild: UTXO set differs from incremental state");
    if (rebuilt.total_issued_ != total_issued_)
        violations.push_back("rebuild: issuance differs from incremental state");
    return violations;
}

}  // namespace cointoss
