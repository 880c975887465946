// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_TRANSACTION_HPP
#define COINTOSS_TRANSACTION_HPP

#include <compare>
#include <cstdint>
#include <vector>

#include "cointoss/hash.hpp"
#include "cointoss/script.hpp"

namespace cointoss {

struct Outpoint {
    Digest txid;
    std::uint32_t index = 0;

    auto operator<=>(const Outpoint&) const = default;
};

struct Output {
    std::uint64_t value = 0;
    ScriptRef script;
};

inline bool operator==(const Output& a, const Output& b) {
    return a.value == b.value && *a.script == *b.script;
}

struct TxInput {
    Outpoint prev;
    Witness witness;
};

/// Zero-fee transaction: input values must equal output values. A
/// transaction with no inputs is a faucet (coin issuance); exactly one is
/// used per scenario setup.
struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<Output> outputs;
    std::uint32_t locktime = 0;  // earliest block height; 0 = none
};

/// Canonical serialization; witnesses are excluded so a refund can be
/// signed against a parent that has not been broadcast yet.
Bytes canonical_serialize(const Transaction& tx);

/// SHA256 of the canonical serialization.
Digest txid(const Transaction& tx);

}  // namespace cointoss

#endif  // COINTOSS_TRANSACTION_HPP
