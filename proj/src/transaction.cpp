// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/transaction.hpp"

namespace cointoss {

Bytes canonical_serialize(const Transaction& tx) {
    Bytes out;
    put_u32_be(out, static_cast<std::uint32_t>(tx.inputs.size()));
    for (const TxInput& in : tx.inputs) {
        out.insert(out.end(), in.prev.txid.bytes.begin(), in.prev.txid.bytes.end());
        put_u32_be(out, in.prev.index);
    }
    put_u32_be(out, static_cast<std::uint32_t>(tx.outputs.size()));
    for (const Output& o : tx.outputs) {
        put_u64_be(out, o.value);
        std::string text = encode_script(*o.script);
        put_u32_be(out, static_cast<std::uint32_t>(text.size()));
        out.insert(out.end(), text.begin(), text.end());
    }
    put_u32_be(out, tx.locktime);
    return out;
}

Digest txid(const Transaction& tx) { return sha256(canonical_serialize(tx)); }

}  // namespace cointoss
