// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/keys.hpp"

#include <algorithm>
#include <stdexcept>

namespace cointoss {

PubKey PubKey::from_hex(std::string_view h) {
    Bytes raw = hex_decode(h);
    if (raw.size() != 32) throw std::invalid_argument("pubkey must be 32 bytes");
    PubKey pk;
    std::copy(raw.begin(), raw.end(), pk.bytes.begin());
    return pk;
}

PubKey derive_pubkey(const SecretKey& sk) {
    Digest d = sha256(sk);
    PubKey pk;
    std::copy(d.bytes.begin(), d.bytes.end(), pk.bytes.begin());
    return pk;
}

namespace {
Digest mint_tag(const SecretKey& sk, const Digest& message) {
    Bytes buf(sk.begin(), sk.end());
    buf.insert(buf.end(), message.bytes.begin(), message.bytes.end());
    return sha256(buf);
}
}  // namespace

SignatureToken sign(const SecretKey& sk, const Digest& message) {
    return SignatureToken{derive_pubkey(sk), message, mint_tag(sk, message)};
}

PubKey KeyRegistry::register_secret(const SecretKey& sk) {
    PubKey pk = derive_pubkey(sk);
    keys_[pk.bytes] = sk;
    return pk;
}

bool KeyRegistry::verify(const SignatureToken& token) const {
    auto it = keys_.find(token.pubkey.bytes);
    if (it == keys_.end()) return false;
    return mint_tag(it->second, token.message) == token.tag;
}

}  // namespace cointoss
