// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_KEYS_HPP
#define COINTOSS_KEYS_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "cointoss/hash.hpp"

namespace cointoss {

using SecretKey = std::array<std::uint8_t, 32>;

/// Simulation-grade key identity: pk = SHA256(sk).
struct PubKey {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const { return hex_encode(bytes); }
    static PubKey from_hex(std::string_view h);

    auto operator<=>(const PubKey&) const = default;
};

PubKey derive_pubkey(const SecretKey& sk);

/// Authorization of one transaction id by one key. The tag is a keyed
/// digest over (sk, message); it can only be produced by the secret key
/// holder and is recomputed by the registry on verification.
struct SignatureToken {
    PubKey pubkey;
    Digest message;  // the transaction id being authorized
    Digest tag;

    auto operator<=>(const SignatureToken&) const = default;
};

SignatureToken sign(const SecretKey& sk, const Digest& message);

/// Verification side of the signature scheme; the script interpreter and
/// ledger validate tokens through this interface only, so the scheme can
/// be swapped for a real one.
class SignatureAuthority {
public:
    virtual ~SignatureAuthority() = default;
    virtual bool verify(const SignatureToken& token) const = 0;
};

/// Maps pubkeys to secret keys; visible only to the simulation kernel.
class KeyRegistry : public SignatureAuthority {
public:
    PubKey register_secret(const SecretKey& sk);
    bool verify(const SignatureToken& token) const override;

private:
    std::map<std::array<std::uint8_t, 32>, SecretKey> keys_;
};

}  // namespace cointoss

#endif  // COINTOSS_KEYS_HPP
