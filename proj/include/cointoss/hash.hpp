// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_HASH_HPP
#define COINTOSS_HASH_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <string>

#include "cointoss/util.hpp"

namespace cointoss {

enum class HashAlgo { Sha256, Sha1 };

/// A SHA-256 (32-byte) or SHA-1 (20-byte) digest. Also used as a
/// transaction id (always the 32-byte form).
struct Digest {
    Bytes bytes;

    std::string hex() const { return hex_encode(bytes); }
    static Digest from_hex(std::string_view h) { return Digest{hex_decode(h)}; }

    auto operator<=>(const Digest&) const = default;
};

Digest digest(HashAlgo algo, std::span<const std::uint8_t> data);
Digest sha256(std::span<const std::uint8_t> data);
Digest sha1(std::span<const std::uint8_t> data);

/// Least-significant bit of the data interpreted as a big-endian unsigned
/// integer, i.e. the LSB of the final byte. Throws EmptyOperand on empty
/// input.
unsigned parity(std::span<const std::uint8_t> data);

}  // namespace cointoss

#endif  // COINTOSS_HASH_HPP
