// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "cointoss/errors.hpp"

namespace cointoss {

Digest digest(HashAlgo algo, std::span<const std::uint8_t> data) {
    const EVP_MD* md = algo == HashAlgo::Sha256 ? EVP_sha256() : EVP_sha1();
    Bytes out(EVP_MD_size(md));
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1)
        throw std::runtime_error("EVP_Digest failed");
    out.resize(len);
    return Digest{std::move(out)};
}

Digest sha256(std::span<const std::uint8_t> data) { return digest(HashAlgo::Sha256, data); }

Digest sha1(std::span<const std::uint8_t> data) { return digest(HashAlgo::Sha1, data); }

unsigned parity(std::span<const std::uint8_t> data) {
    if (data.empty()) throw EmptyOperand("parity of empty byte string");
    return data.back() & 1u;
}

}  // namespace cointoss
