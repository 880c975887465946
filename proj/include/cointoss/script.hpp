// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_SCRIPT_HPP
#define COINTOSS_SCRIPT_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cointoss/hash.hpp"
#include "cointoss/keys.hpp"

namespace cointoss {

struct ScriptExpr;
using ScriptRef = std::shared_ptr<const ScriptExpr>;

/// 160-bit unsigned integer, big-endian; threshold operand of the
/// sha1cat comparison leaf.
struct Uint160 {
    std::array<std::uint8_t, 20> be{};

    std::string hex() const;                      // canonical "0x" + 40 hex digits
    static Uint160 from_hex(std::string_view h);  // with or without 0x prefix
    static Uint160 from_decimal(std::string_view d);
    static Uint160 midpoint();  // 2^159

    auto operator<=>(const Uint160&) const = default;
};

struct AndNode {
    ScriptRef left, right;
};
struct OrNode {
    ScriptRef left, right;
};
/// sha256(witness[label]) == expected; also declares `label` in the
/// script's slot universe.
struct PreimageNode {
    std::string label;
    Digest expected;
};
struct SigNode {
    PubKey pubkey;
};
/// XOR of parity(witness[label]) over all labels equals `bit`.
struct ParityNode {
    std::vector<std::string> labels;
    unsigned bit = 0;
};
/// SHA1 of the concatenated slot values, read as a 160-bit big-endian
/// integer, is strictly greater than `threshold`.
struct Sha1GtNode {
    std::vector<std::string> labels;
    Uint160 threshold;
};

/// Predicate AST encoding an output's spending condition.
struct ScriptExpr {
    std::variant<AndNode, OrNode, PreimageNode, SigNode, ParityNode, Sha1GtNode> node;
};

bool operator==(const ScriptExpr& a, const ScriptExpr& b);

ScriptRef script_and(ScriptRef left, ScriptRef right);
ScriptRef script_or(ScriptRef left, ScriptRef right);
ScriptRef script_preimage(std::string label, Digest expected);
ScriptRef script_sig(PubKey pk);
ScriptRef script_parity(std::vector<std::string> labels, unsigned bit);
ScriptRef script_sha1_gt(std::vector<std::string> labels, Uint160 threshold);

/// Spender-supplied material: preimage slots and signature tokens.
struct Witness {
    std::map<std::string, Bytes> slots;
    std::vector<SignatureToken> signatures;
};

bool operator==(const Witness& a, const Witness& b);

/// Evaluates whether the witness satisfies the script when spending the
/// transaction identified by spending_txid. Missing slots or tokens make
/// the affected leaf false. Throws MalformedScript if a parity/sha1cat
/// leaf references a slot with no preimage declaration in the script.
bool eval_script(const ScriptExpr& expr, const Witness& witness, const Digest& spending_txid,
                 const SignatureAuthority& authority);

/// Deterministic fully parenthesized textual form; parse_script inverts it.
std::string encode_script(const ScriptExpr& expr);
ScriptRef parse_script(std::string_view text);  // throws ScriptParseError

/// True iff the script is exactly sig(pk) — the plain payout pattern.
bool is_pay_to_pubkey(const ScriptExpr& expr, const PubKey& pk);

}  // namespace cointoss

#endif  // COINTOSS_SCRIPT_HPP
