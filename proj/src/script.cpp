// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/script.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "cointoss/errors.hpp"

namespace cointoss {

// --- Uint160 ----------------------------------------------------------------

std::string Uint160::hex() const { return "0x" + hex_encode(be); }

Uint160 Uint160::from_hex(std::string_view h) {
    if (h.starts_with("0x") || h.starts_with("0X")) h.remove_prefix(2);
    if (h.empty() || h.size() > 40) throw ScriptParseError("160-bit hex out of range");
    std::string padded(40 - h.size(), '0');
    padded.append(h);
    Bytes raw = hex_decode(padded);
    Uint160 v;
    std::copy(raw.begin(), raw.end(), v.be.begin());
    return v;
}

Uint160 Uint160::from_decimal(std::string_view d) {
    if (d.empty()) throw ScriptParseError("empty decimal literal");
    Uint160 v;
    for (char c : d) {
        if (c < '0' || c > '9') throw ScriptParseError("invalid decimal digit");
        unsigned carry = static_cast<unsigned>(c - '0');
        for (int i = 19; i >= 0; --i) {
            unsigned acc = v.be[static_cast<std::size_t>(i)] * 10u + carry;
            v.be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(acc & 0xff);
            carry = acc >> 8;
        }
        if (carry != 0) throw ScriptParseError("decimal literal exceeds 160 bits");
    }
    return v;
}

Uint160 Uint160::midpoint() {
    Uint160 v;
    v.be[0] = 0x80;
    return v;
}

// --- construction and equality ----------------------------------------------

ScriptRef script_and(ScriptRef left, ScriptRef right) {
    return std::make_shared<const ScriptExpr>(ScriptExpr{AndNode{std::move(left), std::move(right)}});
}
ScriptRef script_or(ScriptRef left, ScriptRef right) {
    return std::make_shared<const ScriptExpr>(ScriptExpr{OrNode{std::move(left), std::move(right)}});
}
ScriptRef script_preimage(std::string label, Digest expected) {
    return std::make_shared<const ScriptExpr>(ScriptExpr{PreimageNode{std::move(label), std::move(expected)}});
}
ScriptRef script_sig(PubKey pk) {
    return std::make_shared<const ScriptExpr>(ScriptExpr{SigNode{pk}});
}
ScriptRef script_parity(std::vector<std::string> labels, unsigned bit) {
    return std::make_shared<const ScriptExpr>(ScriptExpr{ParityNode{std::move(labels), bit}});
}
ScriptRef script_sha1_gt(std::vector<std::string> labels, Uint160 threshold) {
    return std::make_shared<const ScriptExpr>(ScriptExpr{Sha1GtNode{std::move(labels), threshold}});
}

bool operator==(const ScriptExpr& a, const ScriptExpr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&b](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                return *na.left == *nb.left && *na.right == *nb.right;
            } else if constexpr (std::is_same_v<T, PreimageNode>) {
                return na.label == nb.label && na.expected == nb.expected;
            } else if constexpr (std::is_same_v<T, SigNode>) {
                return na.pubkey == nb.pubkey;
            } else if constexpr (std::is_same_v<T, ParityNode>) {
                return na.labels == nb.labels && na.bit == nb.bit;
            } else {
                return na.labels == nb.labels && na.threshold == nb.threshold;
            }
        },
        a.node);
}

bool operator==(const Witness& a, const Witness& b) {
    return a.slots == b.slots && a.signatures == b.signatures;
}

// --- evaluation -------------------------------------------------------------

namespace {

void collect_labels(const ScriptExpr& e, std::set<std::string>& declared,
                    std::set<std::string>& referenced) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                collect_labels(*n.left, declared, referenced);
                collect_labels(*n.right, declared, referenced);
            } else if constexpr (std::is_same_v<T, PreimageNode>) {
                declared.insert(n.label);
            } else if constexpr (std::is_same_v<T, ParityNode> || std::is_same_v<T, Sha1GtNode>) {
                referenced.insert(n.labels.begin(), n.labels.end());
            }
        },
        e.node);
}

bool eval_node(const ScriptExpr& e, const Witness& w, const Digest& spending_txid,
               const SignatureAuthority& authority) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>) {
                return eval_node(*n.left, w, spending_txid, authority) &&
                       eval_node(*n.right, w, spending_txid, authority);
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return eval_node(*n.left, w, spending_txid, authority) ||
                       eval_node(*n.right, w, spending_txid, authority);
            } else if constexpr (std::is_same_v<T, PreimageNode>) {
                auto it = w.slots.find(n.label);
                if (it == w.slots.end()) return false;
                return sha256(it->second) == n.expected;
            } else if constexpr (std::is_same_v<T, SigNode>) {
                for (const SignatureToken& t : w.signatures) {
                    if (t.pubkey == n.pubkey && t.message == spending_txid && authority.verify(t))
                        return true;
                }
                return false;
            } else if constexpr (std::is_same_v<T, ParityNode>) {
                unsigned acc = 0;
                for (const std::string& label : n.labels) {
                    auto it = w.slots.find(label);
                    if (it == w.slots.end() || it->second.empty()) return false;
                    acc ^= parity(it->second);
                }
                return acc == n.bit;
            } else {
                Bytes concat;
                for (const std::string& label : n.labels) {
                    auto it = w.slots.find(label);
                    if (it == w.slots.end()) return false;
                    concat.insert(concat.end(), it->second.begin(), it->second.end());
                }
                Digest h = sha1(concat);
                Uint160 v;
                std::copy(h.bytes.begin(), h.bytes.end(), v.be.begin());
                return v > n.threshold;
            }
        },
        e.node);
}

}  // namespace

bool eval_script(const ScriptExpr& expr, const Witness& witness, const Digest& spending_txid,
                 const SignatureAuthority& authority) {
    std::set<std::string> declared, referenced;
    collect_labels(expr, declared, referenced);
    for (const std::string& label : referenced) {
        if (declared.count(label) == 0)
            throw MalformedScript("slot '" + label + "' referenced without a preimage declaration");
    }
    return eval_node(expr, witness, spending_txid, authority);
}

bool is_pay_to_pubkey(const ScriptExpr& expr, const PubKey& pk) {
    const auto* sig = std::get_if<SigNode>(&expr.node);
    return sig != nullptr && sig->pubkey == pk;
}

// --- textual encoding -------------------------------------------------------

std::string encode_script(const ScriptExpr& expr) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode>) {
                return "(" + encode_script(*n.left) + " AND " + encode_script(*n.right) + ")";
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return "(" + encode_script(*n.left) + " OR " + encode_script(*n.right) + ")";
            } else if constexpr (std::is_same_v<T, PreimageNode>) {
                return "sha256(" + n.label + ") == " + n.expected.hex();
            } else if constexpr (std::is_same_v<T, SigNode>) {
                return "sig(" + n.pubkey.hex() + ")";
            } else if constexpr (std::is_same_v<T, ParityNode>) {
                std::string out = "(parity (xor";
                for (const std::string& label : n.labels) out += " " + label;
                out += ") == ";
                out += n.bit ? '1' : '0';
                out += ")";
                return out;
            } else {
                std::string out = "(sha1cat(";
                for (std::size_t i = 0; i < n.labels.size(); ++i) {
                    if (i) out += ' ';
                    out += n.labels[i];
                }
                out += ") > " + n.threshold.hex() + ")";
                return out;
            }
        },
        expr.node);
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ScriptRef parse() {
        ScriptRef e = expr();
        if (pos_ != text_.size()) fail("trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw ScriptParseError(what + " at offset " + std::to_string(pos_));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(std::string_view lit) {
        if (text_.substr(pos_).starts_with(lit)) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view lit) {
        if (!consume(lit)) fail("expected '" + std::string(lit) + "'");
    }

    std::string name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected a slot name");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string hex_run(std::size_t count) {
        if (pos_ + count > text_.size()) fail("truncated hex literal");
        std::string out(text_.substr(pos_, count));
        pos_ += count;
        return out;
    }

    std::vector<std::string> name_list() {
        std::vector<std::string> labels;
        labels.push_back(name());
        while (consume(" ")) labels.push_back(name());
        return labels;
    }

    ScriptRef expr() {
        // Leaves that do not start with '(' first.
        if (consume("sha256(")) {
            std::string label = name();
            expect(") == ");
            Digest d = Digest::from_hex(hex_run(64));
            return script_preimage(std::move(label), std::move(d));
        }
        if (consume("sig(")) {
            PubKey pk = PubKey::from_hex(hex_run(64));
            expect(")");
            return script_sig(pk);
        }
        expect("(");
        if (consume("parity (xor ")) {
            std::vector<std::string> labels = name_list();
            expect(") == ");
            unsigned bit;
            if (consume("0"))
                bit = 0;
            else if (consume("1"))
                bit = 1;
            else
                fail("expected parity bit");
            expect(")");
            return script_parity(std::move(labels), bit);
        }
        if (consume("sha1cat(")) {
            std::vector<std::string> labels = name_list();
            expect(") > ");
            Uint160 threshold = number160();
            expect(")");
            return script_sha1_gt(std::move(labels), threshold);
        }
        ScriptRef left = expr();
        bool is_and;
        if (consume(" AND "))
            is_and = true;
        else if (consume(" OR "))
            is_and = false;
        else
            fail("expected ' AND ' or ' OR '");
        ScriptRef right = expr();
        expect(")");
        return is_and ? script_and(std::move(left), std::move(right))
                      : script_or(std::move(left), std::move(right));
    }

    Uint160 number160() {
        std::size_t start = pos_;
        bool hex = consume("0x") || consume("0X");
        while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start + (hex ? 2 : 0)) fail("expected a threshold literal");
        std::string_view lit = text_.substr(start, pos_ - start);
        return hex ? Uint160::from_hex(lit) : Uint160::from_decimal(lit);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

ScriptRef parse_script(std::string_view text) { return Parser(text).parse(); }

}  // namespace cointoss
