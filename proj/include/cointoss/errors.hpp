// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_ERRORS_HPP
#define COINTOSS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cointoss {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyOperand : DomainError {
    explicit EmptyOperand(const std::string& what) : DomainError(what) {}
};

struct MalformedScript : DomainError {
    explicit MalformedScript(const std::string& what) : DomainError(what) {}
};

struct ScriptParseError : DomainError {
    explicit ScriptParseError(const std::string& what) : DomainError(what) {}
};

struct FundingMismatch : DomainError {
    explicit FundingMismatch(const std::string& what) : DomainError(what) {}
};

struct BadIndex : DomainError {
    explicit BadIndex(const std::string& what) : DomainError(what) {}
};

struct ProtocolViolation : DomainError {
    explicit ProtocolViolation(const std::string& what) : DomainError(what) {}
};

}  // namespace cointoss

#endif  // COINTOSS_ERRORS_HPP
