// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COINTOSS_CLI_HPP
#define COINTOSS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "cointoss/session.hpp"

namespace cointoss::cli {

enum class Command { Run, Attack, MonteCarlo, Vectors };

struct CliConfig {
    Command command = Command::Run;
    SessionConfig session;
    std::uint64_t n = 10000;       // montecarlo batch size
    std::string attack_name;       // attack scenario
    std::string output_path;       // empty = standard output
};

/// Parses argv (without the program name). Returns either the parsed
/// config or the process exit code when parsing already settled the run
/// (usage error, --help).
std::variant<CliConfig, int> parse_cli(const std::vector<std::string>& args, std::ostream& out,
                                       std::ostream& err);

/// Full CLI entry: parse and execute. Exit codes: 0 expected outcome,
/// 1 unexpected attack outcome, 2 internal error, other nonzero for
/// usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cointoss::cli

#endif  // COINTOSS_CLI_HPP
