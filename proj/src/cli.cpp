// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cointoss/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cointoss/errors.hpp"
#include "cointoss/montecarlo.hpp"

namespace cointoss::cli {

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitUnexpected = 1;
constexpr int kExitInternal = 2;

struct RawOptions {
    std::uint64_t stake = 50;
    std::uint32_t bet_locktime = 20;
    std::uint32_t reveal_locktime = 10;
    std::string alice = "honest";
    std::string bob = "honest";
    std::int64_t bias_k = -1;
    std::int64_t bias_t = -1;
    std::uint32_t confirmation_depth = 1;
    bool unsound = false;
    std::uint64_t seed = 1;
    std::uint32_t reorg_budget = 3;
    std::uint32_t max_height = 0;
    bool confirmation_depth_set = false;
    bool reorg_budget_set = false;
};

void add_common_options(CLI::App* cmd, RawOptions& raw) {
    cmd->add_option("--stake", raw.stake, "Stake X per party in atomic units");
    cmd->add_option("--bet-locktime", raw.bet_locktime, "refund_bet locktime offset in blocks");
    cmd->add_option("--reveal-locktime", raw.reveal_locktime,
                    "refund_reveal locktime offset in blocks");
    cmd->add_option("--bias-k", raw.bias_k, "Bias window width in bits (1..16)");
    cmd->add_option("--bias-t", raw.bias_t, "Bias threshold T; Alice wins with p = T/2^k");
    cmd->add_option("--confirmation-depth", raw.confirmation_depth,
                    "Extra blocks to wait before trusting a confirmation (0 = none)")
        ->each([&raw](const std::string&) { raw.confirmation_depth_set = true; });
    cmd->add_flag("--unsound", raw.unsound,
                  "Allow a reveal locktime at or above the bet locktime (attack demos)");
    cmd->add_option("--seed", raw.seed, "Session RNG seed");
    cmd->add_option("--reorg-budget", raw.reorg_budget, "Maximum ledger reorg depth")
        ->each([&raw](const std::string&) { raw.reorg_budget_set = true; });
    cmd->add_option("--max-height", raw.max_height, "Simulation horizon (0 = 2*bet_locktime+10)");
}

SessionConfig session_from(const RawOptions& raw) {
    SessionConfig session;
    session.params.stake_x = raw.stake;
    session.params.bet_locktime = raw.bet_locktime;
    session.params.reveal_locktime = raw.reveal_locktime;
    session.params.confirmation_depth = raw.confirmation_depth;
    session.params.unsound_mode = raw.unsound;
    if (raw.bias_k >= 0 || raw.bias_t >= 0) {
        if (raw.bias_k < 0 || raw.bias_t < 0)
            throw DomainError("--bias-k and --bias-t must be given together");
        session.params.bias = make_bias(raw.stake, static_cast<std::uint32_t>(raw.bias_k),
                                        static_cast<std::uint32_t>(raw.bias_t));
    }
    session.strategy_alice = StrategySpec::parse(raw.alice);
    session.strategy_bob = StrategySpec::parse(raw.bob);
    session.rng_seed = raw.seed;
    session.reorg_budget = raw.reorg_budget;
    session.max_height = raw.max_height;
    session.params.validate();
    return session;
}

void print_trace_and_violations(const SessionTrace& trace, const SessionConfig& config,
                                std::ostream& out) {
    out << trace.to_text();
    std::vector<Violation> violations = audit_trace(trace, config);
    for (const Violation& v : violations) out << "VIOLATION " << to_string(v) << "\n";
    for (const std::string& v : trace.ledger_violations) out << "LEDGER-VIOLATION " << v << "\n";
    out << "violations=" << violations.size() + trace.ledger_violations.size() << "\n";
}

bool has_violation_class(const std::vector<Violation>& violations, const std::string& cls) {
    for (const Violation& v : violations)
        if (v.cls == cls) return true;
    return false;
}

int run_attack(const CliConfig& cli, std::ostream& out, std::ostream& err) {
    SessionConfig config = cli.session;
    bool expect_violation;

    if (cli.attack_name == "refund-then-reveal") {
        config.strategy_alice = {StrategyKind::Honest, 0};
        config.strategy_bob = {StrategyKind::RefundThenReveal, 0};
        // Sound locktimes defeat the cheat; unsound ones let it through.
        expect_violation = config.params.unsound_mode &&
                           config.params.reveal_locktime >= config.params.bet_locktime;
    } else if (cli.attack_name == "reorg-double-spend") {
        config.strategy_alice = {StrategyKind::ReorgDoubleSpend, 1};
        config.strategy_bob = {StrategyKind::Honest, 0};
        expect_violation = config.params.confirmation_depth < config.reorg_budget + 1 &&
                           config.params.confirmation_depth == 0;
    } else if (cli.attack_name == "withhold-reveal") {
        config.strategy_alice = {StrategyKind::Honest, 0};
        config.strategy_bob = {StrategyKind::WithholdReveal, 0};
        expect_violation = false;  // refunds make everyone whole
    } else {
        err << "error: unknown attack scenario '" << cli.attack_name << "'\n";
        return kExitUsage;
    }

    SessionTrace trace = run_session(config);
    print_trace_and_violations(trace, config, out);

    std::vector<Violation> violations = audit_trace(trace, config);
    bool saw_violation = has_violation_class(violations, "honest-loss");
    bool met = expect_violation == saw_violation && trace.ledger_violations.empty();
    if (!expect_violation) met = met && violations.empty();
    out << "ATTACK name=" << cli.attack_name
        << " expect=" << (expect_violation ? "honest-loss" : "clean")
        << " outcome=" << (met ? "expected" : "unexpected") << "\n";
    return met ? 0 : kExitUnexpected;
}

void print_vectors(std::ostream& out) {
    Bytes abc{'a', 'b', 'c'};
    out << "sha256_abc=" << sha256(abc).hex() << "\n";
    out << "sha1_abc=" << sha1(abc).hex() << "\n";
    Secret zero;
    out << "commit_zero_secret=" << commit(zero).hex() << "\n";

    Transaction faucet;
    faucet.outputs.push_back(Output{1000, script_sig(PubKey{})});
    out << "faucet_serialization=" << hex_encode(canonical_serialize(faucet)) << "\n";
    out << "faucet_txid=" << txid(faucet).hex() << "\n";

    // Fixed placeholder secrets and keys for the script encodings.
    SecretKey sk_a{}, sk_b{};
    sk_a.fill(0x0a);
    sk_b.fill(0x0b);
    Secret a1, b1;
    a1.bytes.fill(0x01);
    b1.bytes.fill(0x02);
    BetParams params;
    params.pk_alice = derive_pubkey(sk_a);
    params.pk_bob = derive_pubkey(sk_b);
    std::vector<FundingSource> bob_funding{FundingSource{{sha256(Bytes{0xfb}), 0}, 100}};
    std::vector<FundingSource> alice_funding{FundingSource{{sha256(Bytes{0xfa}), 0}, 50}};
    Transaction bet = build_bet_transaction(params, bob_funding, commit(a1), commit(b1));
    Transaction reveal = build_reveal_transaction(params, alice_funding, commit(b1));
    out << "bet_script=" << encode_script(*bet.outputs[0].script) << "\n";
    out << "reveal_script=" << encode_script(*reveal.outputs[0].script) << "\n";
    out << "sha1cat_midpoint_threshold=" << Uint160::midpoint().hex() << "\n";
}

}  // namespace

std::variant<CliConfig, int> parse_cli(const std::vector<std::string>& args, std::ostream& out,
                                       std::ostream& err) {
    CLI::App app{"Two-party coin-toss protocol simulator over a UTXO ledger"};
    app.require_subcommand(1);

    RawOptions raw;
    CliConfig cli;

    CLI::App* run = app.add_subcommand("run", "Run one session and print its trace");
    add_common_options(run, raw);
    run->add_option("--alice", raw.alice, "Alice's strategy");
    run->add_option("--bob", raw.bob, "Bob's strategy");
    run->add_option("-o,--output", cli.output_path, "Write the trace to a file");

    CLI::App* attack = app.add_subcommand("attack", "Run a named attack demonstration");
    add_common_options(attack, raw);
    attack->add_option("--name", cli.attack_name, "refund-then-reveal | reorg-double-spend | withhold-reveal")
        ->required();
    attack->add_option("-o,--output", cli.output_path, "Write the trace to a file");

    CLI::App* mc = app.add_subcommand("montecarlo", "Aggregate statistics over seeded sessions");
    add_common_options(mc, raw);
    mc->add_option("--alice", raw.alice, "Alice's strategy");
    mc->add_option("--bob", raw.bob, "Bob's strategy");
    mc->add_option("-n,--sessions", cli.n, "Number of sessions");

    app.add_subcommand("vectors", "Print golden encodings and ids for external verification");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (app.got_subcommand("run")) {
            cli.command = Command::Run;
            cli.session = session_from(raw);
        } else if (app.got_subcommand("attack")) {
            cli.command = Command::Attack;
            if (!raw.confirmation_depth_set && cli.attack_name == "reorg-double-spend")
                raw.confirmation_depth = 0;
            if (!raw.reorg_budget_set && cli.attack_name == "reorg-double-spend")
                raw.reorg_budget = 1;
            cli.session = session_from(raw);
        } else if (app.got_subcommand("montecarlo")) {
            cli.command = Command::MonteCarlo;
            cli.session = session_from(raw);
        } else {
            cli.command = Command::Vectors;
        }
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return cli;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::variant<CliConfig, int> parsed = parse_cli(args, out, err);
    if (const int* code = std::get_if<int>(&parsed)) return *code;
    const CliConfig& cli = std::get<CliConfig>(parsed);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!cli.output_path.empty()) {
        file.open(cli.output_path);
        if (!file.good()) {
            err << "error: cannot open output file '" << cli.output_path << "'\n";
            return kExitUsage;
        }
        sink = &file;
    }

    try {
        switch (cli.command) {
            case Command::Run: {
                SessionTrace trace = run_session(cli.session);
                *sink << trace.to_text();
                std::vector<Violation> violations = audit_trace(trace, cli.session);
                for (const Violation& v : violations) *sink << "VIOLATION " << to_string(v) << "\n";
                for (const std::string& v : trace.ledger_violations)
                    *sink << "LEDGER-VIOLATION " << v << "\n";
                return 0;
            }
            case Command::Attack:
                return run_attack(cli, *sink, err);
            case Command::MonteCarlo: {
                Statistics stats = monte_carlo(cli.session, cli.n);
                *sink << stats.to_text();
                return 0;
            }
            case Command::Vectors:
                print_vectors(*sink);
                return 0;
        }
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace cointoss::cli
