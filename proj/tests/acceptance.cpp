// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Acceptance suite: runs every protocol-level claim end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cointoss/montecarlo.hpp"
#include "cointoss/session.hpp"

using namespace cointoss;

namespace {

std::string g_cli_path;
std::uint64_t g_ledger_violation_tally = 0;  // accumulated across criteria 2-6
std::uint64_t g_sessions_audited = 0;

struct Check {
    std::vector<std::string> failures;

    void require(bool cond, const std::string& what) {
        if (!cond) failures.push_back(what);
    }
};

SessionConfig honest_config(std::uint64_t seed) {
    SessionConfig config;
    config.strategy_alice = {StrategyKind::Honest, 0};
    config.strategy_bob = {StrategyKind::Honest, 0};
    config.rng_seed = seed;
    return config;
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli_process(const std::string& args) {
    CliResult result;
    std::string cmd = g_cli_path + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
    int status = pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

// --- criterion 1: script/winner equivalence --------------------------------

void criterion1(Check& c) {
    KeyRegistry registry;
    SecretKey sk_a{}, sk_b{};
    sk_a.fill(0x0a);
    sk_b.fill(0x0b);
    BetParams params;
    params.pk_alice = registry.register_secret(sk_a);
    params.pk_bob = registry.register_secret(sk_b);
    std::vector<FundingSource> funding{FundingSource{{sha256(Bytes{0xfb}), 0}, 100}};

    for (unsigned a_last = 0; a_last < 2; ++a_last) {
        for (unsigned b_last = 0; b_last < 2; ++b_last) {
            Secret a, b;
            a.bytes.fill(0x31);
            b.bytes.fill(0x32);
            a.bytes[31] = static_cast<std::uint8_t>(0xf0 | a_last);
            b.bytes[31] = static_cast<std::uint8_t>(0x10 | b_last);
            Party expect = winner(a, b);
            c.require(expect == ((a_last ^ b_last) == 0 ? Party::Alice : Party::Bob),
                      "winner() disagrees with the parity truth table");

            Transaction bet = build_bet_transaction(params, funding, commit(a), commit(b));
            for (Party signer : {Party::Alice, Party::Bob}) {
                std::map<std::string, Bytes> preimages{
                    {"A", Bytes(a.bytes.begin(), a.bytes.end())},
                    {"B", Bytes(b.bytes.begin(), b.bytes.end())}};
                Transaction redeem = build_redeem_transaction(
                    bet, 0, preimages, signer == Party::Alice ? sk_a : sk_b,
                    signer == Party::Alice ? params.pk_alice : params.pk_bob);
                bool ok = eval_script(*bet.outputs[0].script, redeem.inputs[0].witness,
                                      txid(redeem), registry);
                c.require(ok == (signer == expect),
                          "bet output redeemable by " + std::string(to_string(signer)) +
                              " but winner is " + to_string(expect));
            }
        }
    }
}

// --- criterion 2: honest-path economics -------------------------------------

void criterion2(Check& c) {
    const std::uint64_t n = 10000;
    std::uint64_t alice_wins = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        SessionConfig config = honest_config(1 + i);
        SessionTrace trace = run_session(config);
        g_ledger_violation_tally += trace.ledger_violations.size();
        ++g_sessions_audited;
        Party w = winner(trace.a_secret, trace.b_secret);
        std::int64_t stake = 50;
        std::int64_t expected_alice = w == Party::Alice ? stake : -stake;
        if (trace.alice_net + trace.bob_net != 0) {
            c.require(false, "seed " + std::to_string(config.rng_seed) + ": not zero-sum");
            return;
        }
        if (trace.alice_net != expected_alice || trace.reason != "completed") {
            c.require(false, "seed " + std::to_string(config.rng_seed) +
                                 ": winner did not net +X (alice_net=" +
                                 std::to_string(trace.alice_net) + ", reason=" + trace.reason + ")");
            return;
        }
        if (!audit_trace(trace, config).empty()) {
            c.require(false, "seed " + std::to_string(config.rng_seed) + ": audit violations");
            return;
        }
        if (w == Party::Alice) ++alice_wins;
    }
    double freq = static_cast<double>(alice_wins) / static_cast<double>(n);
    c.require(freq >= 0.485 && freq <= 0.515,
              "alice win frequency " + std::to_string(freq) + " outside [0.485, 0.515]");

    if (!g_cli_path.empty()) {
        CliResult mc = run_cli_process("montecarlo -n 10000 --seed 1");
        c.require(mc.exit_code == 0, "CLI montecarlo exited " + std::to_string(mc.exit_code));
        c.require(mc.output.find("violations=0") != std::string::npos,
                  "CLI montecarlo reported violations");
        auto pos = mc.output.find("alice_freq=");
        double cli_freq = pos == std::string::npos
                              ? -1.0
                              : std::stod(mc.output.substr(pos + 11));
        c.require(cli_freq >= 0.485 && cli_freq <= 0.515,
                  "CLI alice_freq " + std::to_string(cli_freq) + " outside [0.485, 0.515]");
    }
}

// --- criterion 3: extortion-freeness ----------------------------------------

void criterion3(Check& c) {
    std::vector<StrategySpec> adversaries = enumerate_adversaries();
    c.require(adversaries.size() == 15,
              "adversary catalog has " + std::to_string(adversaries.size()) + " entries, not 15");

    std::vector<std::pair<StrategySpec, StrategySpec>> pairs;
    pairs.push_back({{StrategyKind::Honest, 0}, {StrategyKind::Honest, 0}});
    for (const StrategySpec& adv : adversaries) {
        pairs.push_back({adv, {StrategyKind::Honest, 0}});
        pairs.push_back({{StrategyKind::Honest, 0}, adv});
    }

    for (const auto& [alice, bob] : pairs) {
        for (std::uint64_t seed : {1ull, 3ull}) {  // Alice wins the toss at 1, Bob at 3
            SessionConfig config;
            config.strategy_alice = alice;
            config.strategy_bob = bob;
            config.rng_seed = seed;
            config.params.confirmation_depth = 2;  // >= reorg budget
            config.reorg_budget = 2;
            SessionTrace trace = run_session(config);
            g_ledger_violation_tally += trace.ledger_violations.size();
            ++g_sessions_audited;
            std::string label = alice.name() + "/" + bob.name() + " seed " + std::to_string(seed);
            c.require(trace.end_height < config.effective_max_height(),
                      label + ": did not terminate before max_height");
            std::vector<Violation> violations = audit_trace(trace, config);
            for (const Violation& v : violations)
                c.require(false, label + ": " + to_string(v));
        }
    }
}

// --- criterion 4: soundness contrapositive via the attack subcommand --------

void criterion4(Check& c) {
    if (g_cli_path.empty()) {
        c.require(false, "no --cli path given");
        return;
    }
    CliResult sound = run_cli_process("attack --name refund-then-reveal --seed 1");
    c.require(sound.exit_code == 0,
              "sound attack run exited " + std::to_string(sound.exit_code));
    c.require(sound.output.find("violations=0") != std::string::npos,
              "sound attack run reported violations");
    c.require(sound.output.find("reject:InputMissing") != std::string::npos,
              "late reveal redemption was not rejected in the sound run");

    CliResult unsound = run_cli_process(
        "attack --name refund-then-reveal --unsound --reveal-locktime 25 --bet-locktime 20 "
        "--seed 1");
    c.require(unsound.exit_code == 0,
              "unsound attack run exited " + std::to_string(unsound.exit_code));
    c.require(unsound.output.find("VIOLATION honest-loss") != std::string::npos,
              "unsound locktimes did not produce the honest-loss violation");
    c.require(unsound.output.find("alice_net=-50") != std::string::npos,
              "honest Alice did not lose her stake in the unsound run");
    c.require(unsound.output.find("LEDGER-VIOLATION") == std::string::npos,
              "ledger audit violation in the unsound run");
    // Seed 1 makes Alice the toss winner, so the loss is pure extortion.
    SessionTrace probe = run_session(honest_config(1));
    c.require(winner(probe.a_secret, probe.b_secret) == Party::Alice,
              "seed 1 no longer has Alice winning the toss");
}

// --- criterion 5: 0-confirmation risk ----------------------------------------

void criterion5(Check& c) {
    SessionConfig config;
    config.strategy_alice = {StrategyKind::ReorgDoubleSpend, 1};
    config.strategy_bob = {StrategyKind::Honest, 0};
    config.rng_seed = 1;  // Alice wins the parity toss and can steal the pot
    config.params.confirmation_depth = 0;
    config.reorg_budget = 1;
    SessionTrace risky = run_session(config);
    g_ledger_violation_tally += risky.ledger_violations.size();
    ++g_sessions_audited;
    bool honest_loss = false;
    for (const Violation& v : audit_trace(risky, config))
        if (v.cls == "honest-loss") honest_loss = true;
    c.require(honest_loss, "confirmation_depth 0 with a depth-1 reorg produced no class-b violation");
    c.require(risky.bob_net < -50, "honest Bob was not pushed below his stake floor");

    config.params.confirmation_depth = 2;
    SessionTrace safe = run_session(config);
    g_ledger_violation_tally += safe.ledger_violations.size();
    ++g_sessions_audited;
    c.require(audit_trace(safe, config).empty(),
              "confirmation_depth 2 with reorg budget 1 still produced violations");
    c.require(safe.reason == "completed", "safe configuration did not complete the toss");
}

// --- criterion 6: biased coin -------------------------------------------------

void criterion6(Check& c) {
    const std::uint64_t n = 10000;
    const std::uint32_t k = 2, t = 1;
    BiasSpec bias = make_bias(50, k, t);
    c.require(bias.alice_stake * (4 - t) == bias.bob_stake * t,
              "stake split does not match T/(2^k - T) exactly");

    std::uint64_t alice_wins = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        SessionConfig config = honest_config(20000 + i);
        config.params.bias = bias;
        SessionTrace trace = run_session(config);
        g_ledger_violation_tally += trace.ledger_violations.size();
        ++g_sessions_audited;
        Party w = biased_winner(trace.a_secret, trace.b_secret, k, t);
        std::int64_t expected_alice = w == Party::Alice
                                          ? static_cast<std::int64_t>(bias.bob_stake)
                                          : -static_cast<std::int64_t>(bias.alice_stake);
        if (trace.alice_net + trace.bob_net != 0 || trace.alice_net != expected_alice ||
            trace.reason != "completed" || !audit_trace(trace, config).empty()) {
            c.require(false, "seed " + std::to_string(config.rng_seed) +
                                 ": biased payout mismatch (alice_net=" +
                                 std::to_string(trace.alice_net) + ", reason=" + trace.reason + ")");
            return;
        }
        if (w == Party::Alice) ++alice_wins;
    }
    double freq = static_cast<double>(alice_wins) / static_cast<double>(n);
    c.require(freq >= 0.237 && freq <= 0.263,
              "alice win frequency " + std::to_string(freq) + " outside [0.237, 0.263]");
}

// --- criterion 7: ledger integrity across criteria 2-6 ------------------------

void criterion7(Check& c) {
    c.require(g_sessions_audited > 20000, "earlier criteria did not run their sessions");
    c.require(g_ledger_violation_tally == 0,
              std::to_string(g_ledger_violation_tally) +
                  " ledger audit violations across criteria 2-6");
}

// --- criterion 8: determinism --------------------------------------------------

void criterion8(Check& c) {
    SessionConfig config = honest_config(1);
    c.require(run_session(config).to_text() == run_session(config).to_text(),
              "honest trace differs between identical runs");

    SessionConfig attack = config;
    attack.strategy_alice = {StrategyKind::ReorgDoubleSpend, 1};
    attack.params.confirmation_depth = 0;
    attack.reorg_budget = 1;
    c.require(run_session(attack).to_text() == run_session(attack).to_text(),
              "attack trace differs between identical runs");

    Statistics s1 = monte_carlo(honest_config(1), 10000);
    Statistics s2 = monte_carlo(honest_config(1), 10000);
    c.require(s1.to_text() == s2.to_text(), "monte carlo statistics differ between identical runs");

    if (!g_cli_path.empty()) {
        CliResult r1 = run_cli_process("run --seed 17");
        CliResult r2 = run_cli_process("run --seed 17");
        c.require(r1.exit_code == 0 && r1.output == r2.output,
                  "CLI run output differs between identical invocations");
    }
}

struct Criterion {
    std::string id;
    std::string label;
    double budget_seconds;
    std::function<void(Check&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
    }

    std::vector<Criterion> criteria{
        {"C1", "script/winner equivalence over all parity classes", 1.0, criterion1},
        {"C2", "honest-path economics over 10000 sessions", 30.0, criterion2},
        {"C3", "extortion-freeness for all enumerated adversaries", 10.0, criterion3},
        {"C4", "soundness contrapositive via the attack subcommand", 30.0, criterion4},
        {"C5", "0-confirmation risk and confirmation-depth defense", 1.0, criterion5},
        {"C6", "biased coin frequency and exact stake ratio", 30.0, criterion6},
        {"C7", "ledger integrity across all criterion sessions", 1.0, criterion7},
        {"C8", "byte-identical reruns", 60.0, criterion8},
    };

    int failures = 0;
    for (const Criterion& crit : criteria) {
        Check check;
        auto start = std::chrono::steady_clock::now();
        try {
            crit.fn(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.require(elapsed < crit.budget_seconds,
                      "runtime " + std::to_string(elapsed) + "s exceeds " +
                          std::to_string(crit.budget_seconds) + "s");
        char timing[32];
        std::snprintf(timing, sizeof(timing), "%.2fs", elapsed);
        if (check.failures.empty()) {
            std::cout << "PASS " << crit.id << " " << crit.label << " (" << timing << ")\n";
        } else {
            ++failures;
            std::cout << "FAIL " << crit.id << " " << crit.label << " (" << timing << ")\n";
            for (const std::string& f : check.failures) std::cout << "     - " << f << "\n";
        }
    }
    if (failures) std::cout << failures << " criterion(s) failed\n";
    return failures == 0 ? 0 : 1;
}
