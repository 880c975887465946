// Copyright (c) 2026 The cointoss-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <fstream>
#include <random>

#include "doctest.h"

#include "cointoss/errors.hpp"
#include "cointoss/protocol.hpp"

using namespace cointoss;

namespace {

Secret secret_with_last(std::uint8_t fill, std::uint8_t last) {
    Secret s;
    s.bytes.fill(fill);
    s.bytes[31] = last;
    return s;
}

Secret secret_with_tail(std::uint8_t b30, std::uint8_t b31) {
    Secret s;
    s.bytes.fill(0x55);
    s.bytes[30] = b30;
    s.bytes[31] = b31;
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

struct ProtoFixture {
    KeyRegistry registry;
    SecretKey sk_a{}, sk_b{};
    BetParams params;
    Secret a1, b1;

    ProtoFixture() {
        sk_a.fill(0x0a);
        sk_b.fill(0x0b);
        params.pk_alice = registry.register_secret(sk_a);
        params.pk_bob = registry.register_secret(sk_b);
        a1.bytes.fill(0x01);
        b1.bytes.fill(0x02);
    }

    std::vector<FundingSource> funding(std::uint64_t value) const {
        return {FundingSource{{sha256(Bytes{0xfa}), 0}, value}};
    }
};

}  // namespace

TEST_CASE("commit is SHA256 of the secret") {
    Secret zero;
    CHECK(commit(zero).hex() == "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925");
    Secret one;
    one.bytes.fill(0x01);
    CHECK(commit(one) != commit(zero));
    CHECK(commit(one) == commit(one));
}

TEST_CASE("winner follows the parity XOR rule") {
    CHECK(winner(secret_with_last(0, 0x00), secret_with_last(0, 0x00)) == Party::Alice);
    CHECK(winner(secret_with_last(0, 0x01), secret_with_last(0, 0x00)) == Party::Bob);
    CHECK(winner(secret_with_last(0, 0x00), secret_with_last(0, 0x01)) == Party::Bob);
    CHECK(winner(secret_with_last(0, 0x03), secret_with_last(0, 0x05)) == Party::Alice);
}

TEST_CASE("biased_winner windows the low bits of the tail XOR") {
    // Tail bytes chosen so v = (last-two-bytes XOR) & mask is explicit.
    Secret a = secret_with_tail(0x00, 0x02);
    Secret b = secret_with_tail(0x00, 0x00);
    // v = 2 under k=2: Alice needs threshold > 2.
    CHECK(biased_winner(a, b, 2, 3) == Party::Alice);
    CHECK(biased_winner(a, b, 2, 2) == Party::Bob);
    // k=1 masks v down to 0.
    CHECK(biased_winner(a, b, 1, 1) == Party::Alice);

    // Bit 8 (from byte 30) only matters for k > 8.
    Secret c = secret_with_tail(0x01, 0x00);
    CHECK(biased_winner(c, b, 8, 1) == Party::Alice);   // low 8 bits are zero
    CHECK(biased_winner(c, b, 9, 256) == Party::Bob);   // v = 256
    CHECK(biased_winner(c, b, 9, 257) == Party::Alice);
}

TEST_CASE("biased_winner edge thresholds and domain errors") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        Secret a, b;
        for (auto& x : a.bytes) x = static_cast<std::uint8_t>(rng());
        for (auto& x : b.bytes) x = static_cast<std::uint8_t>(rng());
        CHECK(biased_winner(a, b, 2, 0) == Party::Bob);    // v < 0 impossible
        CHECK(biased_winner(a, b, 2, 4) == Party::Alice);  // v < 4 always
        CHECK(biased_winner(a, b, 1, 1) == winner(a, b));  // k=1 is the fair rule
    }
    Secret s;
    CHECK_THROWS_AS(biased_winner(s, s, 0, 0), DomainError);
    CHECK_THROWS_AS(biased_winner(s, s, 17, 0), DomainError);
    CHECK_THROWS_AS(biased_winner(s, s, 2, 5), DomainError);
}

TEST_CASE("make_bias floors Alice's share of the pot") {
    BiasSpec bias = make_bias(50, 2, 1);
    CHECK(bias.alice_stake == 25);
    CHECK(bias.bob_stake == 75);
    // Exact ratio check: alice * (2^k - T) == bob * T.
    CHECK(bias.alice_stake * 3 == bias.bob_stake * 1);

    BiasSpec floored = make_bias(50, 3, 3);  // 100 * 3/8 = 37.5 -> 37
    CHECK(floored.alice_stake == 37);
    CHECK(floored.bob_stake == 63);

    CHECK_THROWS_AS(make_bias(1, 2, 0), DomainError);   // Alice share 0
    CHECK_THROWS_AS(make_bias(1, 2, 4), DomainError);   // Bob share 0
    CHECK_THROWS_AS(make_bias(50, 17, 1), DomainError);
}

TEST_CASE("params validation enforces the soundness inequality") {
    ProtoFixture f;
    BetParams p = f.params;
    p.reveal_locktime = 25;
    p.bet_locktime = 20;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.unsound_mode = true;
    CHECK_NOTHROW(p.validate());
    p = f.params;
    p.reveal_locktime = 20;  // equality is also unsound
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("bet transaction matches the golden script encoding") {
    ProtoFixture f;
    Transaction bet =
        build_bet_transaction(f.params, f.funding(100), commit(f.a1), commit(f.b1));
    REQUIRE(bet.outputs.size() == 1);
    CHECK(bet.outputs[0].value == 100);  // 2X for X=50
    CHECK(bet.locktime == 0);
    std::string golden = read_file(std::string(COINTOSS_GOLDEN_DIR) + "/bet_script.txt");
    CHECK(encode_script(*bet.outputs[0].script) + "\n" == golden);

    CHECK_THROWS_AS(build_bet_transaction(f.params, f.funding(99), commit(f.a1), commit(f.b1)),
                    FundingMismatch);
}

TEST_CASE("reveal transaction matches the golden script encoding") {
    ProtoFixture f;
    Transaction reveal = build_reveal_transaction(f.params, f.funding(50), commit(f.b1));
    REQUIRE(reveal.outputs.size() == 1);
    CHECK(reveal.outputs[0].value == 50);
    std::string golden = read_file(std::string(COINTOSS_GOLDEN_DIR) + "/reveal_script.txt");
    CHECK(encode_script(*reveal.outputs[0].script) + "\n" == golden);

    CHECK_THROWS_AS(build_reveal_transaction(f.params, f.funding(100), commit(f.b1)),
                    FundingMismatch);
}

TEST_CASE("reveal output is redeemable by Bob with his preimage, not by Alice") {
    ProtoFixture f;
    Transaction reveal = build_reveal_transaction(f.params, f.funding(50), commit(f.b1));
    Digest spend_id = sha256(Bytes{0x51});

    Witness bob;
    bob.slots["B"] = Bytes(f.b1.bytes.begin(), f.b1.bytes.end());
    bob.signatures.push_back(sign(f.sk_b, spend_id));
    CHECK(eval_script(*reveal.outputs[0].script, bob, spend_id, f.registry));

    Witness alice;
    alice.signatures.push_back(sign(f.sk_a, spend_id));
    CHECK_FALSE(eval_script(*reveal.outputs[0].script, alice, spend_id, f.registry));
}

TEST_CASE("refund transaction: locktime arithmetic and value preservation") {
    ProtoFixture f;
    Transaction bet =
        build_bet_transaction(f.params, f.funding(100), commit(f.a1), commit(f.b1));

    Transaction refund_bet = build_refund_transaction(bet, 0, 20, 3, f.params.pk_bob);
    CHECK(refund_bet.locktime == 23);
    CHECK(refund_bet.outputs[0].value == bet.outputs[0].value);
    CHECK(refund_bet.inputs[0].prev.txid == txid(bet));
    CHECK(refund_bet.inputs[0].witness.signatures.empty());  // signed via message exchange
    CHECK(is_pay_to_pubkey(*refund_bet.outputs[0].script, f.params.pk_bob));

    Transaction refund_reveal = build_refund_transaction(bet, 0, 10, 7, f.params.pk_alice);
    CHECK(refund_reveal.locktime == 17);

    CHECK_THROWS_AS(build_refund_transaction(bet, 1, 20, 3, f.params.pk_bob), BadIndex);
}

TEST_CASE("bet output pays exactly the parity winner across all parity classes") {
    ProtoFixture f;
    KeyRegistry& reg = f.registry;
    // Independent truth table: (parity A, parity B) -> winning signer.
    const struct {
        std::uint8_t a_last, b_last;
        Party expect;
    } cases[] = {
        {0x00, 0x00, Party::Alice},
        {0x00, 0x01, Party::Bob},
        {0x01, 0x00, Party::Bob},
        {0x01, 0x01, Party::Alice},
    };
    for (const auto& c : cases) {
        Secret a = secret_with_last(0x11, c.a_last);
        Secret b = secret_with_last(0x22, c.b_last);
        CHECK(winner(a, b) == c.expect);
        Transaction bet = build_bet_transaction(f.params, f.funding(100), commit(a), commit(b));
        Digest spend_id = sha256(Bytes{0x99});
        for (Party signer : {Party::Alice, Party::Bob}) {
            Witness w;
            w.slots["A"] = Bytes(a.bytes.begin(), a.bytes.end());
            w.slots["B"] = Bytes(b.bytes.begin(), b.bytes.end());
            w.signatures.push_back(sign(signer == Party::Alice ? f.sk_a : f.sk_b, spend_id));
            bool ok = eval_script(*bet.outputs[0].script, w, spend_id, reg);
            CHECK(ok == (signer == c.expect));
        }
    }
}

TEST_CASE("redeem transaction spends the bet for the winner") {
    ProtoFixture f;
    Secret a = secret_with_last(0x11, 0x00);
    Secret b = secret_with_last(0x22, 0x00);  // Alice wins
    Transaction bet = build_bet_transaction(f.params, f.funding(100), commit(a), commit(b));
    std::map<std::string, Bytes> preimages{{"A", Bytes(a.bytes.begin(), a.bytes.end())},
                                           {"B", Bytes(b.bytes.begin(), b.bytes.end())}};
    Transaction redeem = build_redeem_transaction(bet, 0, preimages, f.sk_a, f.params.pk_alice);
    CHECK(redeem.outputs[0].value == 100);
    CHECK(eval_script(*bet.outputs[0].script, redeem.inputs[0].witness, txid(redeem), f.registry));

    Transaction wrong = build_redeem_transaction(bet, 0, preimages, f.sk_b, f.params.pk_bob);
    CHECK_FALSE(eval_script(*bet.outputs[0].script, wrong.inputs[0].witness, txid(wrong), f.registry));

    CHECK_THROWS_AS(build_redeem_transaction(bet, 7, preimages, f.sk_a, f.params.pk_alice),
                    BadIndex);
}

TEST_CASE("find_revealed_secret recovers a preimage from chain witnesses") {
    ProtoFixture f;
    LedgerState chain(f.registry, 3);
    Transaction faucet;
    faucet.outputs.push_back(Output{50, script_sig(f.params.pk_alice)});
    chain.submit_transaction(faucet);
    chain.advance_blocks(1);

    Transaction reveal =
        build_reveal_transaction(f.params, {FundingSource{{txid(faucet), 0}, 50}}, commit(f.b1));
    attach_signature(reveal, sign(f.sk_a, txid(reveal)));
    REQUIRE(chain.submit_transaction(reveal).accepted);
    chain.advance_blocks(1);

    CHECK_FALSE(find_revealed_secret(chain, commit(f.b1)).has_value());

    std::map<std::string, Bytes> preimages{{"B", Bytes(f.b1.bytes.begin(), f.b1.bytes.end())}};
    Transaction redeem = build_redeem_transaction(reveal, 0, preimages, f.sk_b, f.params.pk_bob);
    REQUIRE(chain.submit_transaction(redeem).accepted);
    CHECK(find_revealed_secret(chain, commit(f.b1)) == f.b1);  // visible from the mempool
    chain.advance_blocks(1);
    CHECK(find_revealed_secret(chain, commit(f.b1)) == f.b1);  // and once confirmed
    CHECK_FALSE(find_revealed_secret(chain, commit(f.a1)).has_value());
}

TEST_CASE("step_party transitions") {
    ProtoFixture f;
    LedgerState ledger(f.registry, 3);

    SUBCASE("Alice Init -> CommitSent with a commit send") {
        PartyState alice = PartyState::init(Party::Alice, f.sk_a, f.a1, f.funding(50));
        StepResult r = step_party(alice, f.params, Observation{ObsTick{1, &ledger}});
        CHECK(r.state.phase == Phase::CommitSent);
        REQUIRE(r.actions.size() == 1);
        const auto& send = std::get<ActSend>(r.actions[0]);
        CHECK(send.step == 1);
        CHECK(std::get<MsgCommit>(send.msg).commitment == commit(f.a1));
    }

    SUBCASE("Bob broadcasts the bet upon receiving the refund signature") {
        PartyState bob = PartyState::init(Party::Bob, f.sk_b, f.b1, f.funding(100));
        StepResult r1 = step_party(bob, f.params, Observation{ObsMessage{MsgCommit{commit(f.a1)}}});
        CHECK(r1.state.phase == Phase::CommitExchanged);
        StepResult r2 = step_party(r1.state, f.params, Observation{ObsTick{1, &ledger}});
        REQUIRE(r2.actions.size() == 1);
        const auto& req = std::get<ActSend>(r2.actions[0]);
        CHECK(req.step == 4);
        const auto& refund = std::get<MsgRefundSignatureRequest>(req.msg).refund;
        CHECK(refund.locktime == 1 + f.params.bet_locktime);

        SignatureToken alice_sig = sign(f.sk_a, txid(refund));
        StepResult r3 =
            step_party(r2.state, f.params, Observation{ObsMessage{MsgRefundSignature{alice_sig}}});
        CHECK(r3.state.phase == Phase::RefundBetSigned);
        REQUIRE(r3.actions.size() == 1);
        const auto& bc = std::get<ActBroadcast>(r3.actions[0]);
        CHECK(bc.kind == "bet");
        CHECK(bc.step == 5);
        CHECK(txid(bc.tx) == *r3.state.bet_txid);
    }

    SUBCASE("conflicting commitments are a protocol violation") {
        PartyState bob = PartyState::init(Party::Bob, f.sk_b, f.b1, f.funding(100));
        StepResult r1 = step_party(bob, f.params, Observation{ObsMessage{MsgCommit{commit(f.a1)}}});
        Secret other;
        other.bytes.fill(0x77);
        CHECK_THROWS_AS(
            step_party(r1.state, f.params, Observation{ObsMessage{MsgCommit{commit(other)}}}),
            ProtocolViolation);
        // The same commitment again is tolerated.
        CHECK_NOTHROW(
            step_party(r1.state, f.params, Observation{ObsMessage{MsgCommit{commit(f.a1)}}}));
    }

    SUBCASE("state machine is a pure function") {
        PartyState alice = PartyState::init(Party::Alice, f.sk_a, f.a1, f.funding(50));
        Observation obs{ObsTick{1, &ledger}};
        StepResult r1 = step_party(alice, f.params, obs);
        StepResult r2 = step_party(alice, f.params, obs);
        CHECK(r1.state.phase == r2.state.phase);
        CHECK(r1.actions.size() == r2.actions.size());
        const auto& s1 = std::get<ActSend>(r1.actions[0]);
        const auto& s2 = std::get<ActSend>(r2.actions[0]);
        CHECK(std::get<MsgCommit>(s1.msg).commitment == std::get<MsgCommit>(s2.msg).commitment);
    }

    SUBCASE("a losing Alice disbands with a secret disclosure upon seeing the reveal spent") {
        // Bob's parity wins: both tails chosen so parity(A) XOR parity(B) == 1.
        Secret a = f.a1;                      // last byte 0x01, parity 1
        Secret b;
        b.bytes.fill(0x02);                   // parity 0
        LedgerState chain(f.registry, 3);

        Transaction faucet;
        faucet.outputs.push_back(Output{50, script_sig(f.params.pk_alice)});
        faucet.outputs.push_back(Output{100, script_sig(f.params.pk_bob)});
        chain.submit_transaction(faucet);
        chain.advance_blocks(1);

        Transaction reveal = build_reveal_transaction(
            f.params, {FundingSource{{txid(faucet), 0}, 50}}, commit(b));
        attach_signature(reveal, sign(f.sk_a, txid(reveal)));
        REQUIRE(chain.submit_transaction(reveal).accepted);
        chain.advance_blocks(1);
        std::map<std::string, Bytes> preimages{{"B", Bytes(b.bytes.begin(), b.bytes.end())}};
        Transaction redeem = build_redeem_transaction(reveal, 0, preimages, f.sk_b, f.params.pk_bob);
        REQUIRE(chain.submit_transaction(redeem).accepted);
        chain.advance_blocks(1);  // B's preimage is now on-chain

        PartyState alice = PartyState::init(Party::Alice, f.sk_a, a, {});
        alice.phase = Phase::RevealBroadcast;
        alice.their_commit = commit(b);
        alice.reveal_txid = txid(reveal);
        alice.reveal_broadcast_done = true;
        StepResult r = step_party(alice, f.params, Observation{ObsTick{chain.height(), &chain}});
        CHECK(r.state.phase == Phase::Done);
        REQUIRE(r.actions.size() == 1);
        const auto& send = std::get<ActSend>(r.actions[0]);
        CHECK(send.step == 10);
        CHECK(std::get<MsgSecretDisclosure>(send.msg).secret == a);
    }

    SUBCASE("Alice refuses to blind-sign a refund spending her own funding") {
        PartyState alice = PartyState::init(Party::Alice, f.sk_a, f.a1, f.funding(50));
        alice.their_commit = commit(f.b1);
        alice.phase = Phase::CommitExchanged;
        Transaction steal;
        steal.inputs.push_back(TxInput{alice.funding[0].outpoint, {}});
        steal.outputs.push_back(Output{50, script_sig(f.params.pk_bob)});
        StepResult r =
            step_party(alice, f.params, Observation{ObsMessage{MsgRefundSignatureRequest{steal}}});
        CHECK(r.actions.empty());
        CHECK_FALSE(r.state.signed_their_refund);
    }
}
