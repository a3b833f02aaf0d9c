#include "stv/tabulation.hpp"

#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace stv;
using namespace fixtures;

TEST_CASE("sample contest, exact arithmetic") {
    Election e = sample_election();
    TabulationResult tab = tabulate(e);

    CHECK(tab.order == order({{C, 1}, {E, 1}, {B, 0}, {A, 1}}));
    CHECK(tab.winners == std::set<CandidateId>{A, C, E});

    const auto& r1 = tab.rounds[0];
    CHECK(r1.tallies.at(A) == VoteValue(250));
    CHECK(r1.tallies.at(B) == VoteValue(120));
    CHECK(r1.tallies.at(C) == VoteValue(510));
    CHECK(r1.tallies.at(D) == VoteValue(0));
    CHECK(r1.tallies.at(E) == VoteValue(350));

    CHECK(r1.transfer_value == VoteValue(202, 510));
    CHECK(tab.rounds[1].tallies.at(D) == VoteValue(202));
    // E's surplus is recorded even though every ballot in the pile exhausts.
    CHECK(tab.rounds[1].transfer_value == VoteValue(42, 350));
    CHECK(tab.rounds[2].action == RoundAction::Eliminated);
    CHECK(tab.rounds[2].candidates.front() == B);
    CHECK(tab.rounds[3].tallies.at(A) == VoteValue(370));
}

TEST_CASE("sample contest, three-decimal transfer rounding") {
    Election e = sample_election();
    TabulationOptions opts;
    opts.rounding.transfer_decimals = 3;
    TabulationResult tab = tabulate(e, opts);

    CHECK(tab.order == order({{C, 1}, {E, 1}, {B, 0}, {A, 1}}));
    CHECK(*tab.rounds[0].transfer_value == VoteValue(396, 1000));
    CHECK(tab.rounds[1].tallies.at(D) == VoteValue(20196, 100));  // 201.96
    CHECK(decimal_string(tab.rounds[1].tallies.at(D), 2) == "201.96");
}

TEST_CASE("two candidates, first preference majority") {
    BallotProfile p;
    p.add({0}, 3);
    p.add({1}, 1);
    Election e = make_election(2, 1, std::move(p));
    CHECK(e.quota == VoteValue(3));
    TabulationResult tab = tabulate(e);
    CHECK(tab.order == order({{0, 1}}));
    CHECK(tab.rounds.size() == 1);
}

TEST_CASE("auto-seating when seats equal remaining candidates") {
    BallotProfile p;
    p.add({0}, 4);
    p.add({1}, 3);
    p.add({2}, 2);
    p.add({3}, 1);
    Election e = make_election(4, 3, std::move(p));  // quota 3
    TabulationResult tab = tabulate(e);
    // 3 is eliminated, then 0 seats with a quota, leaving 2 seats for {1, 2}.
    REQUIRE(tab.order.size() >= 2);
    CHECK(tab.winners == std::set<CandidateId>{0, 1, 2});
    CHECK(tab.rounds.back().action == RoundAction::AutoSeatedAll);
}

TEST_CASE("exact quota exhausts the seated pile at value zero") {
    BallotProfile p;
    p.add({0, 1}, 4);
    p.add({1}, 3);
    p.add({2}, 1);
    Election e = make_election(3, 1, std::move(p));  // total 8, quota 5
    // Nobody reaches 5; 2 is eliminated and exhausts; then 0 vs 1...
    TabulationResult tab = tabulate(e);
    CHECK(tab.winners.size() == 1);
}

TEST_CASE("eligibility snapshot: quota holders do not receive transfers") {
    Election e = sample_election();
    TabulationResult tab = tabulate(e);
    // E holds a quota at the start of round 1, so the [C, E, D] ballots skip
    // E and land with D: D's round-2 tally covers all 510 transferred ballots.
    CHECK(tab.rounds[1].tallies.at(D) == VoteValue(202));
    CHECK(tab.rounds[1].tallies.at(E) == VoteValue(350));
}

TEST_CASE("conservation in exact mode") {
    Election e = sample_election();
    TabulationResult tab = tabulate(e);
    for (const auto& rec : tab.rounds) {
        VoteValue sum = rec.exhausted + rec.retained;
        for (const auto& [c, t] : rec.tallies) sum += t;
        CHECK(sum == VoteValue(e.profile.total()));
    }
}

TEST_CASE("determinism") {
    Election e = sample_election();
    TabulationResult a = tabulate(e);
    TabulationResult b = tabulate(e);
    CHECK(a.order == b.order);
    CHECK(a.winners == b.winners);
    CHECK(a.exhausted_total == b.exhausted_total);
}

TEST_CASE("verify manipulation") {
    Election e = sample_election();

    SECTION("identity manipulation") {
        auto out = verify_manipulation(e, e.profile);
        CHECK(out.distance == 0);
        CHECK_FALSE(out.winners_changed);
        CHECK(out.new_winners == e.reported_winners);
    }

    SECTION("sixty-five ballots flip the outcome") {
        // Shift 65 [A] ballots to B so B overtakes A at the elimination.
        BallotProfile p = e.profile;
        p.remove({A}, 65);
        p.add({B}, 65);
        auto out = verify_manipulation(e, p);
        CHECK(out.distance == 65);
        CHECK(out.winners_changed);
    }

    SECTION("one ballot in a landslide does nothing") {
        BallotProfile p;
        p.add({0}, 9);
        p.add({1}, 1);
        Election small = make_election(2, 1, std::move(p));
        small.reported_winners = tabulate(small).winners;
        BallotProfile q = small.profile;
        q.remove({0}, 1);
        q.add({1, 0}, 1);
        auto out = verify_manipulation(small, q);
        CHECK(out.distance == 1);
        CHECK_FALSE(out.winners_changed);
    }

    SECTION("unequal totals rejected") {
        BallotProfile p;
        p.add({0}, 1);
        CHECK_THROWS_AS(verify_manipulation(e, p), std::invalid_argument);
    }
}
