#include "stv/lower_bounds.hpp"

#include "stv/tabulation.hpp"

#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace stv;
using namespace fixtures;

namespace {
std::int64_t eq_ceil(const Election& e, const Order& pi, bool legacy) {
    BoundOptions opts;
    opts.legacy_tallies = legacy;
    return ceil_ballots(elim_quota_lb(e, pi, opts).value());
}
}  // namespace

TEST_CASE("legacy elimination and quota bounds") {
    Election e = sample_election();

    SECTION("elimination bound after seating C") {
        LegacyBounds lb = legacy_tally_bounds(e, order({{C, 1}, {A, 0}}));
        CHECK(elim_lb(e, order({{C, 1}, {A, 0}}), lb) == VoteValue(65));
    }

    SECTION("no eliminations means elimination bound zero") {
        LegacyBounds lb = legacy_tally_bounds(e, order({{C, 1}, {B, 1}}));
        CHECK(elim_lb(e, order({{C, 1}, {B, 1}}), lb) == VoteValue(0));
    }

    SECTION("quota bound for B seated second") {
        LegacyBounds lb = legacy_tally_bounds(e, order({{C, 1}, {B, 1}}));
        CHECK(quota_lb(e, order({{C, 1}, {B, 1}}), lb) == VoteValue(188));
    }

    SECTION("a quota-holding seat costs nothing") {
        LegacyBounds lb = legacy_tally_bounds(e, order({{C, 1}}));
        CHECK(quota_lb(e, order({{C, 1}}), lb) == VoteValue(0));
    }

    SECTION("the eight children of the reported first seating") {
        std::vector<std::pair<Order, std::int64_t>> expected = {
            {order({{C, 1}, {A, 0}}), 65}, {order({{C, 1}, {A, 1}}), 58},
            {order({{C, 1}, {B, 0}}), 0},  {order({{C, 1}, {B, 1}}), 188},
            {order({{C, 1}, {D, 0}}), 0},  {order({{C, 1}, {D, 1}}), 0},
            {order({{C, 1}, {E, 0}}), 115}, {order({{C, 1}, {E, 1}}), 0}};
        for (const auto& [pi, want] : expected) {
            INFO("prefix length-2 child, want " << want);
            CHECK(eq_ceil(e, pi, /*legacy=*/true) == want);
        }
    }
}

TEST_CASE("transfer-path tallies tighten the elimination-quota bound") {
    Election e = sample_election();
    CHECK(eq_ceil(e, order({{C, 1}, {D, 0}}), true) == 0);
    CHECK(eq_ceil(e, order({{C, 1}, {D, 0}}), false) == 20);
    CHECK(eq_ceil(e, order({{C, 1}, {D, 1}}), true) == 0);
    CHECK(eq_ceil(e, order({{C, 1}, {D, 1}}), false) == 150);
    CHECK(eq_ceil(e, order({{C, 1}, {E, 0}}), true) == 115);
    CHECK(eq_ceil(e, order({{C, 1}, {E, 0}}), false) == 137);
}

TEST_CASE("displacement lower bound") {
    Election e = sample_election();

    SECTION("published example values") {
        CHECK(ceil_ballots(displacement_lb(e, order({{C, 1}, {A, 1}}))) == 118);
        CHECK(ceil_ballots(displacement_lb(e, order({{C, 1}, {B, 0}}))) == 84);
        CHECK(ceil_ballots(displacement_lb(e, order({{C, 1}, {D, 0}}))) == 65);
        CHECK(ceil_ballots(displacement_lb(e, order({{C, 1}, {E, 1}}))) == 24);
    }

    SECTION("zero once the prefix already changes the outcome") {
        CHECK(displacement_lb(e, order({{C, 1}, {D, 1}})) == VoteValue(0));  // loser seated
        CHECK(displacement_lb(e, order({{C, 1}, {E, 0}})) == VoteValue(0));  // winner out
    }

    SECTION("zero when the rest auto-seat") {
        BallotProfile p;
        p.add({0}, 4);
        p.add({1}, 3);
        p.add({2}, 2);
        Election tiny = make_election(3, 2, std::move(p));
        tiny.reported_winners = {0, 1};
        CHECK(displacement_lb(tiny, order({{2, 0}})) == VoteValue(0));
    }

    SECTION("depends on the prefix only through its projections and tables") {
        // Two permutations of the same event set with identical pile structure
        // give identical displacement bounds.
        Order a = order({{B, 0}, {D, 0}});
        Order b = order({{D, 0}, {B, 0}});
        CHECK(displacement_lb(e, a) == displacement_lb(e, b));
    }
}

TEST_CASE("combined heuristic") {
    Election e = sample_election();

    SECTION("quota component dominates the reported second seat of B") {
        HeuristicBound h = combined_heuristic_lb(e, order({{C, 1}, {B, 1}}), VoteValue(0));
        CHECK(h.quota == VoteValue(188));
        CHECK(h.disp == VoteValue(0));
        CHECK(h.ceil_value() == 188);
    }

    SECTION("all components zero") {
        HeuristicBound h = combined_heuristic_lb(e, order({{C, 1}}), VoteValue(0));
        CHECK(h.elim == VoteValue(0));
        CHECK(h.quota == VoteValue(0));
        CHECK(h.value() == h.disp);  // only the displacement part can be non-zero
    }

    SECTION("parent bound carries through") {
        HeuristicBound h = combined_heuristic_lb(e, order({{C, 1}, {E, 1}}), VoteValue(50));
        CHECK(h.value() == VoteValue(50));  // components are 0/0/24
        CHECK(h.disp == VoteValue(24));
    }

    SECTION("the full expansion row with every feature enabled") {
        std::vector<std::pair<Order, std::int64_t>> expected = {
            {order({{C, 1}, {A, 0}}), 65},  {order({{C, 1}, {A, 1}}), 118},
            {order({{C, 1}, {B, 0}}), 84},  {order({{C, 1}, {B, 1}}), 188},
            {order({{C, 1}, {D, 0}}), 65},  {order({{C, 1}, {D, 1}}), 150},
            {order({{C, 1}, {E, 0}}), 137}, {order({{C, 1}, {E, 1}}), 24}};
        for (const auto& [pi, want] : expected) {
            HeuristicBound h = combined_heuristic_lb(e, pi, VoteValue(0));
            INFO("child ending with candidate " << pi.back().candidate);
            CHECK(h.ceil_value() == want);
        }
    }

    SECTION("monotone in the parent bound") {
        HeuristicBound parent = combined_heuristic_lb(e, order({{C, 1}}), VoteValue(0));
        HeuristicBound child =
            combined_heuristic_lb(e, order({{C, 1}, {B, 0}}), parent.value());
        CHECK(child.value() >= parent.value());
    }
}

TEST_CASE("new tallies never weaken the elimination-quota bound") {
    Election e = sample_election();
    std::vector<Order> prefixes = {
        order({{C, 1}, {A, 0}}), order({{C, 1}, {B, 0}}), order({{C, 1}, {D, 0}}),
        order({{C, 1}, {D, 1}}), order({{C, 1}, {E, 0}}), order({{A, 1}, {C, 1}}),
        order({{E, 1}, {B, 0}, {C, 1}})};
    for (const auto& pi : prefixes) CHECK(eq_ceil(e, pi, false) >= eq_ceil(e, pi, true));
}
