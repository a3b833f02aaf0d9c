#include "stv/blt.hpp"
#include "stv/election.hpp"

#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace stv;

TEST_CASE("droop quota") {
    CHECK(compute_quota(1230, 3) == VoteValue(308));
    CHECK(compute_quota(0, 1) == VoteValue(1));
    CHECK(compute_quota(10, 3) == VoteValue(3));
    CHECK_THROWS_AS(compute_quota(10, 0), std::invalid_argument);
}

TEST_CASE("quota is the unique threshold integer") {
    for (std::int64_t t = 0; t <= 2000; t += 7) {
        for (int s = 1; s <= 6; ++s) {
            VoteValue q = compute_quota(t, s);
            BigInt qi = numerator(q);
            // q is the smallest integer strictly greater than t/(s+1)
            CHECK(qi * (s + 1) > t);
            CHECK((qi - 1) * (s + 1) <= t);
        }
    }
}

TEST_CASE("manipulation distance") {
    BallotProfile a;
    a.add({0}, 3);
    a.add({1}, 2);

    SECTION("identical profiles") { CHECK(manipulation_distance(a, a) == 0); }

    SECTION("moving five ballots costs five") {
        BallotProfile before, after;
        before.add({0}, 7);
        before.add({3, 0}, 1);
        after.add({0}, 2);
        after.add({3, 0}, 6);
        CHECK(manipulation_distance(before, after) == 5);
    }

    SECTION("positive parts on both sides agree") {
        BallotProfile b;
        b.add({0}, 1);
        b.add({1}, 2);
        b.add({2}, 2);
        CHECK(manipulation_distance(a, b) == 2);
        CHECK(manipulation_distance(b, a) == 2);
    }

    SECTION("unequal totals are rejected") {
        BallotProfile b;
        b.add({0}, 1);
        CHECK_THROWS_AS(manipulation_distance(a, b), std::invalid_argument);
    }
}

TEST_CASE("manipulation distance is a metric on random profiles") {
    std::mt19937_64 rng(20240517);
    auto random_profile = [&](int total) {
        BallotProfile p;
        std::uniform_int_distribution<int> cand(0, 3);
        for (int i = 0; i < total; ++i) {
            Ranking r;
            int len = 1 + static_cast<int>(rng() % 3);
            std::vector<CandidateId> pool{0, 1, 2, 3};
            std::shuffle(pool.begin(), pool.end(), rng);
            r.assign(pool.begin(), pool.begin() + len);
            p.add(r, 1);
        }
        return p;
    };
    for (int trial = 0; trial < 200; ++trial) {
        BallotProfile x = random_profile(12), y = random_profile(12), z = random_profile(12);
        auto dxy = manipulation_distance(x, y);
        auto dyx = manipulation_distance(y, x);
        CHECK(dxy == dyx);
        CHECK((dxy == 0) == (x == y));
        CHECK(manipulation_distance(x, z) <= dxy + manipulation_distance(y, z));
    }
}

TEST_CASE("blt parsing") {
    SECTION("sample contest") {
        std::string text =
            "5 3\n"
            "250 1 0\n"
            "120 2 1 3 0\n"
            "400 3 4 0\n"
            "350 5 0\n"
            "110 3 5 4 0\n"
            "0\n"
            "\"Avon\"\n\"Brae\"\n\"Cole\"\n\"Dunn\"\n\"Esk\"\n"
            "\"Sample ward\"\n";
        Election e = parse_blt(text);
        CHECK(e.num_candidates == 5);
        CHECK(e.seats == 3);
        CHECK(e.profile.total() == 1230);
        CHECK(e.quota == VoteValue(308));
        CHECK(e.profile == fixtures::sample_election().profile);
        CHECK(e.candidate_names[2] == "Cole");
        CHECK(e.title == "Sample ward");
    }

    SECTION("empty ballot section") {
        Election e = parse_blt("3 1\n0\n\"X\"\n\"Y\"\n\"Z\"\n\"t\"\n");
        CHECK(e.profile.total() == 0);
        CHECK(e.quota == VoteValue(1));
    }

    SECTION("weights multiply into counts") {
        Election e = parse_blt("3 1\n2 2 1 0\n0\n");
        CHECK(e.profile.count_of({1, 0}) == 2);
    }

    SECTION("withdrawals remove candidates and re-pack ids") {
        Election e = parse_blt("4 2\n-3\n5 1 3 2 0\n1 3 0\n0\n\"P\"\n\"Q\"\n\"R\"\n\"S\"\n\"t\"\n");
        CHECK(e.num_candidates == 3);
        CHECK(e.profile.total() == 5);          // the all-withdrawn ballot is dropped
        CHECK(e.profile.count_of({0, 1}) == 5);  // P, Q after re-packing
        CHECK(e.candidate_names == std::vector<std::string>{"P", "Q", "S"});
    }

    SECTION("errors carry line numbers") {
        CHECK_THROWS_AS(parse_blt("banana\n"), BltError);
        CHECK_THROWS_AS(parse_blt("3 1\n2 9 0\n0\n"), BltError);   // pref out of range
        CHECK_THROWS_AS(parse_blt("3 1\n2 1 2\n0\n"), BltError);   // missing terminator
        CHECK_THROWS_AS(parse_blt("3 1\n1 1 0\n"), BltError);      // missing section terminator
        try {
            parse_blt("3 1\n2 9 0\n0\n");
        } catch (const BltError& err) {
            CHECK(err.line() == 2);
        }
    }

    SECTION("comments and CRLF are tolerated") {
        Election e = parse_blt("3 1 # header\r\n2 1 0 # a bundle\r\n0\r\n");
        CHECK(e.profile.count_of({0}) == 2);
    }
}

TEST_CASE("blt round trip") {
    Election e = fixtures::sample_election();
    e.candidate_names = {"Avon", "Brae", "Cole", "Dunn", "Esk"};
    e.title = "Sample ward";
    Election back = parse_blt(write_blt(e));
    CHECK(back.profile == e.profile);
    CHECK(back.num_candidates == e.num_candidates);
    CHECK(back.seats == e.seats);
    CHECK(parse_blt(write_blt(back)).profile == back.profile);
}
