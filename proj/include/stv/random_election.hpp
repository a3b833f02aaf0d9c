#pragma once

#include "stv/election.hpp"
#include "stv/tabulation.hpp"

#include <random>

namespace stv {

/// Deterministic small-election generator for property tests: rankings are
/// uniform over non-empty partial permutations, one ballot at a time.
inline Election generate_random_election(int num_candidates, int num_ballots, int seats,
                                         std::uint64_t seed) {
    if (num_candidates < 2 || num_candidates > 6)
        throw std::invalid_argument("generate_random_election: 2..6 candidates");
    if (num_ballots < 0 || num_ballots > 30)
        throw std::invalid_argument("generate_random_election: 0..30 ballots");
    if (seats < 1 || seats >= num_candidates)
        throw std::invalid_argument("generate_random_election: need 1 <= seats < candidates");

    std::mt19937_64 rng(seed);
    BallotProfile profile;
    std::vector<CandidateId> pool(num_candidates);
    for (CandidateId c = 0; c < num_candidates; ++c) pool[c] = c;
    for (int i = 0; i < num_ballots; ++i) {
        std::shuffle(pool.begin(), pool.end(), rng);
        int len = 1 + static_cast<int>(rng() % num_candidates);
        profile.add(Ranking(pool.begin(), pool.begin() + len), 1);
    }

    Election e;
    e.num_candidates = num_candidates;
    e.seats = seats;
    e.quota = compute_quota(profile.total(), seats);
    e.profile = std::move(profile);
    e.reported_winners = tabulate(e).winners;
    return e;
}

}  // namespace stv
