#pragma once

#include "stv/election.hpp"
#include "stv/orders.hpp"

namespace fixtures {

using namespace stv;

// 5 candidates (A..E = 0..4), 3 seats, 1230 ballots, quota 308. The standard
// worked example used throughout the test suite: C and E start with quotas,
// B is eliminated in round 3 and A takes the final seat.
inline Election sample_election() {
    BallotProfile profile;
    profile.add({0}, 250);           // [A]
    profile.add({1, 0, 2}, 120);     // [B, A, C]
    profile.add({2, 3}, 400);        // [C, D]
    profile.add({4}, 350);           // [E]
    profile.add({2, 4, 3}, 110);     // [C, E, D]
    return make_election(5, 3, std::move(profile), std::set<CandidateId>{0, 2, 4});
}

constexpr CandidateId A = 0, B = 1, C = 2, D = 3, E = 4;

inline Order order(std::initializer_list<std::pair<CandidateId, int>> entries) {
    Order o;
    for (auto [c, a] : entries) o.push_back({c, a ? Action::Seated : Action::Eliminated});
    return o;
}

}  // namespace fixtures
