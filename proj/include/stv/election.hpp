#pragma once

#include "stv/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stv {

/// Dense 0-based candidate index.
using CandidateId = std::int32_t;

/// A ballot's ranking: distinct candidates, most preferred first. A ranking
/// may be partial (fewer entries than candidates) but never empty.
using Ranking = std::vector<CandidateId>;

inline bool ranking_valid(const Ranking& r, int num_candidates) {
    if (r.empty() || static_cast<int>(r.size()) > num_candidates) return false;
    std::set<CandidateId> seen;
    for (CandidateId c : r) {
        if (c < 0 || c >= num_candidates) return false;
        if (!seen.insert(c).second) return false;
    }
    return true;
}

struct BallotType {
    Ranking ranking;
    std::int64_t count = 0;
};

/// Multiset of ballots, stored as ranking -> count. Deterministic iteration
/// order (lexicographic by ranking).
class BallotProfile {
  public:
    using Map = std::map<Ranking, std::int64_t>;

    BallotProfile() = default;
    BallotProfile(std::initializer_list<BallotType> types) {
        for (const auto& t : types) add(t.ranking, t.count);
    }

    void add(const Ranking& ranking, std::int64_t count) {
        if (count < 0) throw std::invalid_argument("ballot count must be non-negative");
        if (ranking.empty()) throw std::invalid_argument("ballot ranking must not be empty");
        std::set<CandidateId> seen(ranking.begin(), ranking.end());
        if (seen.size() != ranking.size())
            throw std::invalid_argument("ballot ranking must not repeat candidates");
        if (count == 0) return;
        types_[ranking] += count;
        total_ += count;
    }

    /// Remove `count` ballots of the given type; throws if not present.
    void remove(const Ranking& ranking, std::int64_t count) {
        auto it = types_.find(ranking);
        if (it == types_.end() || it->second < count)
            throw std::invalid_argument("cannot remove more ballots than present");
        it->second -= count;
        total_ -= count;
        if (it->second == 0) types_.erase(it);
    }

    std::int64_t count_of(const Ranking& ranking) const {
        auto it = types_.find(ranking);
        return it == types_.end() ? 0 : it->second;
    }

    std::int64_t total() const { return total_; }
    const Map& types() const { return types_; }
    bool empty() const { return types_.empty(); }

    bool operator==(const BallotProfile&) const = default;

  private:
    Map types_;
    std::int64_t total_ = 0;
};

/// Droop quota: floor(total / (seats + 1)) + 1.
inline VoteValue compute_quota(std::int64_t total_ballots, int seats) {
    if (seats < 1) throw std::invalid_argument("compute_quota: seats must be >= 1");
    if (total_ballots < 0) throw std::invalid_argument("compute_quota: negative ballot count");
    return VoteValue(total_ballots / (seats + 1) + 1);
}

/// A contest: candidates 0..num_candidates-1, the cast ballots, the number
/// of seats, the quota and (once known) the reported winners.
struct Election {
    int num_candidates = 0;
    BallotProfile profile;
    int seats = 0;
    VoteValue quota;
    std::set<CandidateId> reported_winners;
    std::vector<std::string> candidate_names;
    std::string title;

    std::string name_of(CandidateId c) const {
        if (c >= 0 && c < static_cast<int>(candidate_names.size()) &&
            !candidate_names[c].empty())
            return candidate_names[c];
        return "c" + std::to_string(c);
    }
};

inline Election make_election(int num_candidates, int seats, BallotProfile profile,
                              std::optional<std::set<CandidateId>> winners = std::nullopt) {
    if (seats < 1 || seats >= num_candidates)
        throw std::invalid_argument("make_election: need 1 <= seats < candidates");
    for (const auto& [ranking, count] : profile.types())
        if (!ranking_valid(ranking, num_candidates))
            throw std::invalid_argument("make_election: invalid ranking in profile");
    Election e;
    e.num_candidates = num_candidates;
    e.seats = seats;
    e.quota = compute_quota(profile.total(), seats);
    e.profile = std::move(profile);
    if (winners) {
        if (static_cast<int>(winners->size()) != seats)
            throw std::invalid_argument("make_election: winner set must have `seats` members");
        e.reported_winners = std::move(*winners);
    }
    return e;
}

/// Number of ballots whose ranking was rewritten to turn `original` into
/// `modified`: sum over types of (modified - original)+, which equals the
/// sum of (original - modified)+ because totals match.
inline std::int64_t manipulation_distance(const BallotProfile& original,
                                          const BallotProfile& modified) {
    if (original.total() != modified.total())
        throw std::invalid_argument("manipulation_distance: profiles must have equal totals");
    std::int64_t gained = 0;
    for (const auto& [ranking, count] : modified.types()) {
        std::int64_t delta = count - original.count_of(ranking);
        if (delta > 0) gained += delta;
    }
    return gained;
}

}  // namespace stv
