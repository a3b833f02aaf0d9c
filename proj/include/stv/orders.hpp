#pragma once

#include "stv/election.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <set>
#include <vector>

namespace stv {

enum class Action : std::uint8_t { Eliminated = 0, Seated = 1 };

struct OrderEntry {
    CandidateId candidate;
    Action action;
    auto operator<=>(const OrderEntry&) const = default;
};

/// A (possibly partial) election order: round i of the count decided
/// entries[i-1]. Candidates are distinct across entries.
using Order = std::vector<OrderEntry>;

inline Order append(Order prefix, CandidateId c, Action a) {
    prefix.push_back({c, a});
    return prefix;
}

inline std::set<CandidateId> seated(const Order& order) {
    std::set<CandidateId> s;
    for (const auto& e : order)
        if (e.action == Action::Seated) s.insert(e.candidate);
    return s;
}

inline std::set<CandidateId> eliminated(const Order& order) {
    std::set<CandidateId> s;
    for (const auto& e : order)
        if (e.action == Action::Eliminated) s.insert(e.candidate);
    return s;
}

inline std::set<CandidateId> remaining(int num_candidates, const Order& order) {
    std::set<CandidateId> s;
    for (CandidateId c = 0; c < num_candidates; ++c) s.insert(c);
    for (const auto& e : order) s.erase(e.candidate);
    return s;
}

/// Entry of a relaxed order: a set of candidates decided by one event. Sets
/// of size > 1 arise only from batched eliminations and are kept sorted.
struct RelaxedEntry {
    std::vector<CandidateId> candidates;
    Action action;
    auto operator<=>(const RelaxedEntry&) const = default;
};

using RelaxedOrder = std::vector<RelaxedEntry>;

/// Batch elimination: every maximal run of n >= 3 consecutive eliminations
/// c1..cn collapses to ({c1..c(n-1)}, eliminated) followed by ({cn},
/// eliminated); the batch set is sorted, so two prefixes that permute
/// candidates inside a batch share one canonical relaxed form.
inline RelaxedOrder relax(const Order& order) {
    RelaxedOrder out;
    std::size_t i = 0;
    while (i < order.size()) {
        if (order[i].action == Action::Seated) {
            out.push_back({{order[i].candidate}, Action::Seated});
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < order.size() && order[j].action == Action::Eliminated) ++j;
        std::size_t n = j - i;
        if (n >= 3) {
            RelaxedEntry batch{{}, Action::Eliminated};
            for (std::size_t k = i; k + 1 < j; ++k) batch.candidates.push_back(order[k].candidate);
            std::sort(batch.candidates.begin(), batch.candidates.end());
            out.push_back(std::move(batch));
            out.push_back({{order[j - 1].candidate}, Action::Eliminated});
        } else {
            for (std::size_t k = i; k < j; ++k)
                out.push_back({{order[k].candidate}, Action::Eliminated});
        }
        i = j;
    }
    return out;
}

inline Order flatten(const RelaxedOrder& relaxed) {
    Order out;
    for (const auto& e : relaxed)
        for (CandidateId c : e.candidates) out.push_back({c, e.action});
    return out;
}

/// The subsequence of `ballot` omitting candidates decided in rounds
/// 1..r-1 of `prefix`: the candidates the ballot can still pass through
/// once round r starts.
inline Ranking tail(const Order& prefix, const Ranking& ballot, int round) {
    std::set<CandidateId> gone;
    for (int i = 0; i + 1 < round && i < static_cast<int>(prefix.size()); ++i)
        gone.insert(prefix[i].candidate);
    Ranking out;
    for (CandidateId c : ballot)
        if (!gone.count(c)) out.push_back(c);
    return out;
}

/// The set of piles a ballot could occupy at the start of a round; the
/// exhausted pile is a distinguished pseudo-pile, not a candidate.
struct PileSet {
    std::vector<CandidateId> candidates;  // sorted
    bool exhausted = false;

    bool contains(CandidateId c) const {
        return std::binary_search(candidates.begin(), candidates.end(), c);
    }
    /// Exactly one candidate pile and no exhausted possibility.
    bool must_be(CandidateId c) const {
        return !exhausted && candidates.size() == 1 && candidates[0] == c;
    }
    bool operator==(const PileSet&) const = default;
};

namespace detail {

inline PileSet pile_step(const Order& prefix, const Ranking& ballot, int round,
                         const PileSet& prev) {
    Ranking t = tail(prefix, ballot, round);
    if (t.empty()) return PileSet{{}, true};
    const int len = static_cast<int>(prefix.size());
    bool moved = false;
    if (round >= 2 && round <= len + 1) {
        const OrderEntry& last = prefix[round - 2];
        moved = last.action == Action::Seated && prev.contains(last.candidate);
    }
    bool ambiguous = false;
    if (moved) {
        if (round <= len) {
            // Inside the prefix a surplus transfer is ambiguous only when the
            // next event seats the ballot's next choice: the prefix cannot say
            // whether that candidate reached a quota before or because of the
            // transfer, so the ballot may have skipped over them.
            ambiguous = prefix[round - 1].action == Action::Seated &&
                        t.front() == prefix[round - 1].candidate;
        } else {
            // Past the end of the prefix nothing rules a skip out.
            ambiguous = true;
        }
    }
    if (ambiguous) {
        PileSet p;
        p.candidates.assign(t.begin(), t.end());
        std::sort(p.candidates.begin(), p.candidates.end());
        p.exhausted = true;
        return p;
    }
    return PileSet{{t.front()}, false};
}

}  // namespace detail

/// Possible piles of `ballot` at the start of `round` (1..|prefix|+1).
inline PileSet pile(const Order& prefix, const Ranking& ballot, int round) {
    PileSet p = ballot.empty() ? PileSet{{}, true} : PileSet{{ballot.front()}, false};
    for (int r = 2; r <= round; ++r) p = detail::pile_step(prefix, ballot, r, p);
    return p;
}

/// Rankings in the profile certain to sit with candidate `c` at round `r`.
inline std::vector<Ranking> must_pile(const Election& e, const Order& prefix, CandidateId c,
                                      int round) {
    std::vector<Ranking> out;
    for (const auto& [ranking, count] : e.profile.types())
        if (pile(prefix, ranking, round).must_be(c)) out.push_back(ranking);
    return out;
}

/// Rankings in the profile that could sit with candidate `c` at round `r`.
inline std::vector<Ranking> maybe_pile(const Election& e, const Order& prefix, CandidateId c,
                                       int round) {
    std::vector<Ranking> out;
    for (const auto& [ranking, count] : e.profile.types())
        if (pile(prefix, ranking, round).contains(c)) out.push_back(ranking);
    return out;
}

}  // namespace stv
