#pragma once

#include "stv/election.hpp"
#include "stv/tabulation.hpp"

#include <optional>

namespace stv {

namespace detail {

// Would the elimination tie between `w` and `c` (equal tallies) fall on `w`?
inline bool tie_eliminates(CandidateId w, CandidateId c, const Election& e, TiePolicy policy) {
    if (policy == TiePolicy::ByFirstPrefThenIndex) {
        std::int64_t fw = 0, fc = 0;
        for (const auto& [ranking, count] : e.profile.types()) {
            if (ranking.front() == w) fw += count;
            if (ranking.front() == c) fc += count;
        }
        if (fw != fc) return fw < fc;
    }
    return w < c;
}

}  // namespace detail

/// Winner-elimination upper bound: for every elimination round of the
/// reported count and every reported winner still standing there, the whole
/// ballots that must shift from the winner to the eliminated candidate so
/// the winner drops to or below the loser's tally (one more when the
/// resulting tie would not eliminate the winner). Empty when the reported
/// count fills every seat before any elimination.
inline std::optional<VoteValue> weub(const Election& e, const TabulationResult& tab,
                                     TiePolicy tie = TiePolicy::ByIndex) {
    std::optional<VoteValue> best;
    for (const auto& rec : tab.rounds) {
        if (rec.action != RoundAction::Eliminated) continue;
        CandidateId c = rec.candidates.front();
        for (const auto& [w, tally_w] : rec.tallies) {  // tallies list remaining candidates
            if (w == c || !e.reported_winners.count(w)) continue;
            VoteValue diff = tally_w - rec.tallies.at(c);
            std::int64_t shift = ceil_ballots(diff / 2);
            if (VoteValue(2 * shift) == diff && !detail::tie_eliminates(w, c, e, tie)) ++shift;
            VoteValue cost(shift);
            if (!best || cost < *best) best = cost;
        }
    }
    return best;
}

/// Cheapest way to push some reported loser's first-preference tally up to a
/// quota: min over losers of (Q - first preferences)+.
inline VoteValue simple_stv_ub(const Election& e) {
    std::vector<std::int64_t> first(e.num_candidates, 0);
    for (const auto& [ranking, count] : e.profile.types()) first[ranking.front()] += count;
    std::optional<VoteValue> best;
    for (CandidateId c = 0; c < e.num_candidates; ++c) {
        if (e.reported_winners.count(c)) continue;
        VoteValue cost = positive_part(e.quota - VoteValue(first[c]));
        if (!best || cost < *best) best = cost;
    }
    return best.value_or(VoteValue(0));
}

struct UpperBoundReport {
    std::optional<VoteValue> weub;
    std::optional<VoteValue> simple_stv;
    std::optional<std::int64_t> external;
    std::int64_t best = 0;  // whole ballots, >= 1 for a non-empty profile
};

/// Combines the two built-in bounds with an externally supplied one. When a
/// concrete manipulation is supplied it must verify (winner set changes
/// under re-tabulation); its distance then certifies an upper bound.
inline UpperBoundReport best_upper_bound(const Election& e, const TabulationResult& tab,
                                         std::optional<std::int64_t> external = std::nullopt,
                                         const TabulationOptions& opts = {}) {
    UpperBoundReport report;
    report.weub = weub(e, tab, opts.tie);
    report.simple_stv = simple_stv_ub(e);
    report.external = external;
    std::optional<VoteValue> best;
    auto consider = [&](const std::optional<VoteValue>& v) {
        if (v && (!best || *v < *best)) best = v;
    };
    consider(report.weub);
    consider(report.simple_stv);
    if (external) consider(VoteValue(*external));
    report.best = best ? ceil_ballots(*best) : e.profile.total();
    if (!e.profile.empty() && report.best < 1) report.best = 1;
    return report;
}

}  // namespace stv
