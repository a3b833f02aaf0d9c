#pragma once

#include "stv/election.hpp"
#include "stv/orders.hpp"
#include "stv/tally_bounds.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace stv {

struct BoundOptions {
    bool legacy_tallies = false;   // use the older full-value tally bounds
    bool displacement = true;      // include the displacement heuristic
    Rounding rounding;
};

namespace detail {

inline std::set<CandidateId> decided_before(const Order& prefix, int r) {
    std::set<CandidateId> gone;
    for (int i = 0; i + 1 < r && i < static_cast<int>(prefix.size()); ++i)
        gone.insert(prefix[i].candidate);
    return gone;
}

/// True when the event at `round` happens with the unfilled seats equal to
/// the candidates left, i.e. everyone remaining is seated regardless of
/// tallies. Quota reasoning does not apply to such seatings.
inline bool auto_seat_context(const Election& e, const Order& prefix, int round) {
    int seated_before = 0;
    for (int i = 0; i + 1 < round && i < static_cast<int>(prefix.size()); ++i)
        if (prefix[i].action == Action::Seated) ++seated_before;
    int remaining_before = e.num_candidates - (round - 1);
    return e.seats - seated_before == remaining_before;
}

}  // namespace detail

/// Cheapest change forcing each eliminated candidate of the prefix to hold
/// the smallest tally in its round: max over eliminations of max over other
/// standing candidates of ((t_min(c) - t_max(c')) / 2)+.
template <typename Tables>
VoteValue elim_lb(const Election& e, const Order& prefix, const Tables& tb) {
    VoteValue best(0);
    for (int r = 1; r <= static_cast<int>(prefix.size()); ++r) {
        if (prefix[r - 1].action != Action::Eliminated) continue;
        CandidateId c = prefix[r - 1].candidate;
        std::set<CandidateId> decided = detail::decided_before(prefix, r);
        VoteValue cmin = tb.t_min(c, r);
        for (CandidateId other = 0; other < e.num_candidates; ++other) {
            if (other == c || decided.count(other)) continue;
            best = std::max(best, positive_part((cmin - tb.t_max(other, r)) / 2));
        }
    }
    return best;
}

/// Cheapest change giving each quota-seated candidate of the prefix a quota:
/// max over seatings of (Q - t_max(c))+ (auto-seatings are exempt).
template <typename Tables>
VoteValue quota_lb(const Election& e, const Order& prefix, const Tables& tb) {
    VoteValue best(0);
    for (int r = 1; r <= static_cast<int>(prefix.size()); ++r) {
        if (prefix[r - 1].action != Action::Seated) continue;
        if (detail::auto_seat_context(e, prefix, r)) continue;
        CandidateId c = prefix[r - 1].candidate;
        best = std::max(best, positive_part(e.quota - tb.t_max(c, r)));
    }
    return best;
}

struct ElimQuotaBound {
    VoteValue elim;
    VoteValue quota;
    VoteValue value() const { return std::max(elim, quota); }
};

inline ElimQuotaBound elim_quota_lb(const Election& e, const Order& prefix,
                                    const BoundsTables& tb) {
    return {elim_lb(e, prefix, tb), quota_lb(e, prefix, tb)};
}

inline ElimQuotaBound elim_quota_lb(const Election& e, const Order& prefix,
                                    const LegacyBounds& tb) {
    return {elim_lb(e, prefix, tb), quota_lb(e, prefix, tb)};
}

inline ElimQuotaBound elim_quota_lb(const Election& e, const Order& prefix,
                                    const BoundOptions& opts = {}) {
    if (opts.legacy_tallies) return elim_quota_lb(e, prefix, legacy_tally_bounds(e, prefix));
    return elim_quota_lb(e, prefix, compute_bounds(e, prefix, opts.rounding));
}

/// Cheapest way, looking past the end of the prefix, for some reported
/// loser still standing to displace a reported winner: for each loser the
/// maximum of its displacement cost against the cheapest standing winner and
/// the cheaper of reaching a quota or outlasting enough rivals to be seated
/// by default; the bound is the cheapest such loser. Zero as soon as the
/// prefix itself already changes the outcome (loser seated, winner
/// eliminated) or the remaining candidates auto-seat.
inline VoteValue displacement_lb(const Election& e, const Order& prefix, const BoundsTables& tb) {
    std::set<CandidateId> s = seated(prefix);
    std::set<CandidateId> el = eliminated(prefix);
    std::set<CandidateId> rem = remaining(e.num_candidates, prefix);
    const std::set<CandidateId>& winners = e.reported_winners;

    for (CandidateId c : s)
        if (!winners.count(c)) return VoteValue(0);  // reported loser already seated
    for (CandidateId c : el)
        if (winners.count(c)) return VoteValue(0);  // reported winner already eliminated
    int unfilled = e.seats - static_cast<int>(s.size());
    if (unfilled == static_cast<int>(rem.size())) return VoteValue(0);  // auto-seated

    const int r = static_cast<int>(prefix.size()) + 1;
    const long L = static_cast<long>(rem.size()) - unfilled - 1;

    bool any = false;
    VoteValue best(0);
    for (CandidateId c : rem) {
        if (winners.count(c)) continue;  // only reported losers
        // Cheapest displacement of some still-standing reported winner.
        bool have_disp = false;
        VoteValue disp_cost(0);
        for (CandidateId w : rem) {
            if (!winners.count(w)) continue;
            VoteValue cost =
                positive_part((tb.t_min(w, r) - tally_max_before(prefix, c, w, r, tb)) / 2);
            if (!have_disp || cost < disp_cost) {
                disp_cost = cost;
                have_disp = true;
            }
        }
        if (!have_disp) disp_cost = VoteValue(0);

        VoteValue quota_cost = positive_part(e.quota - tb.t_max(c, r));

        // Outlast all but the last unfilled seats: the L cheapest pairwise
        // displacements must all be paid; negatives stay in the sort.
        std::vector<VoteValue> dps;
        for (CandidateId other : rem) {
            if (other == c) continue;
            dps.push_back((tb.t_min(other, r) - tally_max_before(prefix, c, other, r, tb)) / 2);
        }
        std::sort(dps.begin(), dps.end());
        VoteValue left_at_end(0);
        if (L > 0 && !dps.empty()) {
            std::size_t take = std::min<std::size_t>(dps.size(), static_cast<std::size_t>(L));
            left_at_end = positive_part(dps[take - 1]);
        }

        VoteValue bound_c = std::max(disp_cost, std::min(quota_cost, left_at_end));
        if (!any || bound_c < best) {
            best = bound_c;
            any = true;
        }
    }
    return any ? best : VoteValue(0);
}

inline VoteValue displacement_lb(const Election& e, const Order& prefix,
                                 const Rounding& rounding = {}) {
    return displacement_lb(e, prefix, compute_bounds(e, prefix, rounding));
}

/// The per-node heuristic: max of the elimination-quota bound, the
/// displacement bound (when enabled) and the parent's bound.
struct HeuristicBound {
    VoteValue elim;
    VoteValue quota;
    VoteValue disp;
    VoteValue parent;

    VoteValue value() const { return std::max(std::max(elim, quota), std::max(disp, parent)); }
    std::int64_t ceil_value() const { return ceil_ballots(value()); }
};

inline HeuristicBound combined_heuristic_lb(const Election& e, const Order& prefix,
                                            const VoteValue& parent_lb,
                                            const BoundOptions& opts = {}) {
    HeuristicBound h{VoteValue(0), VoteValue(0), VoteValue(0), parent_lb};
    if (opts.legacy_tallies) {
        LegacyBounds lt = legacy_tally_bounds(e, prefix);
        h.elim = elim_lb(e, prefix, lt);
        h.quota = quota_lb(e, prefix, lt);
        if (opts.displacement) h.disp = displacement_lb(e, prefix, compute_bounds(e, prefix, opts.rounding));
    } else {
        BoundsTables tb = compute_bounds(e, prefix, opts.rounding);
        h.elim = elim_lb(e, prefix, tb);
        h.quota = quota_lb(e, prefix, tb);
        if (opts.displacement) h.disp = displacement_lb(e, prefix, tb);
    }
    return h;
}

}  // namespace stv
