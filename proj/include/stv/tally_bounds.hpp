#pragma once

#include "stv/election.hpp"
#include "stv/orders.hpp"
#include "stv/rational.hpp"

#include <map>
#include <vector>

namespace stv {

/// Round-indexed minimum/maximum ballot values, candidate tallies and
/// transfer-value bounds for one prefix. Rounds run 1..|prefix|+1; the extra
/// round carries the state just after the prefix concludes. Built once per
/// search node and shared read-only.
struct BoundsTables {
    std::vector<Ranking> rankings;              // profile rankings, profile order
    std::vector<std::int64_t> counts;           // parallel to rankings
    int rounds = 0;                             // |prefix| + 1

    // [ranking][round] with round index 1..rounds (index 0 unused)
    std::vector<std::vector<PileSet>> piles;
    std::vector<std::vector<VoteValue>> value_min, value_max;

    // [candidate][round]
    std::vector<std::vector<VoteValue>> tally_min, tally_max;

    // per seating round r (1-based): bounds on the transfer value
    std::map<int, std::pair<VoteValue, VoteValue>> transfer_min_max;

    VoteValue t_min(CandidateId c, int r) const { return tally_min[c][r]; }
    VoteValue t_max(CandidateId c, int r) const { return tally_max[c][r]; }

    bool in_must(std::size_t ranking_idx, CandidateId c, int r) const {
        return piles[ranking_idx][r].must_be(c);
    }
    bool in_maybe(std::size_t ranking_idx, CandidateId c, int r) const {
        return piles[ranking_idx][r].contains(c);
    }
};

/// Forward computation of ballot-value bounds (round 1 values are 1; a
/// must-pile member of a seated candidate scales its max value by that
/// round's max transfer value, a maybe-pile member scales its min value by
/// the min transfer value), tallies (max over maybe piles, min over must
/// piles) and transfer-value bounds ((max(Q,t)-Q)/max(Q,t) on the matching
/// tally bound).
inline BoundsTables compute_bounds(const Election& e, const Order& prefix,
                                   const Rounding& rounding = {}) {
    BoundsTables tb;
    const int R = static_cast<int>(prefix.size());
    tb.rounds = R + 1;
    for (const auto& [ranking, count] : e.profile.types()) {
        tb.rankings.push_back(ranking);
        tb.counts.push_back(count);
    }
    const std::size_t nr = tb.rankings.size();
    tb.piles.assign(nr, std::vector<PileSet>(tb.rounds + 1));
    tb.value_min.assign(nr, std::vector<VoteValue>(tb.rounds + 1, VoteValue(1)));
    tb.value_max.assign(nr, std::vector<VoteValue>(tb.rounds + 1, VoteValue(1)));
    tb.tally_min.assign(e.num_candidates, std::vector<VoteValue>(tb.rounds + 1, VoteValue(0)));
    tb.tally_max.assign(e.num_candidates, std::vector<VoteValue>(tb.rounds + 1, VoteValue(0)));

    for (int r = 1; r <= tb.rounds; ++r) {
        for (std::size_t i = 0; i < nr; ++i) {
            if (r == 1) {
                tb.piles[i][1] = PileSet{{tb.rankings[i].front()}, false};
            } else {
                tb.piles[i][r] = detail::pile_step(prefix, tb.rankings[i], r, tb.piles[i][r - 1]);
                const OrderEntry& last = prefix[r - 2];
                VoteValue vmax = tb.value_max[i][r - 1];
                VoteValue vmin = tb.value_min[i][r - 1];
                if (last.action == Action::Seated) {
                    auto it = tb.transfer_min_max.find(r - 1);
                    const VoteValue& tmin = it->second.first;
                    const VoteValue& tmax = it->second.second;
                    if (tb.piles[i][r - 1].must_be(last.candidate)) vmax *= tmax;
                    if (tb.piles[i][r - 1].contains(last.candidate)) vmin *= tmin;
                }
                tb.value_max[i][r] = vmax;
                tb.value_min[i][r] = vmin;
            }
            const PileSet& p = tb.piles[i][r];
            VoteValue add_max = tb.value_max[i][r] * tb.counts[i];
            for (CandidateId c : p.candidates) tb.tally_max[c][r] += add_max;
            if (!p.exhausted && p.candidates.size() == 1)
                tb.tally_min[p.candidates[0]][r] += tb.value_min[i][r] * tb.counts[i];
        }
        if (r <= R && prefix[r - 1].action == Action::Seated) {
            CandidateId c = prefix[r - 1].candidate;
            auto bound = [&](const VoteValue& tally) {
                VoteValue base = std::max(e.quota, tally);
                return rounding.apply((base - e.quota) / base);
            };
            tb.transfer_min_max[r] = {bound(tb.tally_min[c][r]), bound(tb.tally_max[c][r])};
        }
    }
    return tb;
}

/// Tally bounds in the older style: a ballot counts toward a candidate's
/// maximum at full value whenever the candidate heads its tail, and toward
/// the minimum at full value unless a previously seated candidate precedes
/// the candidate on the ballot (in which case it counts zero).
struct LegacyBounds {
    int rounds = 0;
    std::vector<std::vector<VoteValue>> tally_min, tally_max;  // [candidate][round]

    VoteValue t_min(CandidateId c, int r) const { return tally_min[c][r]; }
    VoteValue t_max(CandidateId c, int r) const { return tally_max[c][r]; }
};

inline LegacyBounds legacy_tally_bounds(const Election& e, const Order& prefix) {
    LegacyBounds lb;
    const int R = static_cast<int>(prefix.size());
    lb.rounds = R + 1;
    lb.tally_min.assign(e.num_candidates, std::vector<VoteValue>(lb.rounds + 1, VoteValue(0)));
    lb.tally_max.assign(e.num_candidates, std::vector<VoteValue>(lb.rounds + 1, VoteValue(0)));
    for (int r = 1; r <= lb.rounds; ++r) {
        std::set<CandidateId> seated_before;
        std::set<CandidateId> decided_before;
        for (int i = 0; i + 1 < r && i < R; ++i) {
            decided_before.insert(prefix[i].candidate);
            if (prefix[i].action == Action::Seated) seated_before.insert(prefix[i].candidate);
        }
        for (const auto& [ranking, count] : e.profile.types()) {
            CandidateId head = -1;
            for (CandidateId c : ranking)
                if (!decided_before.count(c)) { head = c; break; }
            if (head < 0) continue;
            lb.tally_max[head][r] += VoteValue(count);
            bool devalued = false;
            for (CandidateId c : ranking) {
                if (c == head) break;
                if (seated_before.count(c)) { devalued = true; break; }
            }
            if (!devalued) lb.tally_min[head][r] += VoteValue(count);
        }
    }
    return lb;
}

/// Maximum total value at round `r` of ballots on which `c` is ranked ahead
/// of `w` (or on which only `c` appears) once decided candidates are peeled
/// off the ranking.
inline VoteValue tally_max_before(const Order& prefix, CandidateId c, CandidateId w, int r,
                                  const BoundsTables& tb) {
    VoteValue out(0);
    for (std::size_t i = 0; i < tb.rankings.size(); ++i) {
        Ranking t = tail(prefix, tb.rankings[i], r);
        int pos_c = -1, pos_w = -1;
        for (int k = 0; k < static_cast<int>(t.size()); ++k) {
            if (t[k] == c) pos_c = k;
            if (t[k] == w) pos_w = k;
        }
        bool before = pos_c >= 0 && (pos_w < 0 || pos_c < pos_w);
        if (before) out += tb.value_max[i][r] * tb.counts[i];
    }
    return out;
}

inline VoteValue tally_max_before(const Election& e, const Order& prefix, CandidateId c,
                                  CandidateId w, int r, const Rounding& rounding = {}) {
    return tally_max_before(prefix, c, w, r, compute_bounds(e, prefix, rounding));
}

}  // namespace stv
