#pragma once

#include "stv/election.hpp"
#include "stv/orders.hpp"
#include "stv/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace stv {

enum class TiePolicy {
    ByIndex,               // lowest candidate id wins elimination and seating-order ties
    ByFirstPrefThenIndex,  // first-preference tally decides, then lowest id
};

struct TabulationOptions {
    TiePolicy tie = TiePolicy::ByIndex;
    Rounding rounding;  // exact by default
};

enum class RoundAction { Seated, Eliminated, AutoSeatedAll };

struct RoundRecord {
    int round = 0;  // 1-based
    RoundAction action = RoundAction::Seated;
    std::vector<CandidateId> candidates;           // one entry except for AutoSeatedAll
    std::map<CandidateId, VoteValue> tallies;      // start of round, remaining candidates
    std::optional<VoteValue> transfer_value;       // present iff seated with a surplus
    VoteValue exhausted;                           // value exhausted before this round
    VoteValue retained;                            // value consumed by earlier seatings
    bool tie_break = false;
};

struct TabulationResult {
    Order order;
    std::vector<RoundRecord> rounds;
    std::set<CandidateId> winners;
    VoteValue exhausted_total;
};

namespace detail {

struct PileEntry {
    const Ranking* ranking;
    std::size_t pos;  // index of the current holder within *ranking
    std::int64_t count;
    VoteValue value;  // per-ballot value
};

struct CountState {
    std::vector<std::vector<PileEntry>> piles;
    std::vector<VoteValue> tallies;
    std::vector<bool> decided;
    std::vector<std::int64_t> first_prefs;
    VoteValue exhausted{0};
    VoteValue retained{0};
};

inline CountState init_count(const Election& e) {
    CountState s;
    s.piles.resize(e.num_candidates);
    s.tallies.assign(e.num_candidates, VoteValue(0));
    s.decided.assign(e.num_candidates, false);
    s.first_prefs.assign(e.num_candidates, 0);
    for (const auto& [ranking, count] : e.profile.types()) {
        CandidateId first = ranking.front();
        s.piles[first].push_back({&ranking, 0, count, VoteValue(1)});
        s.tallies[first] += VoteValue(count);
        s.first_prefs[first] += count;
    }
    return s;
}

// Tie selection among `tied` (all holding equal deciding tallies).
inline CandidateId break_tie(const std::vector<CandidateId>& tied, const CountState& s,
                             TiePolicy policy, bool prefer_high_first_prefs) {
    CandidateId best = tied.front();
    for (CandidateId c : tied) {
        if (policy == TiePolicy::ByFirstPrefThenIndex) {
            auto key = [&](CandidateId x) {
                return std::pair<std::int64_t, CandidateId>(
                    prefer_high_first_prefs ? -s.first_prefs[x] : s.first_prefs[x], x);
            };
            if (key(c) < key(best)) best = c;
        } else if (c < best) {
            best = c;
        }
    }
    return best;
}

// Moves the ballots of `from` (seating transfers scale by tau; eliminations
// keep values). `ineligible` holds candidates that may not receive ballots
// this round (quota already reached at the start of the round).
inline void transfer_pile(CountState& s, CandidateId from, const VoteValue* tau,
                          const std::vector<bool>& ineligible) {
    auto entries = std::move(s.piles[from]);
    s.piles[from].clear();
    for (auto& entry : entries) {
        VoteValue value = entry.value;
        if (tau) value *= *tau;
        if (value == 0) {
            continue;  // nothing left to transfer; ballot exhausts silently
        }
        const Ranking& r = *entry.ranking;
        std::size_t next = entry.pos + 1;
        while (next < r.size() && (s.decided[r[next]] || ineligible[r[next]])) ++next;
        if (next >= r.size()) {
            s.exhausted += value * entry.count;
            continue;
        }
        CandidateId dest = r[next];
        s.tallies[dest] += value * entry.count;
        s.piles[dest].push_back({entry.ranking, next, entry.count, value});
    }
}

}  // namespace detail

/// Full Weighted Inclusive Gregory count. Each round seats or eliminates one
/// candidate (or seats everyone when the remaining candidates exactly fill
/// the seats). Surplus transfers move every ballot of the seated candidate at
/// value * (tally - quota) / tally to its next remaining choice whose tally
/// at the start of the round was below the quota; elimination transfers move
/// ballots at their current value to the next remaining choice.
inline TabulationResult tabulate(const Election& e, const TabulationOptions& opts = {}) {
    TabulationResult result;
    detail::CountState s = detail::init_count(e);
    const VoteValue& quota = e.quota;
    int seats_left = e.seats;
    int round = 1;

    while (seats_left > 0) {
        std::vector<CandidateId> rem;
        for (CandidateId c = 0; c < e.num_candidates; ++c)
            if (!s.decided[c]) rem.push_back(c);

        RoundRecord rec;
        rec.round = round;
        rec.exhausted = s.exhausted;
        rec.retained = s.retained;
        for (CandidateId c : rem) rec.tallies[c] = s.tallies[c];

        if (static_cast<int>(rem.size()) == seats_left) {
            // Everyone left is seated; order them by tally, highest first.
            std::vector<CandidateId> by_tally = rem;
            std::stable_sort(by_tally.begin(), by_tally.end(), [&](CandidateId a, CandidateId b) {
                if (s.tallies[a] != s.tallies[b]) return s.tallies[a] > s.tallies[b];
                return opts.tie == TiePolicy::ByFirstPrefThenIndex
                           ? std::pair(-s.first_prefs[a], a) < std::pair(-s.first_prefs[b], b)
                           : a < b;
            });
            rec.action = RoundAction::AutoSeatedAll;
            for (CandidateId c : by_tally) {
                rec.candidates.push_back(c);
                result.order.push_back({c, Action::Seated});
                result.winners.insert(c);
                s.decided[c] = true;
            }
            seats_left = 0;
            result.rounds.push_back(std::move(rec));
            break;
        }

        std::vector<CandidateId> quota_holders;
        for (CandidateId c : rem)
            if (s.tallies[c] >= quota) quota_holders.push_back(c);

        if (quota_holders.empty()) {
            // Eliminate the lowest tally.
            VoteValue low = s.tallies[rem.front()];
            for (CandidateId c : rem) low = std::min(low, s.tallies[c]);
            std::vector<CandidateId> tied;
            for (CandidateId c : rem)
                if (s.tallies[c] == low) tied.push_back(c);
            CandidateId loser = detail::break_tie(tied, s, opts.tie, false);
            rec.action = RoundAction::Eliminated;
            rec.candidates.push_back(loser);
            rec.tie_break = tied.size() > 1;
            s.decided[loser] = true;
            std::vector<bool> no_ineligible(e.num_candidates, false);
            detail::transfer_pile(s, loser, nullptr, no_ineligible);
            s.tallies[loser] = 0;
            result.order.push_back({loser, Action::Eliminated});
        } else {
            // Seat the largest tally (it necessarily holds a quota).
            VoteValue high = s.tallies[rem.front()];
            for (CandidateId c : rem) high = std::max(high, s.tallies[c]);
            std::vector<CandidateId> tied;
            for (CandidateId c : rem)
                if (s.tallies[c] == high) tied.push_back(c);
            CandidateId winner = detail::break_tie(tied, s, opts.tie, true);
            rec.action = RoundAction::Seated;
            rec.candidates.push_back(winner);
            rec.tie_break = tied.size() > 1;

            VoteValue tally = s.tallies[winner];
            VoteValue surplus = tally - quota;
            s.decided[winner] = true;
            result.order.push_back({winner, Action::Seated});
            result.winners.insert(winner);
            --seats_left;

            if (surplus > 0) {
                VoteValue tau = opts.rounding.apply(surplus / tally);
                rec.transfer_value = tau;
                // Receiving candidates must have been under quota at the
                // start of the round.
                std::vector<bool> ineligible(e.num_candidates, false);
                for (CandidateId c : rem)
                    if (c != winner && s.tallies[c] >= quota) ineligible[c] = true;
                detail::transfer_pile(s, winner, &tau, ineligible);
                // Every ballot value v leaves as v*tau, so the seat consumes
                // tally * (1 - tau). With exact arithmetic that is the quota.
                s.retained += tally - tally * tau;
            } else {
                // Exact quota: ballots drop to value 0 and exhaust.
                s.piles[winner].clear();
                s.retained += tally;
            }
            s.tallies[winner] = 0;
            ++round;
            result.rounds.push_back(std::move(rec));
            continue;
        }
        ++round;
        result.rounds.push_back(std::move(rec));
    }

    result.exhausted_total = s.exhausted;
    return result;
}

/// Re-tabulates with a modified profile and reports the manipulation size
/// and whether the winner set changed. The totals must match, so the quota
/// is unchanged.
struct VerifyOutcome {
    std::int64_t distance = 0;
    bool winners_changed = false;
    std::set<CandidateId> new_winners;
};

inline VerifyOutcome verify_manipulation(const Election& e, const BallotProfile& modified,
                                         const TabulationOptions& opts = {}) {
    std::int64_t dist = manipulation_distance(e.profile, modified);
    Election changed = e;
    changed.profile = modified;
    changed.quota = compute_quota(modified.total(), e.seats);
    TabulationResult tab = tabulate(changed, opts);
    std::set<CandidateId> reported =
        e.reported_winners.empty() ? tabulate(e, opts).winners : e.reported_winners;
    return {dist, tab.winners != reported, tab.winners};
}

}  // namespace stv
