#pragma once

#include "stv/election.hpp"
#include "stv/equivalence.hpp"
#include "stv/minlp.hpp"
#include "stv/orders.hpp"
#include "stv/tabulation.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace stv {

enum class OracleStatus { Infeasible, TimedOut, Bound };

struct OracleResult {
    OracleStatus status = OracleStatus::Bound;
    VoteValue value;
    bool exact = false;

    static OracleResult bound(VoteValue v, bool exact_flag) {
        return {OracleStatus::Bound, std::move(v), exact_flag};
    }
    static OracleResult infeasible() { return {OracleStatus::Infeasible, VoteValue(0), false}; }
    static OracleResult timed_out() { return {OracleStatus::TimedOut, VoteValue(0), false}; }
};

/// Does some count of `profile` (resolving ties arbitrarily) follow `prefix`
/// round by round? Transfers are forced by the events, so only the per-round
/// legality needs checking: a seated candidate must hold a quota and (a)
/// largest tally, an eliminated one must see no quotas and hold (a) smallest
/// tally, and once the unfilled seats equal the remaining candidates the
/// rest of the prefix must seat exactly those candidates.
inline bool realizes_prefix(const Election& e, const BallotProfile& profile, const Order& prefix,
                            const Rounding& rounding = {}) {
    Election probe = e;
    probe.profile = profile;
    detail::CountState s = detail::init_count(probe);
    const VoteValue quota = compute_quota(profile.total(), e.seats);
    int seats_left = e.seats;

    for (std::size_t i = 0; i < prefix.size(); ++i) {
        std::vector<CandidateId> rem;
        for (CandidateId c = 0; c < e.num_candidates; ++c)
            if (!s.decided[c]) rem.push_back(c);
        if (seats_left == 0) return false;  // prefix continues past a full result

        if (seats_left == static_cast<int>(rem.size())) {
            // Everyone remaining is seated; the rest of the prefix must agree.
            std::set<CandidateId> left(rem.begin(), rem.end());
            for (std::size_t k = i; k < prefix.size(); ++k) {
                if (prefix[k].action != Action::Seated) return false;
                if (!left.erase(prefix[k].candidate)) return false;
            }
            return true;
        }

        const auto [cand, action] = prefix[i];
        if (s.decided[cand]) return false;

        if (action == Action::Seated) {
            if (s.tallies[cand] < quota) return false;
            for (CandidateId c : rem)
                if (s.tallies[c] > s.tallies[cand]) return false;
            VoteValue tally = s.tallies[cand];
            VoteValue surplus = tally - quota;
            s.decided[cand] = true;
            --seats_left;
            if (surplus > 0) {
                VoteValue tau = rounding.apply(surplus / tally);
                std::vector<bool> ineligible(e.num_candidates, false);
                for (CandidateId c : rem)
                    if (c != cand && s.tallies[c] >= quota) ineligible[c] = true;
                detail::transfer_pile(s, cand, &tau, ineligible);
            } else {
                s.piles[cand].clear();
            }
            s.tallies[cand] = 0;
        } else {
            for (CandidateId c : rem) {
                if (s.tallies[c] >= quota) return false;
                if (s.tallies[c] < s.tallies[cand]) return false;
            }
            s.decided[cand] = true;
            std::vector<bool> none(e.num_candidates, false);
            detail::transfer_pile(s, cand, nullptr, none);
            s.tallies[cand] = 0;
        }
    }
    return true;
}

/// Every non-empty partial ranking over `n` candidates.
inline std::vector<Ranking> all_rankings(int n) {
    std::vector<Ranking> out;
    Ranking cur;
    std::vector<bool> used(n, false);
    std::function<void()> rec = [&]() {
        if (!cur.empty()) out.push_back(cur);
        for (CandidateId c = 0; c < n; ++c) {
            if (used[c]) continue;
            used[c] = true;
            cur.push_back(c);
            rec();
            cur.pop_back();
            used[c] = false;
        }
    };
    rec();
    return out;
}

struct BruteLimits {
    int max_candidates = 5;
    std::int64_t max_ballots = 25;
    int max_cap = 4;
};

namespace detail {

// Multisets of size k over items 0..n-1, as count vectors; `capacity`
// optionally caps each item.
inline void enumerate_multisets(int n, int k, const std::vector<std::int64_t>* capacity,
                                const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> counts(n, 0);
    std::function<void(int, int)> rec = [&](int item, int left) {
        if (left == 0) {
            visit(counts);
            return;
        }
        if (item == n) return;
        std::int64_t cap = capacity ? (*capacity)[item] : left;
        for (int take = std::min<std::int64_t>(left, cap); take >= 0; --take) {
            counts[item] = take;
            rec(item + 1, left - take);
        }
        counts[item] = 0;
    };
    rec(0, k);
}

}  // namespace detail

/// Exact realization distance for a prefix by exhaustive search over
/// manipulated profiles, grouped into behaviour classes so only one
/// representative per class is tried. Refuses instances past the limits.
inline OracleResult brute_force_distance(const Election& e, const Order& prefix, int cap,
                                         const Rounding& rounding = {},
                                         const BruteLimits& limits = {}) {
    if (e.num_candidates > limits.max_candidates || e.profile.total() > limits.max_ballots ||
        cap > limits.max_cap)
        throw std::invalid_argument("brute_force_distance: instance exceeds configured limits");

    // Behaviour classes relative to the (unrelaxed) prefix.
    RelaxedOrder singletons;
    for (const auto& entry : prefix) singletons.push_back({{entry.candidate}, entry.action});
    RelaxedContext ctx = make_relaxed_context(e.num_candidates, singletons);

    std::map<ClassSignature, Ranking> representative;
    for (const Ranking& r : all_rankings(e.num_candidates)) {
        ClassSignature sig = signature_of(ctx, r);
        auto it = representative.find(sig);
        if (it == representative.end()) representative.emplace(sig, r);
    }
    std::vector<Ranking> additions;
    for (auto& [sig, rep] : representative) additions.push_back(rep);

    // Present types grouped by class; removals inside one class are
    // interchangeable, so enumerate per class with capacities.
    std::map<ClassSignature, std::vector<Ranking>> removal_groups;
    for (const auto& [ranking, count] : e.profile.types())
        removal_groups[signature_of(ctx, ranking)].push_back(ranking);
    std::vector<std::vector<Ranking>> removal_members;
    std::vector<std::int64_t> removal_capacity;
    std::vector<ClassSignature> removal_sig;
    for (auto& [sig, members] : removal_groups) {
        std::int64_t cap_total = 0;
        for (const auto& r : members) cap_total += e.profile.count_of(r);
        removal_members.push_back(members);
        removal_capacity.push_back(cap_total);
        removal_sig.push_back(sig);
    }

    for (int k = 0; k <= cap; ++k) {
        bool found = false;
        detail::enumerate_multisets(
            static_cast<int>(removal_members.size()), k, &removal_capacity,
            [&](const std::vector<int>& removes) {
                if (found) return;
                detail::enumerate_multisets(
                    static_cast<int>(additions.size()), k, nullptr,
                    [&](const std::vector<int>& adds) {
                        if (found) return;
                        // Skip add/remove pairs inside one class: they cancel.
                        for (std::size_t a = 0; a < adds.size(); ++a) {
                            if (adds[a] == 0) continue;
                            ClassSignature sig = signature_of(ctx, additions[a]);
                            for (std::size_t rm = 0; rm < removes.size(); ++rm)
                                if (removes[rm] > 0 && removal_sig[rm] == sig) return;
                        }
                        BallotProfile modified = e.profile;
                        for (std::size_t rm = 0; rm < removes.size(); ++rm) {
                            int left = removes[rm];
                            for (const Ranking& member : removal_members[rm]) {
                                if (left == 0) break;
                                int take = static_cast<int>(
                                    std::min<std::int64_t>(left, modified.count_of(member)));
                                if (take > 0) modified.remove(member, take);
                                left -= take;
                            }
                        }
                        for (std::size_t a = 0; a < adds.size(); ++a)
                            if (adds[a] > 0) modified.add(additions[a], adds[a]);
                        if (realizes_prefix(e, modified, prefix, rounding)) found = true;
                    });
            });
        if (found) return OracleResult::bound(VoteValue(k), true);
    }
    if (cap >= e.profile.total()) return OracleResult::infeasible();
    return OracleResult::bound(VoteValue(cap + 1), false);
}

/// Smallest manipulation (up to `cap`) that changes the winner set under the
/// deterministic count; nullopt when none exists within the cap.
inline std::optional<std::int64_t> brute_force_margin(const Election& e, int cap,
                                                      const TabulationOptions& opts = {}) {
    std::set<CandidateId> reported =
        e.reported_winners.empty() ? tabulate(e, opts).winners : e.reported_winners;
    std::vector<Ranking> additions = all_rankings(e.num_candidates);
    std::vector<Ranking> present;
    std::vector<std::int64_t> capacity;
    for (const auto& [ranking, count] : e.profile.types()) {
        present.push_back(ranking);
        capacity.push_back(count);
    }
    for (int k = 0; k <= cap; ++k) {
        bool found = false;
        detail::enumerate_multisets(
            static_cast<int>(present.size()), k, &capacity, [&](const std::vector<int>& removes) {
                if (found) return;
                detail::enumerate_multisets(
                    static_cast<int>(additions.size()), k, nullptr,
                    [&](const std::vector<int>& adds) {
                        if (found) return;
                        for (std::size_t a = 0; a < adds.size(); ++a)
                            if (adds[a] > 0)
                                for (std::size_t rm = 0; rm < removes.size(); ++rm)
                                    if (removes[rm] > 0 && additions[a] == present[rm]) return;
                        BallotProfile modified = e.profile;
                        for (std::size_t rm = 0; rm < removes.size(); ++rm)
                            if (removes[rm] > 0) modified.remove(present[rm], removes[rm]);
                        for (std::size_t a = 0; a < adds.size(); ++a)
                            if (adds[a] > 0) modified.add(additions[a], adds[a]);
                        Election probe = e;
                        probe.profile = std::move(modified);
                        if (tabulate(probe, opts).winners != reported) found = true;
                    });
            });
        if (found) return k;
    }
    return std::nullopt;
}

enum class OracleMode { Passthrough, Brute, External };

struct OracleConfig {
    OracleMode mode = OracleMode::Passthrough;
    std::string external_cmd;
    int brute_cap = 4;
    BruteLimits limits;
    double node_budget_s = 100.0;
    double leaf_budget_s = 150.0;
    double gap = 0.01;
    MinlpOptions minlp;
};

namespace detail {

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

// One-shot batch bridge: write the model, run the solver command on it, read
// a JSON reply {"status","primal","dual"} from its stdout.
inline OracleResult run_external(const std::string& cmd, const MinlpModel& model,
                                 const VoteValue& heuristic_lb, double budget_s, double gap) {
    char path[] = "/tmp/stv_model_XXXXXX";
    int fd = mkstemp(path);
    if (fd < 0) return OracleResult::timed_out();
    {
        std::ofstream out(path);
        out << export_model(model);
    }
    close(fd);
    std::string full = "timeout " + std::to_string(static_cast<long>(budget_s) + 1) + " " + cmd +
                       " " + shell_quote(path) + " --time-limit " +
                       std::to_string(static_cast<long>(budget_s)) + " --gap " +
                       std::to_string(gap) + " 2>/dev/null";
    std::string reply;
    if (FILE* pipe = popen(full.c_str(), "r")) {
        char buf[4096];
        std::size_t n;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) reply.append(buf, n);
        int rc = pclose(pipe);
        std::remove(path);
        if (rc != 0 && reply.empty()) return OracleResult::timed_out();
    } else {
        std::remove(path);
        return OracleResult::timed_out();
    }
    try {
        nlohmann::json j = nlohmann::json::parse(reply);
        std::string status = j.at("status").get<std::string>();
        if (status == "infeasible") return OracleResult::infeasible();
        std::optional<double> dual, primal;
        if (j.contains("dual") && !j["dual"].is_null()) dual = j["dual"].get<double>();
        if (j.contains("primal") && !j["primal"].is_null()) primal = j["primal"].get<double>();
        if (status == "timeout" && !dual) return OracleResult::timed_out();
        VoteValue bound = heuristic_lb;
        if (dual) {
            VoteValue dv(static_cast<std::int64_t>(std::ceil(*dual - 1e-9)));
            if (dv > bound) bound = dv;
        }
        bool exact = status == "optimal" && primal && dual &&
                     std::ceil(*primal - 1e-9) == std::ceil(*dual - 1e-9);
        return OracleResult::bound(bound, exact);
    } catch (...) {
        return OracleResult::timed_out();
    }
}

}  // namespace detail

/// The search's distance oracle. Passthrough returns the heuristic bound;
/// Brute settles small instances exactly (and degrades to the heuristic on
/// instances past its limits); External exports the relaxed program and asks
/// a solver command, falling back to the heuristic on timeout or failure.
inline OracleResult evaluate(const OracleConfig& cfg, const Election& e, const Order& prefix,
                             const RelaxedOrder& relaxed, const VoteValue& heuristic_lb,
                             std::int64_t rul, bool leaf, const Rounding& rounding = {}) {
    switch (cfg.mode) {
        case OracleMode::Passthrough:
            return OracleResult::bound(heuristic_lb, false);
        case OracleMode::Brute: {
            if (e.num_candidates > cfg.limits.max_candidates ||
                e.profile.total() > cfg.limits.max_ballots)
                return OracleResult::bound(heuristic_lb, false);
            int cap = cfg.brute_cap;
            if (rul > 0) cap = static_cast<int>(std::min<std::int64_t>(cap, rul - 1));
            cap = std::max(cap, 0);
            OracleResult r = brute_force_distance(e, prefix, cap, rounding, cfg.limits);
            if (r.status != OracleStatus::Bound) return r;
            if (r.value < heuristic_lb) return OracleResult::bound(heuristic_lb, false);
            return r;
        }
        case OracleMode::External: {
            MinlpModel model = build_minlp(e, relaxed, cfg.minlp);
            double budget = leaf ? cfg.leaf_budget_s : cfg.node_budget_s;
            OracleResult r =
                detail::run_external(cfg.external_cmd, model, heuristic_lb, budget, cfg.gap);
            return r;
        }
    }
    return OracleResult::bound(heuristic_lb, false);
}

}  // namespace stv
