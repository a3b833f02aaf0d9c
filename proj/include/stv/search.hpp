#pragma once

#include "stv/lower_bounds.hpp"
#include "stv/oracle.hpp"
#include "stv/orders.hpp"
#include "stv/tabulation.hpp"
#include "stv/upper_bounds.hpp"

#include <chrono>
#include <future>
#include <list>
#include <map>
#include <queue>
#include <vector>

namespace stv {

struct SearchConfig {
    bool legacy_tallies = false;
    bool displacement = true;          // the newer per-node heuristic
    bool dominance = true;             // structural-equivalence pruning
    OracleConfig oracle;
    TiePolicy tie = TiePolicy::ByIndex;
    Rounding rounding;
    std::optional<std::int64_t> external_ub;
    double time_limit_s = 0.0;         // 0 = unlimited
    int threads = 1;
    std::size_t seen_capacity = 1 << 20;
    bool keep_trace = true;
};

struct SearchStats {
    std::int64_t expanded = 0;
    std::int64_t generated = 0;
    std::int64_t pruned = 0;
    std::int64_t dominated = 0;
    std::int64_t skipped_reported = 0;
    std::int64_t infeasible = 0;
    std::int64_t oracle_calls = 0;
    std::int64_t leaves = 0;
};

struct TraceEntry {
    std::int64_t step;
    std::int64_t rul;
    std::int64_t rlb;
    std::size_t frontier_size;
};

struct MarginResult {
    std::int64_t lower_bound = 0;
    bool exact = false;
    UpperBoundReport upper_bounds;
    SearchStats stats;
    double runtime_s = 0.0;
    bool budget_exhausted = false;
    std::vector<TraceEntry> trace;
};

namespace detail {

struct SearchNode {
    std::int64_t lb = 0;
    Order prefix;
    bool leaf = false;
};

struct FrontierEntry {
    std::int64_t lb;
    int depth;
    std::int64_t seq;
    std::size_t slot;
};

struct FrontierOrder {
    bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
        // min-heap on (lb, deeper first, FIFO)
        if (a.lb != b.lb) return a.lb > b.lb;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.seq > b.seq;
    }
};

/// Bounded memo of canonical relaxed orders -> best lower bound seen. Older
/// entries fall off first; forgetting only weakens pruning.
class SeenTable {
  public:
    explicit SeenTable(std::size_t capacity) : capacity_(capacity) {}

    /// True when an order with the same relaxed structure and a bound <= lb
    /// was already recorded; otherwise records this one.
    bool dominated_or_record(const RelaxedOrder& key, std::int64_t lb) {
        auto it = map_.find(key);
        if (it != map_.end()) {
            if (it->second->second <= lb) return true;
            it->second->second = lb;
            lru_.splice(lru_.end(), lru_, it->second);
            return false;
        }
        if (map_.size() >= capacity_ && !lru_.empty()) {
            map_.erase(lru_.front().first);
            lru_.pop_front();
        }
        lru_.emplace_back(key, lb);
        map_[key] = std::prev(lru_.end());
        return false;
    }

  private:
    using Entry = std::pair<RelaxedOrder, std::int64_t>;
    std::size_t capacity_;
    std::list<Entry> lru_;
    std::map<RelaxedOrder, std::list<Entry>::iterator> map_;
};

struct ChildEval {
    Order prefix;
    bool leaf = false;
    bool skip_reported = false;
    bool infeasible = false;
    bool oracle_called = false;
    std::int64_t lb = 0;
};

/// Evaluates one child prefix: leaf detection, the reported-outcome skip,
/// heuristic bounds, pruning against the rul snapshot, then the oracle.
inline ChildEval evaluate_child(const Election& e, const SearchConfig& cfg, Order child,
                                std::int64_t parent_lb, std::int64_t rul_snapshot,
                                SearchStats* stats) {
    ChildEval out;
    out.prefix = std::move(child);

    std::set<CandidateId> seated_now = seated(out.prefix);
    std::set<CandidateId> remaining_now = remaining(e.num_candidates, out.prefix);
    std::set<CandidateId> effective_seated = seated_now;
    if (static_cast<int>(seated_now.size()) == e.seats) {
        out.leaf = true;
    } else if (e.seats - static_cast<int>(seated_now.size()) ==
               static_cast<int>(remaining_now.size())) {
        out.leaf = true;
        effective_seated.insert(remaining_now.begin(), remaining_now.end());
    }
    if (effective_seated == e.reported_winners) {
        out.skip_reported = true;
        return out;
    }

    BoundOptions bopts;
    bopts.legacy_tallies = cfg.legacy_tallies;
    bopts.displacement = cfg.displacement;
    bopts.rounding = cfg.rounding;
    HeuristicBound heuristic =
        combined_heuristic_lb(e, out.prefix, VoteValue(parent_lb), bopts);
    std::int64_t hlb = heuristic.ceil_value();
    out.lb = hlb;
    if (hlb >= rul_snapshot) return out;  // caller counts the prune

    out.oracle_called = true;
    if (stats) ++stats->oracle_calls;
    OracleResult oracle = evaluate(cfg.oracle, e, out.prefix, relax(out.prefix),
                                   VoteValue(hlb), rul_snapshot, out.leaf, cfg.rounding);
    switch (oracle.status) {
        case OracleStatus::Infeasible:
            out.infeasible = true;
            break;
        case OracleStatus::TimedOut:
            out.lb = hlb;
            break;
        case OracleStatus::Bound:
            out.lb = std::max(hlb, ceil_ballots(oracle.value));
            break;
    }
    return out;
}

}  // namespace detail

/// Expansion of a non-leaf prefix: one child per (remaining candidate,
/// seat/eliminate). With several threads the children are evaluated
/// concurrently against one rul snapshot and folded back in a fixed order,
/// so results do not depend on the thread count.
inline std::vector<detail::ChildEval> expand_and_evaluate(const Election& e,
                                                          const SearchConfig& cfg,
                                                          const Order& prefix,
                                                          std::int64_t parent_lb,
                                                          std::int64_t rul_snapshot,
                                                          SearchStats* stats = nullptr) {
    std::vector<Order> children;
    for (CandidateId c : remaining(e.num_candidates, prefix)) {
        children.push_back(append(prefix, c, Action::Eliminated));
        children.push_back(append(prefix, c, Action::Seated));
    }
    std::vector<detail::ChildEval> evals(children.size());
    if (cfg.threads > 1 && children.size() > 1) {
        std::vector<std::future<detail::ChildEval>> futures;
        futures.reserve(children.size());
        for (auto& child : children)
            futures.push_back(std::async(std::launch::async, [&, child]() {
                return detail::evaluate_child(e, cfg, child, parent_lb, rul_snapshot, nullptr);
            }));
        for (std::size_t i = 0; i < futures.size(); ++i) evals[i] = futures[i].get();
        if (stats)
            for (const auto& ev : evals)
                if (ev.oracle_called) ++stats->oracle_calls;
    } else {
        for (std::size_t i = 0; i < children.size(); ++i)
            evals[i] = detail::evaluate_child(e, cfg, children[i], parent_lb, rul_snapshot, stats);
    }
    return evals;
}

/// Best-first branch-and-bound over election-order prefixes. Returns a
/// certified lower bound on the margin of victory: the running upper limit
/// (rul) tracks the cheapest leaf bound seen, the running lower bound (rlb)
/// the cheapest open node, and the search stops when they meet or the
/// frontier empties.
inline MarginResult margin_stv(const Election& election, const SearchConfig& cfg = {}) {
    auto started = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    Election e = election;
    TabulationOptions topts{cfg.tie, cfg.rounding};
    TabulationResult reported = tabulate(e, topts);
    if (e.reported_winners.empty()) e.reported_winners = reported.winners;

    MarginResult result;
    result.upper_bounds = best_upper_bound(e, reported, cfg.external_ub, topts);
    std::int64_t rul = result.upper_bounds.best;
    std::int64_t rlb = 0;

    std::priority_queue<detail::FrontierEntry, std::vector<detail::FrontierEntry>,
                        detail::FrontierOrder>
        frontier;
    std::vector<detail::SearchNode> nodes;
    detail::SeenTable seen(cfg.seen_capacity);
    std::int64_t seq = 0;
    std::int64_t step = 0;

    auto trace_point = [&]() {
        if (cfg.keep_trace)
            result.trace.push_back({step, rul, rlb, frontier.size()});
    };

    auto admit_children = [&](const std::vector<detail::ChildEval>& children) {
        for (const auto& child : children) {
            ++result.stats.generated;
            if (child.skip_reported) {
                ++result.stats.skipped_reported;
                continue;
            }
            if (child.infeasible) {
                ++result.stats.infeasible;
                continue;
            }
            if (child.lb >= rul) {
                ++result.stats.pruned;
                continue;
            }
            if (child.leaf) {
                ++result.stats.leaves;
                rul = std::min(rul, child.lb);
                continue;
            }
            if (cfg.dominance &&
                seen.dominated_or_record(relax(child.prefix), child.lb)) {
                ++result.stats.dominated;
                continue;
            }
            nodes.push_back({child.lb, child.prefix, false});
            frontier.push({child.lb, static_cast<int>(child.prefix.size()), seq++,
                           nodes.size() - 1});
        }
    };

    admit_children(expand_and_evaluate(e, cfg, {}, 0, rul, &result.stats));
    rlb = std::max<std::int64_t>(
        0, std::min<std::int64_t>(rul, frontier.empty() ? rul : frontier.top().lb));
    trace_point();

    bool out_of_time = false;
    while (!frontier.empty() && rlb < rul) {
        if (cfg.time_limit_s > 0 && elapsed() > cfg.time_limit_s) {
            out_of_time = true;
            break;
        }
        detail::FrontierEntry top = frontier.top();
        frontier.pop();
        const detail::SearchNode node = nodes[top.slot];
        ++step;
        if (node.lb >= rul) {
            ++result.stats.pruned;
            continue;
        }
        ++result.stats.expanded;
        admit_children(expand_and_evaluate(e, cfg, node.prefix, node.lb, rul, &result.stats));
        std::int64_t frontier_min = frontier.empty() ? rul : std::min(rul, frontier.top().lb);
        rlb = std::max(rlb, std::min(rul, frontier_min));
        trace_point();
    }

    if (!out_of_time && frontier.empty()) rlb = rul;
    rlb = std::min(rlb, rul);
    result.lower_bound = rlb;
    result.exact = !out_of_time && rlb == result.upper_bounds.best;
    result.budget_exhausted = out_of_time;
    result.runtime_s = elapsed();
    trace_point();
    return result;
}

}  // namespace stv
