#pragma once

#include "stv/election.hpp"
#include "stv/orders.hpp"

#include <map>
#include <optional>
#include <vector>

namespace stv {

/// Candidate-to-unit view of a relaxed prefix: every relaxed entry (a single
/// candidate or a batch of eliminations) is one decided unit; everyone else
/// is undecided. Unit k is decided in relaxed round k+1.
struct RelaxedContext {
    RelaxedOrder relaxed;
    int num_candidates = 0;
    std::vector<int> unit_of;             // candidate -> relaxed entry index, -1 undecided
    std::vector<CandidateId> undecided;   // sorted

    int rounds() const { return static_cast<int>(relaxed.size()); }
    bool unit_seated(int unit) const { return relaxed[unit].action == Action::Seated; }
    int decision_round(int unit) const { return unit + 1; }
};

inline RelaxedContext make_relaxed_context(int num_candidates, RelaxedOrder relaxed) {
    RelaxedContext ctx;
    ctx.num_candidates = num_candidates;
    ctx.unit_of.assign(num_candidates, -1);
    for (std::size_t k = 0; k < relaxed.size(); ++k)
        for (CandidateId c : relaxed[k].candidates) ctx.unit_of[c] = static_cast<int>(k);
    for (CandidateId c = 0; c < num_candidates; ++c)
        if (ctx.unit_of[c] < 0) ctx.undecided.push_back(c);
    ctx.relaxed = std::move(relaxed);
    return ctx;
}

/// What a ranking looks like after merging batched candidates and cutting at
/// the first undecided candidate. Two rankings with the same signature pass
/// through the same piles with the same accumulated value structure in every
/// count consistent with the prefix, so they are interchangeable.
struct ClassSignature {
    std::vector<int> decided_seq;        // unit indices, first occurrence order
    std::optional<CandidateId> rest;     // first undecided candidate, if any

    auto operator<=>(const ClassSignature&) const = default;
};

inline ClassSignature signature_of(const RelaxedContext& ctx, const Ranking& ranking) {
    ClassSignature sig;
    for (CandidateId c : ranking) {
        int u = ctx.unit_of[c];
        if (u < 0) {
            sig.rest = c;
            break;  // the ballot can never leave an undecided candidate
        }
        if (std::find(sig.decided_seq.begin(), sig.decided_seq.end(), u) == sig.decided_seq.end())
            sig.decided_seq.push_back(u);
    }
    return sig;
}

struct BallotClassInfo {
    ClassSignature sig;
    Ranking representative;
    std::int64_t count = 0;  // ballots of the class in the profile
};

struct EquivalenceClassTable {
    std::vector<BallotClassInfo> classes;   // deterministic order
    std::map<Ranking, int> class_of;        // profile ranking -> class index
    std::map<ClassSignature, int> index_of;

    int num_classes() const { return static_cast<int>(classes.size()); }
};

namespace detail {

inline Ranking representative_of(const RelaxedContext& ctx, const ClassSignature& sig) {
    Ranking r;
    for (int u : sig.decided_seq) r.push_back(ctx.relaxed[u].candidates.front());
    if (sig.rest) r.push_back(*sig.rest);
    return r;
}

inline void enumerate_signatures(const RelaxedContext& ctx, std::vector<int>& seq,
                                 std::vector<bool>& used, std::vector<ClassSignature>& out) {
    if (!seq.empty()) out.push_back({seq, std::nullopt});
    for (CandidateId c : ctx.undecided) out.push_back({seq, c});
    for (int u = 0; u < ctx.rounds(); ++u) {
        if (used[u]) continue;
        used[u] = true;
        seq.push_back(u);
        enumerate_signatures(ctx, seq, used, out);
        seq.pop_back();
        used[u] = false;
    }
}

}  // namespace detail

/// Partition the profile's rankings (and, when `full_alphabet` is set, the
/// whole space of possible ballot types) into equivalence classes under the
/// relaxed prefix.
inline EquivalenceClassTable equivalence_classes(const Election& e, const RelaxedContext& ctx,
                                                 bool full_alphabet = false) {
    EquivalenceClassTable table;
    auto class_index = [&](const ClassSignature& sig) {
        auto it = table.index_of.find(sig);
        if (it != table.index_of.end()) return it->second;
        int idx = table.num_classes();
        table.index_of.emplace(sig, idx);
        table.classes.push_back({sig, detail::representative_of(ctx, sig), 0});
        return idx;
    };

    if (full_alphabet) {
        std::vector<ClassSignature> sigs;
        std::vector<int> seq;
        std::vector<bool> used(ctx.rounds(), false);
        detail::enumerate_signatures(ctx, seq, used, sigs);
        std::sort(sigs.begin(), sigs.end());
        for (const auto& sig : sigs)
            if (!sig.decided_seq.empty() || sig.rest) class_index(sig);
    }
    for (const auto& [ranking, count] : e.profile.types()) {
        int idx = class_index(signature_of(ctx, ranking));
        table.classes[idx].count += count;
        table.class_of[ranking] = idx;
    }
    return table;
}

inline EquivalenceClassTable equivalence_classes(const Election& e, const RelaxedOrder& prefix,
                                                 bool full_alphabet = false) {
    return equivalence_classes(e, make_relaxed_context(e.num_candidates, prefix), full_alphabet);
}

}  // namespace stv
