#pragma once

#include "stv/equivalence.hpp"
#include "stv/orders.hpp"
#include "stv/rational.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stv {

/// Solver-agnostic nonlinear program. Terms are multilinear monomials, which
/// covers both the transfer-value products t_r * v_{c,r} and the conditional
/// ballot-flow products y_s * t_.. * q_.. used by the tally recurrence.
struct ModelVar {
    std::string name;
    bool binary = false;
    double lb = 0.0;
    double ub = 0.0;
    bool operator==(const ModelVar&) const = default;
};

struct Monomial {
    double coef = 0.0;
    std::vector<std::string> vars;
    bool operator==(const Monomial&) const = default;
};

struct ModelConstraint {
    std::string name;
    std::string relation;  // "<=", ">=", "="
    double rhs = 0.0;
    std::vector<Monomial> terms;
    bool operator==(const ModelConstraint&) const = default;
};

struct MinlpModel {
    std::vector<ModelVar> vars;
    std::vector<std::pair<std::string, double>> objective;  // min sense
    std::vector<ModelConstraint> constraints;

    // Builder metadata (not exported): class table used for the y/p/m vars.
    EquivalenceClassTable classes;

    bool same_program(const MinlpModel& o) const {
        return vars == o.vars && objective == o.objective && constraints == o.constraints;
    }
};

struct MinlpOptions {
    double epsilon_scale = 1e-6;  // epsilon = scale * quota
    bool full_alphabet = true;    // include manipulation-only ballot classes
};

namespace detail {

struct ModelBuilder {
    MinlpModel model;
    std::map<std::string, int> var_index;

    int var(const std::string& name, bool binary, double lb, double ub) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        int idx = static_cast<int>(model.vars.size());
        model.vars.push_back({name, binary, lb, ub});
        var_index.emplace(name, idx);
        return idx;
    }
    bool has(const std::string& name) const { return var_index.count(name) > 0; }
};

inline std::string unit_name(const RelaxedContext& ctx, int unit) {
    if (ctx.relaxed[unit].candidates.size() == 1)
        return "c" + std::to_string(ctx.relaxed[unit].candidates.front());
    return "g" + std::to_string(unit);
}

// Name of a standing "place" at some round: a decided unit or an undecided
// candidate.
struct Place {
    bool is_unit = false;
    int unit = -1;
    CandidateId candidate = -1;

    static Place of_unit(int u) { return {true, u, -1}; }
    static Place of_candidate(CandidateId c) { return {false, -1, c}; }
    bool operator==(const Place&) const = default;
    bool operator<(const Place& o) const {
        return std::tie(is_unit, unit, candidate) < std::tie(o.is_unit, o.unit, o.candidate);
    }
};

inline std::string place_name(const RelaxedContext& ctx, const Place& p) {
    return p.is_unit ? unit_name(ctx, p.unit) : "c" + std::to_string(p.candidate);
}

inline bool standing_at(const RelaxedContext& ctx, const Place& p, int round) {
    return !p.is_unit || ctx.decision_round(p.unit) >= round;
}

// One conditional flow of a ballot class into a place during a round.
struct Inflow {
    int class_idx;
    std::vector<int> transfer_rounds;    // t_r factors picked up so far
    std::vector<std::string> caveats;    // q/nq binaries that must all be 1
};

}  // namespace detail

/// Per-(place, round) list of conditional ballot-class arrivals. Entry at
/// round r feeds the tally at the start of round r+1.
using FTable = std::map<std::pair<std::string, int>, std::vector<detail::Inflow>>;

namespace detail {

inline bool relaxed_auto_seat(const RelaxedContext& ctx, int num_candidates, int seats,
                              int round) {
    int seated_before = 0, decided_before = 0;
    for (int k = 0; k + 1 < round; ++k) {
        decided_before += static_cast<int>(ctx.relaxed[k].candidates.size());
        if (ctx.relaxed[k].action == Action::Seated)
            seated_before += static_cast<int>(ctx.relaxed[k].candidates.size());
    }
    return seats - seated_before == num_candidates - decided_before;
}

}  // namespace detail

/// Builds the minimal-manipulation program for a relaxed prefix: minimise the
/// ballots whose type changes subject to ballot conservation, quota
/// behaviour of seated candidates, tally-minimality of (unbatched)
/// eliminated candidates, and the round-by-round tally recurrence driven by
/// the conditional transfer paths of each ballot class. Batched eliminations
/// drop their minimality constraints, which is what makes the relaxed
/// program a sound lower bound. The FTable is returned via `f_out` when
/// non-null.
inline MinlpModel build_minlp(const Election& e, const RelaxedOrder& prefix,
                              const MinlpOptions& opts = {}, FTable* f_out = nullptr) {
    using namespace detail;
    RelaxedContext ctx = make_relaxed_context(e.num_candidates, prefix);
    EquivalenceClassTable classes = equivalence_classes(e, ctx, opts.full_alphabet);
    const int L = ctx.rounds();
    const double total = static_cast<double>(e.profile.total());
    const double quota = numerator(e.quota).convert_to<double>() /
                         denominator(e.quota).convert_to<double>();
    const double eps = opts.epsilon_scale * quota;

    ModelBuilder b;
    b.model.classes = classes;

    // Ballot-class variables and conservation.
    for (int s = 0; s < classes.num_classes(); ++s) {
        std::string sid = std::to_string(s);
        b.var("y_s" + sid, false, 0.0, total);
        b.var("p_s" + sid, false, 0.0, total);
        b.var("m_s" + sid, false, 0.0, total);
        b.model.objective.push_back({"p_s" + sid, 1.0});
        ModelConstraint cons;
        cons.name = "conserve_s" + sid;
        cons.relation = "=";
        cons.rhs = static_cast<double>(classes.classes[s].count);
        cons.terms = {{1.0, {"y_s" + sid}}, {-1.0, {"p_s" + sid}}, {1.0, {"m_s" + sid}}};
        b.model.constraints.push_back(std::move(cons));
    }
    {
        ModelConstraint cons;
        cons.name = "totals_fixed";
        cons.relation = "=";
        cons.rhs = 0.0;
        for (int s = 0; s < classes.num_classes(); ++s) {
            cons.terms.push_back({1.0, {"p_s" + std::to_string(s)}});
            cons.terms.push_back({-1.0, {"m_s" + std::to_string(s)}});
        }
        b.model.constraints.push_back(std::move(cons));
    }

    // Standing places per round.
    std::vector<Place> places;
    for (int u = 0; u < L; ++u) places.push_back(Place::of_unit(u));
    for (CandidateId c : ctx.undecided) places.push_back(Place::of_candidate(c));
    auto v_name = [&](const Place& p, int r) {
        return "v_" + place_name(ctx, p) + "_r" + std::to_string(r);
    };
    for (const Place& p : places)
        for (int r = 1; r <= L; ++r)
            if (standing_at(ctx, p, r)) b.var(v_name(p, r), false, 0.0, total);

    // Transfer-value variables for seatings before the final round.
    for (int r = 1; r < L; ++r)
        if (ctx.relaxed[r - 1].action == Action::Seated)
            b.var("t_r" + std::to_string(r), false, 0.0, 1.0);

    // Quota binaries with their linking constraints, created on demand.
    auto quota_pair = [&](CandidateId c, int r) {
        std::string cid = "c" + std::to_string(c);
        std::string rq = "q_" + cid + "_r" + std::to_string(r);
        std::string rn = "nq_" + cid + "_r" + std::to_string(r);
        if (!b.has(rq)) {
            b.var(rq, true, 0.0, 1.0);
            b.var(rn, true, 0.0, 1.0);
            std::string v = "v_" + cid + "_r" + std::to_string(r);
            ModelConstraint lo;  // v >= Q q
            lo.name = "qlink_lo_" + rq;
            lo.relation = ">=";
            lo.rhs = 0.0;
            lo.terms = {{1.0, {v}}, {-quota, {rq}}};
            b.model.constraints.push_back(std::move(lo));
            ModelConstraint hi;  // v <= (1-q)(Q-eps) + |B| q
            hi.name = "qlink_hi_" + rq;
            hi.relation = "<=";
            hi.rhs = quota - eps;
            hi.terms = {{1.0, {v}}, {quota - eps - total, {rq}}};
            b.model.constraints.push_back(std::move(hi));
            ModelConstraint link;  // nq = 1 - q
            link.name = "qcomp_" + rq;
            link.relation = "=";
            link.rhs = 1.0;
            link.terms = {{1.0, {rq}}, {1.0, {rn}}};
            b.model.constraints.push_back(std::move(link));
        }
        return std::pair<std::string, std::string>(rq, rn);
    };

    // Ballot flow simulation per class; fills the f table.
    FTable ftable;
    for (int s = 0; s < classes.num_classes(); ++s) {
        const ClassSignature& sig = classes.classes[s].sig;
        struct Branch {
            int pos;  // index into sig.decided_seq; == size() means at rest
            std::vector<int> tvars;
            std::vector<std::string> caveats;
        };
        std::vector<Branch> branches;
        if (!sig.decided_seq.empty())
            branches.push_back({0, {}, {}});
        else if (sig.rest)
            branches.push_back({static_cast<int>(sig.decided_seq.size()), {}, {}});

        for (int j = 1; j < L; ++j) {
            const int event_unit = j - 1;
            const bool seated_event = ctx.relaxed[event_unit].action == Action::Seated;
            std::vector<Branch> next;
            for (Branch& br : branches) {
                bool at_event = br.pos < static_cast<int>(sig.decided_seq.size()) &&
                                sig.decided_seq[br.pos] == event_unit;
                if (!at_event) {
                    next.push_back(std::move(br));
                    continue;
                }
                // Walk down the remainder of the signature.
                std::vector<std::string> caveats = br.caveats;
                std::vector<int> tvars = br.tvars;
                if (seated_event) tvars.push_back(j);
                bool landed_somewhere = false;
                for (int k = br.pos + 1;
                     k <= static_cast<int>(sig.decided_seq.size()) && !landed_somewhere; ++k) {
                    bool is_rest = k == static_cast<int>(sig.decided_seq.size());
                    if (is_rest && !sig.rest) break;
                    Place target = is_rest ? Place::of_candidate(*sig.rest)
                                           : Place::of_unit(sig.decided_seq[k]);
                    if (!is_rest && ctx.decision_round(sig.decided_seq[k]) <= j)
                        continue;  // already decided and gone
                    bool maybe_quota =
                        seated_event &&
                        (is_rest || ctx.unit_seated(sig.decided_seq[k]));
                    if (maybe_quota) {
                        CandidateId cand = is_rest
                                               ? *sig.rest
                                               : ctx.relaxed[sig.decided_seq[k]].candidates.front();
                        auto [q, nq] = quota_pair(cand, j);
                        // Land here if the candidate lacked a quota...
                        Branch land{k, tvars, caveats};
                        land.caveats.push_back(nq);
                        ftable[{place_name(ctx, target), j}].push_back(
                            {s, land.tvars, land.caveats});
                        next.push_back(std::move(land));
                        // ...otherwise skip over them and keep walking.
                        caveats.push_back(q);
                        continue;
                    }
                    // Certain landing: elimination transfer, or a place that
                    // provably lacks a quota (eliminated later).
                    Branch land{k, tvars, caveats};
                    ftable[{place_name(ctx, target), j}].push_back({s, land.tvars, land.caveats});
                    next.push_back(std::move(land));
                    landed_somewhere = true;
                }
                // Falling off the end exhausts the ballot: no further flow.
            }
            branches = std::move(next);
        }
    }

    // First preferences and the tally recurrence.
    for (const Place& p : places) {
        std::string pname = place_name(ctx, p);
        {
            ModelConstraint cons;
            cons.name = "firstpref_" + pname;
            cons.relation = "=";
            cons.rhs = 0.0;
            cons.terms.push_back({1.0, {v_name(p, 1)}});
            for (int s = 0; s < classes.num_classes(); ++s) {
                const ClassSignature& sig = classes.classes[s].sig;
                Place first = sig.decided_seq.empty() ? Place::of_candidate(*sig.rest)
                                                      : Place::of_unit(sig.decided_seq[0]);
                if (first == p) cons.terms.push_back({-1.0, {"y_s" + std::to_string(s)}});
            }
            b.model.constraints.push_back(std::move(cons));
        }
        for (int r = 2; r <= L; ++r) {
            if (!standing_at(ctx, p, r)) continue;
            ModelConstraint cons;
            cons.name = "tally_" + pname + "_r" + std::to_string(r);
            cons.relation = "=";
            cons.rhs = 0.0;
            cons.terms.push_back({1.0, {v_name(p, r)}});
            cons.terms.push_back({-1.0, {v_name(p, r - 1)}});
            auto it = ftable.find({pname, r - 1});
            if (it != ftable.end()) {
                for (const auto& flow : it->second) {
                    Monomial m{-1.0, {"y_s" + std::to_string(flow.class_idx)}};
                    for (int tr : flow.transfer_rounds) m.vars.push_back("t_r" + std::to_string(tr));
                    for (const auto& cav : flow.caveats) m.vars.push_back(cav);
                    cons.terms.push_back(std::move(m));
                }
            }
            b.model.constraints.push_back(std::move(cons));
        }
    }

    // Event constraints per relaxed round.
    for (int r = 1; r <= L; ++r) {
        const RelaxedEntry& entry = ctx.relaxed[r - 1];
        if (entry.action == Action::Seated) {
            if (relaxed_auto_seat(ctx, e.num_candidates, e.seats, r)) continue;
            CandidateId c = entry.candidates.front();
            for (int rr = 1; rr <= r; ++rr) quota_pair(c, rr);
            ModelConstraint seat;
            seat.name = "seated_c" + std::to_string(c) + "_r" + std::to_string(r);
            seat.relation = "=";
            seat.rhs = 1.0;
            seat.terms = {{1.0, {"q_c" + std::to_string(c) + "_r" + std::to_string(r)}}};
            b.model.constraints.push_back(std::move(seat));
            if (r < L) {
                // t_r v = v - Q
                std::string v = v_name(Place::of_unit(r - 1), r);
                ModelConstraint tv;
                tv.name = "transfer_r" + std::to_string(r);
                tv.relation = "=";
                tv.rhs = -quota;
                tv.terms = {{1.0, {"t_r" + std::to_string(r), v}}, {-1.0, {v}}};
                b.model.constraints.push_back(std::move(tv));
            }
        } else if (entry.candidates.size() == 1) {
            // An unbatched elimination must hold the smallest standing tally
            // and sit below the quota. Batched eliminations drop both.
            std::string v = v_name(Place::of_unit(r - 1), r);
            ModelConstraint cap;
            cap.name = "elim_cap_" + place_name(ctx, Place::of_unit(r - 1)) + "_r" +
                       std::to_string(r);
            cap.relation = "<=";
            cap.rhs = quota - eps;
            cap.terms = {{1.0, {v}}};
            b.model.constraints.push_back(std::move(cap));
            for (const Place& p : places) {
                if (p == Place::of_unit(r - 1) || !standing_at(ctx, p, r)) continue;
                ModelConstraint low;
                low.name = "elim_low_" + place_name(ctx, Place::of_unit(r - 1)) + "_vs_" +
                           place_name(ctx, p) + "_r" + std::to_string(r);
                low.relation = "<=";
                low.rhs = 0.0;
                low.terms = {{1.0, {v}}, {-1.0, {v_name(p, r)}}};
                b.model.constraints.push_back(std::move(low));
            }
        }
    }

    if (f_out) *f_out = std::move(ftable);
    return b.model;
}

/// Deterministic JSON encoding of a model; stable field order.
inline std::string export_model(const MinlpModel& model) {
    nlohmann::ordered_json j;
    j["vars"] = nlohmann::ordered_json::array();
    for (const auto& v : model.vars) {
        j["vars"].push_back({{"name", v.name},
                             {"kind", v.binary ? "bin" : "cont"},
                             {"lb", v.lb},
                             {"ub", v.ub}});
    }
    j["objective"] = {{"sense", "min"}, {"terms", nlohmann::ordered_json::array()}};
    for (const auto& [var, coef] : model.objective)
        j["objective"]["terms"].push_back({{"var", var}, {"coef", coef}});
    j["constraints"] = nlohmann::ordered_json::array();
    for (const auto& c : model.constraints) {
        nlohmann::ordered_json terms = nlohmann::ordered_json::array();
        for (const auto& t : c.terms) terms.push_back({{"coef", t.coef}, {"vars", t.vars}});
        j["constraints"].push_back({{"name", c.name},
                                    {"relation", c.relation},
                                    {"rhs", c.rhs},
                                    {"terms", std::move(terms)}});
    }
    return j.dump(2) + "\n";
}

inline MinlpModel parse_model(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MinlpModel m;
    for (const auto& v : j.at("vars"))
        m.vars.push_back({v.at("name").get<std::string>(), v.at("kind") == "bin",
                          v.at("lb").get<double>(), v.at("ub").get<double>()});
    for (const auto& t : j.at("objective").at("terms"))
        m.objective.push_back({t.at("var").get<std::string>(), t.at("coef").get<double>()});
    for (const auto& c : j.at("constraints")) {
        ModelConstraint out;
        out.name = c.at("name").get<std::string>();
        out.relation = c.at("relation").get<std::string>();
        out.rhs = c.at("rhs").get<double>();
        for (const auto& t : c.at("terms")) {
            Monomial mono;
            mono.coef = t.at("coef").get<double>();
            for (const auto& v : t.at("vars")) mono.vars.push_back(v.get<std::string>());
            out.terms.push_back(std::move(mono));
        }
        m.constraints.push_back(std::move(out));
    }
    return m;
}

struct AssignmentCheck {
    bool ok = true;
    std::vector<std::string> violated;
};

/// Evaluates every constraint of the model against a variable assignment.
inline AssignmentCheck check_assignment(const MinlpModel& model,
                                        const std::map<std::string, double>& assignment,
                                        double tolerance = 1e-6) {
    AssignmentCheck out;
    for (const auto& v : model.vars) {
        auto it = assignment.find(v.name);
        if (it == assignment.end()) {
            out.ok = false;
            out.violated.push_back("missing:" + v.name);
            continue;
        }
        if (it->second < v.lb - tolerance || it->second > v.ub + tolerance) {
            out.ok = false;
            out.violated.push_back("bounds:" + v.name);
        }
    }
    for (const auto& c : model.constraints) {
        double sum = 0.0;
        bool defined = true;
        for (const auto& t : c.terms) {
            double prod = t.coef;
            for (const auto& var : t.vars) {
                auto it = assignment.find(var);
                if (it == assignment.end()) {
                    defined = false;
                    break;
                }
                prod *= it->second;
            }
            if (!defined) break;
            sum += prod;
        }
        bool holds = defined;
        if (defined) {
            if (c.relation == "<=") holds = sum <= c.rhs + tolerance;
            else if (c.relation == ">=") holds = sum >= c.rhs - tolerance;
            else holds = std::abs(sum - c.rhs) <= tolerance;
        }
        if (!holds) {
            out.ok = false;
            out.violated.push_back(c.name);
        }
    }
    return out;
}

}  // namespace stv
