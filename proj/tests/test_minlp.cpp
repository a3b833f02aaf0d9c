#include "stv/minlp.hpp"

#include "stv/tabulation.hpp"

#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace stv;
using namespace fixtures;

namespace {

RelaxedOrder singletons(const Order& order) {
    RelaxedOrder out;
    for (const auto& entry : order) out.push_back({{entry.candidate}, entry.action});
    return out;
}

double to_double(const VoteValue& v) {
    return numerator(v).convert_to<double>() / denominator(v).convert_to<double>();
}

// The variable assignment induced by an actual count that follows `prefix`
// with no manipulation: y = original class counts, tallies and quota flags
// straight off the round records, transfer values as recorded.
std::map<std::string, double> assignment_from_tabulation(const Election& e,
                                                         const TabulationResult& tab,
                                                         const Order& prefix,
                                                         const MinlpModel& model) {
    std::map<std::string, double> a;
    for (int s = 0; s < model.classes.num_classes(); ++s) {
        a["y_s" + std::to_string(s)] = static_cast<double>(model.classes.classes[s].count);
        a["p_s" + std::to_string(s)] = 0.0;
        a["m_s" + std::to_string(s)] = 0.0;
    }
    const int L = static_cast<int>(prefix.size());
    double quota = to_double(e.quota);
    for (int r = 1; r <= L; ++r) {
        const auto& rec = tab.rounds[r - 1];
        for (const auto& [c, tally] : rec.tallies) {
            std::string cid = "c" + std::to_string(c);
            a["v_" + cid + "_r" + std::to_string(r)] = to_double(tally);
            double q = to_double(tally) >= quota ? 1.0 : 0.0;
            a["q_" + cid + "_r" + std::to_string(r)] = q;
            a["nq_" + cid + "_r" + std::to_string(r)] = 1.0 - q;
        }
        if (r < L && rec.transfer_value)
            a["t_r" + std::to_string(r)] = to_double(*rec.transfer_value);
        else if (r < L && rec.action == RoundAction::Seated)
            a["t_r" + std::to_string(r)] = 0.0;
    }
    // Drop anything the model does not know about.
    std::map<std::string, double> filtered;
    for (const auto& v : model.vars) {
        auto it = a.find(v.name);
        filtered[v.name] = it == a.end() ? 0.0 : it->second;
    }
    return filtered;
}

}  // namespace

TEST_CASE("equivalence classes") {
    Election e = sample_election();

    SECTION("profile rankings with identical behaviour share a class") {
        // After seating C and E, [C,D] and [C,E,D]... differ (the latter can
        // skip E); but two rankings identical on the decided set collapse.
        RelaxedOrder pi = singletons(order({{C, 1}, {E, 1}}));
        EquivalenceClassTable t = equivalence_classes(e, pi);
        CHECK(t.class_of.at({2, 3}) != t.class_of.at({2, 4, 3}));
        // at most one class per distinct profile ranking
        CHECK(t.num_classes() <= static_cast<int>(e.profile.types().size()));
    }

    SECTION("rankings that differ only past an undecided candidate collapse") {
        RelaxedContext ctx = make_relaxed_context(5, singletons(order({{C, 1}})));
        CHECK(signature_of(ctx, {0, 1}) == signature_of(ctx, {0, 3}));   // rest at A
        CHECK(signature_of(ctx, {2, 0, 1}) == signature_of(ctx, {2, 0}));
        CHECK(signature_of(ctx, {2, 0}) != signature_of(ctx, {2, 1}));
    }

    SECTION("batched candidates merge in signatures") {
        Order pi = order({{A, 0}, {B, 0}, {D, 0}, {C, 1}});
        RelaxedOrder relaxed = relax(pi);  // {A,B} batch, D, C
        RelaxedContext ctx = make_relaxed_context(5, relaxed);
        CHECK(signature_of(ctx, {A, E}) == signature_of(ctx, {B, E}));
        CHECK(signature_of(ctx, {A, B, E}) == signature_of(ctx, {B, E}));
        CHECK(signature_of(ctx, {A, E}) != signature_of(ctx, {D, E}));
    }

    SECTION("full alphabet covers every behaviour class") {
        RelaxedOrder pi = singletons(order({{C, 1}}));
        EquivalenceClassTable t = equivalence_classes(e, pi, /*full_alphabet=*/true);
        // one decided unit, four undecided candidates:
        // rest-only x4, unit-only x1, unit+rest x4
        CHECK(t.num_classes() == 9);
    }
}

TEST_CASE("model structure for a single seating") {
    Election e = sample_election();
    MinlpModel model = build_minlp(e, singletons(order({{C, 1}})));

    SECTION("quota flag is forced for the seated candidate") {
        bool found = false;
        for (const auto& c : model.constraints)
            if (c.name == "seated_c2_r1") {
                found = true;
                CHECK(c.relation == "=");
                CHECK(c.rhs == 1.0);
            }
        CHECK(found);
    }

    SECTION("the unmanipulated profile is feasible") {
        TabulationResult tab = tabulate(e);
        auto a = assignment_from_tabulation(e, tab, order({{C, 1}}), model);
        AssignmentCheck check = check_assignment(model, a);
        INFO("violated: " << (check.violated.empty() ? "none" : check.violated.front()));
        CHECK(check.ok);
    }

    SECTION("breaking ballot conservation is flagged") {
        TabulationResult tab = tabulate(e);
        auto a = assignment_from_tabulation(e, tab, order({{C, 1}}), model);
        a["p_s0"] += 1.0;  // sum p != sum m
        AssignmentCheck check = check_assignment(model, a);
        CHECK_FALSE(check.ok);
        bool conservation_flagged = false;
        for (const auto& name : check.violated)
            if (name == "totals_fixed" || name.rfind("conserve_", 0) == 0)
                conservation_flagged = true;
        CHECK(conservation_flagged);
    }

    SECTION("a forced quota flag without the tally is flagged") {
        TabulationResult tab = tabulate(e);
        auto a = assignment_from_tabulation(e, tab, order({{C, 1}}), model);
        a["v_c2_r1"] = 100.0;  // below quota while q_c2_r1 = 1
        AssignmentCheck check = check_assignment(model, a);
        CHECK_FALSE(check.ok);
    }
}

TEST_CASE("real counts satisfy the model along the reported order") {
    Election e = sample_election();
    TabulationResult tab = tabulate(e);
    for (int len = 1; len <= 4; ++len) {
        Order prefix(tab.order.begin(), tab.order.begin() + len);
        MinlpModel model = build_minlp(e, singletons(prefix));
        auto a = assignment_from_tabulation(e, tab, prefix, model);
        AssignmentCheck check = check_assignment(model, a);
        INFO("prefix length " << len << ", first violation: "
                              << (check.violated.empty() ? "none" : check.violated.front()));
        CHECK(check.ok);
    }
}

TEST_CASE("eliminating the reported first seat needs the heuristic's ballots") {
    Election e = sample_election();
    // Eliminating C in round 1 requires C's 510 first preferences to fall to
    // the smallest tally; moving k ballots from [C,D] to [D] balances at 255.
    MinlpModel model = build_minlp(e, singletons(order({{C, 0}})));
    int s_cd = model.classes.class_of.at({2, 3});       // [C, D] -> class with rest D
    RelaxedContext ctx = make_relaxed_context(5, singletons(order({{C, 0}})));
    int s_d = model.classes.index_of.at(signature_of(ctx, {3}));  // bullet D

    auto assignment_for = [&](double k) {
        std::map<std::string, double> a;
        for (int s = 0; s < model.classes.num_classes(); ++s) {
            double n = static_cast<double>(model.classes.classes[s].count);
            a["y_s" + std::to_string(s)] = n;
            a["p_s" + std::to_string(s)] = 0.0;
            a["m_s" + std::to_string(s)] = 0.0;
        }
        a["y_s" + std::to_string(s_cd)] -= k;
        a["m_s" + std::to_string(s_cd)] += k;
        a["y_s" + std::to_string(s_d)] += k;
        a["p_s" + std::to_string(s_d)] += k;
        // first-preference tallies implied by y
        a["v_c0_r1"] = 250;
        a["v_c1_r1"] = 120;
        a["v_c2_r1"] = 510 - k;
        a["v_c3_r1"] = 0 + k;
        a["v_c4_r1"] = 350;
        return a;
    };

    CHECK_FALSE(check_assignment(model, assignment_for(100)).ok);
    CHECK_FALSE(check_assignment(model, assignment_for(254)).ok);
    CHECK(check_assignment(model, assignment_for(255)).ok);
}

TEST_CASE("model export round trip") {
    Election e = sample_election();

    SECTION("empty prefix gives the schema skeleton") {
        MinlpModel model = build_minlp(e, {});
        std::string text = export_model(model);
        MinlpModel back = parse_model(text);
        CHECK(back.same_program(model));
    }

    SECTION("full prefix with bilinear and conditional terms") {
        TabulationResult tab = tabulate(e);
        MinlpModel model = build_minlp(e, singletons(tab.order));
        MinlpModel back = parse_model(export_model(model));
        CHECK(back.same_program(model));
        CHECK(export_model(back) == export_model(model));

        bool has_bilinear = false, has_conditional = false;
        for (const auto& c : model.constraints)
            for (const auto& t : c.terms) {
                if (t.vars.size() == 2 && t.vars[0].rfind("t_r", 0) == 0) has_bilinear = true;
                if (t.vars.size() >= 3) has_conditional = true;
            }
        CHECK(has_bilinear);
        CHECK(has_conditional);
    }
}

TEST_CASE("relaxed orders only loosen the model") {
    // A five-elimination run realized by a real count: the trace that
    // satisfies the per-round semantics must also satisfy the batched model.
    BallotProfile p;
    p.add({0}, 1);
    p.add({1}, 2);
    p.add({2}, 3);
    p.add({3}, 4);
    p.add({4, 5}, 5);
    p.add({5}, 9);
    Election e = make_election(6, 1, std::move(p));  // quota 13
    TabulationResult tab = tabulate(e);
    REQUIRE(tab.order.size() >= 5);

    Order prefix(tab.order.begin(), tab.order.begin() + 5);
    RelaxedOrder relaxed = relax(prefix);
    REQUIRE(relaxed.size() < prefix.size());  // batching happened

    MinlpModel model = build_minlp(e, relaxed);
    // Build the induced assignment over the relaxed rounds: relaxed round k
    // spans flat rounds [start_k, end_k]; tallies are read at span starts and
    // super tallies sum their members.
    std::map<std::string, double> a;
    for (int s = 0; s < model.classes.num_classes(); ++s) {
        a["y_s" + std::to_string(s)] = static_cast<double>(model.classes.classes[s].count);
        a["p_s" + std::to_string(s)] = 0.0;
        a["m_s" + std::to_string(s)] = 0.0;
    }
    RelaxedContext ctx = make_relaxed_context(e.num_candidates, relaxed);
    int flat = 0;
    double quota = 13.0;
    for (int k = 0; k < ctx.rounds(); ++k) {
        const auto& rec = tab.rounds[flat];
        int round = k + 1;
        for (int u = 0; u < ctx.rounds(); ++u) {
            if (ctx.decision_round(u) < round) continue;
            double sum = 0.0;
            for (CandidateId c : ctx.relaxed[u].candidates)
                if (rec.tallies.count(c)) sum += to_double(rec.tallies.at(c));
            a["v_" + detail::unit_name(ctx, u) + "_r" + std::to_string(round)] = sum;
        }
        for (CandidateId c : ctx.undecided)
            a["v_c" + std::to_string(c) + "_r" + std::to_string(round)] =
                rec.tallies.count(c) ? to_double(rec.tallies.at(c)) : 0.0;
        for (CandidateId c = 0; c < e.num_candidates; ++c) {
            std::string q = "q_c" + std::to_string(c) + "_r" + std::to_string(round);
            if (rec.tallies.count(c)) {
                double val = to_double(rec.tallies.at(c)) >= quota ? 1.0 : 0.0;
                a[q] = val;
                a["n" + q] = 1.0 - val;
            }
        }
        if (ctx.relaxed[k].action == Action::Seated && rec.transfer_value)
            a["t_r" + std::to_string(round)] = to_double(*rec.transfer_value);
        flat += static_cast<int>(ctx.relaxed[k].candidates.size());
    }
    std::map<std::string, double> filtered;
    for (const auto& v : model.vars) {
        auto it = a.find(v.name);
        filtered[v.name] = it == a.end() ? 0.0 : it->second;
    }
    AssignmentCheck check = check_assignment(model, filtered);
    INFO("first violation: " << (check.violated.empty() ? "none" : check.violated.front()));
    CHECK(check.ok);
}
