#pragma once

#include "stv/election.hpp"
#include "stv/orders.hpp"
#include "stv/search.hpp"
#include "stv/tabulation.hpp"
#include "stv/upper_bounds.hpp"

#include <json.hpp>

namespace stv {

using Json = nlohmann::ordered_json;

/// Rationals serialize as exact numerator/denominator plus a decimal string.
/// Components that fit a double-safe integer are emitted as numbers,
/// anything larger as strings.
inline Json to_json(const VoteValue& v) {
    Json j;
    auto emit = [](const BigInt& n) -> Json {
        if (n >= -((BigInt(1) << 53)) && n <= (BigInt(1) << 53))
            return n.convert_to<std::int64_t>();
        return n.str();
    };
    j["num"] = emit(numerator(v));
    j["den"] = emit(denominator(v));
    j["decimal"] = decimal_string(v, 6, /*trim=*/true);
    return j;
}

inline Json to_json(const Order& order) {
    Json j = Json::array();
    for (const auto& entry : order)
        j.push_back({{"candidate", entry.candidate},
                     {"action", entry.action == Action::Seated ? "seat" : "elim"}});
    return j;
}

inline Json to_json(const RelaxedOrder& order) {
    Json j = Json::array();
    for (const auto& entry : order)
        j.push_back({{"candidates", entry.candidates},
                     {"action", entry.action == Action::Seated ? "seat" : "elim"}});
    return j;
}

inline Order order_from_json(const Json& j) {
    Order out;
    for (const auto& entry : j) {
        std::string action = entry.at("action").get<std::string>();
        if (action != "seat" && action != "elim")
            throw std::invalid_argument("order action must be 'seat' or 'elim'");
        out.push_back({entry.at("candidate").get<CandidateId>(),
                       action == "seat" ? Action::Seated : Action::Eliminated});
    }
    return out;
}

inline Json to_json(const Election& e, const TabulationResult& tab) {
    Json j;
    j["quota"] = to_json(e.quota);
    j["rounds"] = Json::array();
    for (const auto& rec : tab.rounds) {
        Json r;
        r["round"] = rec.round;
        switch (rec.action) {
            case RoundAction::Seated: r["action"] = "seated"; break;
            case RoundAction::Eliminated: r["action"] = "eliminated"; break;
            case RoundAction::AutoSeatedAll: r["action"] = "seated_all_remaining"; break;
        }
        if (rec.candidates.size() == 1) r["candidate"] = rec.candidates.front();
        else r["candidates"] = rec.candidates;
        if (rec.transfer_value) r["transfer_value"] = to_json(*rec.transfer_value);
        Json tallies;
        for (const auto& [c, t] : rec.tallies) tallies[e.name_of(c)] = to_json(t);
        r["tallies"] = std::move(tallies);
        if (rec.tie_break) r["tie_break"] = true;
        j["rounds"].push_back(std::move(r));
    }
    j["winners"] = Json::array();
    for (CandidateId c : tab.winners) j["winners"].push_back(c);
    j["order"] = to_json(tab.order);
    j["exhausted"] = to_json(tab.exhausted_total);
    return j;
}

inline Json to_json(const UpperBoundReport& r) {
    Json j;
    j["weub"] = r.weub ? to_json(*r.weub) : Json(nullptr);
    j["simple_stv"] = r.simple_stv ? to_json(*r.simple_stv) : Json(nullptr);
    j["external"] = r.external ? Json(*r.external) : Json(nullptr);
    j["best"] = r.best;
    return j;
}

inline Json to_json(const MarginResult& r) {
    Json j;
    j["lower_bound"] = r.lower_bound;
    j["exact"] = r.exact;
    j["upper_bounds"] = to_json(r.upper_bounds);
    j["stats"] = {{"expanded", r.stats.expanded},
                  {"generated", r.stats.generated},
                  {"pruned", r.stats.pruned},
                  {"dominated", r.stats.dominated},
                  {"skipped_reported", r.stats.skipped_reported},
                  {"infeasible", r.stats.infeasible},
                  {"oracle_calls", r.stats.oracle_calls},
                  {"leaves", r.stats.leaves}};
    j["runtime_s"] = r.runtime_s;
    j["budget_exhausted"] = r.budget_exhausted;
    if (!r.trace.empty()) {
        Json trace = Json::array();
        for (const auto& t : r.trace)
            trace.push_back({{"step", t.step},
                             {"rul", t.rul},
                             {"rlb", t.rlb},
                             {"frontier", t.frontier_size}});
        j["trace"] = std::move(trace);
    }
    return j;
}

}  // namespace stv
