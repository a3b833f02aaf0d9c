#pragma once

#include "stv/blt.hpp"
#include "stv/search.hpp"

#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace stv {

/// The benchmark harness's method matrix: each named variant fixes the
/// tally style, the displacement heuristic, the dominance rule and whether
/// an externally supplied upper bound participates.
struct VariantConfig {
    std::string name;
    bool legacy_tallies = false;
    bool displacement = false;
    bool dominance = false;
    bool external_ub_enabled = false;
};

inline const std::vector<VariantConfig>& standard_variants() {
    static const std::vector<VariantConfig> variants = {
        {"Baseline", true, false, false, false},
        {"Baseline+U", true, false, false, true},
        {"New", false, false, false, true},
        {"New+LSE", false, false, true, true},
        {"New+DLB", false, true, false, true},
        {"New+Both", false, true, true, true},
    };
    return variants;
}

inline const VariantConfig* find_variant(const std::string& name) {
    for (const auto& v : standard_variants())
        if (v.name == name) return &v;
    return nullptr;
}

inline SearchConfig apply_variant(SearchConfig base, const VariantConfig& variant) {
    base.legacy_tallies = variant.legacy_tallies;
    base.displacement = variant.displacement;
    base.dominance = variant.dominance;
    if (!variant.external_ub_enabled) base.external_ub.reset();
    return base;
}

struct RunReport {
    std::string contest;
    std::string variant;
    std::int64_t lower_bound_min = 0;
    std::int64_t lower_bound_max = 0;
    std::int64_t upper_bound = 0;
    double mean_runtime_s = 0.0;
    bool exact = false;
    std::string error;
};

/// Runs every (contest, variant) pair `repetitions` times; reports the mean
/// runtime and the range of lower bounds found. Per-contest failures are
/// isolated into their report rows.
inline std::vector<RunReport> run_matrix(const std::vector<std::string>& contest_files,
                                         const std::vector<VariantConfig>& variants,
                                         int repetitions, const SearchConfig& base) {
    std::vector<RunReport> reports;
    for (const auto& file : contest_files) {
        Election e;
        bool parsed = false;
        std::string parse_error;
        try {
            std::ifstream in(file);
            if (!in) throw std::runtime_error("cannot open " + file);
            e = parse_blt(in);
            parsed = true;
        } catch (const std::exception& ex) {
            parse_error = ex.what();
        }
        for (const auto& variant : variants) {
            RunReport report;
            report.contest = file;
            report.variant = variant.name;
            if (!parsed) {
                report.error = parse_error;
                reports.push_back(std::move(report));
                continue;
            }
            try {
                SearchConfig cfg = apply_variant(base, variant);
                std::vector<double> runtimes;
                std::int64_t lo = 0, hi = 0;
                bool first = true;
                for (int rep = 0; rep < std::max(1, repetitions); ++rep) {
                    MarginResult r = margin_stv(e, cfg);
                    runtimes.push_back(r.runtime_s);
                    if (first || r.lower_bound < lo) lo = r.lower_bound;
                    if (first || r.lower_bound > hi) hi = r.lower_bound;
                    report.upper_bound = r.upper_bounds.best;
                    report.exact = r.exact;
                    first = false;
                }
                report.lower_bound_min = lo;
                report.lower_bound_max = hi;
                report.mean_runtime_s =
                    std::accumulate(runtimes.begin(), runtimes.end(), 0.0) / runtimes.size();
            } catch (const std::exception& ex) {
                report.error = ex.what();
            }
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

inline const char* kRunReportColumns[] = {"contest",     "variant", "lower_bound_min",
                                          "lower_bound_max", "upper_bound", "mean_runtime_s",
                                          "exact",       "error"};

inline std::string reports_to_csv(const std::vector<RunReport>& reports) {
    std::ostringstream out;
    bool first = true;
    for (const char* col : kRunReportColumns) {
        if (!first) out << ",";
        out << col;
        first = false;
    }
    out << "\n";
    for (const auto& r : reports) {
        out << r.contest << "," << r.variant << "," << r.lower_bound_min << ","
            << r.lower_bound_max << "," << r.upper_bound << "," << r.mean_runtime_s << ","
            << (r.exact ? "true" : "false") << "," << r.error << "\n";
    }
    return out.str();
}

inline nlohmann::ordered_json reports_to_json(const std::vector<RunReport>& reports) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        j.push_back({{"contest", r.contest},
                     {"variant", r.variant},
                     {"lower_bound_min", r.lower_bound_min},
                     {"lower_bound_max", r.lower_bound_max},
                     {"upper_bound", r.upper_bound},
                     {"mean_runtime_s", r.mean_runtime_s},
                     {"exact", r.exact},
                     {"error", r.error}});
    }
    return j;
}

}  // namespace stv
