#pragma once

#include "stv/election.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace stv {

/// BLT parse failure; carries the 1-based line number of the offending line.
class BltError : public std::runtime_error {
  public:
    BltError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

namespace detail {

// Strips '#' comments and trailing CR, returns trimmed line.
inline std::string clean_blt_line(std::string line) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    return start == std::string::npos ? std::string() : line.substr(start);
}

inline std::string unquote(const std::string& s, int line_no) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    if (!s.empty() && s.front() != '"') return s;  // tolerate unquoted names
    throw BltError(line_no, "malformed quoted string: " + s);
}

}  // namespace detail

/// Parse a ballot file in BLT format:
///   <numCandidates> <numSeats>
///   optional withdrawal lines (lists of negative 1-based indices)
///   <weight> <pref...> 0        one line per ballot bundle
///   0                           terminator
///   numCandidates quoted name lines, then one quoted title line
/// Withdrawn candidates are removed from every ranking and from the
/// candidate list; indices are re-packed densely. Reported winners are not
/// part of the format; run the tabulation to obtain them.
inline Election parse_blt(std::istream& in) {
    std::vector<std::string> lines;
    std::string raw;
    while (std::getline(in, raw)) lines.push_back(raw);

    std::size_t idx = 0;
    auto next_line = [&](bool required) -> std::pair<std::string, int> {
        while (idx < lines.size()) {
            std::string s = detail::clean_blt_line(lines[idx]);
            ++idx;
            if (!s.empty()) return {s, static_cast<int>(idx)};
        }
        if (required) throw BltError(static_cast<int>(lines.size()), "unexpected end of file");
        return {std::string(), static_cast<int>(lines.size())};
    };

    auto [header, header_line] = next_line(true);
    std::istringstream hs(header);
    int num_candidates = 0, seats = 0;
    if (!(hs >> num_candidates >> seats) || num_candidates < 2 || seats < 1 ||
        seats >= num_candidates) {
        throw BltError(header_line, "malformed header, expected '<candidates> <seats>'");
    }

    std::set<int> withdrawn;  // 1-based
    std::vector<std::pair<std::int64_t, std::vector<int>>> ballots;  // weight, 1-based prefs
    bool terminated = false;
    while (!terminated) {
        auto [line, line_no] = next_line(true);
        std::istringstream ls(line);
        std::int64_t first = 0;
        if (!(ls >> first)) throw BltError(line_no, "expected a ballot or withdrawal line");
        if (first < 0) {
            // withdrawal line: one or more negative indices
            int v = static_cast<int>(first);
            do {
                int cand = -v;
                if (cand < 1 || cand > num_candidates)
                    throw BltError(line_no, "withdrawn candidate index out of range");
                withdrawn.insert(cand);
            } while (ls >> v && v < 0);
            if (!ls.eof() && !ls.fail())
                throw BltError(line_no, "withdrawal line must contain only negative indices");
            continue;
        }
        if (first == 0) {
            std::string rest;
            if (ls >> rest) throw BltError(line_no, "unexpected tokens after terminator");
            terminated = true;
            break;
        }
        std::vector<int> prefs;
        int p = 0;
        bool closed = false;
        while (ls >> p) {
            if (p == 0) { closed = true; break; }
            if (p < 1 || p > num_candidates)
                throw BltError(line_no, "preference index out of range: " + std::to_string(p));
            prefs.push_back(p);
        }
        if (!closed) throw BltError(line_no, "ballot line missing 0 terminator");
        ballots.emplace_back(first, std::move(prefs));
    }

    std::vector<std::string> names;
    for (int i = 0; i < num_candidates; ++i) {
        auto [line, line_no] = next_line(false);
        if (line.empty()) break;  // names are optional in practice
        names.push_back(detail::unquote(line, line_no));
    }
    std::string title;
    {
        auto [line, line_no] = next_line(false);
        if (!line.empty()) title = detail::unquote(line, line_no);
    }

    // Re-pack candidate ids with withdrawn candidates removed.
    std::vector<int> remap(num_candidates + 1, -1);
    int dense = 0;
    for (int c = 1; c <= num_candidates; ++c)
        if (!withdrawn.count(c)) remap[c] = dense++;

    BallotProfile profile;
    for (const auto& [weight, prefs] : ballots) {
        Ranking r;
        for (int p : prefs) {
            if (remap[p] < 0) continue;  // withdrawn
            CandidateId c = remap[p];
            if (std::find(r.begin(), r.end(), c) == r.end()) r.push_back(c);
        }
        if (r.empty()) continue;  // ballot ranks only withdrawn candidates
        profile.add(r, weight);
    }

    Election e;
    e.num_candidates = dense;
    e.seats = seats;
    e.quota = compute_quota(profile.total(), seats);
    e.profile = std::move(profile);
    for (int c = 1; c <= num_candidates; ++c)
        if (remap[c] >= 0 && c - 1 < static_cast<int>(names.size()))
            e.candidate_names.push_back(names[c - 1]);
    e.title = title;
    if (e.num_candidates < 2 || seats >= e.num_candidates)
        throw BltError(header_line, "too few candidates remain after withdrawals");
    return e;
}

inline Election parse_blt(const std::string& text) {
    std::istringstream in(text);
    return parse_blt(in);
}

/// Writes an election back out in BLT format (no withdrawal lines; ids are
/// already dense). parse(write(e)) reproduces e's profile exactly.
inline void write_blt(const Election& e, std::ostream& out) {
    out << e.num_candidates << " " << e.seats << "\n";
    for (const auto& [ranking, count] : e.profile.types()) {
        out << count;
        for (CandidateId c : ranking) out << " " << (c + 1);
        out << " 0\n";
    }
    out << "0\n";
    for (int c = 0; c < e.num_candidates; ++c) out << '"' << e.name_of(c) << '"' << "\n";
    out << '"' << (e.title.empty() ? "contest" : e.title) << '"' << "\n";
}

inline std::string write_blt(const Election& e) {
    std::ostringstream out;
    write_blt(e, out);
    return out.str();
}

}  // namespace stv
