#pragma once

#include "stvaudit/ballot.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stvaudit {

/// Parse failure with the 1-based line number of the offending input line
/// (0 for structural problems that are not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ParseOptions {
  /// Used when the input carries no seats header/field.
  std::optional<int> fallback_seats;
  /// Drop empty rankings entirely (they then do not count toward |B|).
  bool drop_empty = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(trim(s.substr(start)));
      break;
    }
    parts.emplace_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return parts;
}

inline Ballot ranking_from_names(const std::vector<std::string>& names,
                                 const std::vector<std::string>& candidates,
                                 int line) {
  Ballot b;
  CandidateSet seen;
  for (const auto& n : names) {
    if (n.empty()) throw ParseError(line, "empty candidate name in ranking");
    CandidateId id = -1;
    for (size_t i = 0; i < candidates.size(); ++i)
      if (candidates[i] == n) { id = static_cast<CandidateId>(i); break; }
    if (id < 0) throw ParseError(line, "unknown candidate name: " + n);
    if (seen.contains(id)) throw ParseError(line, "duplicate candidate in ranking: " + n);
    seen.add(id);
    b.prefs.push_back(id);
  }
  return b;
}

}  // namespace detail

/// Text ballot file:
///   candidates: name1,name2,...
///   seats: N
///   count : nameA > nameB > ...
/// A line "count :" with nothing after the colon denotes empty ballots.
/// Whitespace-insensitive; blank lines and lines starting with '#' ignored.
inline Election parse_election_text(std::string_view text, const ParseOptions& opts = {},
                                    std::vector<std::string>* warnings = nullptr) {
  std::vector<std::string> candidates;
  bool have_candidates = false;
  std::optional<int> seats;
  std::vector<RankingCount> ballots;
  long long empties = 0;

  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t end = text.find('\n', start);
    std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                            : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.substr(0, 11) == "candidates:") {
      if (have_candidates) throw ParseError(line_no, "repeated candidates header");
      candidates = detail::split(line.substr(11), ',');
      if (candidates.size() == 1 && candidates[0].empty())
        throw ParseError(line_no, "candidates header lists no names");
      have_candidates = true;
      continue;
    }
    if (line.substr(0, 6) == "seats:") {
      try {
        seats = std::stoi(std::string(detail::trim(line.substr(6))));
      } catch (const std::exception&) {
        throw ParseError(line_no, "malformed seats header");
      }
      continue;
    }

    // Ballot line: "count : ranking".
    const size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ParseError(line_no, "malformed line (expected 'count : ranking')");
    if (!have_candidates)
      throw ParseError(line_no, "ballot line before candidates header");
    long long count = 0;
    try {
      size_t used = 0;
      const std::string cs(detail::trim(line.substr(0, colon)));
      count = std::stoll(cs, &used);
      if (used != cs.size()) throw std::invalid_argument(cs);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed ballot count");
    }
    if (count <= 0) throw ParseError(line_no, "ballot count must be positive");

    const std::string_view rest = detail::trim(line.substr(colon + 1));
    Ballot ranking;
    if (!rest.empty()) {
      ranking = detail::ranking_from_names(detail::split(rest, '>'), candidates, line_no);
    }
    if (ranking.empty()) {
      empties += count;
      if (opts.drop_empty) continue;
    }
    ballots.push_back({std::move(ranking), count});
  }

  if (!have_candidates) throw ParseError(0, "missing candidates header");
  const int effective_seats = seats ? *seats : opts.fallback_seats.value_or(0);
  if (effective_seats < 1)
    throw ParseError(0, "seats not specified (no header and no fallback)");
  if (warnings && empties > 0 && !opts.drop_empty)
    warnings->push_back(std::to_string(empties) +
                        " empty ballots counted toward the total (they affect the quota)");

  try {
    return Election::create(std::move(candidates), effective_seats, std::move(ballots));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

/// JSON equivalent: {"candidates":[...], "seats":N,
///                   "ballots":[{"ranking":["a","b"],"count":5}, ...]}.
inline Election parse_election_json(std::string_view text, const ParseOptions& opts = {},
                                    std::vector<std::string>* warnings = nullptr) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("candidates") || !j.contains("ballots"))
    throw ParseError(0, "JSON election needs 'candidates' and 'ballots' fields");

  std::vector<std::string> candidates;
  for (const auto& c : j.at("candidates")) candidates.push_back(c.get<std::string>());

  std::optional<int> seats;
  if (j.contains("seats")) seats = j.at("seats").get<int>();
  const int effective_seats = seats ? *seats : opts.fallback_seats.value_or(0);
  if (effective_seats < 1) throw ParseError(0, "seats not specified (no field and no fallback)");

  std::vector<RankingCount> ballots;
  long long empties = 0;
  int entry = 0;
  for (const auto& b : j.at("ballots")) {
    ++entry;
    if (!b.is_object() || !b.contains("ranking") || !b.contains("count"))
      throw ParseError(entry, "ballot entry needs 'ranking' and 'count'");
    const long long count = b.at("count").get<long long>();
    if (count <= 0) throw ParseError(entry, "ballot count must be positive");
    std::vector<std::string> names;
    for (const auto& n : b.at("ranking")) names.push_back(n.get<std::string>());
    Ballot ranking = detail::ranking_from_names(names, candidates, entry);
    if (ranking.empty()) {
      empties += count;
      if (opts.drop_empty) continue;
    }
    ballots.push_back({std::move(ranking), count});
  }
  if (warnings && empties > 0 && !opts.drop_empty)
    warnings->push_back(std::to_string(empties) +
                        " empty ballots counted toward the total (they affect the quota)");
  try {
    return Election::create(std::move(candidates), effective_seats, std::move(ballots));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

/// Dispatches on extension: ".json" uses the JSON schema, anything else text.
inline Election parse_election(std::string_view contents, std::string_view filename,
                               const ParseOptions& opts = {},
                               std::vector<std::string>* warnings = nullptr) {
  const bool json = filename.size() >= 5 &&
                    filename.substr(filename.size() - 5) == ".json";
  return json ? parse_election_json(contents, opts, warnings)
              : parse_election_text(contents, opts, warnings);
}

inline Election load_election_file(const std::string& path, const ParseOptions& opts = {},
                                   std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open ballot file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_election(ss.str(), path, opts, warnings);
}

inline std::string serialize_election_text(const Election& el) {
  std::ostringstream out;
  out << "candidates: ";
  for (size_t i = 0; i < el.names().size(); ++i) {
    if (i) out << ",";
    out << el.names()[i];
  }
  out << "\nseats: " << el.seats() << "\n";
  for (const auto& rc : el.ballots()) {
    out << rc.count << " :";
    for (size_t i = 0; i < rc.ranking.prefs.size(); ++i)
      out << (i ? " > " : " ") << el.name(rc.ranking.prefs[i]);
    out << "\n";
  }
  return out.str();
}

inline nlohmann::json election_to_json(const Election& el) {
  nlohmann::json j;
  j["candidates"] = el.names();
  j["seats"] = el.seats();
  auto& arr = j["ballots"] = nlohmann::json::array();
  for (const auto& rc : el.ballots()) {
    nlohmann::json b;
    auto& names = b["ranking"] = nlohmann::json::array();
    for (CandidateId c : rc.ranking.prefs) names.push_back(el.name(c));
    b["count"] = rc.count;
    arr.push_back(std::move(b));
  }
  return j;
}

inline bool operator==(const Election& a, const Election& b) {
  return a.names() == b.names() && a.seats() == b.seats() && a.ballots() == b.ballots();
}

}  // namespace stvaudit
