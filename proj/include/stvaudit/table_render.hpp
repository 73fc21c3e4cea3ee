#pragma once

#include "stvaudit/planner.hpp"
#include "stvaudit/tabulate.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace stvaudit {

/// Tallies rendered to the nearest whole vote for the round table; exact
/// fractions are available in the JSON output.
inline std::string render_tally(const Rational& v) { return round_to_int(v).str(); }

inline std::string format_asn_cell(double asn) {
  if (std::isinf(asn)) return "+inf";
  return std::to_string(static_cast<long long>(std::llround(asn)));
}

/// Aligned text round table in the style of a published STV count summary.
inline std::string render_round_table(const TabulationRecord& rec, const Election& el) {
  const size_t nrounds = rec.rounds.size();
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string> header{"candidate"};
  std::vector<std::string> action_row{"action"};
  std::vector<std::string> transfer_row{"transfer"};
  for (size_t r = 0; r < nrounds; ++r) {
    header.push_back("round " + std::to_string(r + 1));
    std::string actions, transfers;
    for (const auto& a : rec.rounds[r].actions) {
      if (!actions.empty()) actions += ",";
      switch (a.kind) {
        case ActionKind::ElectOnQuota: actions += "elect " + el.name(a.candidate); break;
        case ActionKind::Eliminate: actions += "elim " + el.name(a.candidate); break;
        case ActionKind::ElectRemaining: actions += "seat " + el.name(a.candidate); break;
      }
      if (a.transfer_value) {
        if (!transfers.empty()) transfers += ",";
        transfers += format_fixed(*a.transfer_value, 4);
      }
    }
    action_row.push_back(actions);
    transfer_row.push_back(transfers.empty() ? "--" : transfers);
  }
  rows.push_back(header);
  rows.push_back(action_row);
  rows.push_back(transfer_row);

  for (CandidateId c = 0; c < el.candidate_count(); ++c) {
    std::vector<std::string> row{el.name(c)};
    for (size_t r = 0; r < nrounds; ++r) {
      const auto it = rec.rounds[r].tallies.find(c);
      row.push_back(it == rec.rounds[r].tallies.end() ? "--" : render_tally(it->second));
    }
    rows.push_back(row);
  }

  std::vector<std::string> total_row{"total"};
  for (size_t r = 0; r < nrounds; ++r) {
    Rational sum(0);
    for (const auto& [c, v] : rec.rounds[r].tallies) sum += v;
    total_row.push_back(render_tally(sum));
  }
  rows.push_back(total_row);

  std::vector<size_t> width(nrounds + 1, 0);
  for (const auto& row : rows)
    for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());

  std::ostringstream out;
  out << "seats: " << el.seats() << "  ballots: " << el.total_ballots()
      << "  quota: " << el.quota() << "\n\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[i])) << row[i];
    }
    out << "\n";
  }
  out << "\nexhausted: " << render_tally(rec.exhausted) << "\nwinners: ";
  for (size_t i = 0; i < rec.winners.size(); ++i) {
    if (i) out << ", ";
    out << el.name(rec.winners[i]);
  }
  out << "\n";
  if (rec.tie_occurred) out << "note: a tie was broken by candidate id during the count\n";
  return out.str();
}

/// One Table-style comparison row: "--" marks a method that was not
/// applicable, "+inf" one that found no auditable assertion set.
inline std::string render_comparison_row(const AutoPlanResult& res) {
  const auto cell = [&](PlanMethod m) {
    const auto asn = res.method_asn(m);
    if (!asn) return std::string("--");
    return format_asn_cell(*asn);
  };
  std::ostringstream out;
  out << "two-quota: " << cell(PlanMethod::two_quota)
      << "  one-quota: " << cell(PlanMethod::one_quota)
      << "  general: " << cell(PlanMethod::general);
  return out.str();
}

}  // namespace stvaudit
