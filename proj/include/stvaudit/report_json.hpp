#pragma once

#include "stvaudit/audit.hpp"
#include "stvaudit/parse.hpp"
#include "stvaudit/planner.hpp"
#include "stvaudit/tabulate.hpp"

#include <json.hpp>

#include <cmath>
#include <string>

namespace stvaudit {

inline nlohmann::json asn_to_json(double asn) {
  if (std::isinf(asn)) return "inf";
  return asn;
}

inline double asn_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfiniteAsn;
    throw std::runtime_error("plan JSON: unexpected asn string");
  }
  return j.get<double>();
}

inline nlohmann::json names_of(CandidateSet s, const Election& el) {
  auto arr = nlohmann::json::array();
  for (CandidateId c : s.to_vector()) arr.push_back(el.name(c));
  return arr;
}

inline CandidateSet set_from_names(const nlohmann::json& arr, const Election& el) {
  CandidateSet s;
  for (const auto& n : arr) {
    const auto id = el.index_of(n.get<std::string>());
    if (!id) throw std::runtime_error("plan JSON: unknown candidate " + n.get<std::string>());
    s.add(*id);
  }
  return s;
}

/// Assertion-export schema: {type, winner, loser, W, caps, G, O, holds, mean,
/// margin, asn} with candidates by name and rationals as "num/den" strings.
inline nlohmann::json assertion_report_to_json(const AssertionReport& r, const Election& el) {
  nlohmann::json j;
  j["W"] = nlohmann::json::array();
  j["caps"] = nlohmann::json::object();
  j["G"] = nlohmann::json::array();
  j["O"] = nlohmann::json::array();
  j["loser"] = nullptr;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IqAssertion>) {
          j["type"] = "IQ";
          j["winner"] = el.name(a.c);
        } else if constexpr (std::is_same_v<T, UtAssertion>) {
          j["type"] = "UT";
          j["winner"] = el.name(a.c);
          j["caps"][el.name(a.c)] = format_ratio(a.cap);
        } else if constexpr (std::is_same_v<T, AgAssertion>) {
          j["type"] = "AG";
          j["winner"] = el.name(a.w);
          j["loser"] = el.name(a.l);
        } else {
          j["type"] = "NL";
          j["winner"] = el.name(a.w);
          j["loser"] = el.name(a.l);
          j["W"] = names_of(a.W, el);
          for (const auto& [c, v] : a.caps.caps) j["caps"][el.name(c)] = format_ratio(v);
          j["G"] = names_of(a.G, el);
          j["O"] = names_of(a.O, el);
        }
      },
      r.assertion);
  j["holds"] = r.holds_on_cvrs;
  j["mean"] = format_ratio(r.assorter_mean);
  j["margin"] = format_ratio(r.diluted_margin);
  j["assorterUpperBound"] = format_ratio(r.assorter_upper_bound);
  j["asn"] = asn_to_json(r.asn);
  return j;
}

inline AssertionReport assertion_report_from_json(const nlohmann::json& j, const Election& el) {
  const auto name_id = [&](const nlohmann::json& n) {
    const auto id = el.index_of(n.get<std::string>());
    if (!id) throw std::runtime_error("plan JSON: unknown candidate " + n.get<std::string>());
    return *id;
  };
  const std::string type = j.at("type").get<std::string>();
  AssertionReport r;
  if (type == "IQ") {
    r.assertion = IqAssertion{name_id(j.at("winner"))};
  } else if (type == "UT") {
    const CandidateId c = name_id(j.at("winner"));
    const auto& caps = j.at("caps");
    r.assertion = UtAssertion{c, parse_ratio(caps.at(el.name(c)).get<std::string>())};
  } else if (type == "AG") {
    r.assertion = AgAssertion{name_id(j.at("winner")), name_id(j.at("loser"))};
  } else if (type == "NL") {
    NlAssertion a{name_id(j.at("winner")), name_id(j.at("loser")),
                  set_from_names(j.at("W"), el), TransferCap{}, set_from_names(j.at("G"), el),
                  set_from_names(j.at("O"), el)};
    for (const auto& [name, ratio] : j.at("caps").items()) {
      const auto id = el.index_of(name);
      if (!id) throw std::runtime_error("plan JSON: unknown candidate " + name);
      a.caps.caps[*id] = parse_ratio(ratio.get<std::string>());
    }
    r.assertion = std::move(a);
  } else {
    throw std::runtime_error("plan JSON: unknown assertion type " + type);
  }
  r.holds_on_cvrs = j.at("holds").get<bool>();
  r.assorter_mean = parse_ratio(j.at("mean").get<std::string>());
  r.diluted_margin = parse_ratio(j.at("margin").get<std::string>());
  if (j.contains("assorterUpperBound"))
    r.assorter_upper_bound = parse_ratio(j.at("assorterUpperBound").get<std::string>());
  r.asn = asn_from_json(j.at("asn"));
  return r;
}

inline nlohmann::json plan_to_json(const AuditPlan& plan, const Election& el) {
  nlohmann::json j;
  j["format"] = "stvaudit-plan-v1";
  j["method"] = method_name(plan.method);
  j["seats"] = el.seats();
  j["reportedWinners"] = {el.name(plan.reported_winners[0]), el.name(plan.reported_winners[1])};
  j["parameters"] = {{"riskLimit", plan.alpha},
                     {"errorRate", plan.error_rate},
                     {"delta", format_ratio(plan.delta)}};
  j["tieSensitive"] = plan.tie_sensitive;
  j["auditable"] = plan.auditable;
  j["overallAsn"] = asn_to_json(plan.overall_asn);
  if (plan.failed_pair) {
    j["failedPair"] = {el.name(plan.failed_pair->first), el.name(plan.failed_pair->second)};
  } else {
    j["failedPair"] = nullptr;
  }
  if (plan.chosen_cap) j["chosenCap"] = format_ratio(*plan.chosen_cap);
  if (!plan.cap_schedule.empty()) {
    auto arr = nlohmann::json::array();
    for (const auto& c : plan.cap_schedule) arr.push_back(format_ratio(c));
    j["capSchedule"] = std::move(arr);
  }
  auto arr = nlohmann::json::array();
  for (const auto& r : plan.assertions) arr.push_back(assertion_report_to_json(r, el));
  j["assertions"] = std::move(arr);
  return j;
}

inline AuditPlan plan_from_json(const nlohmann::json& j, const Election& el) {
  if (!j.is_object() || j.value("format", "") != "stvaudit-plan-v1")
    throw std::runtime_error("not a stvaudit plan file");
  AuditPlan plan;
  const std::string m = j.at("method").get<std::string>();
  plan.method = m == "one-quota"  ? PlanMethod::one_quota
                : m == "two-quota" ? PlanMethod::two_quota
                                   : PlanMethod::general;
  const auto& winners = j.at("reportedWinners");
  for (int i = 0; i < 2; ++i) {
    const auto id = el.index_of(winners.at(i).get<std::string>());
    if (!id) throw std::runtime_error("plan JSON: unknown winner name");
    plan.reported_winners[i] = *id;
  }
  plan.alpha = j.at("parameters").at("riskLimit").get<double>();
  plan.error_rate = j.at("parameters").at("errorRate").get<double>();
  plan.delta = parse_ratio(j.at("parameters").at("delta").get<std::string>());
  plan.tie_sensitive = j.value("tieSensitive", false);
  plan.auditable = j.value("auditable", true);
  plan.overall_asn = asn_from_json(j.at("overallAsn"));
  if (j.contains("chosenCap") && !j.at("chosenCap").is_null())
    plan.chosen_cap = parse_ratio(j.at("chosenCap").get<std::string>());
  for (const auto& a : j.at("assertions"))
    plan.assertions.push_back(assertion_report_from_json(a, el));
  return plan;
}

inline nlohmann::json auto_result_comparison_json(const AutoPlanResult& res) {
  nlohmann::json j;
  const auto cell = [&](PlanMethod m) -> nlohmann::json {
    const auto asn = res.method_asn(m);
    if (!asn) return "--";
    return asn_to_json(*asn);
  };
  j["twoQuota"] = cell(PlanMethod::two_quota);
  j["oneQuota"] = cell(PlanMethod::one_quota);
  j["general"] = cell(PlanMethod::general);
  return j;
}

inline nlohmann::json simulation_report_to_json(const SimulationReport& rep) {
  nlohmann::json j;
  j["trials"] = rep.trials;
  j["certified"] = rep.certified;
  j["certRate"] = rep.cert_rate;
  j["meanDraws"] = rep.mean_draws;
  j["meanDrawsCertified"] = rep.mean_draws_certified;
  j["maxDraws"] = rep.max_draws;
  auto& q = j["quantiles"] = nlohmann::json::object();
  for (const auto& [label, value] : rep.quantiles) q[label] = value;
  return j;
}

inline nlohmann::json tabulation_to_json(const TabulationRecord& rec, const Election& el) {
  nlohmann::json j;
  j["seats"] = el.seats();
  j["ballots"] = el.total_ballots();
  j["quota"] = el.quota();
  auto rounds = nlohmann::json::array();
  for (const auto& round : rec.rounds) {
    nlohmann::json rj;
    auto& tallies = rj["tallies"] = nlohmann::json::object();
    for (const auto& [c, v] : round.tallies)
      tallies[el.name(c)] = {{"exact", format_ratio(v)}, {"value", format_fixed(v, 4)}};
    auto actions = nlohmann::json::array();
    for (const auto& a : round.actions) {
      nlohmann::json aj;
      aj["kind"] = a.kind == ActionKind::ElectOnQuota   ? "electOnQuota"
                   : a.kind == ActionKind::Eliminate    ? "eliminate"
                                                        : "electRemaining";
      aj["candidate"] = el.name(a.candidate);
      if (a.transfer_value) {
        aj["transferValue"] = {{"exact", format_ratio(*a.transfer_value)},
                               {"value", format_fixed(*a.transfer_value, 4)}};
      }
      if (a.surplus) aj["surplus"] = format_ratio(*a.surplus);
      if (a.pile_size) aj["pileSize"] = *a.pile_size;
      actions.push_back(std::move(aj));
    }
    rj["actions"] = std::move(actions);
    rounds.push_back(std::move(rj));
  }
  j["rounds"] = std::move(rounds);
  auto winners = nlohmann::json::array();
  for (CandidateId w : rec.winners) winners.push_back(el.name(w));
  j["winners"] = std::move(winners);
  j["exhausted"] = {{"exact", format_ratio(rec.exhausted)},
                    {"value", format_fixed(rec.exhausted, 4)}};
  j["tieOccurred"] = rec.tie_occurred;
  return j;
}

}  // namespace stvaudit
