#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bp/core.hpp"

namespace bp::corpus {

struct ScenarioSide {
  std::string content, belief, desire;
  bool operator==(const ScenarioSide&) const = default;
};

struct Scenario {
  std::string tag, background, persuadee, persuader, goal;
  std::vector<std::string> domain;
  ScenarioSide preventive, generative;
  bool operator==(const Scenario&) const = default;
};

// Raw per-scenario game record, field-for-field the corpus JSON shape.
// Values are held as plain numbers so a malformed record can still be
// parsed, validated, and reported on; `to_*()` accessors build the checked
// core types on demand.
struct BayesianSetup {
  std::vector<std::string> states;
  std::vector<double> priors;                       // aligned to states
  std::vector<std::string> signals;
  std::vector<std::string> actions;
  std::vector<std::vector<double>> signal_probs;    // [state][signal]
  std::vector<double> utility_persuader;            // aligned to actions
  std::vector<std::vector<double>> utility_persuadee;  // [state][action]
  double expect_utility_persuadee = 0.0;
  std::optional<std::string> verbal_bayesian;

  StateSpace state_space() const;
  Distribution prior() const;
  SignalingScheme scheme() const;
  ReceiverUtility receiver_utility() const;
  SenderUtility sender_utility() const;

  bool operator==(const BayesianSetup&) const = default;
};

struct SetupRecord {
  Scenario scenario;
  std::optional<std::int64_t> idx;
  BayesianSetup setup;
  // Original document, so unknown fields survive a round trip.
  nlohmann::ordered_json raw;

  bool operator==(const SetupRecord& o) const {
    return scenario == o.scenario && idx == o.idx && setup == o.setup;
  }
};

struct Violation {
  std::string path;     // field the rule fired on
  std::string rule;     // stable rule id
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

struct ValidatorOptions {
  double prior_floor = 0.5;
};

// Rule ids, stable for golden tests and tooling.
inline constexpr std::string_view kRuleStructure = "structure.two_state";
inline constexpr std::string_view kRulePriorsStochastic = "priors.stochastic";
inline constexpr std::string_view kRulePriorFloor = "priors.floor";
inline constexpr std::string_view kRuleRowStochastic = "scheme.row_stochastic";
inline constexpr std::string_view kRuleGoodRow = "scheme.good_row_informative";
inline constexpr std::string_view kRuleAcceptSigns = "utility.accept_signs";
inline constexpr std::string_view kRuleRejectZero = "utility.reject_zero";
inline constexpr std::string_view kRulePersuaderFixed = "utility.persuader_fixed";
inline constexpr std::string_view kRuleExpectMatches = "expect.matches_derived";
inline constexpr std::string_view kRuleExpectNegative = "expect.negative";
inline constexpr std::string_view kRuleScenarioParties = "scenario.distinct_parties";
inline constexpr std::string_view kRuleScenarioGoal = "scenario.goal_nonempty";

SetupRecord parse_record(std::string_view json_text);

// A corpus file holds either one record or an array of records.
std::vector<SetupRecord> load_corpus(const std::filesystem::path& path);

// No-information Accept expectation: sum_w prior(w) * u(w, Accept).
double derive_expect_utility(const BayesianSetup& setup);

// Checks every setup invariant and keeps going, so one pass reports
// everything wrong with a record.
ValidationReport validate_setup(const BayesianSetup& setup,
                                const ValidatorOptions& opts = {});

// Setup rules plus the scenario-level ones.
ValidationReport validate_record(const SetupRecord& record,
                                 const ValidatorOptions& opts = {});

// Canonical corpus bytes: fixed field order, shortest-round-trip reals,
// unknown fields appended after the known ones. `repair` refreshes the
// stored expectation from the other fields before writing.
std::string serialize_record(const SetupRecord& record, bool repair = false);

nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
nlohmann::ordered_json setup_to_json(const BayesianSetup& setup);

}  // namespace bp::corpus
