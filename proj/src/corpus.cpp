#include "bp/corpus.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bp/textfmt.hpp"

namespace bp::corpus {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string join_path(std::string_view base, std::string_view key) {
  if (base.empty()) return std::string(key);
  return std::string(base) + "." + std::string(key);
}

const ordered_json& require(const ordered_json& obj, std::string_view key,
                            std::string_view base) {
  if (!obj.is_object()) {
    throw ParseError(std::string(base), "expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) throw MissingField(join_path(base, key));
  return *it;
}

std::string get_string(const ordered_json& obj, std::string_view key,
                       std::string_view base) {
  const ordered_json& v = require(obj, key, base);
  if (!v.is_string()) throw ParseError(join_path(base, key), "expected a string");
  return v.get<std::string>();
}

double get_number(const ordered_json& v, std::string_view path) {
  if (!v.is_number()) throw ParseError(std::string(path), "expected a number");
  return v.get<double>();
}

std::vector<std::string> get_string_array(const ordered_json& obj,
                                          std::string_view key,
                                          std::string_view base) {
  const ordered_json& v = require(obj, key, base);
  if (!v.is_array()) throw ParseError(join_path(base, key), "expected an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ParseError(join_path(base, key), "expected strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Reads a {label: number} object aligned to `labels`.
std::vector<double> get_labeled_numbers(const ordered_json& obj,
                                        const std::vector<std::string>& labels,
                                        std::string_view path) {
  if (!obj.is_object()) throw ParseError(std::string(path), "expected an object");
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = obj.find(label);
    if (it == obj.end()) throw MissingField(join_path(path, label));
    out.push_back(get_number(*it, join_path(path, label)));
  }
  return out;
}

ScenarioSide parse_side(const ordered_json& obj, std::string_view base) {
  ScenarioSide side;
  side.content = get_string(obj, "content", base);
  side.belief = get_string(obj, "belief", base);
  side.desire = get_string(obj, "desire", base);
  return side;
}

SetupRecord parse_record_json(ordered_json doc) {
  SetupRecord rec;
  const ordered_json& sc = require(doc, "scenario", "");
  rec.scenario.tag = get_string(sc, "tag", "scenario");
  rec.scenario.background = get_string(sc, "background", "scenario");
  rec.scenario.persuadee = get_string(sc, "persuadee", "scenario");
  rec.scenario.persuader = get_string(sc, "persuader", "scenario");
  rec.scenario.goal = get_string(sc, "goal", "scenario");
  rec.scenario.domain = get_string_array(sc, "domain", "scenario");
  rec.scenario.preventive = parse_side(require(sc, "preventive", "scenario"),
                                       "scenario.preventive");
  rec.scenario.generative = parse_side(require(sc, "generative", "scenario"),
                                       "scenario.generative");

  if (auto it = doc.find("idx"); it != doc.end()) {
    if (!it->is_number_integer()) throw ParseError("idx", "expected an integer");
    rec.idx = it->get<std::int64_t>();
  }

  const ordered_json& bs = require(doc, "bayesian_setup", "");
  BayesianSetup& s = rec.setup;
  s.states = get_string_array(bs, "states", "bayesian_setup");
  s.priors = get_labeled_numbers(require(bs, "priors", "bayesian_setup"), s.states,
                                 "bayesian_setup.priors");
  s.signals = get_string_array(bs, "signals", "bayesian_setup");
  s.actions = get_string_array(bs, "actions", "bayesian_setup");

  const ordered_json& sp = require(bs, "signal_probs", "bayesian_setup");
  for (const auto& state : s.states) {
    auto it = sp.find(state);
    if (it == sp.end()) throw MissingField("bayesian_setup.signal_probs." + state);
    s.signal_probs.push_back(
        get_labeled_numbers(*it, s.signals, "bayesian_setup.signal_probs." + state));
  }

  s.utility_persuader =
      get_labeled_numbers(require(bs, "utility_persuader", "bayesian_setup"),
                          s.actions, "bayesian_setup.utility_persuader");

  const ordered_json& up = require(bs, "utility_persuadee", "bayesian_setup");
  for (const auto& state : s.states) {
    auto it = up.find(state);
    if (it == up.end()) throw MissingField("bayesian_setup.utility_persuadee." + state);
    s.utility_persuadee.push_back(
        get_labeled_numbers(*it, s.actions, "bayesian_setup.utility_persuadee." + state));
  }

  s.expect_utility_persuadee =
      get_number(require(bs, "expect_utility_persuadee", "bayesian_setup"),
                 "bayesian_setup.expect_utility_persuadee");

  if (auto it = bs.find("verbal_bayesian"); it != bs.end()) {
    if (!it->is_string()) {
      throw ParseError("bayesian_setup.verbal_bayesian", "expected a string");
    }
    s.verbal_bayesian = it->get<std::string>();
  }

  rec.raw = std::move(doc);
  return rec;
}

}  // namespace

StateSpace BayesianSetup::state_space() const { return StateSpace(states); }

Distribution BayesianSetup::prior() const { return Distribution(states, priors); }

SignalingScheme BayesianSetup::scheme() const {
  return SignalingScheme(StateSpace(states), signals, signal_probs);
}

ReceiverUtility BayesianSetup::receiver_utility() const {
  return ReceiverUtility(StateSpace(states), actions, utility_persuadee);
}

SenderUtility BayesianSetup::sender_utility() const {
  return SenderUtility(actions, utility_persuader);
}

SetupRecord parse_record(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("", e.what());
  }
  return parse_record_json(std::move(doc));
}

std::vector<SetupRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read corpus file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ordered_json doc;
  try {
    doc = ordered_json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
  std::vector<SetupRecord> out;
  try {
    if (doc.is_array()) {
      for (auto& e : doc) out.push_back(parse_record_json(std::move(e)));
    } else {
      out.push_back(parse_record_json(std::move(doc)));
    }
  } catch (const Error& e) {
    throw CorpusError(path.string() + " record " + std::to_string(out.size()) +
                      ": " + e.what());
  }
  return out;
}

double derive_expect_utility(const BayesianSetup& setup) {
  std::size_t accept = setup.actions.size();
  for (std::size_t a = 0; a < setup.actions.size(); ++a) {
    if (setup.actions[a] == kAccept) accept = a;
  }
  if (accept == setup.actions.size()) {
    throw PreconditionViolation("derive_expect_utility: no Accept action");
  }
  double eu = 0.0;
  for (std::size_t i = 0; i < setup.states.size(); ++i) {
    eu += setup.priors[i] * setup.utility_persuadee[i][accept];
  }
  return eu;
}

namespace {

void add(ValidationReport& report, std::string path, std::string_view rule,
         std::string message) {
  report.violations.push_back({std::move(path), std::string(rule), std::move(message)});
}

bool stochastic(const std::vector<double>& row) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return std::fabs(sum - 1.0) <= kProbTolerance;
}

}  // namespace

ValidationReport validate_setup(const BayesianSetup& s, const ValidatorOptions& opts) {
  ValidationReport report;
  const bool shape_ok =
      s.states == std::vector<std::string>{"Positive", "Negative"} &&
      s.signals == s.states &&
      s.actions == std::vector<std::string>{"Accept", "Reject"} &&
      s.priors.size() == 2 && s.signal_probs.size() == 2 &&
      s.signal_probs[0].size() == 2 && s.signal_probs[1].size() == 2 &&
      s.utility_persuader.size() == 2 && s.utility_persuadee.size() == 2 &&
      s.utility_persuadee[0].size() == 2 && s.utility_persuadee[1].size() == 2;
  if (!shape_ok) {
    add(report, "bayesian_setup", kRuleStructure,
        "expected states [Positive, Negative], signals = states, actions [Accept, Reject]");
    return report;  // the remaining rules assume this shape
  }

  if (!stochastic(s.priors)) {
    add(report, "bayesian_setup.priors", kRulePriorsStochastic,
        "priors must lie in [0,1] and sum to 1");
  } else {
    if (!(s.priors[0] >= opts.prior_floor)) {
      add(report, "bayesian_setup.priors.Positive", kRulePriorFloor,
          "priors[Positive] = " + format_real(s.priors[0]) + " is below the floor " +
              format_real(opts.prior_floor));
    }
  }

  for (std::size_t i = 0; i < 2; ++i) {
    if (!stochastic(s.signal_probs[i])) {
      add(report, "bayesian_setup.signal_probs." + s.states[i], kRuleRowStochastic,
          "row must lie in [0,1] and sum to 1");
    }
  }
  if (s.signal_probs[0][0] != 1.0 || s.signal_probs[0][1] != 0.0) {
    add(report, "bayesian_setup.signal_probs.Positive", kRuleGoodRow,
        "good-state row must be fully informative: (1.0, 0.0)");
  }

  const double u_pos_acc = s.utility_persuadee[0][0];
  const double u_neg_acc = s.utility_persuadee[1][0];
  if (!(u_pos_acc >= 1.0) || !(u_neg_acc < 0.0)) {
    add(report, "bayesian_setup.utility_persuadee", kRuleAcceptSigns,
        "need u(Positive,Accept) >= 1 and u(Negative,Accept) < 0");
  }
  if (s.utility_persuadee[0][1] != 0.0 || s.utility_persuadee[1][1] != 0.0) {
    add(report, "bayesian_setup.utility_persuadee", kRuleRejectZero,
        "Reject utility must be 0 in both states");
  }
  if (s.utility_persuader[0] != 1.0 || s.utility_persuader[1] != 0.0) {
    add(report, "bayesian_setup.utility_persuader", kRulePersuaderFixed,
        "persuader utility must be {Accept: 1, Reject: 0}");
  }

  const double derived = derive_expect_utility(s);
  if (std::fabs(derived - s.expect_utility_persuadee) > kProbTolerance) {
    add(report, "bayesian_setup.expect_utility_persuadee", kRuleExpectMatches,
        "stored " + format_real(s.expect_utility_persuadee) + " != derived " +
            format_real(derived));
  }
  if (!(derived < 0.0)) {
    add(report, "bayesian_setup.expect_utility_persuadee", kRuleExpectNegative,
        "no-information expectation " + format_real(derived) + " >= 0");
  }
  return report;
}

ValidationReport validate_record(const SetupRecord& record, const ValidatorOptions& opts) {
  ValidationReport report = validate_setup(record.setup, opts);
  if (record.scenario.persuader == record.scenario.persuadee) {
    add(report, "scenario.persuader", kRuleScenarioParties,
        "persuader and persuadee must differ");
  }
  if (record.scenario.goal.empty()) {
    add(report, "scenario.goal", kRuleScenarioGoal, "goal must be non-empty");
  }
  return report;
}

namespace {

// Shortest decimal within the identity tolerance, so a repaired field reads
// "-0.2" rather than the raw float sum "-0.19999999999999996".
double snap_minimal_decimal(double x) {
  double scale = 1.0;
  for (int digits = 0; digits <= 15; ++digits, scale *= 10.0) {
    const double rounded = std::round(x * scale) / scale;
    if (std::fabs(rounded - x) <= kProbTolerance) return rounded;
  }
  return x;
}

// 0-valued utilities print as integers, everything else as a real; that is
// the shape the shipped corpora use.
ordered_json utility_number(double v) {
  if (v == 0.0) return ordered_json(0);
  return ordered_json(v);
}

ordered_json labeled(const std::vector<std::string>& labels,
                     const std::vector<double>& values, bool integral_zero) {
  ordered_json out = ordered_json::object();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[labels[i]] = integral_zero ? utility_number(values[i]) : ordered_json(values[i]);
  }
  return out;
}

// Appends keys of `raw` that canonical emission did not cover, in their
// original order.
void append_unknown(ordered_json& out, const ordered_json& raw) {
  if (!raw.is_object()) return;
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    if (!out.contains(it.key())) out[it.key()] = it.value();
  }
}

}  // namespace

ordered_json scenario_to_json(const Scenario& sc) {
  ordered_json side_p = {{"content", sc.preventive.content},
                         {"belief", sc.preventive.belief},
                         {"desire", sc.preventive.desire}};
  ordered_json side_g = {{"content", sc.generative.content},
                         {"belief", sc.generative.belief},
                         {"desire", sc.generative.desire}};
  ordered_json out = ordered_json::object();
  out["tag"] = sc.tag;
  out["background"] = sc.background;
  out["persuadee"] = sc.persuadee;
  out["persuader"] = sc.persuader;
  out["goal"] = sc.goal;
  out["domain"] = sc.domain;
  out["preventive"] = side_p;
  out["generative"] = side_g;
  return out;
}

ordered_json setup_to_json(const BayesianSetup& s) {
  ordered_json out = ordered_json::object();
  out["states"] = s.states;
  out["priors"] = labeled(s.states, s.priors, false);
  out["signals"] = s.signals;
  out["actions"] = s.actions;
  ordered_json sp = ordered_json::object();
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    sp[s.states[i]] = labeled(s.signals, s.signal_probs[i], false);
  }
  out["signal_probs"] = sp;
  ordered_json vp = ordered_json::object();
  for (std::size_t a = 0; a < s.actions.size(); ++a) {
    double v = s.utility_persuader[a];
    vp[s.actions[a]] =
        (v == std::floor(v)) ? ordered_json(static_cast<std::int64_t>(v)) : ordered_json(v);
  }
  out["utility_persuader"] = vp;
  ordered_json up = ordered_json::object();
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    up[s.states[i]] = labeled(s.actions, s.utility_persuadee[i], true);
  }
  out["utility_persuadee"] = up;
  out["expect_utility_persuadee"] = s.expect_utility_persuadee;
  if (s.verbal_bayesian) out["verbal_bayesian"] = *s.verbal_bayesian;
  return out;
}

std::string serialize_record(const SetupRecord& record, bool repair) {
  BayesianSetup setup = record.setup;
  if (repair) {
    setup.expect_utility_persuadee =
        snap_minimal_decimal(derive_expect_utility(setup));
  }

  ordered_json sc = scenario_to_json(record.scenario);
  if (record.raw.contains("scenario")) append_unknown(sc, record.raw["scenario"]);

  ordered_json bs = setup_to_json(setup);
  if (record.raw.contains("bayesian_setup")) {
    append_unknown(bs, record.raw["bayesian_setup"]);
  }

  ordered_json out = ordered_json::object();
  out["scenario"] = sc;
  if (record.idx) out["idx"] = *record.idx;
  out["bayesian_setup"] = bs;
  append_unknown(out, record.raw);
  return out.dump(2) + "\n";
}

}  // namespace bp::corpus
