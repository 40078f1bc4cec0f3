// Acceptance suite: wires the adviser and vertical-farm fixtures, the
// randomized consistency properties, and the simulation/ablation mechanics
// to their stated tolerances. One [PASS]/[FAIL] line per criterion; the
// process exits nonzero if any criterion fails.
//
// `bp_acceptance --update-golden` rewrites the golden prompt files from the
// current templates.

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bp/agents.hpp"
#include "bp/design.hpp"
#include "bp/harness.hpp"
#include "bp/message.hpp"
#include "bp/rng.hpp"
#include "support/random_setups.hpp"

using namespace bp;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<void(std::vector<std::string>&)> body;
  double time_limit_s;  // 0 = untimed
};

#define EXPECT(cond, what)                                        \
  do {                                                            \
    if (!(cond)) problems.push_back(what);                        \
  } while (0)

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

corpus::SetupRecord farm_record() {
  return corpus::load_corpus("data/vertical_farm.json").at(0);
}

// --- criterion 1: adviser fixture ----------------------------------------

void adviser_fixture(std::vector<std::string>& problems) {
  Labels st = {"Positive", "Negative"};
  Distribution prior(st, {1.0 / 3.0, 2.0 / 3.0});
  ReceiverUtility u(StateSpace(st), {"Accept", "Reject"}, {{1.0, 0.0}, {-1.0, 0.0}});
  SenderUtility v({"Accept", "Reject"}, {1.0, 0.0});
  const auto favor = TiePolicy::favor();

  auto no_info = SignalingScheme::constant(StateSpace(st), st, "Positive");
  const double v_none =
      design::evaluate_scheme(prior, no_info, u, v, favor).sender_value;
  EXPECT(std::fabs(v_none - 0.0) <= 1e-12, "no-information value != 0");

  auto full = SignalingScheme::identity(StateSpace(st), st);
  const double v_full =
      design::evaluate_scheme(prior, full, u, v, favor).sender_value;
  EXPECT(std::fabs(v_full - 1.0 / 3.0) <= 1e-12, "full-information value != 1/3");

  const double closed = design::optimal_binary_scheme(prior, u, v, favor).value;
  EXPECT(std::fabs(closed - 2.0 / 3.0) <= 1e-9, "closed form != 2/3");
  const double lp = design::optimal_scheme_lp(prior, u, v).value;
  EXPECT(std::fabs(lp - 2.0 / 3.0) <= 1e-9, "obedience LP != 2/3");

  const double strict =
      design::optimal_binary_scheme(prior, u, v, TiePolicy::strict(1e-6)).value;
  EXPECT(strict > 2.0 / 3.0 - 1e-6 && strict < 2.0 / 3.0,
         "reject_on_tie value outside (2/3 - 1e-6, 2/3)");
}

// --- criterion 2: vertical-farm fixture -----------------------------------

void farm_fixture(std::vector<std::string>& problems) {
  const auto rec = farm_record();
  const auto& setup = rec.setup;
  EXPECT(std::fabs(corpus::derive_expect_utility(setup) - (-0.2)) <= 1e-12,
         "derived no-information expectation != -0.2");

  const Distribution prior = setup.prior();
  const ReceiverUtility u = setup.receiver_utility();
  const SenderUtility v = setup.sender_utility();
  const auto favor = TiePolicy::favor();

  const auto post = posterior_update(prior, setup.scheme(), "Positive");
  EXPECT(std::fabs(post.prob("Positive") - 0.8 / 0.86) <= 1e-12,
         "posterior after the favorable signal != 0.8/0.86");
  const double eu = expected_utility(post, u, "Accept");
  EXPECT(std::fabs(eu - 0.58) <= 0.005, "Accept expectation not within 0.005 of 0.58");

  const double given =
      design::evaluate_scheme(prior, setup.scheme(), u, v, favor).sender_value;
  EXPECT(std::fabs(given - 0.86) <= 1e-9, "given-schema sender value != 0.86");

  const auto opt = design::optimal_binary_scheme(prior, u, v, favor);
  EXPECT(std::fabs(opt.value - 0.96) <= 1e-9, "optimal value != 0.96");
  EXPECT(std::fabs(opt.scheme.prob("Negative", "Positive") - 0.8) <= 1e-9,
         "optimal q != 0.8");
  const auto oracle = design::brute_force_optimal(prior, u, v, favor, 1e-3);
  EXPECT(std::fabs(oracle.value - 0.96) <= 1e-3,
         "brute-force oracle disagrees with 0.96 beyond grid resolution");
}

// --- criterion 3: solver agreement ----------------------------------------

void solver_agreement(std::vector<std::string>& problems) {
  Rng rng(0xacc3);
  const double grid_step = 1e-3;
  for (int i = 0; i < 200; ++i) {
    const auto rec = bp_test::random_setup_record(rng, i);
    if (!corpus::validate_record(rec).ok()) {
      problems.push_back("generated setup " + std::to_string(i) +
                         " fails the validator");
      return;
    }
    const Distribution prior = rec.setup.prior();
    const ReceiverUtility u = rec.setup.receiver_utility();
    const SenderUtility v = rec.setup.sender_utility();
    const double closed =
        design::optimal_binary_scheme(prior, u, v, TiePolicy::favor()).value;
    const double lp = design::optimal_scheme_lp(prior, u, v).value;
    if (std::fabs(closed - lp) > 1e-7) {
      problems.push_back("closed/LP disagree at setup " + std::to_string(i));
      return;
    }
    const double oracle =
        design::brute_force_optimal(prior, u, v, TiePolicy::favor(), grid_step).value;
    if (std::fabs(closed - oracle) > grid_step ||
        std::fabs(lp - oracle) > grid_step) {
      problems.push_back("oracle disagrees at setup " + std::to_string(i));
      return;
    }
  }
}

// --- criterion 4: Bayes-consistency property suite -------------------------

void bayes_properties(std::vector<std::string>& problems) {
  Labels st = {"Positive", "Negative"};
  Labels types = {std::string(kHonest), std::string(kDishonest)};
  Rng rng(0xbead5);
  int martingale_bad = 0, rows_bad = 0, convex_bad = 0, argmax_bad = 0;

  for (int i = 0; i < 1000; ++i) {
    const double mu = rng.uniform(0.02, 0.98);
    Distribution prior(st, {mu, 1.0 - mu});
    const double a = rng.uniform(0.0, 1.0), b = rng.uniform(0.0, 1.0);
    SignalingScheme scheme(StateSpace(st), st, {{a, 1.0 - a}, {b, 1.0 - b}});

    // martingale + row-stochasticity
    auto marg = signal_marginal(prior, scheme);
    for (std::size_t w = 0; w < 2; ++w) {
      double total = 0.0;
      for (const auto& sig : scheme.signals()) {
        if (marg.prob(sig) == 0.0) continue;
        total += marg.prob(sig) * posterior_update(prior, scheme, sig).probs()[w];
      }
      if (std::fabs(total - prior.probs()[w]) > 1e-9) ++martingale_bad;
    }
    for (const auto& row : scheme.rows()) {
      double sum = 0.0;
      for (double p : row) sum += p;
      if (std::fabs(sum - 1.0) > 1e-9) ++rows_bad;
    }

    // convex combination through the effective schema
    SenderTypeProfile profile(
        types, {SignalingScheme::identity(StateSpace(st), st), scheme});
    const double w_liar = rng.uniform(0.0, 1.0);
    TypeBelief belief(types, {1.0 - w_liar, w_liar});
    auto bar = effective_schema(profile, belief);
    for (std::size_t i2 = 0; i2 < 2; ++i2) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        const double lo = std::min(profile.policy(std::size_t{0}).rows()[i2][j],
                                   scheme.rows()[i2][j]);
        const double hi = std::max(profile.policy(std::size_t{0}).rows()[i2][j],
                                   scheme.rows()[i2][j]);
        if (bar.rows()[i2][j] < lo - 1e-9 || bar.rows()[i2][j] > hi + 1e-9) {
          ++convex_bad;
        }
        sum += bar.rows()[i2][j];
      }
      if (std::fabs(sum - 1.0) > 1e-9) ++rows_bad;
    }

    // argmax invariance under positive affine transforms, away from ties
    ReceiverUtility u(StateSpace(st), {"Accept", "Reject"},
                      {{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)},
                       {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)}});
    const double gap = expected_utility(prior, u, "Accept") -
                       expected_utility(prior, u, "Reject");
    if (std::fabs(gap) > 1e-9) {
      const double lambda = rng.uniform(0.1, 10.0);
      const double c0 = rng.uniform(-3.0, 3.0), c1 = rng.uniform(-3.0, 3.0);
      ReceiverUtility t(StateSpace(st), {"Accept", "Reject"},
                        {{lambda * u.table()[0][0] + c0, lambda * u.table()[0][1] + c0},
                         {lambda * u.table()[1][0] + c1, lambda * u.table()[1][1] + c1}});
      for (auto tie : {TiePolicy::favor(), TiePolicy::strict(1e-6)}) {
        if (best_response(prior, u, tie) != best_response(prior, t, tie)) {
          ++argmax_bad;
        }
      }
    }
  }
  EXPECT(martingale_bad == 0, "martingale identity violated");
  EXPECT(rows_bad == 0, "row-stochasticity violated");
  EXPECT(convex_bad == 0, "convex-combination bound violated");
  EXPECT(argmax_bad == 0, "argmax invariance violated");
}

// --- criterion 5: simulation convergence -----------------------------------

harness::ExperimentConfig farm_sim_config(int cases) {
  harness::ExperimentConfig cfg;
  cfg.corpus = "data/vertical_farm.json";
  agents::PersuaderPolicy sfnl;
  sfnl.kind = agents::PersuaderKind::bp_sfnl;
  agents::PersuaderPolicy naive;
  naive.kind = agents::PersuaderKind::naive;
  cfg.persuaders = {sfnl, naive};
  agents::PersuadeePolicy rational;
  rational.kind = agents::PersuadeeKind::bp_rational;
  cfg.persuadees = {rational};
  cfg.cases_per_cell = cases;
  cfg.master_seed = 20260809;
  return cfg;
}

void simulation_convergence(std::vector<std::string>& problems) {
  auto cfg = farm_sim_config(10000);
  const auto table1 = harness::run_matrix(cfg);
  const auto table2 = harness::run_matrix(cfg);

  const harness::PairingResult* sfnl = nullptr;
  const harness::PairingResult* naive = nullptr;
  for (const auto& row : table1.rows) {
    if (row.method == "sfnl") sfnl = &row;
    if (row.method == "naive") naive = &row;
  }
  if (!sfnl || !naive || !sfnl->mean || !naive->mean) {
    problems.push_back("matrix rows missing");
    return;
  }
  const double bound = 3.0 * std::sqrt(0.96 * 0.04 / 10000.0);  // ~0.0059
  EXPECT(std::fabs(*sfnl->mean - 0.96) <= bound,
         "optimal-vs-rational mean outside the 3-sigma band around 0.96");
  EXPECT(*naive->mean == 0.0, "naive-vs-rational mean != 0");

  const std::string md1 = harness::emit_report(table1, harness::ReportFormat::markdown);
  const std::string md2 = harness::emit_report(table2, harness::ReportFormat::markdown);
  const std::string csv1 = harness::emit_report(table1, harness::ReportFormat::csv);
  const std::string csv2 = harness::emit_report(table2, harness::ReportFormat::csv);
  EXPECT(md1 == md2 && csv1 == csv2,
         "same master seed did not reproduce bit-identical report bytes");
}

// --- criterion 6: ablation mechanics ----------------------------------------

void ablation_mechanics(std::vector<std::string>& problems) {
  auto cfg = farm_sim_config(1000);
  cfg.persuaders.resize(1);  // sfnl only
  const auto base = harness::run_matrix(cfg);
  const auto table =
      harness::run_ablation(cfg, {message::AblationSpec::parse("utility"),
                                  message::AblationSpec::parse("schema")});

  auto successes = [&](const harness::ResultTable& t,
                       const std::string& method) -> int {
    for (const auto& row : t.rows) {
      if (row.method == method) return row.successes;
    }
    return -1;
  };
  EXPECT(successes(table, "sfnl w/o schema") == 0,
         "schema ablation did not collapse to the no-information decision");
  EXPECT(successes(table, "sfnl w/o utility") == successes(base, "sfnl"),
         "utility ablation changed rational-receiver outcomes");

  // idempotence over 1,000 random messages
  Rng rng(0x1de4);
  const std::vector<std::string> specs = {"utility", "posterior", "schema",
                                          "utility,posterior",
                                          "utility,posterior,schema"};
  for (int i = 0; i < 1000; ++i) {
    const auto rec = bp_test::random_setup_record(rng, i);
    auto profile = SenderTypeProfile::canonical(
        rec.setup.state_space(), rec.setup.signals, rec.setup.receiver_utility());
    const double q = rec.setup.signal_probs[1][0];
    TypeBelief belief({std::string(kHonest), std::string(kDishonest)},
                      {1.0 - q, q});
    const auto style =
        rng.uniform() < 0.5 ? message::Style::sfnl : message::Style::fnl;
    auto m = message::compose(rec.setup, profile, belief, "Positive", style);
    auto spec = message::AblationSpec::parse(specs[rng.next() % specs.size()]);
    auto once = message::ablate(m, spec);
    auto twice = message::ablate(once, spec);
    if (once.rendered != twice.rendered || once.des.signal != m.des.signal) {
      problems.push_back("ablation not idempotent at message " + std::to_string(i));
      return;
    }
  }
}

// --- criterion 7: corpus golden test ----------------------------------------

void corpus_golden(std::vector<std::string>& problems) {
  const std::string bytes = slurp("data/vertical_farm.json");
  EXPECT(!bytes.empty(), "fixture missing");
  const auto rec = corpus::parse_record(bytes);
  EXPECT(corpus::validate_record(rec).ok(), "fixture does not validate");
  EXPECT(corpus::serialize_record(rec) == bytes, "fixture is not byte-stable");

  auto only_rule = [&](const corpus::SetupRecord& mutated, std::string_view rule,
                       const char* what) {
    const auto report = corpus::validate_setup(mutated.setup);
    if (report.violations.size() != 1 || report.violations[0].rule != rule) {
      std::string got;
      for (const auto& v : report.violations) got += " " + v.rule;
      problems.push_back(std::string(what) + ": expected exactly [" +
                         std::string(rule) + "], got [" + got + " ]");
    }
  };

  auto stale = rec;
  stale.setup.expect_utility_persuadee = -0.3;
  only_rule(stale, corpus::kRuleExpectMatches, "stale expect mutant");

  auto leaky = rec;
  leaky.setup.signal_probs[0] = {0.9, 0.1};
  only_rule(leaky, corpus::kRuleGoodRow, "non-informative good-row mutant");

  auto sunny = rec;
  sunny.setup.priors = {0.95, 0.05};
  sunny.setup.expect_utility_persuadee = corpus::derive_expect_utility(sunny.setup);
  only_rule(sunny, corpus::kRuleExpectNegative, "nonnegative expectation mutant");
}

// --- criterion 8: prompt-template fidelity -----------------------------------

std::string rendered_persuadee_prompt() {
  const auto rec = farm_record();
  std::map<std::string, std::string> bindings;
  bindings["scenario"] = corpus::scenario_to_json(rec.scenario).dump(2);
  bindings["bayesian_setup"] = corpus::setup_to_json(rec.setup).dump(2);
  bindings["persuader_msg"] =
      "Signals favor the upside; accepting is the rational move.";
  return agents::render_prompt("persuadee.bp.explicit", bindings);
}

void prompt_fidelity(std::vector<std::string>& problems) {
  const std::string prompt = rendered_persuadee_prompt();
  EXPECT(prompt.find("<msg_start>") != std::string::npos, "missing <msg_start>");
  EXPECT(prompt.find("<msg_end>") != std::string::npos, "missing <msg_end>");
  EXPECT(prompt.find("Scenario Setup:") != std::string::npos,
         "missing the Scenario Setup block");
  const std::string golden = slurp("tests/golden/persuadee_bp_explicit_prompt.txt");
  EXPECT(!golden.empty(), "golden prompt file missing");
  EXPECT(prompt == golden, "rendered prompt deviates from the golden file");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--update-golden") == 0) {
    std::ofstream("tests/golden/persuadee_bp_explicit_prompt.txt", std::ios::binary)
        << rendered_persuadee_prompt();
    std::cout << "golden files updated\n";
    return 0;
  }

  std::vector<Criterion> criteria = {
      {1, "adviser fixture (0, 1/3, 2/3 exactly; epsilon band under strict ties)",
       adviser_fixture, 1.0},
      {2, "vertical-farm fixture (-0.2, 0.8/0.86, 0.86, 0.96 at q=0.8)",
       farm_fixture, 1.0},
      {3, "solver agreement on 200 random setups (closed vs LP vs oracle)",
       solver_agreement, 30.0},
      {4, "Bayes-consistency properties, 1000 instances each at 1e-9",
       bayes_properties, 10.0},
      {5, "simulation convergence and bit-identical replay (N=10000)",
       simulation_convergence, 10.0},
      {6, "ablation mechanics (schema collapse, utility no-op, idempotence)",
       ablation_mechanics, 10.0},
      {7, "corpus golden test and mutant violation ids", corpus_golden, 0.0},
      {8, "prompt-template fidelity (sentinels, setup block, golden file)",
       prompt_fidelity, 0.0},
  };

  int failures = 0;
  for (auto& crit : criteria) {
    std::vector<std::string> problems;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.body(problems);
    } catch (const std::exception& e) {
      problems.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (crit.time_limit_s > 0 && elapsed > crit.time_limit_s) {
      problems.push_back("runtime " + std::to_string(elapsed) + "s exceeds " +
                         std::to_string(crit.time_limit_s) + "s");
    }
    const bool ok = problems.empty();
    failures += ok ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", crit.id,
                crit.name.c_str(), elapsed);
    for (const auto& p : problems) std::printf("       - %s\n", p.c_str());
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
