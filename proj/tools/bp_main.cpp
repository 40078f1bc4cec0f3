#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bp/corpus.hpp"
#include "bp/design.hpp"
#include "bp/harness.hpp"
#include "bp/textfmt.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<fs::path> corpus_files(const fs::path& path) {
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_validate(const std::string& path, bool repair, double prior_floor) {
  bp::corpus::ValidatorOptions opts;
  opts.prior_floor = prior_floor;
  bool all_ok = true;
  for (const auto& file : corpus_files(path)) {
    auto records = bp::corpus::load_corpus(file);
    bool file_ok = true;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (repair) {
        records[i].setup.expect_utility_persuadee =
            bp::corpus::derive_expect_utility(records[i].setup);
      }
      const auto report = bp::corpus::validate_record(records[i], opts);
      for (const auto& v : report.violations) {
        std::cout << file.string() << " record " << i << " " << v.path << " ["
                  << v.rule << "]: " << v.message << "\n";
      }
      file_ok = file_ok && report.ok();
    }
    if (repair) {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      if (records.size() == 1) {
        out << bp::corpus::serialize_record(records[0], /*repair=*/true);
      } else {
        out << "[\n";
        for (std::size_t i = 0; i < records.size(); ++i) {
          std::string one = bp::corpus::serialize_record(records[i], true);
          if (!one.empty() && one.back() == '\n') one.pop_back();
          out << one << (i + 1 < records.size() ? ",\n" : "\n");
        }
        out << "]\n";
      }
    }
    std::cout << file.string() << ": " << records.size() << " record(s) "
              << (file_ok ? "ok" : "INVALID") << "\n";
    all_ok = all_ok && file_ok;
  }
  return all_ok ? 0 : 1;
}

int cmd_solve(const std::string& path, const std::string& tie_mode, double eps) {
  const bp::TiePolicy tie = tie_mode == "strict"
                                ? bp::TiePolicy::strict(eps)
                                : bp::TiePolicy::favor();
  const auto records = bp::corpus::load_corpus(path);
  for (const auto& rec : records) {
    const auto& setup = rec.setup;
    const bp::Distribution prior = setup.prior();
    const bp::ReceiverUtility u = setup.receiver_utility();
    const bp::SenderUtility v = setup.sender_utility();

    std::cout << "setup: " << rec.scenario.tag << " (goal: " << rec.scenario.goal
              << ")\n";
    const auto given = bp::design::evaluate_scheme(prior, setup.scheme(), u, v, tie);
    std::cout << "  given schema value: " << bp::format_real(given.sender_value)
              << "\n";
    for (const auto& ps : given.per_signal) {
      std::cout << "    signal " << ps.signal << ": marginal "
                << bp::format_real(ps.marginal) << ", action " << ps.action
                << ", receiver eu " << bp::format_real(ps.receiver_eu) << "\n";
    }
    const auto closed = bp::design::optimal_binary_scheme(prior, u, v, tie);
    std::cout << "  optimal (closed form): value " << bp::format_real(closed.value);
    const auto& states = setup.states;
    std::cout << ", q = " << bp::format_real(closed.scheme.prob(states[1], states[0]));
    if (closed.supremum_value) {
      std::cout << " (supremum " << bp::format_real(*closed.supremum_value) << ")";
    }
    std::cout << "\n";
    const auto lp = bp::design::optimal_scheme_lp(prior, u, v);
    std::cout << "  optimal (obedience LP): value " << bp::format_real(lp.value)
              << "\n";
  }
  return 0;
}

int run_and_report(const bp::harness::ResultTable& table, const std::string& out_path,
                   const std::string& format) {
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << bp::harness::table_to_json(table).dump(2) << "\n";
    std::cout << "results written to " << out_path << "\n";
  }
  const auto fmt = format == "csv" ? bp::harness::ReportFormat::csv
                                   : bp::harness::ReportFormat::markdown;
  std::cout << bp::harness::emit_report(table, fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian-persuasion engine: solve schemes, validate corpora, "
               "run seeded persuasion experiments"};
  app.require_subcommand(1);

  std::string path;
  bool repair = false;
  double prior_floor = 0.5;
  auto* validate = app.add_subcommand("validate", "validate corpus records");
  validate->add_option("path", path, "corpus file or directory")->required();
  validate->add_flag("--repair", repair, "refresh derived fields and rewrite");
  validate->add_option("--prior-floor", prior_floor, "minimum priors[Positive]");

  std::string solve_path, tie_mode = "favor";
  double eps = 1e-6;
  auto* solve = app.add_subcommand("solve", "evaluate and optimize a setup");
  solve->add_option("setup", solve_path, "setup JSON file")->required();
  solve->add_option("--tie", tie_mode, "favor | strict")
      ->check(CLI::IsMember({"favor", "strict"}));
  solve->add_option("--eps", eps, "epsilon for strict tie-breaking");

  std::string sim_config, sim_out, sim_format = "md", sim_transcript;
  auto* simulate = app.add_subcommand("simulate", "run the pairing matrix");
  simulate->add_option("config", sim_config, "experiment config JSON")->required();
  simulate->add_option("--out", sim_out, "write results JSON here");
  simulate->add_option("--format", sim_format, "md | csv")
      ->check(CLI::IsMember({"md", "csv"}));
  simulate->add_option("--transcript", sim_transcript, "JSONL transcript path");

  std::string abl_config, abl_out, abl_format = "md", abl_drops;
  auto* ablate = app.add_subcommand("ablate", "run message-ablation rows");
  ablate->add_option("config", abl_config, "experiment config JSON")->required();
  ablate->add_option("--drop", abl_drops,
                     "components to drop, e.g. utility,posterior (repeat with ';')");
  ablate->add_option("--out", abl_out, "write results JSON here");
  ablate->add_option("--format", abl_format, "md | csv")
      ->check(CLI::IsMember({"md", "csv"}));

  std::string rep_path, rep_format = "md";
  auto* report = app.add_subcommand("report", "format stored results");
  report->add_option("results", rep_path, "results JSON file")->required();
  report->add_option("--format", rep_format, "md | csv")
      ->check(CLI::IsMember({"md", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(path, repair, prior_floor);
    if (*solve) return cmd_solve(solve_path, tie_mode, eps);
    if (*simulate) {
      auto config = bp::harness::load_config(sim_config);
      if (!sim_transcript.empty()) config.transcript = sim_transcript;
      const auto table = bp::harness::run_matrix(config);
      return run_and_report(table, sim_out, sim_format);
    }
    if (*ablate) {
      auto config = bp::harness::load_config(abl_config);
      std::vector<bp::message::AblationSpec> specs = config.ablations;
      if (!abl_drops.empty()) {
        specs.clear();
        std::size_t pos = 0;
        while (pos <= abl_drops.size()) {
          const std::size_t semi = abl_drops.find(';', pos);
          const std::string one = abl_drops.substr(
              pos, semi == std::string::npos ? std::string::npos : semi - pos);
          if (!one.empty()) specs.push_back(bp::message::AblationSpec::parse(one));
          if (semi == std::string::npos) break;
          pos = semi + 1;
        }
      }
      const auto table = bp::harness::run_ablation(config, specs);
      return run_and_report(table, abl_out, abl_format);
    }
    if (*report) {
      std::ifstream in(rep_path, std::ios::binary);
      if (!in) throw bp::ConfigError("cannot read results: " + rep_path);
      const auto doc = nlohmann::ordered_json::parse(in);
      const auto table = bp::harness::table_from_json(doc);
      const auto fmt = rep_format == "csv" ? bp::harness::ReportFormat::csv
                                           : bp::harness::ReportFormat::markdown;
      std::cout << bp::harness::emit_report(table, fmt);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
