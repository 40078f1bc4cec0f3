#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bp/agents.hpp"
#include "bp/corpus.hpp"
#include "bp/external.hpp"
#include "bp/message.hpp"

namespace bp::harness {

enum class View { explicit_view, self_derived };
enum class ReportFormat { markdown, csv };

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::vector<agents::PersuaderPolicy> persuaders;
  std::vector<agents::PersuadeePolicy> persuadees;
  std::vector<std::string> pairings;  // empty = all four
  View view = View::explicit_view;
  int cases_per_cell = 100;
  std::uint64_t master_seed = 0;
  TiePolicy tie;
  std::vector<message::AblationSpec> ablations;
  int workers = 1;
  std::optional<std::filesystem::path> transcript;
};

struct PairingResult {
  std::string cell_id;   // seed identity: "<method>|<persuadee>|<pairing>"
  std::string method;    // display label; ablation rows append " w/o ..."
  std::string persuadee;
  std::string pairing;   // bp_bp | bp_nbp | nbp_bp | nbp_nbp
  std::optional<double> mean;  // absent when every case was undecidable
  double std_dev = 0.0;        // population std of the decided 0/1 outcomes
  int n = 0;
  int successes = 0;
  int anomalies = 0;       // undecidable cases, excluded from mean and n_eff
  int zero_marginal = 0;   // impossible-signal rejections (informational)

  int n_effective() const { return n - anomalies; }
};

// Per-method aggregate. `avg` is the mean of the cell means (the per-
// persuadee reading); the pooled fields re-aggregate the raw 0/1 outcomes
// across the method's cells, which changes the std but not the mean when
// every cell ran the same case count.
struct MethodSummary {
  std::string method;
  std::optional<double> avg;             // mean over the method's cells
  std::optional<double> delta_vs_naive;  // avg - avg(naive), when naive ran
  std::optional<double> pooled_mean;
  double pooled_std = 0.0;
  int pooled_n = 0;        // decided cases across the method's cells
  int pooled_successes = 0;
};

struct ResultTable {
  std::vector<PairingResult> rows;
  std::vector<MethodSummary> methods;
};

std::string pairing_label(const agents::PersuaderPolicy& persuader,
                          const agents::PersuadeePolicy& persuadee);

// One seeded interaction: sample the true state from the prior, plan the
// message, optionally ablate it, and let the persuadee decide.
agents::CaseOutcome run_case(const agents::PersuaderPolicy& persuader,
                             const agents::PersuadeePolicy& persuadee,
                             const corpus::SetupRecord& record,
                             std::uint64_t case_seed,
                             const std::optional<message::AblationSpec>& ablation = {},
                             View view = View::explicit_view,
                             const external::ChatClient* client = nullptr);

// cases_per_cell outcomes with seeds derived from (master_seed, cell id,
// case index); case i runs corpus record i mod corpus size. Ablation rows
// reuse the base cell id for seeding so ablated and unablated runs see the
// same sampled states and signals.
PairingResult run_pairing(const ExperimentConfig& config,
                          const agents::PersuaderPolicy& persuader,
                          const agents::PersuadeePolicy& persuadee,
                          const std::vector<corpus::SetupRecord>& corpus,
                          const std::optional<message::AblationSpec>& ablation = {},
                          const external::ChatClient* client = nullptr,
                          std::vector<agents::CaseOutcome>* outcomes = nullptr);

ResultTable run_matrix(const ExperimentConfig& config);

// Matrix restricted to bp persuaders: baseline rows plus one row-set per
// ablation spec.
ResultTable run_ablation(const ExperimentConfig& config,
                         const std::vector<message::AblationSpec>& specs);

std::string emit_report(const ResultTable& table, ReportFormat format);

nlohmann::ordered_json table_to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::ordered_json& doc);

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const nlohmann::ordered_json& doc,
                              const std::filesystem::path& base_dir = {});

}  // namespace bp::harness
