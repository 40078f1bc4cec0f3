#include "bp/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "bp/rng.hpp"
#include "bp/textfmt.hpp"

namespace bp::harness {

namespace {

std::string default_label(const agents::PersuaderPolicy& p) {
  switch (p.kind) {
    case agents::PersuaderKind::bp_sfnl: return "sfnl";
    case agents::PersuaderKind::bp_fnl: return "fnl";
    case agents::PersuaderKind::naive: return "naive";
    case agents::PersuaderKind::strong_stub: return "strong";
    case agents::PersuaderKind::external: return "external";
  }
  return "persuader";
}

std::string default_label(const agents::PersuadeePolicy& p) {
  switch (p.kind) {
    case agents::PersuadeeKind::bp_rational: return "rational";
    case agents::PersuadeeKind::nbp_heuristic: return "heuristic";
    case agents::PersuadeeKind::external: return "external";
  }
  return "persuadee";
}

std::string label_of(const agents::PersuaderPolicy& p) {
  return p.label.empty() ? default_label(p) : p.label;
}

std::string label_of(const agents::PersuadeePolicy& p) {
  return p.label.empty() ? default_label(p) : p.label;
}

std::string cell_id_of(const agents::PersuaderPolicy& persuader,
                       const agents::PersuadeePolicy& persuadee) {
  return label_of(persuader) + "|" + label_of(persuadee) + "|" +
         pairing_label(persuader, persuadee);
}

std::string template_for(const agents::PersuadeePolicy& p, View view) {
  if (p.template_id) return *p.template_id;
  std::string id = p.bp_competent() ? "persuadee.bp." : "persuadee.nbp.";
  return id + (view == View::explicit_view ? "explicit" : "self_derived");
}

// The rationality prompt of the persuadee-side analysis; appended verbatim
// when rationality_boost is set on an external persuadee.
constexpr std::string_view kRationalPrompt =
    "You are a very rational person, making decisions only after careful "
    "calculation.";

agents::CaseOutcome decide_external(const agents::PersuadeePolicy& persuadee,
                                    const corpus::SetupRecord& record,
                                    agents::CaseOutcome outcome, View view,
                                    const external::ChatClient& client) {
  const std::string tmpl = template_for(persuadee, view);
  std::map<std::string, std::string> bindings;
  bindings["scenario"] = corpus::scenario_to_json(record.scenario).dump(2);
  if (view == View::explicit_view) {
    bindings["bayesian_setup"] = corpus::setup_to_json(record.setup).dump(2);
  }
  bindings["persuader_msg"] = outcome.msg.rendered;
  const std::string user = agents::render_prompt(tmpl, bindings);
  std::string system = agents::prompt_template(tmpl).system;
  if (persuadee.rationality_boost) {
    system += "\n";
    system += kRationalPrompt;
  }
  const external::ChatExchange ex = client.complete(system, user);
  // Keep the persuader-side exchange when both roles are external.
  auto append = [](std::optional<std::string>& slot, const std::string& text) {
    slot = slot ? *slot + "\n---\n" + text : text;
  };
  append(outcome.prompt, system + "\n---\n" + user);
  append(outcome.response, ex.content);
  append(outcome.request_body, ex.request_body);
  append(outcome.response_body, ex.response_body);
  switch (agents::extract_decision(ex.content)) {
    case agents::Decision::accept:
      outcome.action = std::string(kAccept);
      break;
    case agents::Decision::reject:
      outcome.action = std::string(kReject);
      break;
    case agents::Decision::undecidable:
      outcome.undecidable = true;
      outcome.action.clear();
      break;
  }
  outcome.success = outcome.action == kAccept;
  return outcome;
}

}  // namespace

std::string pairing_label(const agents::PersuaderPolicy& persuader,
                          const agents::PersuadeePolicy& persuadee) {
  std::string label = persuader.bp_competent() ? "bp_" : "nbp_";
  label += persuadee.bp_competent() ? "bp" : "nbp";
  return label;
}

agents::CaseOutcome run_case(const agents::PersuaderPolicy& persuader,
                             const agents::PersuadeePolicy& persuadee,
                             const corpus::SetupRecord& record,
                             std::uint64_t case_seed,
                             const std::optional<message::AblationSpec>& ablation,
                             View view, const external::ChatClient* client) {
  Rng rng(case_seed);
  const corpus::BayesianSetup& setup = record.setup;
  const Distribution prior = setup.prior();

  agents::CaseOutcome outcome;
  outcome.true_state = setup.states[rng.categorical(prior.probs())];

  if (persuader.kind == agents::PersuaderKind::external) {
    if (client == nullptr) {
      throw ConfigError("external persuader requested but no endpoint configured");
    }
    if (persuadee.kind != agents::PersuadeeKind::external) {
      throw ConfigError(
          "a scripted persuadee cannot interpret free-text external messages");
    }
    const std::string tmpl = persuader.template_id.value_or(
        std::string(persuader.bp_competent() ? "persuader.bp_sfnl." : "persuader.nbp.") +
        (view == View::explicit_view ? "explicit" : "self_derived"));
    std::map<std::string, std::string> bindings;
    bindings["scenario"] = corpus::scenario_to_json(record.scenario).dump(2);
    if (view == View::explicit_view && persuader.bp_competent()) {
      bindings["bayesian_setup"] = corpus::setup_to_json(setup).dump(2);
    }
    const std::string user = agents::render_prompt(tmpl, bindings);
    const std::string& system = agents::prompt_template(tmpl).system;
    const external::ChatExchange ex = client->complete(system, user);
    outcome.request_body = ex.request_body;
    outcome.response_body = ex.response_body;
    outcome.signal = "external";
    outcome.msg.style = persuader.bp_competent() ? message::Style::sfnl
                                                 : message::Style::fnl;
    outcome.msg.des.signal = "external";
    outcome.msg.des.narrative = ex.content;
    outcome.msg.rendered = ex.content;
    outcome.prompt = system + "\n---\n" + user;
    outcome.response = ex.content;
  } else {
    outcome.msg = agents::persuader_plan(persuader, setup, outcome.true_state, rng);
    outcome.signal = outcome.msg.des.signal;
    if (ablation) outcome.msg = message::ablate(outcome.msg, *ablation);
  }

  if (persuadee.kind == agents::PersuadeeKind::external) {
    if (client == nullptr) {
      throw ConfigError("external persuadee requested but no endpoint configured");
    }
    return decide_external(persuadee, record, std::move(outcome), view, *client);
  }

  agents::DecideTrace trace;
  outcome.action = agents::persuadee_decide(persuadee, outcome.msg, prior,
                                            setup.receiver_utility(), rng, &trace);
  outcome.zero_marginal = trace.zero_marginal;
  outcome.success = outcome.action == kAccept;
  return outcome;
}

PairingResult run_pairing(const ExperimentConfig& config,
                          const agents::PersuaderPolicy& persuader,
                          const agents::PersuadeePolicy& persuadee,
                          const std::vector<corpus::SetupRecord>& corpus,
                          const std::optional<message::AblationSpec>& ablation,
                          const external::ChatClient* client,
                          std::vector<agents::CaseOutcome>* outcomes_out) {
  if (corpus.empty()) throw CorpusError("run_pairing: empty corpus");
  const int n = config.cases_per_cell;
  const std::string cell_id = cell_id_of(persuader, persuadee);

  std::vector<agents::CaseOutcome> outcomes(static_cast<std::size_t>(n));
  auto run_one = [&](int i) {
    const std::uint64_t seed = derive_case_seed(config.master_seed, cell_id,
                                                static_cast<std::uint64_t>(i));
    const corpus::SetupRecord& record =
        corpus[static_cast<std::size_t>(i) % corpus.size()];
    outcomes[static_cast<std::size_t>(i)] =
        run_case(persuader, persuadee, record, seed, ablation, config.view, client);
  };

  if (config.workers > 1) {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nthreads = std::min(config.workers, n);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (int i = 0; i < n; ++i) run_one(i);
  }

  PairingResult res;
  res.cell_id = cell_id;
  res.method = label_of(persuader);
  if (ablation) res.method += " w/o " + ablation->label();
  res.persuadee = label_of(persuadee);
  res.pairing = pairing_label(persuader, persuadee);
  res.n = n;
  for (const auto& o : outcomes) {
    if (o.undecidable) {
      ++res.anomalies;
      continue;
    }
    if (o.success) ++res.successes;
    if (o.zero_marginal) ++res.zero_marginal;
  }
  const int decided = res.n_effective();
  if (decided > 0) {
    const double p = static_cast<double>(res.successes) / decided;
    res.mean = p;
    res.std_dev = std::sqrt(p * (1.0 - p));
  }
  if (outcomes_out) *outcomes_out = std::move(outcomes);
  return res;
}

namespace {

void check_config(const ExperimentConfig& config) {
  if (config.cases_per_cell < 1) throw ConfigError("cases_per_cell must be >= 1");
  if (config.persuaders.empty() || config.persuadees.empty()) {
    throw ConfigError("need at least one persuader and one persuadee");
  }
  for (const auto& p : config.persuaders) agents::check_policy(p);
  for (const auto& p : config.persuadees) agents::check_policy(p);
  // '|' would corrupt cell ids, ',' the CSV rows.
  auto check_label = [](const std::string& label) {
    if (label.find('|') != std::string::npos ||
        label.find(',') != std::string::npos) {
      throw ConfigError("labels must not contain '|' or ',': " + label);
    }
  };
  std::map<std::string, int> seen;
  for (const auto& p : config.persuaders) {
    check_label(label_of(p));
    if (++seen[label_of(p)] > 1) {
      throw ConfigError("duplicate persuader label: " + label_of(p) +
                        " (set distinct 'label' fields)");
    }
  }
  seen.clear();
  for (const auto& p : config.persuadees) {
    check_label(label_of(p));
    if (++seen[label_of(p)] > 1) {
      throw ConfigError("duplicate persuadee label: " + label_of(p));
    }
  }
  for (const auto& want : config.pairings) {
    if (want != "bp_bp" && want != "bp_nbp" && want != "nbp_bp" && want != "nbp_nbp") {
      throw ConfigError("unknown pairing label: " + want);
    }
    bool matched = false;
    for (const auto& pr : config.persuaders) {
      for (const auto& pe : config.persuadees) {
        matched = matched || pairing_label(pr, pe) == want;
      }
    }
    if (!matched) {
      throw ConfigError("pairing " + want + " matches no configured policy pair");
    }
  }
}

bool pairing_enabled(const ExperimentConfig& config, const std::string& label) {
  if (config.pairings.empty()) return true;
  for (const auto& p : config.pairings) {
    if (p == label) return true;
  }
  return false;
}

std::vector<corpus::SetupRecord> load_validated_corpus(const ExperimentConfig& config) {
  auto records = corpus::load_corpus(config.corpus);
  std::string problems;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto report = corpus::validate_record(records[i]);
    for (const auto& v : report.violations) {
      problems += "\n  record " + std::to_string(i) + " " + v.path + " [" + v.rule +
                  "]: " + v.message;
    }
  }
  if (!problems.empty()) {
    throw CorpusError("corpus failed validation:" + problems);
  }
  return records;
}

std::unique_ptr<external::ChatClient> client_if_needed(const ExperimentConfig& config) {
  bool needed = false;
  for (const auto& p : config.persuaders) {
    needed = needed || p.kind == agents::PersuaderKind::external;
  }
  for (const auto& p : config.persuadees) {
    needed = needed || p.kind == agents::PersuadeeKind::external;
  }
  if (!needed) return nullptr;
  auto cfg = external::ExternalConfig::from_env();
  if (!cfg) {
    throw ConfigError(
        "external agents configured but BP_EXTERNAL_BASE_URL / "
        "BP_EXTERNAL_MODEL are not set");
  }
  return std::make_unique<external::ChatClient>(*cfg);
}

void append_transcript(const ExperimentConfig& config, const PairingResult& cell,
                       const std::vector<agents::CaseOutcome>& outcomes,
                       std::ofstream& out) {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    nlohmann::ordered_json line = nlohmann::ordered_json::object();
    line["cell"] = cell.cell_id;
    line["method"] = cell.method;
    line["case"] = i;
    line["seed"] = derive_case_seed(config.master_seed, cell.cell_id, i);
    line["true_state"] = o.true_state;
    line["signal"] = o.signal;
    line["action"] = o.action;
    line["success"] = o.success;
    if (o.zero_marginal) line["zero_marginal"] = true;
    if (o.undecidable) line["undecidable"] = true;
    line["message"] = message::to_json(o.msg);
    if (o.prompt) line["prompt"] = *o.prompt;
    if (o.response) line["response"] = *o.response;
    if (o.request_body) line["http_request"] = *o.request_body;
    if (o.response_body) line["http_response"] = *o.response_body;
    out << line.dump() << "\n";
  }
}

void summarize(ResultTable& table, const std::vector<std::string>& method_order,
               const std::string& naive_label) {
  struct Acc {
    double sum = 0.0;
    int cells = 0;
    int successes = 0;
    int decided = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& row : table.rows) {
    auto& a = acc[row.method];
    a.successes += row.successes;
    a.decided += row.n_effective();
    if (!row.mean) continue;
    a.sum += *row.mean;
    ++a.cells;
  }
  std::optional<double> naive_avg;
  if (auto it = acc.find(naive_label); it != acc.end() && it->second.cells > 0) {
    naive_avg = it->second.sum / it->second.cells;
  }
  for (const auto& method : method_order) {
    MethodSummary s;
    s.method = method;
    if (auto it = acc.find(method); it != acc.end()) {
      const Acc& a = it->second;
      if (a.cells > 0) {
        s.avg = a.sum / a.cells;
        if (naive_avg) s.delta_vs_naive = *s.avg - *naive_avg;
      }
      s.pooled_n = a.decided;
      s.pooled_successes = a.successes;
      if (a.decided > 0) {
        const double p = static_cast<double>(a.successes) / a.decided;
        s.pooled_mean = p;
        s.pooled_std = std::sqrt(p * (1.0 - p));
      }
    }
    table.methods.push_back(std::move(s));
  }
}

}  // namespace

ResultTable run_matrix(const ExperimentConfig& config) {
  check_config(config);
  const auto records = load_validated_corpus(config);
  const auto client = client_if_needed(config);

  std::ofstream transcript;
  if (config.transcript) {
    transcript.open(*config.transcript, std::ios::binary | std::ios::trunc);
    if (!transcript) {
      throw ConfigError("cannot write transcript: " + config.transcript->string());
    }
  }

  ResultTable table;
  std::vector<std::string> method_order;
  std::string naive_label;
  for (const auto& persuader : config.persuaders) {
    method_order.push_back(label_of(persuader));
    if (persuader.kind == agents::PersuaderKind::naive) {
      naive_label = label_of(persuader);
    }
    for (const auto& persuadee : config.persuadees) {
      if (!pairing_enabled(config, pairing_label(persuader, persuadee))) continue;
      std::vector<agents::CaseOutcome> outcomes;
      auto cell = run_pairing(config, persuader, persuadee, records, {},
                              client.get(), config.transcript ? &outcomes : nullptr);
      if (config.transcript) append_transcript(config, cell, outcomes, transcript);
      table.rows.push_back(std::move(cell));
    }
  }
  summarize(table, method_order, naive_label);
  return table;
}

ResultTable run_ablation(const ExperimentConfig& config,
                         const std::vector<message::AblationSpec>& specs) {
  check_config(config);
  const auto records = load_validated_corpus(config);
  const auto client = client_if_needed(config);

  std::ofstream transcript;
  if (config.transcript) {
    transcript.open(*config.transcript, std::ios::binary | std::ios::trunc);
    if (!transcript) {
      throw ConfigError("cannot write transcript: " + config.transcript->string());
    }
  }

  ResultTable table;
  std::vector<std::string> method_order;
  auto run_set = [&](const std::optional<message::AblationSpec>& spec) {
    for (const auto& persuader : config.persuaders) {
      if (!persuader.bp_competent()) continue;
      std::string method = label_of(persuader);
      if (spec) method += " w/o " + spec->label();
      method_order.push_back(method);
      for (const auto& persuadee : config.persuadees) {
        if (!pairing_enabled(config, pairing_label(persuader, persuadee))) continue;
        std::vector<agents::CaseOutcome> outcomes;
        auto cell = run_pairing(config, persuader, persuadee, records, spec,
                                client.get(),
                                config.transcript ? &outcomes : nullptr);
        if (config.transcript) append_transcript(config, cell, outcomes, transcript);
        table.rows.push_back(std::move(cell));
      }
    }
  };
  run_set(std::nullopt);
  for (const auto& spec : specs) run_set(spec);
  summarize(table, method_order, "");
  return table;
}

namespace {

std::string format_cell(const PairingResult& row) {
  if (!row.mean) return "n/a";
  return format_fixed2(*row.mean) + "±" + format_fixed2(row.std_dev);
}

std::string format_delta(double d) {
  const std::string mag = format_fixed2(std::fabs(d));
  if (d == 0.0 || mag == "0.00") return "0.00";
  return (d > 0 ? "+" : "-") + mag;
}

const std::vector<std::string>& canonical_pairings() {
  static const std::vector<std::string> kOrder = {"bp_bp", "bp_nbp", "nbp_bp",
                                                  "nbp_nbp"};
  return kOrder;
}

}  // namespace

std::string emit_report(const ResultTable& table, ReportFormat format) {
  // Column set: pairings that actually occur, in canonical order.
  std::vector<std::string> pairings;
  for (const auto& p : canonical_pairings()) {
    for (const auto& row : table.rows) {
      if (row.pairing == p) {
        pairings.push_back(p);
        break;
      }
    }
  }
  // Row identity: (method, persuadee) when a method faces several
  // persuadees of the same competence, otherwise just the method.
  std::map<std::string, std::map<std::string, int>> multiplicity;
  for (const auto& row : table.rows) ++multiplicity[row.method][row.pairing];
  auto row_key = [&](const PairingResult& row) {
    int worst = 0;
    for (const auto& [pairing, count] : multiplicity[row.method]) {
      worst = std::max(worst, count);
    }
    return worst > 1 ? row.method + " vs. " + row.persuadee : row.method;
  };

  std::vector<std::string> order;  // display rows in first-seen order
  std::map<std::string, std::map<std::string, const PairingResult*>> grid;
  std::map<std::string, std::string> row_method;
  for (const auto& row : table.rows) {
    const std::string key = row_key(row);
    if (!grid.count(key)) order.push_back(key);
    grid[key][row.pairing] = &row;
    row_method[key] = row.method;
  }
  auto summary_of = [&](const std::string& method) -> const MethodSummary* {
    for (const auto& m : table.methods) {
      if (m.method == method) return &m;
    }
    return nullptr;
  };

  std::ostringstream out;
  if (format == ReportFormat::markdown) {
    out << "| Method |";
    for (const auto& p : pairings) out << " " << p << " |";
    out << " Avg | Pooled | Δ |\n";
    out << "| --- |";
    for (std::size_t i = 0; i < pairings.size() + 3; ++i) out << " --- |";
    out << "\n";
    for (const auto& key : order) {
      out << "| " << key << " |";
      for (const auto& p : pairings) {
        auto it = grid[key].find(p);
        out << " " << (it == grid[key].end() ? "" : format_cell(*it->second)) << " |";
      }
      const MethodSummary* s = summary_of(row_method[key]);
      out << " " << (s && s->avg ? format_fixed2(*s->avg) : "") << " |";
      out << " "
          << (s && s->pooled_mean ? format_fixed2(*s->pooled_mean) + "±" +
                                        format_fixed2(s->pooled_std)
                                  : "")
          << " |";
      out << " "
          << (s && s->delta_vs_naive ? format_delta(*s->delta_vs_naive) : "")
          << " |\n";
    }
    return out.str();
  }

  // CSV: one row per cell, 2-decimal display plus full-precision sidecars.
  out << "method,persuadee,pairing,mean_2dp,std_2dp,mean,std,n,successes,"
         "anomalies,zero_marginal,method_avg,method_delta,method_pooled_mean,"
         "method_pooled_std\n";
  for (const auto& row : table.rows) {
    const MethodSummary* s = summary_of(row.method);
    out << row.method << "," << row.persuadee << "," << row.pairing << ",";
    out << (row.mean ? format_fixed2(*row.mean) : "") << ",";
    out << (row.mean ? format_fixed2(row.std_dev) : "") << ",";
    out << (row.mean ? format_real(*row.mean) : "") << ",";
    out << (row.mean ? format_real(row.std_dev) : "") << ",";
    out << row.n << "," << row.successes << "," << row.anomalies << ","
        << row.zero_marginal << ",";
    out << (s && s->avg ? format_real(*s->avg) : "") << ",";
    out << (s && s->delta_vs_naive ? format_real(*s->delta_vs_naive) : "") << ",";
    out << (s && s->pooled_mean ? format_real(*s->pooled_mean) : "") << ",";
    out << (s && s->pooled_mean ? format_real(s->pooled_std) : "") << "\n";
  }
  return out.str();
}

nlohmann::ordered_json table_to_json(const ResultTable& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json row = {
        {"cell_id", r.cell_id},   {"method", r.method},
        {"persuadee", r.persuadee}, {"pairing", r.pairing},
        {"std", r.std_dev},       {"n", r.n},
        {"successes", r.successes}, {"anomalies", r.anomalies},
        {"zero_marginal", r.zero_marginal}};
    if (r.mean) row["mean"] = *r.mean;
    rows.push_back(row);
  }
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (const auto& m : table.methods) {
    nlohmann::ordered_json entry = {{"method", m.method}};
    if (m.avg) entry["avg"] = *m.avg;
    if (m.delta_vs_naive) entry["delta_vs_naive"] = *m.delta_vs_naive;
    if (m.pooled_mean) {
      entry["pooled_mean"] = *m.pooled_mean;
      entry["pooled_std"] = m.pooled_std;
    }
    entry["pooled_n"] = m.pooled_n;
    entry["pooled_successes"] = m.pooled_successes;
    methods.push_back(entry);
  }
  return {{"rows", rows}, {"methods", methods}};
}

ResultTable table_from_json(const nlohmann::ordered_json& doc) {
  ResultTable table;
  for (const auto& row : doc.at("rows")) {
    PairingResult r;
    r.cell_id = row.at("cell_id").get<std::string>();
    r.method = row.at("method").get<std::string>();
    r.persuadee = row.at("persuadee").get<std::string>();
    r.pairing = row.at("pairing").get<std::string>();
    if (row.contains("mean")) r.mean = row.at("mean").get<double>();
    r.std_dev = row.at("std").get<double>();
    r.n = row.at("n").get<int>();
    r.successes = row.at("successes").get<int>();
    r.anomalies = row.at("anomalies").get<int>();
    r.zero_marginal = row.value("zero_marginal", 0);
    table.rows.push_back(std::move(r));
  }
  for (const auto& m : doc.at("methods")) {
    MethodSummary s;
    s.method = m.at("method").get<std::string>();
    if (m.contains("avg")) s.avg = m.at("avg").get<double>();
    if (m.contains("delta_vs_naive")) {
      s.delta_vs_naive = m.at("delta_vs_naive").get<double>();
    }
    if (m.contains("pooled_mean")) {
      s.pooled_mean = m.at("pooled_mean").get<double>();
      s.pooled_std = m.value("pooled_std", 0.0);
    }
    s.pooled_n = m.value("pooled_n", 0);
    s.pooled_successes = m.value("pooled_successes", 0);
    table.methods.push_back(std::move(s));
  }
  return table;
}

namespace {

TiePolicy parse_tie(const nlohmann::ordered_json& doc) {
  TiePolicy tie;
  if (!doc.is_object()) return tie;
  const std::string mode = doc.value("mode", "favor_sender");
  if (mode == "favor_sender" || mode == "favor") {
    tie.mode = TiePolicy::Mode::favor_sender;
  } else if (mode == "reject_on_tie" || mode == "strict") {
    tie.mode = TiePolicy::Mode::reject_on_tie;
  } else {
    throw ConfigError("unknown tie mode: " + mode);
  }
  tie.epsilon = doc.value("epsilon", 1e-6);
  return tie;
}

agents::PersuaderPolicy parse_persuader(const nlohmann::ordered_json& doc,
                                        TiePolicy tie) {
  agents::PersuaderPolicy p;
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "bp_sfnl") {
    p.kind = agents::PersuaderKind::bp_sfnl;
  } else if (kind == "bp_fnl") {
    p.kind = agents::PersuaderKind::bp_fnl;
  } else if (kind == "naive") {
    p.kind = agents::PersuaderKind::naive;
  } else if (kind == "strong_stub" || kind == "strong") {
    p.kind = agents::PersuaderKind::strong_stub;
  } else if (kind == "external") {
    p.kind = agents::PersuaderKind::external;
  } else {
    throw ConfigError("unknown persuader kind: " + kind);
  }
  const std::string commitment = doc.value("commitment", "optimal");
  if (commitment == "optimal") {
    p.commitment = agents::Commitment::optimal;
  } else if (commitment == "given_schema") {
    p.commitment = agents::Commitment::given_schema;
  } else {
    throw ConfigError("unknown commitment: " + commitment);
  }
  p.tie = tie;
  p.label = doc.value("label", "");
  if (doc.contains("template")) p.template_id = doc.at("template").get<std::string>();
  if (doc.contains("competence")) {
    p.external_bp = doc.at("competence").get<std::string>() == "bp";
  }
  return p;
}

agents::PersuadeePolicy parse_persuadee(const nlohmann::ordered_json& doc,
                                        TiePolicy tie) {
  agents::PersuadeePolicy p;
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "bp_rational") {
    p.kind = agents::PersuadeeKind::bp_rational;
  } else if (kind == "nbp_heuristic") {
    p.kind = agents::PersuadeeKind::nbp_heuristic;
  } else if (kind == "external") {
    p.kind = agents::PersuadeeKind::external;
  } else {
    throw ConfigError("unknown persuadee kind: " + kind);
  }
  p.tie = tie;
  if (doc.contains("credulity")) p.credulity = doc.at("credulity").get<double>();
  p.rationality_boost = doc.value("rationality_boost", false);
  p.label = doc.value("label", "");
  if (doc.contains("template")) p.template_id = doc.at("template").get<std::string>();
  if (doc.contains("competence")) {
    p.external_bp = doc.at("competence").get<std::string>() == "bp";
  }
  return p;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::ordered_json& doc,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  if (!doc.contains("corpus")) throw ConfigError("config needs a 'corpus' path");
  std::filesystem::path corpus = doc.at("corpus").get<std::string>();
  cfg.corpus = corpus.is_absolute() || base_dir.empty() ? corpus : base_dir / corpus;
  cfg.tie = doc.contains("tie") ? parse_tie(doc.at("tie")) : TiePolicy{};
  if (!doc.contains("persuaders") || !doc.contains("persuadees")) {
    throw ConfigError("config needs 'persuaders' and 'persuadees' lists");
  }
  for (const auto& p : doc.at("persuaders")) {
    cfg.persuaders.push_back(parse_persuader(p, cfg.tie));
  }
  for (const auto& p : doc.at("persuadees")) {
    cfg.persuadees.push_back(parse_persuadee(p, cfg.tie));
  }
  if (doc.contains("pairings")) {
    for (const auto& p : doc.at("pairings")) {
      cfg.pairings.push_back(p.get<std::string>());
    }
  }
  const std::string view = doc.value("view", "explicit");
  if (view == "explicit") {
    cfg.view = View::explicit_view;
  } else if (view == "self_derived") {
    cfg.view = View::self_derived;
  } else {
    throw ConfigError("unknown view: " + view);
  }
  cfg.cases_per_cell = doc.value("cases_per_cell", 100);
  cfg.master_seed = doc.value("master_seed", std::uint64_t{0});
  if (doc.contains("ablations")) {
    for (const auto& a : doc.at("ablations")) {
      cfg.ablations.push_back(message::AblationSpec::parse(a.get<std::string>()));
    }
  }
  cfg.workers = doc.value("workers", 1);
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (doc.contains("transcript")) {
    std::filesystem::path t = doc.at("transcript").get<std::string>();
    cfg.transcript = t.is_absolute() || base_dir.empty() ? t : base_dir / t;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config: " + path.string());
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace bp::harness
