#pragma once

#include <map>
#include <optional>
#include <string>

#include "bp/core.hpp"
#include "bp/corpus.hpp"
#include "bp/message.hpp"
#include "bp/rng.hpp"

namespace bp::agents {

enum class PersuaderKind { bp_sfnl, bp_fnl, naive, strong_stub, external };
enum class Commitment { optimal, given_schema };

struct PersuaderPolicy {
  PersuaderKind kind = PersuaderKind::bp_sfnl;
  Commitment commitment = Commitment::optimal;
  // Disclosed type belief; by default it is derived from the committed
  // scheme so the narrative and the schema tell the same story.
  std::optional<TypeBelief> type_belief;
  TiePolicy tie;       // used when solving for the optimal commitment
  std::string label;   // harness row label; defaults to the kind name
  std::optional<std::string> template_id;  // external agents: prompt override
  bool external_bp = true;  // competence label when kind == external
  bool bp_competent() const {
    if (kind == PersuaderKind::external) return external_bp;
    return kind == PersuaderKind::bp_sfnl || kind == PersuaderKind::bp_fnl;
  }
};

enum class PersuadeeKind { bp_rational, nbp_heuristic, external };

struct PersuadeePolicy {
  PersuadeeKind kind = PersuadeeKind::bp_rational;
  TiePolicy tie;
  std::optional<double> credulity;  // nbp_heuristic only, in [0,1]
  bool rationality_boost = false;   // forces the rational path / RAT prompt
  std::string label;
  std::optional<std::string> template_id;  // external agents: prompt override
  bool external_bp = true;  // competence label when kind == external
  bool bp_competent() const {
    if (kind == PersuadeeKind::external) return external_bp;
    return kind == PersuadeeKind::bp_rational;
  }
};

// Throws ConfigError when a policy's fields are inconsistent with its kind.
void check_policy(const PersuaderPolicy& policy);
void check_policy(const PersuadeePolicy& policy);

struct CaseOutcome {
  std::string true_state;
  std::string signal;
  message::CompositeMessage msg;
  std::string action;
  bool success = false;          // action == Accept
  bool zero_marginal = false;    // receiver saw an impossible signal
  bool undecidable = false;      // external reply did not parse
  // External agents only: rendered prompt, parsed reply, and the verbatim
  // HTTP bodies for the transcript store.
  std::optional<std::string> prompt, response;
  std::optional<std::string> request_body, response_body;
};

// Chooses the committed scheme, samples the signal for `true_state` from
// its row, and composes the style-appropriate message. naive senders emit
// the bare truthful state description; strong_stub adds the comparative
// payoff claim but never the commitment narrative.
message::CompositeMessage persuader_plan(const PersuaderPolicy& policy,
                                         const corpus::BayesianSetup& setup,
                                         std::string_view true_state, Rng& rng);

struct DecideTrace {
  bool zero_marginal = false;
};

// bp_rational rebuilds the effective schema from the type disclosure
// (falling back to the uninformative always-favorable schema when there is
// none), updates, and best-responds. nbp_heuristic accepts with probability
// `credulity` whenever the message claims a positive payoff, otherwise
// falls back to the no-information decision. An impossible signal decides
// Reject and flags the trace.
std::string persuadee_decide(const PersuadeePolicy& policy,
                             const message::CompositeMessage& msg,
                             const Distribution& prior, const ReceiverUtility& u,
                             Rng& rng, DecideTrace* trace = nullptr);

struct PromptTemplate {
  std::string id;
  std::string system;
  std::string user;  // with {placeholder} slots
};

// Registry ids follow "<role>.<competence>.<view>", e.g.
// "persuadee.bp.explicit". Throws ConfigError for unknown ids.
const PromptTemplate& prompt_template(std::string_view id);

// Expands {name} slots from `bindings`; unknown slots raise
// MissingPlaceholder.
std::string render_prompt(std::string_view template_id,
                          const std::map<std::string, std::string>& bindings);

enum class Decision { accept, reject, undecidable };

// Case-insensitive verdict scan: an explicit decision line wins, else the
// last accept/reject stem, else undecidable.
Decision extract_decision(std::string_view response_text);

// Type belief consistent with committing to `scheme` under the canonical
// honest/dishonest profile (two-state schemes with an informative good row).
TypeBelief derive_type_belief(const SignalingScheme& scheme,
                              const ReceiverUtility& u);

}  // namespace bp::agents
