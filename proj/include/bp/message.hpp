#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bp/core.hpp"
#include "bp/corpus.hpp"

namespace bp::message {

enum class Style { sfnl, fnl };

// What the inference part asserts about the Accept payoff. `numeric` shows
// the worked calculation (SFNL only); `greater_than_zero` asserts the sign
// without numbers; `none` makes no positive-payoff claim.
enum class Claim { numeric, greater_than_zero, none };

struct BasicPart {
  Labels states;
  Distribution prior;
  std::string narrative;
};

struct TypePart {
  SenderTypeProfile profile;
  TypeBelief belief;
  std::string narrative;
};

struct DesPart {
  std::string signal;
  std::string narrative;
};

struct InfPart {
  std::optional<Distribution> posterior;
  std::optional<double> accept_eu;
  // Accept-utility column aligned with the posterior support; these are the
  // numerals the utility ablation strips together with accept_eu.
  std::optional<std::vector<double>> accept_utils;
  Claim claim = Claim::none;

  bool claims_positive_payoff() const { return claim != Claim::none; }
};

// The four-part signal. `des` is mandatory; everything else can be absent
// (naive senders, ablated messages).
struct CompositeMessage {
  std::optional<BasicPart> basic;
  std::optional<TypePart> type_part;
  DesPart des;
  std::optional<InfPart> inf;
  Style style = Style::sfnl;
  std::string rendered;
};

enum class Component { utility, posterior, schema };

struct AblationSpec {
  std::vector<Component> drop;  // non-empty

  bool drops(Component c) const;
  static AblationSpec parse(std::string_view csv);  // "utility,posterior"
  std::string label() const;                        // "utility&posterior"
};

// Builds the full four-part message for `observed_signal`: basic from the
// setup's states and prior, type disclosure from (profile, belief), the
// state description, and the explicit inference (posterior under the
// effective schema, Accept expectation, claim per style and sign).
// Propagates ZeroMarginal for signals the disclosed schema cannot emit.
CompositeMessage compose(const corpus::BayesianSetup& setup,
                         const SenderTypeProfile& profile,
                         const TypeBelief& belief,
                         std::string_view observed_signal, Style style);

// Deterministic template expansion of the structured parts. SFNL includes
// the worked expected-payoff line; FNL renders the same reasoning without
// any numerals.
std::string render(const CompositeMessage& message);

// Removes the requested components and re-renders. In SFNL the payoff
// numerals quote the posterior, so dropping the posterior takes the utility
// numerics with it; FNL components ablate independently.
CompositeMessage ablate(const CompositeMessage& message, const AblationSpec& spec);

nlohmann::ordered_json to_json(const CompositeMessage& message);

}  // namespace bp::message
