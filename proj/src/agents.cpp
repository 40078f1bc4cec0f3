#include "bp/agents.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "bp/design.hpp"

namespace bp::agents {

void check_policy(const PersuaderPolicy& policy) {
  if (policy.kind == PersuaderKind::external) return;
  if (policy.type_belief &&
      policy.type_belief->support() !=
          Labels{std::string(kHonest), std::string(kDishonest)}) {
    throw ConfigError("persuader type_belief must range over Honest/Dishonest");
  }
}

void check_policy(const PersuadeePolicy& policy) {
  const bool nbp = policy.kind == PersuadeeKind::nbp_heuristic;
  if (nbp != policy.credulity.has_value()) {
    throw ConfigError("credulity is required for nbp_heuristic and only there");
  }
  if (policy.credulity && !(*policy.credulity >= 0.0 && *policy.credulity <= 1.0)) {
    throw ConfigError("credulity must lie in [0,1]");
  }
}

TypeBelief derive_type_belief(const SignalingScheme& scheme,
                              const ReceiverUtility& u) {
  const StateSpace& states = scheme.states();
  if (states.size() != 2) {
    throw PreconditionViolation("derive_type_belief: two-state schemes only");
  }
  const std::string fav = most_favorable_signal(states, scheme.signals(), u);
  if (scheme.prob(fav, fav) != 1.0) {
    throw PreconditionViolation(
        "derive_type_belief: scheme is not honest about the favorable state");
  }
  const std::string& other =
      states.labels()[0] == fav ? states.labels()[1] : states.labels()[0];
  const double q = scheme.prob(other, fav);
  return TypeBelief({std::string(kHonest), std::string(kDishonest)}, {1.0 - q, q});
}

message::CompositeMessage persuader_plan(const PersuaderPolicy& policy,
                                         const corpus::BayesianSetup& setup,
                                         std::string_view true_state, Rng& rng) {
  const StateSpace states = setup.state_space();
  states.index_of(true_state);  // precondition: known state

  switch (policy.kind) {
    case PersuaderKind::bp_sfnl:
    case PersuaderKind::bp_fnl: {
      const Distribution prior = setup.prior();
      const ReceiverUtility u = setup.receiver_utility();
      // Optimal commitment targets strict persuasion: the committed leak sits
      // just under the indifference threshold, so the message can honestly
      // claim a positive payoff whatever tie convention the receiver runs.
      // Costs epsilon * mu(bad) of sender value relative to the exact optimum.
      const double eps = policy.tie.epsilon > 0.0 ? policy.tie.epsilon : 1e-6;
      const SignalingScheme scheme =
          policy.commitment == Commitment::optimal
              ? design::optimal_binary_scheme(prior, u, setup.sender_utility(),
                                              TiePolicy::strict(eps))
                    .scheme
              : setup.scheme();
      const std::size_t idx = rng.categorical(scheme.row(true_state));
      const std::string& signal = scheme.signals()[idx];
      const TypeBelief belief =
          policy.type_belief ? *policy.type_belief : derive_type_belief(scheme, u);
      const SenderTypeProfile profile =
          SenderTypeProfile::canonical(states, setup.signals, u);
      const auto style = policy.kind == PersuaderKind::bp_sfnl
                             ? message::Style::sfnl
                             : message::Style::fnl;
      return message::compose(setup, profile, belief, signal, style);
    }
    case PersuaderKind::naive: {
      message::CompositeMessage m;
      m.style = message::Style::fnl;
      m.des.signal = std::string(true_state);
      m.des.narrative = "Here is where things stand: the outlook is " +
                        std::string(true_state) +
                        ", and I would be glad to have you on board.";
      m.rendered = message::render(m);
      return m;
    }
    case PersuaderKind::strong_stub: {
      message::CompositeMessage m;
      m.style = message::Style::fnl;
      m.des.signal = std::string(true_state);
      m.des.narrative = "Here is where things stand: the outlook is " +
                        std::string(true_state) + ".";
      message::InfPart inf;
      inf.claim = message::Claim::greater_than_zero;
      m.inf = std::move(inf);
      m.rendered = message::render(m);
      return m;
    }
    case PersuaderKind::external:
      throw PreconditionViolation(
          "persuader_plan: external persuaders go through the chat adapter");
  }
  throw PreconditionViolation("persuader_plan: unknown kind");
}

std::string persuadee_decide(const PersuadeePolicy& policy,
                             const message::CompositeMessage& msg,
                             const Distribution& prior, const ReceiverUtility& u,
                             Rng& rng, DecideTrace* trace) {
  const bool rational =
      policy.rationality_boost || policy.kind == PersuadeeKind::bp_rational;
  if (policy.kind == PersuadeeKind::external) {
    throw PreconditionViolation(
        "persuadee_decide: external persuadees go through the chat adapter");
  }
  if (rational) {
    const StateSpace states(prior.support());
    SignalingScheme schema =
        msg.type_part
            ? effective_schema(msg.type_part->profile, msg.type_part->belief)
            : SignalingScheme::constant(
                  states, prior.support(),
                  most_favorable_signal(states, prior.support(), u));
    try {
      const Distribution post = posterior_update(prior, schema, msg.des.signal);
      return best_response(post, u, policy.tie);
    } catch (const ZeroMarginal&) {
      if (trace) trace->zero_marginal = true;
      return std::string(kReject);
    }
  }
  // Heuristic receiver: a positive-payoff claim persuades with probability
  // `credulity`; otherwise fall back to the no-information decision.
  if (msg.inf && msg.inf->claims_positive_payoff()) {
    return rng.uniform() < *policy.credulity ? std::string(kAccept)
                                             : std::string(kReject);
  }
  return expected_utility(prior, u, kAccept) >= 0.0 ? std::string(kAccept)
                                                    : std::string(kReject);
}

namespace {

constexpr std::string_view kBpIntro =
    "You are an expert in Bayesian persuasion.\n"
    "\n"
    "Bayesian persuasion, in economics and game theory, describes situations "
    "where a persuader (sender) attempts to persuade a persuadee (receiver) to "
    "take certain actions. There is an unknown state of the world, and the "
    "sender must decide what information to disclose to the receiver. Upon "
    "receiving the information, the receiver updates their beliefs about the "
    "state of the world according to Bayes' rule and chooses an action "
    "accordingly.\n"
    "\n"
    "Here's an example of Bayesian Persuasion:\n"
    "Consider an academic adviser (the sender) who is writing a recommendation "
    "letter (the signal) for his graduating student to send to a company (the "
    "receiver), which in turn must decide whether or not to hire the student. "
    "The adviser gets utility 1 if his student is hired, and 0 otherwise "
    "(utility_persuader). The state of nature determines the quality of the "
    "student, and hence the company's utility for hiring the student. The "
    "student is excellent with probability 1/3, and weak with probability 2/3 "
    "(priors). The company gets utility 1 for hiring an excellent student, "
    "utility -1 for hiring a weak student, and utility 0 for not hiring "
    "(utility_persuadee).\n"
    "Consider the following signaling schemes:\n"
    "- No information: Adviser always says excellent, the company maximizes "
    "its utility by not hiring. The adviser's expected utility is 0.\n"
    "- Full information: Honest recommendation, knowing the quality of the "
    "student, the company hires if and only if the student is excellent. The "
    "adviser's expected utility is 1/3.\n"
    "- The optimal (partially informative) scheme: The adviser recommends "
    "hiring when the student is excellent, and with probability just under "
    "0.5 when the student is weak. Otherwise, the adviser recommends not "
    "hiring. The company maximizes its expected utility by following the "
    "recommendation, and the adviser's expected utility is just under 2/3.\n"
    "\n"
    "You will be given a scenario, in which Preventive means the things that "
    "the persuadee wants to do, Generative means the things that the persuader "
    "wants the persuadee to do.\n";

constexpr std::string_view kPersuaderRules =
    "You are the persuader. Based on the given scenario and the Bayesian "
    "persuasion setup modeled from the scenario, output one round of Bayesian "
    "persuasion calculation process.\n"
    "As a sender who always uses the third strategy, output the information "
    "to be conveyed in natural language, which needs to include the signaling "
    "strategy expressed in natural language.\n"
    "You need to directly explain the Bayesian persuasion calculation process "
    "to the persuadee, with the goal of persuading the persuadee to accept "
    "your proposal.\n"
    "You must:\n"
    "1. Speak in a friendly and credible tone;\n"
    "2. Explicitly show the key Bayesian calculation process and expected "
    "benefits in your speech;\n"
    "3. Only output your speech content, do not output any JSON or comments;\n"
    "4. Do not reveal the current world state to the persuadee;\n"
    "5. Use English;\n"
    "6. You SHOULD NOT add any benefits of Generative or drawbacks of "
    "Preventive.\n";

constexpr std::string_view kVerbalizationRule =
    "Explicit computation is banned: express the entire reasoning in plain "
    "natural language, without formulas or numeric calculations.\n";

constexpr std::string_view kSelfDerivedRule =
    "No Bayesian setup is provided. Infer the persuadee's beliefs and "
    "utilities from the scenario yourself before applying the strategy.\n";

constexpr std::string_view kPersuadeeRulesBp =
    "You are the persuadee. Based on the given scenario, the Bayesian "
    "persuasion setup modeled from the scenario, and the persuader's message "
    "to you, calculate the utility of whether to accept, and make a decision "
    "on acceptance. Use English.\n"
    "Please DO NOT add any preconditions.\n";

constexpr std::string_view kPersuadeeRulesBpSelfDerived =
    "You are the persuadee. Based on the given scenario and the persuader's "
    "message to you, form your own estimate of the utility of whether to "
    "accept, and make a decision on acceptance. Use English.\n"
    "Please DO NOT add any preconditions.\n";

constexpr std::string_view kNbpPersuadeeSystem =
    "You will be given a scenario, in which Preventive means the things that "
    "the persuadee wants to do, Generative means the things that the persuader "
    "wants the persuadee to do.\n"
    "\n"
    "You are the persuadee. Based on the given scenario and the persuader's "
    "message to you, make a decision on whether to accept. Use English.\n"
    "Please DO NOT add any preconditions.\n";

constexpr std::string_view kNbpPersuaderSystem =
    "You are the persuader. In the given scenario, output persuasive speech "
    "with the goal of making the persuadee accept your persuasion. Use "
    "English.\n"
    "Only output your speech content, do not output any JSON or comments.\n"
    "You will be given a scenario, in which Preventive means the things that "
    "the persuadee wants to do, Generative means the things that the persuader "
    "wants the persuadee to do.\n"
    "\n"
    "You SHOULD NOT add any benefits of Generative or drawbacks of "
    "Preventive.\n";

constexpr std::string_view kPersuadeeUserExplicit =
    "Input Scenario:\n"
    "{scenario}\n"
    "\n"
    "Scenario Setup:\n"
    "{bayesian_setup}\n"
    "\n"
    "Persuader says to you:\n"
    "<msg_start>{persuader_msg}<msg_end>\n"
    "\n"
    "Please provide your response:\n";

constexpr std::string_view kPersuadeeUserSelfDerived =
    "Input Scenario:\n"
    "{scenario}\n"
    "\n"
    "Persuader says to you:\n"
    "<msg_start>{persuader_msg}<msg_end>\n"
    "\n"
    "Please provide your response:\n";

constexpr std::string_view kPersuaderUserExplicit =
    "Input Scenario:\n"
    "{scenario}\n"
    "\n"
    "Bayesian Persuasion Setup:\n"
    "{bayesian_setup}\n"
    "\n"
    "Please generate a complete speech for the persuadee:\n";

constexpr std::string_view kPersuaderUserScenarioOnly =
    "Input Scenario:\n"
    "{scenario}\n"
    "\n"
    "Please generate a complete speech for the persuadee:\n";

std::string cat(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) out += p;
  return out;
}

const std::map<std::string, PromptTemplate, std::less<>>& registry() {
  static const auto* kTemplates = [] {
    auto* m = new std::map<std::string, PromptTemplate, std::less<>>;
    auto put = [&](std::string id, std::string system, std::string_view user) {
      (*m)[id] = PromptTemplate{id, std::move(system), std::string(user)};
    };
    put("persuader.bp_sfnl.explicit", cat({kBpIntro, "\n", kPersuaderRules}),
        kPersuaderUserExplicit);
    put("persuader.bp_fnl.explicit",
        cat({kBpIntro, "\n", kPersuaderRules, kVerbalizationRule}),
        kPersuaderUserExplicit);
    put("persuader.bp_sfnl.self_derived",
        cat({kBpIntro, "\n", kPersuaderRules, kSelfDerivedRule}),
        kPersuaderUserScenarioOnly);
    put("persuader.bp_fnl.self_derived",
        cat({kBpIntro, "\n", kPersuaderRules, kVerbalizationRule, kSelfDerivedRule}),
        kPersuaderUserScenarioOnly);
    put("persuader.nbp.explicit", std::string(kNbpPersuaderSystem),
        kPersuaderUserScenarioOnly);
    put("persuader.nbp.self_derived", std::string(kNbpPersuaderSystem),
        kPersuaderUserScenarioOnly);
    put("persuadee.bp.explicit", cat({kBpIntro, "\n", kPersuadeeRulesBp}),
        kPersuadeeUserExplicit);
    put("persuadee.bp.self_derived",
        cat({kBpIntro, "\n", kPersuadeeRulesBpSelfDerived}),
        kPersuadeeUserSelfDerived);
    put("persuadee.nbp.explicit", std::string(kNbpPersuadeeSystem),
        kPersuadeeUserExplicit);
    put("persuadee.nbp.self_derived", std::string(kNbpPersuadeeSystem),
        kPersuadeeUserSelfDerived);
    return m;
  }();
  return *kTemplates;
}

}  // namespace

const PromptTemplate& prompt_template(std::string_view id) {
  const auto& reg = registry();
  auto it = reg.find(id);
  if (it == reg.end()) {
    throw ConfigError("unknown prompt template: " + std::string(id));
  }
  return it->second;
}

std::string render_prompt(std::string_view template_id,
                          const std::map<std::string, std::string>& bindings) {
  const PromptTemplate& tmpl = prompt_template(template_id);
  const std::string& src = tmpl.user;
  std::string out;
  out.reserve(src.size());
  std::size_t pos = 0;
  while (pos < src.size()) {
    const std::size_t open = src.find('{', pos);
    if (open == std::string::npos) {
      out.append(src, pos, std::string::npos);
      break;
    }
    out.append(src, pos, open - pos);
    const std::size_t close = src.find('}', open);
    if (close == std::string::npos) {
      throw MissingPlaceholder("unterminated placeholder in template " +
                               std::string(template_id));
    }
    const std::string name = src.substr(open + 1, close - open - 1);
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw MissingPlaceholder("no binding for placeholder {" + name + "} in " +
                               std::string(template_id));
    }
    out += it->second;
    pos = close + 1;
  }
  return out;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool word_boundary_before(const std::string& s, std::size_t pos) {
  return pos == 0 || !std::isalpha(static_cast<unsigned char>(s[pos - 1]));
}

// Last accept/reject stem in `line`, if any.
std::optional<Decision> scan_stems(const std::string& line) {
  std::optional<Decision> found;
  for (std::size_t i = 0; i + 6 <= line.size(); ++i) {
    if (!word_boundary_before(line, i)) continue;
    if (line.compare(i, 6, "accept") == 0) found = Decision::accept;
    if (line.compare(i, 6, "reject") == 0) found = Decision::reject;
  }
  return found;
}

bool is_verdict_line(const std::string& line) {
  static constexpr std::array<std::string_view, 8> kMarkers = {
      "decision", "final decision", "my decision", "verdict",
      "final verdict", "answer", "final answer", "conclusion"};
  // Markdown emphasis and list markers do not change what a line says.
  std::string plain;
  for (char c : line) {
    if (c == '*' || c == '_' || c == '`' || c == '#' || c == '>') continue;
    plain += c;
  }
  std::size_t start = plain.find_first_not_of(" \t-");
  if (start == std::string::npos) return false;
  for (auto m : kMarkers) {
    if (plain.compare(start, m.size(), m) == 0) {
      const std::size_t after = start + m.size();
      if (after < plain.size() && (plain[after] == ':' || plain[after] == ' ')) {
        return true;
      }
    }
  }
  // A line that is nothing but the verdict token, punctuation aside.
  std::string bare;
  for (char c : plain) {
    if (std::isalpha(static_cast<unsigned char>(c)) || c == ' ') bare += c;
  }
  while (!bare.empty() && bare.front() == ' ') bare.erase(bare.begin());
  while (!bare.empty() && bare.back() == ' ') bare.pop_back();
  return bare == "accept" || bare == "reject" || bare == "i accept" ||
         bare == "i reject";
}

}  // namespace

Decision extract_decision(std::string_view response_text) {
  const std::string lower = lowercase(response_text);
  std::optional<Decision> verdict;
  std::optional<Decision> last_stem;
  std::size_t pos = 0;
  while (pos <= lower.size()) {
    std::size_t nl = lower.find('\n', pos);
    const std::string line =
        lower.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (auto d = scan_stems(line)) {
      last_stem = d;
      if (is_verdict_line(line)) verdict = d;
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  if (verdict) return *verdict;
  if (last_stem) return *last_stem;
  return Decision::undecidable;
}

}  // namespace bp::agents
