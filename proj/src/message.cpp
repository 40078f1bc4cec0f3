#include "bp/message.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bp/textfmt.hpp"

namespace bp::message {

bool AblationSpec::drops(Component c) const {
  return std::find(drop.begin(), drop.end(), c) != drop.end();
}

AblationSpec AblationSpec::parse(std::string_view csv) {
  AblationSpec spec;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string_view tok = csv.substr(pos, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - pos);
    if (tok == "utility") {
      spec.drop.push_back(Component::utility);
    } else if (tok == "posterior") {
      spec.drop.push_back(Component::posterior);
    } else if (tok == "schema") {
      spec.drop.push_back(Component::schema);
    } else if (!tok.empty()) {
      throw InvariantViolation("unknown ablation component: " + std::string(tok));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (spec.drop.empty()) throw InvariantViolation("ablation spec must drop something");
  return spec;
}

std::string AblationSpec::label() const {
  std::string out;
  for (Component c : {Component::utility, Component::posterior, Component::schema}) {
    if (!drops(c)) continue;
    if (!out.empty()) out += "&";
    out += c == Component::utility ? "utility"
         : c == Component::posterior ? "posterior"
                                     : "schema";
  }
  return out;
}

namespace {

// Qualitative frequency wording for FNL, keyed on probability bands.
std::string_view odds_band(double p) {
  if (p >= 0.9) return "overwhelmingly";
  if (p >= 0.7) return "strongly";
  return "gently";
}

std::string_view honesty_band(double p_honest) {
  if (p_honest >= 0.9) return "almost every time";
  if (p_honest >= 0.65) return "more often than not";
  if (p_honest >= 0.35) return "about as often as not";
  if (p_honest >= 0.1) return "less often than I would like";
  return "rarely";
}

std::string paren_real(double v) {
  std::string s = format_real(v);
  if (v < 0) return "(" + s + ")";
  return s;
}

// The signal a fully dishonest sender of this profile would emit, when that
// policy is constant; empty otherwise.
std::string dishonest_constant_signal(const SenderTypeProfile& profile) {
  for (std::size_t t = 0; t < profile.size(); ++t) {
    if (profile.types()[t] != kDishonest) continue;
    const SignalingScheme& policy = profile.policy(t);
    for (std::size_t j = 0; j < policy.signals().size(); ++j) {
      bool constant = true;
      for (const auto& row : policy.rows()) {
        if (row[j] != 1.0) constant = false;
      }
      if (constant) return policy.signals()[j];
    }
  }
  return {};
}

std::string basic_narrative(const BasicPart& basic, Style style) {
  std::ostringstream out;
  const Labels& st = basic.states;
  out << "There are " << (st.size() == 2 ? "two" : "several")
      << " ways this can go: ";
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (i) out << (i + 1 == st.size() ? " or " : ", ");
    out << st[i];
  }
  out << ". ";
  if (style == Style::sfnl) {
    out << "Before any further evidence, the odds are ";
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (i) out << (i + 1 == st.size() ? " and " : ", ");
      out << format_percent(basic.prior.probs()[i]) << " " << st[i];
    }
    out << ".";
  } else {
    const double p0 = basic.prior.probs()[0];
    if (p0 >= 0.5) {
      out << "Going in, the balance of odds leans " << odds_band(p0) << " toward "
          << st[0] << ".";
    } else {
      out << "Going in, the balance of odds leans against " << st[0] << ".";
    }
  }
  return out.str();
}

std::string type_narrative(const TypePart& type_part, Style style) {
  std::ostringstream out;
  const std::string fav = dishonest_constant_signal(type_part.profile);
  double p_honest = 0.0;
  for (std::size_t t = 0; t < type_part.profile.size(); ++t) {
    if (type_part.profile.types()[t] == kHonest) {
      p_honest = type_part.belief.probs()[t];
    }
  }
  out << "A word on how I report: an honest version of me tells you the true "
         "state outright, while a dishonest one ";
  if (fav.empty()) {
    out << "shades things however it suits them";
  } else {
    out << "calls things " << fav << " no matter what";
  }
  out << ". ";
  if (style == Style::sfnl) {
    out << "Going by my track record, put " << format_percent(p_honest)
        << " on me being honest and " << format_percent(1.0 - p_honest)
        << " on me being dishonest this time.";
  } else {
    out << "Knowing myself, the honest one shows up " << honesty_band(p_honest)
        << ".";
  }
  return out.str();
}

std::string des_narrative(std::string_view signal, Style style) {
  std::ostringstream out;
  if (style == Style::sfnl) {
    out << "What I am telling you about the current state: it is " << signal << ".";
  } else {
    out << "My read of where things stand right now: " << signal << ".";
  }
  return out.str();
}

std::string inf_narrative(const InfPart& inf, Style style) {
  std::ostringstream out;
  bool wrote = false;
  if (style == Style::sfnl) {
    if (inf.posterior) {
      out << "Working it through: after my report you can put ";
      const auto& post = *inf.posterior;
      for (std::size_t i = 0; i < post.size(); ++i) {
        if (i) out << (i + 1 == post.size() ? " and " : ", ");
        out << format_percent(post.probs()[i]) << " on " << post.support()[i];
      }
      out << ".";
      wrote = true;
    }
    if (inf.accept_eu && inf.posterior && inf.accept_utils) {
      if (wrote) out << " ";
      out << "If you accept, the expected payoff is: ";
      const auto& post = *inf.posterior;
      for (std::size_t i = 0; i < post.size(); ++i) {
        if (i) out << " + ";
        out << format_percent(post.probs()[i]) << " × "
            << paren_real((*inf.accept_utils)[i]);
      }
      out << " ≈ " << format_fixed2(*inf.accept_eu);
      if (inf.claim != Claim::none) out << ", which is greater than 0";
      out << ".";
      wrote = true;
    } else if (inf.claim != Claim::none) {
      if (wrote) out << " ";
      out << "If you accept, the expected payoff is greater than 0.";
      wrote = true;
    }
    if (inf.claim != Claim::none) {
      out << " Accepting is the better move here.";
    } else if (wrote) {
      out << " Weigh it as you see fit.";
    }
  } else {
    if (inf.posterior) {
      out << "If you take my openness at face value and update on it, you can "
             "be confident the picture is close to what I describe.";
      wrote = true;
    }
    if (inf.claim != Claim::none) {
      if (wrote) out << " ";
      out << "If you accept, you should come out ahead";
      if (inf.accept_eu) {
        out << "; set the upside against the downside and the balance favors you";
      }
      out << ". I am confident accepting is the right call.";
    } else {
      if (wrote) out << " ";
      out << "I will not pretend the balance favors you; weigh it and decide.";
    }
  }
  return out.str();
}

}  // namespace

CompositeMessage compose(const corpus::BayesianSetup& setup,
                         const SenderTypeProfile& profile,
                         const TypeBelief& belief,
                         std::string_view observed_signal, Style style) {
  bool known = false;
  for (const auto& s : setup.signals) known = known || s == observed_signal;
  if (!known) {
    throw PreconditionViolation("compose: signal '" + std::string(observed_signal) +
                                "' is not in the setup's signal set");
  }

  CompositeMessage m;
  m.style = style;

  const Distribution prior = setup.prior();
  m.basic = BasicPart{setup.states, prior, ""};
  m.basic->narrative = basic_narrative(*m.basic, style);

  m.type_part = TypePart{profile, belief, ""};
  m.type_part->narrative = type_narrative(*m.type_part, style);

  m.des = DesPart{std::string(observed_signal), des_narrative(observed_signal, style)};

  const SignalingScheme schema = effective_schema(profile, belief);
  const Distribution posterior = posterior_update(prior, schema, observed_signal);
  const ReceiverUtility u = setup.receiver_utility();
  const double eu = expected_utility(posterior, u, kAccept);

  InfPart inf;
  inf.posterior = posterior;
  inf.accept_eu = eu;
  std::vector<double> col;
  col.reserve(setup.states.size());
  for (std::size_t i = 0; i < setup.states.size(); ++i) {
    col.push_back(u.value(setup.states[i], kAccept));
  }
  inf.accept_utils = std::move(col);
  if (eu > 0.0) {
    inf.claim = style == Style::sfnl ? Claim::numeric : Claim::greater_than_zero;
  } else {
    inf.claim = Claim::none;
  }
  m.inf = std::move(inf);

  m.rendered = render(m);
  return m;
}

std::string render(const CompositeMessage& m) {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const std::string& text) {
    if (text.empty()) return;
    if (!first) out << "\n";
    out << text;
    first = false;
  };
  if (m.basic) emit(m.basic->narrative);
  if (m.type_part) emit(m.type_part->narrative);
  emit(m.des.narrative);
  if (m.inf) emit(inf_narrative(*m.inf, m.style));
  return out.str();
}

CompositeMessage ablate(const CompositeMessage& message, const AblationSpec& spec) {
  if (spec.drop.empty()) throw InvariantViolation("ablation spec must drop something");
  bool drop_utility = spec.drops(Component::utility);
  bool drop_posterior = spec.drops(Component::posterior);
  const bool drop_schema = spec.drops(Component::schema);
  // In SFNL the worked payoff line quotes the posterior, so the two leave
  // together; FNL verbalizes them in separate sentences.
  if (message.style == Style::sfnl && drop_posterior) drop_utility = true;

  CompositeMessage out = message;
  if (out.inf) {
    if (drop_utility) {
      out.inf->accept_eu.reset();
      out.inf->accept_utils.reset();
      if (out.inf->claim == Claim::numeric) out.inf->claim = Claim::greater_than_zero;
    }
    if (drop_posterior) out.inf->posterior.reset();
  }
  if (drop_schema) out.type_part.reset();
  out.rendered = render(out);
  return out;
}

nlohmann::ordered_json to_json(const CompositeMessage& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (m.basic) {
    j["basic"] = {{"states", m.basic->states},
                  {"prior", m.basic->prior.probs()},
                  {"narrative", m.basic->narrative}};
  }
  if (m.type_part) {
    j["type"] = {{"types", m.type_part->profile.types()},
                 {"belief", m.type_part->belief.probs()},
                 {"narrative", m.type_part->narrative}};
  }
  j["des"] = {{"signal", m.des.signal}, {"narrative", m.des.narrative}};
  if (m.inf) {
    nlohmann::ordered_json inf = nlohmann::ordered_json::object();
    if (m.inf->posterior) inf["posterior"] = m.inf->posterior->probs();
    if (m.inf->accept_eu) inf["accept_eu"] = *m.inf->accept_eu;
    if (m.inf->accept_utils) inf["accept_utils"] = *m.inf->accept_utils;
    inf["claim"] = m.inf->claim == Claim::numeric ? "numeric"
                 : m.inf->claim == Claim::greater_than_zero ? "greater_than_zero"
                                                            : "none";
    j["inf"] = inf;
  }
  j["style"] = m.style == Style::sfnl ? "SFNL" : "FNL";
  j["rendered"] = m.rendered;
  return j;
}

}  // namespace bp::message
