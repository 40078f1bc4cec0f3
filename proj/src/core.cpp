#include "bp/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace bp {

namespace {

void check_unique_nonempty(const Labels& labels, const char* what) {
  if (labels.empty()) {
    throw InvariantViolation(std::string(what) + " must be non-empty");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw InvariantViolation(std::string(what) + " has duplicate label '" + l + "'");
    }
  }
}

std::size_t index_in(const Labels& labels, std::string_view label,
                     const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw PreconditionViolation(std::string(what) + ": unknown label '" +
                              std::string(label) + "'");
}

void check_prob_row(const std::vector<double>& probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < -1e-12 || p > 1.0 + 1e-12) {
      throw InvariantViolation(std::string(what) + ": entry out of [0,1]");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbTolerance) {
    throw InvariantViolation(std::string(what) + ": entries sum to " +
                             std::to_string(sum) + ", expected 1");
  }
}

void clamp_row(std::vector<double>& probs) {
  for (double& p : probs) p = std::clamp(p, 0.0, 1.0);
}

}  // namespace

StateSpace::StateSpace(Labels labels) : labels_(std::move(labels)) {
  check_unique_nonempty(labels_, "StateSpace");
}

std::size_t StateSpace::index_of(std::string_view label) const {
  return index_in(labels_, label, "StateSpace");
}

Distribution::Distribution(Labels support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  check_unique_nonempty(support_, "Distribution support");
  if (probs_.size() != support_.size()) {
    throw InvariantViolation("Distribution: probs/support length mismatch");
  }
  check_prob_row(probs_, "Distribution");
  clamp_row(probs_);
}

std::size_t Distribution::index_of(std::string_view label) const {
  return index_in(support_, label, "Distribution");
}

Distribution Distribution::point_mass(Labels support, std::string_view label) {
  std::vector<double> probs(support.size(), 0.0);
  probs[index_in(support, label, "Distribution")] = 1.0;
  return Distribution(std::move(support), std::move(probs));
}

SignalingScheme::SignalingScheme(StateSpace states, Labels signals,
                                 std::vector<std::vector<double>> rows)
    : states_(std::move(states)), signals_(std::move(signals)), rows_(std::move(rows)) {
  check_unique_nonempty(signals_, "SignalingScheme signals");
  if (rows_.size() != states_.size()) {
    throw InvariantViolation("SignalingScheme: row count != state count");
  }
  for (auto& row : rows_) {
    if (row.size() != signals_.size()) {
      throw InvariantViolation("SignalingScheme: ragged row");
    }
    check_prob_row(row, "SignalingScheme row");
    clamp_row(row);
  }
}

const std::vector<double>& SignalingScheme::row(std::string_view state) const {
  return rows_[states_.index_of(state)];
}

double SignalingScheme::prob(std::string_view state, std::string_view signal) const {
  return rows_[states_.index_of(state)][signal_index(signal)];
}

std::size_t SignalingScheme::signal_index(std::string_view signal) const {
  return index_in(signals_, signal, "SignalingScheme");
}

SignalingScheme SignalingScheme::identity(StateSpace states, Labels signals) {
  std::vector<std::vector<double>> rows;
  rows.reserve(states.size());
  for (const auto& s : states.labels()) {
    std::vector<double> row(signals.size(), 0.0);
    row[index_in(signals, s, "SignalingScheme::identity")] = 1.0;
    rows.push_back(std::move(row));
  }
  return SignalingScheme(std::move(states), std::move(signals), std::move(rows));
}

SignalingScheme SignalingScheme::constant(StateSpace states, Labels signals,
                                          std::string_view signal) {
  const std::size_t j = index_in(signals, signal, "SignalingScheme::constant");
  std::vector<std::vector<double>> rows(states.size(),
                                        std::vector<double>(signals.size(), 0.0));
  for (auto& row : rows) row[j] = 1.0;
  return SignalingScheme(std::move(states), std::move(signals), std::move(rows));
}

ReceiverUtility::ReceiverUtility(StateSpace states, Labels actions,
                                 std::vector<std::vector<double>> table)
    : states_(std::move(states)), actions_(std::move(actions)), table_(std::move(table)) {
  check_unique_nonempty(actions_, "ReceiverUtility actions");
  if (table_.size() != states_.size()) {
    throw InvariantViolation("ReceiverUtility: row count != state count");
  }
  for (const auto& row : table_) {
    if (row.size() != actions_.size()) {
      throw InvariantViolation("ReceiverUtility: ragged row");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw InvariantViolation("ReceiverUtility: non-finite entry");
    }
  }
}

double ReceiverUtility::value(std::string_view state, std::string_view action) const {
  return table_[states_.index_of(state)][action_index(action)];
}

std::size_t ReceiverUtility::action_index(std::string_view action) const {
  return index_in(actions_, action, "ReceiverUtility");
}

SenderUtility::SenderUtility(Labels actions, std::vector<double> values)
    : actions_(std::move(actions)), values_(std::move(values)) {
  check_unique_nonempty(actions_, "SenderUtility actions");
  if (values_.size() != actions_.size()) {
    throw InvariantViolation("SenderUtility: values/actions length mismatch");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvariantViolation("SenderUtility: non-finite entry");
  }
}

double SenderUtility::value(std::string_view action) const {
  return values_[index_in(actions_, action, "SenderUtility")];
}

SenderTypeProfile::SenderTypeProfile(Labels types,
                                     std::vector<SignalingScheme> base_policies)
    : types_(std::move(types)), policies_(std::move(base_policies)) {
  check_unique_nonempty(types_, "SenderTypeProfile types");
  if (policies_.size() != types_.size()) {
    throw InvariantViolation("SenderTypeProfile: one base policy per type required");
  }
  for (const auto& p : policies_) {
    if (p.states() != policies_.front().states() ||
        p.signals() != policies_.front().signals()) {
      throw InvariantViolation("SenderTypeProfile: base policies disagree on spaces");
    }
  }
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i] != kHonest) continue;
    const auto& scheme = policies_[i];
    for (const auto& state : scheme.states().labels()) {
      if (scheme.prob(state, state) != 1.0) {
        throw InvariantViolation("SenderTypeProfile: honest policy must be the identity schema");
      }
    }
  }
}

const SignalingScheme& SenderTypeProfile::policy(std::string_view type) const {
  return policies_[index_in(types_, type, "SenderTypeProfile")];
}

SenderTypeProfile SenderTypeProfile::canonical(const StateSpace& states,
                                               const Labels& signals,
                                               const ReceiverUtility& u,
                                               std::string_view accept_action) {
  std::string fav = most_favorable_signal(states, signals, u, accept_action);
  std::vector<SignalingScheme> policies;
  policies.push_back(SignalingScheme::identity(states, signals));
  policies.push_back(SignalingScheme::constant(states, signals, fav));
  return SenderTypeProfile({std::string(kHonest), std::string(kDishonest)},
                           std::move(policies));
}

std::string most_favorable_signal(const StateSpace& states, const Labels& signals,
                                  const ReceiverUtility& u,
                                  std::string_view accept_action) {
  // Truthful posterior of signal s (under the identity schema) is the point
  // mass on state s, so the comparison reduces to u(s, accept).
  std::size_t best = 0;
  bool found = false;
  double best_u = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string& s = states.labels()[i];
    if (std::find(signals.begin(), signals.end(), s) == signals.end()) continue;
    const double v = u.value(s, accept_action);
    if (!found || v > best_u) {
      best = i;
      best_u = v;
      found = true;
    }
  }
  if (!found) {
    throw PreconditionViolation("most_favorable_signal: no signal matches a state label");
  }
  return states.labels()[best];
}

Distribution posterior_update(const Distribution& prior,
                              const SignalingScheme& scheme,
                              std::string_view signal) {
  if (prior.support() != scheme.states().labels()) {
    throw PreconditionViolation("posterior_update: prior support != scheme states");
  }
  const std::size_t j = scheme.signal_index(signal);
  double marginal = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    marginal += scheme.rows()[i][j] * prior.probs()[i];
  }
  if (marginal == 0.0) {
    throw ZeroMarginal("posterior_update: signal '" + std::string(signal) +
                       "' has probability 0 under the prior");
  }
  std::vector<double> post(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    post[i] = scheme.rows()[i][j] * prior.probs()[i] / marginal;
  }
  return Distribution(prior.support(), std::move(post));
}

Distribution signal_marginal(const Distribution& prior,
                             const SignalingScheme& scheme) {
  if (prior.support() != scheme.states().labels()) {
    throw PreconditionViolation("signal_marginal: prior support != scheme states");
  }
  std::vector<double> marg(scheme.signals().size(), 0.0);
  for (std::size_t j = 0; j < marg.size(); ++j) {
    for (std::size_t i = 0; i < prior.size(); ++i) {
      marg[j] += scheme.rows()[i][j] * prior.probs()[i];
    }
  }
  return Distribution(scheme.signals(), std::move(marg));
}

double expected_utility(const Distribution& belief, const ReceiverUtility& u,
                        std::string_view action) {
  if (belief.support() != u.states().labels()) {
    throw PreconditionViolation("expected_utility: belief support != utility states");
  }
  const std::size_t a = u.action_index(action);
  double eu = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    eu += belief.probs()[i] * u.table()[i][a];
  }
  return eu;
}

std::string best_response(const Distribution& belief, const ReceiverUtility& u,
                          TiePolicy tie) {
  const auto& actions = u.actions();
  std::vector<double> eu(actions.size());
  for (std::size_t a = 0; a < actions.size(); ++a) {
    eu[a] = expected_utility(belief, u, actions[a]);
  }
  const double top = *std::max_element(eu.begin(), eu.end());
  const std::string_view preferred =
      tie.mode == TiePolicy::Mode::favor_sender ? kAccept : kReject;
  std::size_t pick = actions.size();
  for (std::size_t a = 0; a < actions.size(); ++a) {
    if (eu[a] != top) continue;
    if (actions[a] == preferred) return actions[a];
    if (pick == actions.size()) pick = a;
  }
  return actions[pick];
}

SignalingScheme effective_schema(const SenderTypeProfile& profile,
                                 const TypeBelief& belief) {
  if (belief.support() != profile.types()) {
    throw PreconditionViolation("effective_schema: belief support != profile types");
  }
  const SignalingScheme& first = profile.policy(std::size_t{0});
  std::vector<std::vector<double>> rows(first.states().size(),
                                        std::vector<double>(first.signals().size(), 0.0));
  for (std::size_t t = 0; t < profile.size(); ++t) {
    const double w = belief.probs()[t];
    const auto& base = profile.policy(t).rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        rows[i][j] += w * base[i][j];
      }
    }
  }
  return SignalingScheme(first.states(), first.signals(), std::move(rows));
}

}  // namespace bp
