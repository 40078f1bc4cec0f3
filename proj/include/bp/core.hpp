#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bp/errors.hpp"

namespace bp {

using Labels = std::vector<std::string>;

inline constexpr std::string_view kAccept = "Accept";
inline constexpr std::string_view kReject = "Reject";
inline constexpr std::string_view kHonest = "Honest";
inline constexpr std::string_view kDishonest = "Dishonest";

inline constexpr double kProbTolerance = 1e-9;

// Ordered, unique state names. The order is canonical: every matrix and
// probability vector in the library is aligned to it.
class StateSpace {
 public:
  explicit StateSpace(Labels labels);

  const Labels& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t index_of(std::string_view label) const;
  bool operator==(const StateSpace&) const = default;

 private:
  Labels labels_;
};

// Probability vector over an ordered label set. Entries are validated to
// [0,1] (1e-12 construction grace, then clamped) and must sum to 1 within
// 1e-9. Immutable after construction.
class Distribution {
 public:
  Distribution(Labels support, std::vector<double> probs);

  const Labels& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  std::size_t index_of(std::string_view label) const;
  double prob(std::string_view label) const { return probs_[index_of(label)]; }

  static Distribution point_mass(Labels support, std::string_view label);

  bool operator==(const Distribution&) const = default;

 private:
  Labels support_;
  std::vector<double> probs_;
};

// Row-stochastic map from states to signal distributions: rows()[i][j] is
// the probability of signal j given state i.
class SignalingScheme {
 public:
  SignalingScheme(StateSpace states, Labels signals,
                  std::vector<std::vector<double>> rows);

  const StateSpace& states() const { return states_; }
  const Labels& signals() const { return signals_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& row(std::string_view state) const;
  double prob(std::string_view state, std::string_view signal) const;
  std::size_t signal_index(std::string_view signal) const;

  // Truthful identity schema: probability 1 on the signal named after the
  // true state. Requires every state label to appear among the signals.
  static SignalingScheme identity(StateSpace states, Labels signals);
  // Every row is a point mass on `signal`.
  static SignalingScheme constant(StateSpace states, Labels signals,
                                  std::string_view signal);

  bool operator==(const SignalingScheme&) const = default;

 private:
  StateSpace states_;
  Labels signals_;
  std::vector<std::vector<double>> rows_;
};

// u(state, action), fully populated and finite.
class ReceiverUtility {
 public:
  ReceiverUtility(StateSpace states, Labels actions,
                  std::vector<std::vector<double>> table);

  const StateSpace& states() const { return states_; }
  const Labels& actions() const { return actions_; }
  const std::vector<std::vector<double>>& table() const { return table_; }
  double value(std::string_view state, std::string_view action) const;
  std::size_t action_index(std::string_view action) const;

  bool operator==(const ReceiverUtility&) const = default;

 private:
  StateSpace states_;
  Labels actions_;
  std::vector<std::vector<double>> table_;
};

// v(action), state-independent.
class SenderUtility {
 public:
  SenderUtility(Labels actions, std::vector<double> values);

  const Labels& actions() const { return actions_; }
  double value(std::string_view action) const;

  bool operator==(const SenderUtility&) const = default;

 private:
  Labels actions_;
  std::vector<double> values_;
};

// How the receiver resolves exact indifference between actions.
// favor_sender picks Accept (the standard information-design convention and
// the one that yields exact optima); reject_on_tie picks Reject, and
// solvers targeting it back off the binding constraint by `epsilon`.
struct TiePolicy {
  enum class Mode { favor_sender, reject_on_tie };
  Mode mode = Mode::favor_sender;
  double epsilon = 1e-6;

  static TiePolicy favor() { return {Mode::favor_sender, 1e-6}; }
  static TiePolicy strict(double eps) {
    if (!(eps > 0)) throw InvariantViolation("reject_on_tie needs epsilon > 0");
    return {Mode::reject_on_tie, eps};
  }
  bool operator==(const TiePolicy&) const = default;
};

// Honest/dishonest base communication policies over a shared state space
// and signal set. The policy labelled "Honest" must be the identity schema.
class SenderTypeProfile {
 public:
  SenderTypeProfile(Labels types, std::vector<SignalingScheme> base_policies);

  const Labels& types() const { return types_; }
  const SignalingScheme& policy(std::size_t i) const { return policies_[i]; }
  const SignalingScheme& policy(std::string_view type) const;
  std::size_t size() const { return types_.size(); }

  // {Honest: identity, Dishonest: always the most favorable signal}.
  static SenderTypeProfile canonical(const StateSpace& states,
                                     const Labels& signals,
                                     const ReceiverUtility& u,
                                     std::string_view accept_action = kAccept);

  bool operator==(const SenderTypeProfile&) const = default;

 private:
  Labels types_;
  std::vector<SignalingScheme> policies_;
};

using TypeBelief = Distribution;

// --- Operations (all pure) ---------------------------------------------

// Bayes update of `prior` after observing `signal` under `scheme`.
// Throws ZeroMarginal when the signal has probability zero under the prior.
Distribution posterior_update(const Distribution& prior,
                              const SignalingScheme& scheme,
                              std::string_view signal);

// P(signal) = sum_w pi(signal|w) * prior(w).
Distribution signal_marginal(const Distribution& prior,
                             const SignalingScheme& scheme);

double expected_utility(const Distribution& belief, const ReceiverUtility& u,
                        std::string_view action);

// Argmax action under `belief`. Exact ties go to Accept (favor_sender) or
// Reject (reject_on_tie) when those labels are among the tied actions,
// otherwise to the earliest tied action in canonical order.
std::string best_response(const Distribution& belief, const ReceiverUtility& u,
                          TiePolicy tie);

// Type-belief-weighted average of the base policies.
SignalingScheme effective_schema(const SenderTypeProfile& profile,
                                 const TypeBelief& belief);

// The signal whose truthful posterior maximizes the receiver's utility for
// `accept_action` (the one a liar would always send).
std::string most_favorable_signal(const StateSpace& states,
                                  const Labels& signals,
                                  const ReceiverUtility& u,
                                  std::string_view accept_action = kAccept);

}  // namespace bp
