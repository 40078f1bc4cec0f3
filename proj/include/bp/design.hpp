#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bp/core.hpp"

namespace bp::design {

inline constexpr std::string_view kUnreached = "unreached";

struct PerSignalOutcome {
  std::string signal;
  double marginal = 0.0;
  std::string action;      // "unreached" when the marginal is zero
  double receiver_eu = 0.0;
};

// Receiver best-responds signal by signal; sender value is the induced
// expectation of v over the receiver's actions.
struct SchemeEvaluation {
  double sender_value = 0.0;
  std::vector<PerSignalOutcome> per_signal;
};

enum class Method { closed_form_binary, obedience_lp, brute_force };

struct OptimalScheme {
  SignalingScheme scheme;
  double value = 0.0;
  Method method = Method::closed_form_binary;
  // reject_on_tie optima do not exist under strict preference; the solver
  // returns the epsilon-feasible scheme and notes the supremum here.
  std::optional<double> supremum_value;
};

SchemeEvaluation evaluate_scheme(const Distribution& prior,
                                 const SignalingScheme& scheme,
                                 const ReceiverUtility& u,
                                 const SenderUtility& v, TiePolicy tie);

// Closed form for the standard binary game: two states, Accept/Reject,
// Reject worth 0 everywhere, u(good,Accept) > 0 > u(bad,Accept), interior
// prior. The scheme recommends the good signal surely in the good state and
// with probability q in the bad state, q chosen so Accept survives the
// receiver's posterior check under the requested tie policy.
OptimalScheme optimal_binary_scheme(const Distribution& prior,
                                    const ReceiverUtility& u,
                                    const SenderUtility& v, TiePolicy tie);

// General finite games via direct action recommendations with obedience
// constraints (favor_sender semantics, weak inequalities).
OptimalScheme optimal_scheme_lp(const Distribution& prior,
                                const ReceiverUtility& u,
                                const SenderUtility& v);

// Exhaustive verification oracle over binary schemes with one free
// parameter per row on the grid {0, grid_step, ..., 1}.
OptimalScheme brute_force_optimal(const Distribution& prior,
                                  const ReceiverUtility& u,
                                  const SenderUtility& v, TiePolicy tie,
                                  double grid_step);

}  // namespace bp::design
