#include "bp/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bp/simplex.hpp"

namespace bp::design {

namespace {

struct BinaryGame {
  std::size_t good = 0, bad = 0;    // state indices
  double mu_good = 0.0, mu_bad = 0.0;
  double u_good = 0.0, u_bad = 0.0;  // Accept utilities
};

// Checks the closed-form preconditions and orients the game.
BinaryGame classify_binary(const Distribution& prior, const ReceiverUtility& u,
                           const SenderUtility& v) {
  if (prior.size() != 2 || u.states().size() != 2) {
    throw PreconditionViolation("optimal_binary_scheme: exactly 2 states required");
  }
  if (prior.support() != u.states().labels()) {
    throw PreconditionViolation("optimal_binary_scheme: prior/utility state mismatch");
  }
  if (u.actions().size() != 2) {
    throw PreconditionViolation("optimal_binary_scheme: exactly 2 actions required");
  }
  const std::size_t acc = u.action_index(kAccept);
  const std::size_t rej = u.action_index(kReject);
  for (std::size_t i = 0; i < 2; ++i) {
    if (u.table()[i][rej] != 0.0) {
      throw PreconditionViolation("optimal_binary_scheme: Reject utility must be 0");
    }
  }
  if (!(v.value(kAccept) > v.value(kReject))) {
    throw PreconditionViolation("optimal_binary_scheme: sender must prefer Accept");
  }
  BinaryGame g;
  const double u0 = u.table()[0][acc], u1 = u.table()[1][acc];
  if (u0 > 0.0 && u1 < 0.0) {
    g.good = 0;
    g.bad = 1;
  } else if (u1 > 0.0 && u0 < 0.0) {
    g.good = 1;
    g.bad = 0;
  } else {
    throw PreconditionViolation(
        "optimal_binary_scheme: need u(good,Accept) > 0 > u(bad,Accept)");
  }
  g.mu_good = prior.probs()[g.good];
  g.mu_bad = prior.probs()[g.bad];
  if (!(g.mu_good > 0.0 && g.mu_bad > 0.0)) {
    throw PreconditionViolation("optimal_binary_scheme: prior must be strictly interior");
  }
  g.u_good = u.table()[g.good][acc];
  g.u_bad = u.table()[g.bad][acc];
  return g;
}

SignalingScheme binary_scheme_for(const Distribution& prior, const BinaryGame& g,
                                  double q) {
  std::vector<std::vector<double>> rows(2, std::vector<double>(2, 0.0));
  rows[g.good][g.good] = 1.0;
  rows[g.bad][g.good] = q;
  rows[g.bad][g.bad] = 1.0 - q;
  return SignalingScheme(StateSpace(prior.support()), prior.support(), rows);
}

// Accept must survive the receiver's own arithmetic, both when the receiver
// sees the raw scheme and when it rebuilds it from a type narrative. The
// correctly rounded q can land one ulp past the obedience threshold, so we
// step it down until both replay paths agree.
bool accept_survives(const Distribution& prior, const BinaryGame& g,
                     const ReceiverUtility& u, double q, bool strict_pref) {
  const std::string& good_label = prior.support()[g.good];
  const SignalingScheme scheme = binary_scheme_for(prior, g, q);
  const double eu_raw =
      expected_utility(posterior_update(prior, scheme, good_label), u, kAccept);
  SenderTypeProfile profile = SenderTypeProfile::canonical(
      StateSpace(prior.support()), prior.support(), u);
  TypeBelief belief({std::string(kHonest), std::string(kDishonest)}, {1.0 - q, q});
  const double eu_narr = expected_utility(
      posterior_update(prior, effective_schema(profile, belief), good_label), u,
      kAccept);
  if (strict_pref) return eu_raw > 0.0 && eu_narr > 0.0;
  return eu_raw >= 0.0 && eu_narr >= 0.0;
}

double snap_down(const Distribution& prior, const BinaryGame& g,
                 const ReceiverUtility& u, double q, bool strict_pref) {
  for (int i = 0; i < 256; ++i) {
    if (accept_survives(prior, g, u, q, strict_pref)) return q;
    q = std::nextafter(q, 0.0);
  }
  throw SolverFailure("optimal_binary_scheme: obedience snap did not converge");
}

}  // namespace

SchemeEvaluation evaluate_scheme(const Distribution& prior,
                                 const SignalingScheme& scheme,
                                 const ReceiverUtility& u,
                                 const SenderUtility& v, TiePolicy tie) {
  if (prior.support() != scheme.states().labels()) {
    throw PreconditionViolation("evaluate_scheme: prior support != scheme states");
  }
  SchemeEvaluation out;
  for (std::size_t j = 0; j < scheme.signals().size(); ++j) {
    const std::string& sig = scheme.signals()[j];
    double marginal = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) {
      marginal += scheme.rows()[i][j] * prior.probs()[i];
    }
    if (marginal == 0.0) {
      out.per_signal.push_back({sig, 0.0, std::string(kUnreached), 0.0});
      continue;
    }
    const Distribution post = posterior_update(prior, scheme, sig);
    const std::string action = best_response(post, u, tie);
    const double eu = expected_utility(post, u, action);
    out.sender_value += marginal * v.value(action);
    out.per_signal.push_back({sig, marginal, action, eu});
  }
  return out;
}

OptimalScheme optimal_binary_scheme(const Distribution& prior,
                                    const ReceiverUtility& u,
                                    const SenderUtility& v, TiePolicy tie) {
  const BinaryGame g = classify_binary(prior, u, v);
  // Threshold where the posterior after the good signal makes the receiver
  // exactly indifferent: q* = mu_g u_g / (mu_b (-u_b)).
  const double q_threshold =
      std::min(1.0, g.mu_good * g.u_good / (g.mu_bad * -g.u_bad));

  double q;
  bool backed_off = false;
  if (tie.mode == TiePolicy::Mode::favor_sender) {
    q = snap_down(prior, g, u, q_threshold, /*strict_pref=*/false);
  } else {
    if (!(tie.epsilon > 0.0)) {
      throw PreconditionViolation("optimal_binary_scheme: reject_on_tie needs epsilon > 0");
    }
    if (q_threshold < 1.0 ||
        !accept_survives(prior, g, u, 1.0, /*strict_pref=*/true)) {
      q = snap_down(prior, g, u, std::max(0.0, q_threshold - tie.epsilon),
                    /*strict_pref=*/true);
      backed_off = true;
    } else {
      q = 1.0;  // no-information already persuades strictly
    }
  }

  OptimalScheme out{binary_scheme_for(prior, g, q), 0.0,
                    Method::closed_form_binary, std::nullopt};
  out.value = evaluate_scheme(prior, out.scheme, u, v, tie).sender_value;
  if (backed_off) {
    const double va = v.value(kAccept), vr = v.value(kReject);
    out.supremum_value =
        g.mu_good * va + g.mu_bad * (q_threshold * va + (1.0 - q_threshold) * vr);
  }
  return out;
}

OptimalScheme optimal_scheme_lp(const Distribution& prior,
                                const ReceiverUtility& u,
                                const SenderUtility& v) {
  const std::size_t K = prior.size();
  const Labels& actions = u.actions();
  const std::size_t A = actions.size();
  if (prior.support() != u.states().labels()) {
    throw PreconditionViolation("optimal_scheme_lp: prior/utility state mismatch");
  }
  const std::size_t n = K * A;
  std::vector<std::vector<double>> lhs;
  std::vector<double> rhs;
  // Row-stochastic schemes: sum_j x[i,j] = 1 as paired inequalities.
  for (std::size_t i = 0; i < K; ++i) {
    std::vector<double> row(n, 0.0), neg(n, 0.0);
    for (std::size_t j = 0; j < A; ++j) {
      row[i * A + j] = 1.0;
      neg[i * A + j] = -1.0;
    }
    lhs.push_back(std::move(row));
    rhs.push_back(1.0);
    lhs.push_back(std::move(neg));
    rhs.push_back(-1.0);
  }
  // Obedience: recommended action a weakly beats every deviation a'.
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t alt = 0; alt < A; ++alt) {
      if (alt == a) continue;
      std::vector<double> row(n, 0.0);
      for (std::size_t i = 0; i < K; ++i) {
        row[i * A + a] =
            -prior.probs()[i] * (u.table()[i][a] - u.table()[i][alt]);
      }
      lhs.push_back(std::move(row));
      rhs.push_back(0.0);
    }
  }
  std::vector<double> obj(n, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < A; ++j) {
      obj[i * A + j] = prior.probs()[i] * v.value(actions[j]);
    }
  }

  lp::Result sol = lp::maximize(lhs, rhs, obj);
  if (sol.status != lp::Result::Status::optimal) {
    throw SolverFailure("optimal_scheme_lp: simplex did not reach an optimum");
  }

  std::vector<std::vector<double>> rows(K, std::vector<double>(A, 0.0));
  for (std::size_t i = 0; i < K; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < A; ++j) {
      double x = sol.x[i * A + j];
      if (x < -1e-9) throw SolverFailure("optimal_scheme_lp: negative mass");
      // Sub-tolerance slivers are pivot noise, not recommendations; left in,
      // they surface as reached signals with genuinely broken obedience.
      if (x < 1e-9) x = 0.0;
      rows[i][j] = x;
      sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-6) {
      throw SolverFailure("optimal_scheme_lp: row does not sum to 1");
    }
    for (std::size_t j = 0; j < A; ++j) rows[i][j] /= sum;
  }

  // Replay repair: simplex roundoff can leave a recommendation an ulp past
  // the receiver's indifference point. Shift a sliver of mass toward the
  // action the receiver actually picks until replay is self-consistent.
  const TiePolicy favor = TiePolicy::favor();
  for (int pass = 0; pass < 64; ++pass) {
    SignalingScheme scheme(StateSpace(prior.support()), actions, rows);
    bool consistent = true;
    for (std::size_t j = 0; j < A; ++j) {
      double marginal = 0.0;
      for (std::size_t i = 0; i < K; ++i) marginal += rows[i][j] * prior.probs()[i];
      if (marginal == 0.0) continue;
      const Distribution post = posterior_update(prior, scheme, actions[j]);
      const std::string picked = best_response(post, u, favor);
      if (picked == actions[j]) continue;
      const double gap = expected_utility(post, u, picked) -
                         expected_utility(post, u, actions[j]);
      if (gap > 1e-9) {
        throw SolverFailure("optimal_scheme_lp: obedience violated beyond roundoff");
      }
      consistent = false;
      const std::size_t alt = u.action_index(picked);
      // State whose mass drags the recommendation below the deviation.
      std::size_t worst = K;
      double worst_gain = 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        if (rows[i][j] <= 0.0 || prior.probs()[i] <= 0.0) continue;
        const double gain = u.table()[i][alt] - u.table()[i][j];
        if (worst == K || gain > worst_gain) {
          worst = i;
          worst_gain = gain;
        }
      }
      if (worst == K) throw SolverFailure("optimal_scheme_lp: replay repair stuck");
      const double delta = std::max(rows[worst][j] * 1e-12, 1e-15);
      const double moved = std::min(delta, rows[worst][j]);
      rows[worst][j] -= moved;
      rows[worst][alt] += moved;
    }
    if (consistent) break;
    if (pass == 63) throw SolverFailure("optimal_scheme_lp: replay repair did not settle");
  }

  OptimalScheme out{SignalingScheme(StateSpace(prior.support()), actions, rows),
                    0.0, Method::obedience_lp, std::nullopt};
  out.value = evaluate_scheme(prior, out.scheme, u, v, favor).sender_value;
  if (std::fabs(out.value - sol.value) > 1e-6) {
    throw SolverFailure("optimal_scheme_lp: replay value drifted from LP optimum");
  }
  return out;
}

namespace {

// Grid values {0, step, 2*step, ..., 1}.
std::vector<double> grid_values(double step) {
  std::vector<double> g;
  const auto count = static_cast<long long>(std::floor(1.0 / step + 1e-9));
  g.reserve(static_cast<std::size_t>(count) + 2);
  for (long long k = 0; k <= count; ++k) {
    g.push_back(std::min(1.0, static_cast<double>(k) * step));
  }
  if (g.back() < 1.0) g.push_back(1.0);
  return g;
}

// Mirrors evaluate_scheme (same operation order, so bit-identical results)
// for the two-state, two-action case the oracle grinds through a million
// times per game.
double binary_value_fast(const std::vector<double>& mu,
                         const std::vector<std::vector<double>>& utab,
                         const Labels& actions, double v0, double v1,
                         std::string_view preferred, double p, double q) {
  const double row0[2] = {p, 1.0 - p};
  const double row1[2] = {q, 1.0 - q};
  double value = 0.0;
  for (int j = 0; j < 2; ++j) {
    double marginal = 0.0;
    marginal += row0[j] * mu[0];
    marginal += row1[j] * mu[1];
    if (marginal == 0.0) continue;
    const double post0 = row0[j] * mu[0] / marginal;
    const double post1 = row1[j] * mu[1] / marginal;
    double eu0 = 0.0, eu1 = 0.0;
    eu0 += post0 * utab[0][0];
    eu0 += post1 * utab[1][0];
    eu1 += post0 * utab[0][1];
    eu1 += post1 * utab[1][1];
    const double top = std::max(eu0, eu1);
    std::size_t pick;
    if (eu0 == top && actions[0] == preferred) {
      pick = 0;
    } else if (eu1 == top && actions[1] == preferred) {
      pick = 1;
    } else {
      pick = (eu0 == top) ? 0 : 1;
    }
    value += marginal * (pick == 0 ? v0 : v1);
  }
  return value;
}

}  // namespace

OptimalScheme brute_force_optimal(const Distribution& prior,
                                  const ReceiverUtility& u,
                                  const SenderUtility& v, TiePolicy tie,
                                  double grid_step) {
  if (prior.size() != 2) {
    throw PreconditionViolation("brute_force_optimal: exactly 2 states required");
  }
  if (prior.support() != u.states().labels()) {
    throw PreconditionViolation("brute_force_optimal: prior/utility state mismatch");
  }
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw PreconditionViolation("brute_force_optimal: grid_step must be in (0, 0.5]");
  }
  const std::vector<double> grid = grid_values(grid_step);
  const StateSpace states(prior.support());
  const Labels signals = prior.support();

  double best_value = -std::numeric_limits<double>::infinity();
  double best_p = 0.0, best_q = 0.0;

  if (u.actions().size() == 2) {
    const std::string_view preferred =
        tie.mode == TiePolicy::Mode::favor_sender ? kAccept : kReject;
    const double v0 = v.value(u.actions()[0]);
    const double v1 = v.value(u.actions()[1]);
    for (double p : grid) {
      for (double q : grid) {
        const double val = binary_value_fast(prior.probs(), u.table(), u.actions(),
                                             v0, v1, preferred, p, q);
        if (val > best_value) {
          best_value = val;
          best_p = p;
          best_q = q;
        }
      }
    }
  } else {
    for (double p : grid) {
      for (double q : grid) {
        SignalingScheme scheme(states, signals, {{p, 1.0 - p}, {q, 1.0 - q}});
        const double val = evaluate_scheme(prior, scheme, u, v, tie).sender_value;
        if (val > best_value) {
          best_value = val;
          best_p = p;
          best_q = q;
        }
      }
    }
  }

  OptimalScheme out{
      SignalingScheme(states, signals, {{best_p, 1.0 - best_p}, {best_q, 1.0 - best_q}}),
      0.0, Method::brute_force, std::nullopt};
  out.value = evaluate_scheme(prior, out.scheme, u, v, tie).sender_value;
  return out;
}

}  // namespace bp::design
