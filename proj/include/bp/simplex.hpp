#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace bp::lp {

// Small dense two-phase simplex:
//
//   max c.x   s.t.  A x <= b,  x >= 0
//
// Bland-style index tie-breaking keeps it cycle-free. Problems here are a
// handful of variables wide, so the dense tableau is the right tool.
struct Result {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::optimal;
  double value = 0.0;
  std::vector<double> x;
};

class DenseSimplex {
 public:
  DenseSimplex(const std::vector<std::vector<double>>& A,
               const std::vector<double>& b, const std::vector<double>& c)
      : m_(b.size()), n_(c.size()), nonbasic_(n_ + 1), basic_(m_),
        tab_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = A[i][j];
      basic_[i] = static_cast<int>(n_ + i);
      tab_[i][n_] = -1.0;
      tab_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<int>(j);
      tab_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    tab_[m_ + 1][n_] = 1.0;
  }

  Result solve() {
    Result res;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (tab_[i][n_ + 1] < tab_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && tab_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(2) || tab_[m_ + 1][n_ + 1] < -kEps) {
        res.status = Result::Status::infeasible;
        return res;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j) {
          if (better(tab_[i][j], nonbasic_[j], tab_[i][s], nonbasic_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basic_[i] >= 0 && basic_[i] < static_cast<int>(n_)) {
        res.x[static_cast<std::size_t>(basic_[i])] = tab_[i][n_ + 1];
      }
    }
    if (!bounded) {
      res.status = Result::Status::unbounded;
      return res;
    }
    res.value = tab_[m_][n_ + 1];
    return res;
  }

 private:
  static constexpr double kEps = 1e-11;

  static bool better(double v1, int id1, double v2, int id2) {
    return std::pair(v1, id1) < std::pair(v2, id2);
  }

  void pivot(std::size_t r, std::size_t s) {
    std::vector<double>& prow = tab_[r];
    const double inv = 1.0 / prow[s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || std::fabs(tab_[i][s]) <= kEps) continue;
      std::vector<double>& row = tab_[i];
      const double factor = row[s] * inv;
      for (std::size_t j = 0; j < n_ + 2; ++j) row[j] -= prow[j] * factor;
      row[s] = prow[s] * factor;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j) {
      if (j != s) prow[j] *= inv;
    }
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i != r) tab_[i][s] *= -inv;
    }
    prow[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
    for (;;) {
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (s == n_ + 1 ||
            better(tab_[obj][j], nonbasic_[j], tab_[obj][s], nonbasic_[s])) {
          s = j;
        }
      }
      if (tab_[obj][s] >= -kEps) return true;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][s] <= kEps) continue;
        if (r == m_ ||
            better(tab_[i][n_ + 1] / tab_[i][s], basic_[i],
                   tab_[r][n_ + 1] / tab_[r][s], basic_[r])) {
          r = i;
        }
      }
      if (r == m_) return false;  // unbounded direction
      pivot(r, s);
    }
  }

  std::size_t m_, n_;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> tab_;
};

inline Result maximize(const std::vector<std::vector<double>>& A,
                       const std::vector<double>& b,
                       const std::vector<double>& c) {
  return DenseSimplex(A, b, c).solve();
}

}  // namespace bp::lp
