#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "pwlfit/cost.hpp"
#include "pwlfit/errors.hpp"
#include "pwlfit/signal.hpp"
#include "pwlfit/solver.hpp"

namespace pwlfit {
namespace oracle {

// Symmetric tridiagonal normal equations of the fixed-breakpoint least
// squares problem: diag holds the y_k^2 coefficients, off the y_k*y_{k+1}
// cross coefficients (so the matrix of the linear system is [off, diag,
// off]).
struct BandedSystem {
  std::vector<double> diag;
  std::vector<double> off;
  std::vector<double> rhs;  // linear coefficients of the objective
};

struct LsResult {
  std::vector<double> values;
  double objective = 0.0;
  bool shifted = false;  // a tiny diagonal shift was needed
};

namespace detail {

// Thomas elimination for the symmetric tridiagonal system T y = b with
// T = tridiag(off, diag, off). Near-zero pivots get a 1e-12 shift and are
// flagged instead of failing.
inline bool solve_tridiagonal(std::vector<double> diag, std::vector<double> off,
                              std::vector<double> b, std::vector<double>& y) {
  const std::size_t n = diag.size();
  bool shifted = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(diag[k]) < 1e-12) {
      diag[k] += 1e-12;
      shifted = true;
    }
    if (k + 1 < n) {
      const double m = off[k] / diag[k];
      diag[k + 1] -= m * off[k];
      b[k + 1] -= m * b[k];
    }
  }
  y.assign(n, 0.0);
  y[n - 1] = b[n - 1] / diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    y[k] = (b[k] - off[k] * y[k + 1]) / diag[k];
  }
  return shifted;
}

}  // namespace detail

inline BandedSystem assemble_normal_equations(const Signal& s, const Moments& m,
                                              const std::vector<int>& indices) {
  const std::size_t n = indices.size();
  BandedSystem sys;
  sys.diag.assign(n, 0.0);
  sys.off.assign(n - 1, 0.0);
  sys.rhs.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const QuadraticForm2 qf = transition_cost(s, m, indices[k], indices[k + 1]);
    sys.diag[k] += qf.p11;
    sys.diag[k + 1] += qf.p22;
    sys.off[k] += qf.p12;
    sys.rhs[k] += qf.q1;
    sys.rhs[k + 1] += qf.q2;
  }
  if (s.kind() == SignalKind::discrete) {
    sys.diag[n - 1] += 1.0;
    sys.rhs[n - 1] += -2.0 * s.value(s.n());
  }
  return sys;
}

// Exact least squares over the values for a fixed breakpoint set: solves
// the tridiagonal normal equations and re-scores the minimizer.
inline LsResult fixed_breakpoint_ls(const Signal& s, const Moments& m,
                                    const std::vector<int>& indices) {
  if (indices.size() < 2 || indices.front() != 0 || indices.back() != s.n())
    throw invalid_input("fixed_breakpoint_ls: indices must run from 0 to N");
  for (std::size_t k = 0; k + 1 < indices.size(); ++k) {
    if (!(indices[k] < indices[k + 1]))
      throw invalid_input("fixed_breakpoint_ls: indices must be increasing");
  }

  BandedSystem sys = assemble_normal_equations(s, m, indices);
  std::vector<double> b(sys.rhs.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = -0.5 * sys.rhs[k];

  LsResult res;
  res.shifted = detail::solve_tridiagonal(sys.diag, sys.off, b, res.values);
  res.objective = fit_cost(s, m, indices, res.values);
  return res;
}

struct BruteResult {
  std::vector<int> indices;
  std::vector<double> values;
  double objective = 0.0;
};

inline double interior_subset_count(int n, int segments) {
  // C(n-1, segments-1), saturating
  double c = 1.0;
  const int r = segments - 1;
  for (int j = 1; j <= r; ++j) {
    c *= static_cast<double>(n - 1 - r + j) / static_cast<double>(j);
    if (c > 1e18) return c;
  }
  return c;
}

// Exhaustive search over all interior breakpoint subsets of size M-1,
// enumerated lexicographically; under cost ties the first (smallest) set
// wins. Ground truth for the dynamic program on small instances.
inline BruteResult brute_force(const Signal& s, int segments) {
  const int n = s.n();
  if (segments < 1 || segments > n)
    throw infeasible("brute_force: segment count must satisfy 1 <= M <= N");
  if (interior_subset_count(n, segments) > 1e6)
    throw guard_error("brute_force: more than 1e6 breakpoint subsets");

  const Moments mom = compute_moments(s);
  const int r = segments - 1;

  std::vector<int> interior(static_cast<std::size_t>(r));
  std::iota(interior.begin(), interior.end(), 1);

  BruteResult best;
  best.objective = kInf;

  std::vector<int> indices(static_cast<std::size_t>(segments) + 1);
  for (;;) {
    indices.front() = 0;
    std::copy(interior.begin(), interior.end(), indices.begin() + 1);
    indices.back() = n;

    LsResult ls = fixed_breakpoint_ls(s, mom, indices);
    if (ls.objective < best.objective) {
      best.objective = ls.objective;
      best.indices = indices;
      best.values = std::move(ls.values);
    }

    // next lexicographic combination of size r from {1, ..., n-1}
    int k = r - 1;
    while (k >= 0 && interior[static_cast<std::size_t>(k)] == n - r + k) --k;
    if (k < 0) break;
    ++interior[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < r; ++j)
      interior[static_cast<std::size_t>(j)] = interior[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

}  // namespace oracle
}  // namespace pwlfit
