#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "pwlfit/cost.hpp"
#include "pwlfit/envelope.hpp"
#include "pwlfit/errors.hpp"
#include "pwlfit/quadratic.hpp"
#include "pwlfit/signal.hpp"

namespace pwlfit {

// mu(y) = min_{y'} [ l(y, y') + p(y') + extra ], computed in closed form.
// The combined form must be strictly convex in y'. The returned quadratic
// records the generating breakpoint index, the parent piece, and the
// affine map to the minimizing y' so solutions can be recovered without
// re-minimization.
inline Quadratic minimize_out(const QuadraticForm2& l, const Quadratic& p,
                              double extra, int gen_index,
                              const Quadratic* parent) {
  const double a2 = l.p22 + p.a;
  if (!(a2 > 0.0))
    throw internal_error("minimize_out: combined form not strictly convex in y'");
  const double kappa = -l.p12 / a2;
  const double eta = -(l.q2 + p.b) / (2.0 * a2);

  Quadratic mu;
  mu.a = l.p11 + l.p12 * kappa;
  mu.b = l.q1 + 2.0 * l.p12 * eta;
  mu.c = l.r + p.c + extra - a2 * eta * eta;
  if (!(mu.a > 0.0))
    throw internal_error("minimize_out: partial minimum lost strict convexity");
  mu.gen_index = gen_index;
  mu.kappa = kappa;
  mu.eta = eta;
  mu.parent = parent;
  return mu;
}

struct SolveOptions {
  int threads = 1;
  // Test hook: permutes the order in which candidate next breakpoints are
  // visited. The objective must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

// Value-function envelopes produced by a solve. Constrained runs hold one
// row per segment count m = 1..M, row m covering start indices
// i = 0..N-m; regularized runs hold a single row covering i = 0..N-1.
// Envelopes are frozen once built, so pieces may be referenced by later
// stages and read concurrently.
struct StageTable {
  int n = 0;
  int budget = 0;  // M for constrained tables, 0 for regularized
  std::vector<std::vector<Envelope>> stages;

  const Envelope& at(int m, int i) const {
    return stages[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(i)];
  }
};

struct InstrumentationReport {
  std::vector<int> per_index_max;  // max over m of length(Pi_i^m)
  int max_length = 0;              // R
  bool bound_held = true;          // observed length(Pi_i^m) <= N - i
  std::uint64_t insertions = 0;
};

// Fig.-5-style length statistics. The N - i bound is reported, never
// asserted: it is a conjecture.
inline InstrumentationReport instrumentation_report(const StageTable& tab) {
  InstrumentationReport rep;
  rep.per_index_max.assign(static_cast<std::size_t>(tab.n), 0);
  for (const auto& row : tab.stages) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      rep.per_index_max[i] = std::max(rep.per_index_max[i], row[i].max_size_seen());
      rep.insertions += row[i].insert_count();
    }
  }
  for (std::size_t i = 0; i < rep.per_index_max.size(); ++i) {
    rep.max_length = std::max(rep.max_length, rep.per_index_max[i]);
    if (rep.per_index_max[i] > tab.n - static_cast<int>(i)) rep.bound_held = false;
  }
  return rep;
}

struct FitResult {
  std::vector<int> indices;    // breakpoint indices, first 0, last N
  std::vector<double> values;  // fitted values at the breakpoints
  double objective = 0.0;      // includes the zeta term for regularized runs
  int segments = 0;
  InstrumentationReport instrumentation;
  double wall_ms = 0.0;
};

struct RecoveredPath {
  std::vector<int> indices;
  std::vector<double> values;
};

// Walks the backpointer chain from a final-stage piece: the minimizing y
// at the start index, then repeatedly the stored affine map and generating
// index until the terminal piece (no parent) has been consumed.
inline RecoveredPath recover(const Quadratic& best_piece, int start_index,
                             double y_start) {
  RecoveredPath out;
  out.indices.push_back(start_index);
  out.values.push_back(y_start);
  const Quadratic* cur = &best_piece;
  double y = y_start;
  while (cur != nullptr) {
    if (cur->gen_index < 0 || !cur->has_recovery())
      throw internal_error("recover: broken backpointer chain");
    y = cur->next_value(y);
    out.indices.push_back(cur->gen_index);
    out.values.push_back(y);
    cur = cur->parent;
  }
  return out;
}

// Residual of a fixed fit: sum of transition costs over consecutive
// breakpoints plus, for discrete signals, the terminal term (g[N] - y_M)^2.
inline double fit_cost(const Signal& s, const Moments& m,
                       const std::vector<int>& indices,
                       const std::vector<double>& values) {
  if (indices.size() < 2 || indices.size() != values.size())
    throw invalid_input("fit_cost: malformed breakpoint sequence");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < indices.size(); ++k) {
    const QuadraticForm2 qf = transition_cost(s, m, indices[k], indices[k + 1]);
    total += qf.eval(values[k], values[k + 1]);
  }
  if (s.kind() == SignalKind::discrete) {
    const double e = s.value(s.n()) - values.back();
    total += e * e;
  }
  return total;
}

namespace detail {

inline Quadratic terminal_quadratic(const Signal& s) {
  Quadratic tau = make_quadratic(0.0, 0.0, 0.0);
  if (s.kind() == SignalKind::discrete) {
    const double gn = s.value(s.n());
    tau = make_quadratic(1.0, -2.0 * gn, gn * gn);
  }
  return tau;
}

template <class Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  const int nt = std::max(1, std::min(threads, count));
  if (nt == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex err_mutex;
  std::exception_ptr err;
  const int chunk = (count + nt - 1) / nt;
  for (int w = 0; w < nt; ++w) {
    const int b = begin + w * chunk;
    const int e = std::min(end, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        for (int i = b; i < e; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mutex);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline std::vector<int> candidate_order(int first, int last,
                                        const SolveOptions& opt,
                                        std::uint64_t salt) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(last - first + 1));
  for (int v = first; v <= last; ++v) order.push_back(v);
  if (opt.shuffle_seed) {
    std::mt19937_64 eng(*opt.shuffle_seed ^ (salt * 0x9e3779b97f4a7c15ULL + 1));
    std::shuffle(order.begin(), order.end(), eng);
  }
  return order;
}

}  // namespace detail

// Builds the full table of envelopes for the segment-constrained problem.
// Stage 1 minimizes the direct hop to the horizon end; stage m combines
// each candidate next breakpoint i' in {i+1, ..., N-m+1} with every piece
// of the stage m-1 envelope at i'. Within a stage the start indices are
// independent and may be built in parallel.
inline StageTable build_constrained_table(const Signal& sig, const Moments& mom,
                                          int budget,
                                          const SolveOptions& opt = {}) {
  const int n = sig.n();
  if (budget < 1 || budget > n)
    throw infeasible("segment budget must satisfy 1 <= M <= N");

  StageTable tab;
  tab.n = n;
  tab.budget = budget;
  tab.stages.resize(static_cast<std::size_t>(budget));
  const Quadratic tau = detail::terminal_quadratic(sig);

  auto& base = tab.stages[0];
  base.resize(static_cast<std::size_t>(n));
  detail::parallel_for(0, n, opt.threads, [&](int i) {
    const QuadraticForm2 qf = transition_cost(sig, mom, i, n);
    Envelope env;
    env.insert(minimize_out(qf, tau, 0.0, n, nullptr));
    env.finalize();
    base[static_cast<std::size_t>(i)] = std::move(env);
  });

  for (int m = 2; m <= budget; ++m) {
    const auto& prev = tab.stages[static_cast<std::size_t>(m - 2)];
    auto& row = tab.stages[static_cast<std::size_t>(m - 1)];
    row.resize(static_cast<std::size_t>(n - m + 1));
    detail::parallel_for(0, n - m + 1, opt.threads, [&, m](int i) {
      Envelope env;
      auto process = [&](int ip) {
        const QuadraticForm2 qf = transition_cost(sig, mom, i, ip);
        for (const Piece& pc : prev[static_cast<std::size_t>(ip)])
          env.insert(minimize_out(qf, pc.q, 0.0, ip, &pc.q));
      };
      if (!opt.shuffle_seed) {
        for (int ip = i + 1; ip <= n - m + 1; ++ip) process(ip);
      } else {
        const std::uint64_t salt =
            (static_cast<std::uint64_t>(m) << 32) ^ static_cast<std::uint64_t>(i);
        for (int ip : detail::candidate_order(i + 1, n - m + 1, opt, salt))
          process(ip);
      }
      env.finalize();
      row[static_cast<std::size_t>(i)] = std::move(env);
    });
  }
  return tab;
}

// Table for the penalized problem: a single envelope per start index,
// built backwards, with zeta added to every transition.
inline StageTable build_regularized_table(const Signal& sig, const Moments& mom,
                                          double zeta,
                                          const SolveOptions& opt = {}) {
  if (!(zeta >= 0.0)) throw invalid_input("zeta must be nonnegative");
  const int n = sig.n();

  StageTable tab;
  tab.n = n;
  tab.budget = 0;
  tab.stages.resize(1);
  auto& row = tab.stages[0];
  row.resize(static_cast<std::size_t>(n));
  const Quadratic tau = detail::terminal_quadratic(sig);

  for (int i = n - 1; i >= 0; --i) {
    Envelope env;
    auto process = [&](int ip) {
      const QuadraticForm2 qf = transition_cost(sig, mom, i, ip);
      if (ip == n) {
        env.insert(minimize_out(qf, tau, zeta, n, nullptr));
      } else {
        for (const Piece& pc : row[static_cast<std::size_t>(ip)])
          env.insert(minimize_out(qf, pc.q, zeta, ip, &pc.q));
      }
    };
    if (!opt.shuffle_seed) {
      for (int ip = i + 1; ip <= n; ++ip) process(ip);
    } else {
      for (int ip : detail::candidate_order(i + 1, n, opt,
                                            static_cast<std::uint64_t>(i)))
        process(ip);
    }
    env.finalize();
    row[static_cast<std::size_t>(i)] = std::move(env);
  }
  return tab;
}

namespace detail {

inline FitResult result_from_envelope(const Envelope& final_env, int n,
                                      int expect_segments) {
  const Envelope::MinResult gm = final_env.global_min();
  RecoveredPath path = recover(*gm.piece, 0, gm.y);
  if (path.indices.back() != n)
    throw internal_error("solve: recovered path does not end at N");
  for (std::size_t k = 0; k + 1 < path.indices.size(); ++k) {
    if (!(path.indices[k] < path.indices[k + 1]))
      throw internal_error("solve: recovered indices not increasing");
  }
  if (expect_segments > 0 &&
      static_cast<int>(path.indices.size()) - 1 != expect_segments)
    throw internal_error("solve: recovered path has wrong segment count");

  FitResult fr;
  fr.indices = std::move(path.indices);
  fr.values = std::move(path.values);
  fr.objective = gm.value;
  fr.segments = static_cast<int>(fr.indices.size()) - 1;
  return fr;
}

}  // namespace detail

// Globally optimal fits with exactly m segments for every m = 1..M.
// Results for smaller m come for free from the same table.
inline std::vector<FitResult> solve_constrained(const Signal& sig, int budget,
                                                const SolveOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Moments mom = compute_moments(sig);
  const StageTable tab = build_constrained_table(sig, mom, budget, opt);
  const InstrumentationReport rep = instrumentation_report(tab);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();

  std::vector<FitResult> results;
  results.reserve(static_cast<std::size_t>(budget));
  for (int m = 1; m <= budget; ++m) {
    FitResult fr = detail::result_from_envelope(tab.at(m, 0), tab.n, m);
    fr.instrumentation = rep;
    fr.wall_ms = wall_ms;
    results.push_back(std::move(fr));
  }
  return results;
}

// Globally optimal fit for the penalized objective
// residual + zeta * (number of segments).
inline FitResult solve_regularized(const Signal& sig, double zeta,
                                   const SolveOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Moments mom = compute_moments(sig);
  const StageTable tab = build_regularized_table(sig, mom, zeta, opt);
  FitResult fr = detail::result_from_envelope(tab.stages[0][0], tab.n, 0);
  fr.instrumentation = instrumentation_report(tab);
  fr.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return fr;
}

// Piecewise-linear interpolation of the fitted values at time t (for
// discrete signals t is a fractional index).
inline double evaluate_fit(const FitResult& fit, const Signal& sig, double t) {
  const double t0 = sig.time(fit.indices.front());
  const double tn = sig.time(fit.indices.back());
  if (!(t >= t0 && t <= tn))
    throw invalid_input("evaluate_fit: query outside the fitted range");
  std::size_t k = 0;
  while (k + 2 < fit.indices.size() && t > sig.time(fit.indices[k + 1])) ++k;
  const double ta = sig.time(fit.indices[k]);
  const double tb = sig.time(fit.indices[k + 1]);
  const double w = (t - ta) / (tb - ta);
  return (1.0 - w) * fit.values[k] + w * fit.values[k + 1];
}

}  // namespace pwlfit
