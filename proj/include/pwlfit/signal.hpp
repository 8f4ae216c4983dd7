#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pwlfit/errors.hpp"

namespace pwlfit {

enum class SignalKind { discrete, continuous };

// A series g[0..N], either a plain time series (candidate breakpoints at
// the integer indices) or samples of a piecewise-linear function on a
// strictly increasing grid t_0 < ... < t_N.
class Signal {
 public:
  static Signal discrete(std::vector<double> values) {
    Signal s;
    s.kind_ = SignalKind::discrete;
    s.values_ = std::move(values);
    s.check();
    return s;
  }

  static Signal continuous(std::vector<double> grid, std::vector<double> values) {
    Signal s;
    s.kind_ = SignalKind::continuous;
    s.grid_ = std::move(grid);
    s.values_ = std::move(values);
    if (s.grid_.size() != s.values_.size())
      throw invalid_input("signal: grid and value counts differ");
    s.check();
    for (std::size_t k = 0; k + 1 < s.grid_.size(); ++k) {
      if (!(s.grid_[k] < s.grid_[k + 1]))
        throw invalid_input("signal: grid must be strictly increasing");
    }
    for (double t : s.grid_) {
      if (!std::isfinite(t)) throw invalid_input("signal: grid values must be finite");
    }
    return s;
  }

  SignalKind kind() const { return kind_; }
  int n() const { return static_cast<int>(values_.size()) - 1; }
  double value(int k) const { return values_[static_cast<std::size_t>(k)]; }
  double time(int k) const {
    return kind_ == SignalKind::continuous ? grid_[static_cast<std::size_t>(k)]
                                           : static_cast<double>(k);
  }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& grid() const { return grid_; }

 private:
  void check() const {
    if (values_.size() < 2)
      throw invalid_input("signal: need at least two samples");
    for (double v : values_) {
      if (!std::isfinite(v)) throw invalid_input("signal: values must be finite");
    }
  }

  SignalKind kind_ = SignalKind::discrete;
  std::vector<double> values_;
  std::vector<double> grid_;
};

// Cumulative moments H_j[k] = sum_{l<=k} h_j[l] of the signal, of t*g, and
// of g^2. For a continuous signal the h_j are the exact per-interval
// integrals of the piecewise-linear interpolant; for a discrete signal
// they are the per-sample terms g[k], k*g[k], g[k]^2. They make every
// transition cost an O(1) difference query.
struct Moments {
  std::vector<double> h1;
  std::vector<double> h2;
  std::vector<double> h3;

  // Sum of h_j over positions i..ip-1 (never touches position ip).
  double sum1(int i, int ip) const { return diff(h1, i, ip); }
  double sum2(int i, int ip) const { return diff(h2, i, ip); }
  double sum3(int i, int ip) const { return diff(h3, i, ip); }

 private:
  static double diff(const std::vector<double>& h, int i, int ip) {
    const double upper = h[static_cast<std::size_t>(ip - 1)];
    return i > 0 ? upper - h[static_cast<std::size_t>(i - 1)] : upper;
  }
};

// Alternative ingestion path for callers with an analytic signal: build
// the cumulative moments from exact per-interval values
//   h1[k] = int g dt, h2[k] = int t*g dt, h3[k] = int g^2 dt
// over [t_k, t_{k+1}], bypassing the piecewise-linear interpretation.
inline Moments moments_from_intervals(const std::vector<double>& h1,
                                      const std::vector<double>& h2,
                                      const std::vector<double>& h3) {
  if (h1.empty() || h1.size() != h2.size() || h1.size() != h3.size())
    throw invalid_input("moments: per-interval arrays must be equal-length and nonempty");
  Moments m;
  m.h1.resize(h1.size());
  m.h2.resize(h1.size());
  m.h3.resize(h1.size());
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  for (std::size_t k = 0; k < h1.size(); ++k) {
    c1 += h1[k];
    c2 += h2[k];
    c3 += h3[k];
    m.h1[k] = c1;
    m.h2[k] = c2;
    m.h3[k] = c3;
  }
  return m;
}

inline Moments compute_moments(const Signal& s) {
  Moments m;
  const int n = s.n();
  if (s.kind() == SignalKind::continuous) {
    m.h1.resize(static_cast<std::size_t>(n));
    m.h2.resize(static_cast<std::size_t>(n));
    m.h3.resize(static_cast<std::size_t>(n));
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t0 = s.time(k);
      const double d = s.time(k + 1) - t0;
      const double u = s.value(k);
      const double v = s.value(k + 1);
      c1 += d * (u + v) / 2.0;
      c2 += d * (t0 * (u + v) / 2.0 + d * (u + 2.0 * v) / 6.0);
      c3 += d * (u * u + u * v + v * v) / 3.0;
      m.h1[static_cast<std::size_t>(k)] = c1;
      m.h2[static_cast<std::size_t>(k)] = c2;
      m.h3[static_cast<std::size_t>(k)] = c3;
    }
  } else {
    m.h1.resize(static_cast<std::size_t>(n) + 1);
    m.h2.resize(static_cast<std::size_t>(n) + 1);
    m.h3.resize(static_cast<std::size_t>(n) + 1);
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double g = s.value(k);
      c1 += g;
      c2 += static_cast<double>(k) * g;
      c3 += g * g;
      m.h1[static_cast<std::size_t>(k)] = c1;
      m.h2[static_cast<std::size_t>(k)] = c2;
      m.h3[static_cast<std::size_t>(k)] = c3;
    }
  }
  return m;
}

}  // namespace pwlfit
