#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "pwlfit/common.hpp"
#include "pwlfit/errors.hpp"
#include "pwlfit/quadratic.hpp"

namespace pwlfit {

struct Interval {
  double lo = -kInf;
  double hi = kInf;
};

struct Piece {
  Interval iv;
  Quadratic q;
};

// Minimal representation of a piecewise-quadratic function as the pointwise
// minimum of strictly convex quadratics. Pieces are kept as an ordered
// sequence of (interval, quadratic) nodes partitioning the real line; a
// quadratic survives only where it is smaller than everything else stored.
// Insertion walks the sequence once, computes crossings against each
// incumbent on its own interval, and splices.
class Envelope {
 public:
  bool empty() const { return pieces_.empty(); }
  std::size_t size() const { return pieces_.size(); }
  const Piece& piece(std::size_t k) const { return pieces_[k]; }

  std::vector<Piece>::const_iterator begin() const { return pieces_.begin(); }
  std::vector<Piece>::const_iterator end() const { return pieces_.end(); }

  int max_size_seen() const { return max_size_seen_; }
  std::uint64_t insert_count() const { return insert_count_; }

  void insert(const Quadratic& mu) {
    if (!(mu.a > 0.0))
      throw invalid_input("envelope: inserted quadratic must have a > 0");
    ++insert_count_;

    if (pieces_.empty()) {
      pieces_.push_back(Piece{{-kInf, kInf}, mu});
      note_size();
      return;
    }

    scratch_.clear();
    last_src_ = kNoSource;
    bool kept = false;

    for (std::size_t idx = 0; idx < pieces_.size(); ++idx) {
      const Piece& pc = pieces_[idx];
      const Quadratic& p = pc.q;
      const double lo = pc.iv.lo;
      const double hi = pc.iv.hi;

      if (!dips_below(mu, p, lo, hi)) {
        append(lo, hi, p, static_cast<long>(idx));
        continue;
      }

      // Crossings of mu and the incumbent strictly inside this interval.
      double cut[2];
      int ncut = 0;
      const Intersection is = intersect(mu, p);
      if (is.kind == IntersectKind::single || is.kind == IntersectKind::two) {
        for (int r = 0; r < is.count; ++r) {
          const double t = is.root[r];
          if (!(t > lo && t < hi)) continue;
          if (std::isfinite(lo) && t - lo < detail::width_floor(lo, t)) continue;
          if (std::isfinite(hi) && hi - t < detail::width_floor(t, hi)) continue;
          cut[ncut++] = t;
        }
        // A near-tangential pair would create a sliver; treat as no crossing.
        if (ncut == 2 && cut[1] - cut[0] < detail::width_floor(cut[0], cut[1]))
          ncut = 0;
      }

      double bounds[4];
      int nb = 0;
      bounds[nb++] = lo;
      for (int r = 0; r < ncut; ++r) bounds[nb++] = cut[r];
      bounds[nb++] = hi;

      for (int cell = 0; cell + 1 < nb; ++cell) {
        const double x0 = bounds[cell];
        const double x1 = bounds[cell + 1];
        const double probe = cell_probe(x0, x1);
        const double mv = mu.eval(probe);
        const double pv = p.eval(probe);
        // Ties keep the incumbent: they cannot change the objective.
        if (mv < pv && !detail::values_tie(mv, pv)) {
          append(x0, x1, mu, kMuSource);
          kept = true;
        } else {
          append(x0, x1, p, static_cast<long>(idx));
        }
      }
    }

    if (kept) pieces_.swap(scratch_);
    note_size();
  }

  double evaluate(double y) const {
    if (pieces_.empty())
      throw invalid_input("envelope: evaluate on empty envelope");
    return pieces_[locate(y)].q.eval(y);
  }

  struct MinResult {
    double y = 0.0;
    double value = 0.0;
    const Quadratic* piece = nullptr;
  };

  // Global minimum over the real line. Each piece attains its minimum at
  // its vertex when that lies inside the interval, else at the clamped
  // endpoint. Ties report the smallest y.
  MinResult global_min() const {
    if (pieces_.empty())
      throw invalid_input("envelope: global_min on empty envelope");
    MinResult best{0.0, kInf, nullptr};
    for (const Piece& pc : pieces_) {
      const double y = std::clamp(pc.q.argmin(), pc.iv.lo, pc.iv.hi);
      const double v = pc.q.eval(y);
      if (v < best.value) best = MinResult{y, v, &pc.q};
    }
    return best;
  }

  // One piece per line: "lo hi a b c gen_index".
  void dump(std::ostream& os) const {
    for (const Piece& pc : pieces_) {
      os << detail::format_double(pc.iv.lo) << ' ' << detail::format_double(pc.iv.hi)
         << ' ' << detail::format_double(pc.q.a) << ' ' << detail::format_double(pc.q.b)
         << ' ' << detail::format_double(pc.q.c) << ' ' << pc.q.gen_index << '\n';
    }
  }

  // Checks the structural invariants; test and debugging aid.
  void validate() const {
    if (pieces_.empty()) throw internal_error("envelope: no pieces");
    if (pieces_.front().iv.lo != -kInf)
      throw internal_error("envelope: first interval must start at -inf");
    if (pieces_.back().iv.hi != kInf)
      throw internal_error("envelope: last interval must end at +inf");
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const Piece& pc = pieces_[k];
      if (!(pc.iv.lo < pc.iv.hi))
        throw internal_error("envelope: empty or inverted interval");
      if (!(pc.q.a > 0.0)) throw internal_error("envelope: non-convex piece");
      if (k + 1 < pieces_.size()) {
        const Piece& nx = pieces_[k + 1];
        if (pc.iv.hi != nx.iv.lo)
          throw internal_error("envelope: intervals do not partition the line");
        const double l = pc.q.eval(pc.iv.hi);
        const double r = nx.q.eval(pc.iv.hi);
        if (std::abs(l - r) > 1e-9 * std::max({1.0, std::abs(l), std::abs(r)}))
          throw internal_error("envelope: discontinuity at piece boundary");
        if (pc.q.same_function(nx.q) && pc.q.gen_index == nx.q.gen_index &&
            pc.q.parent == nx.q.parent)
          throw internal_error("envelope: adjacent identical pieces not coalesced");
      }
      // Minimality: at an interior point of the piece, its quadratic must
      // not exceed any other stored quadratic beyond tolerance.
      const double probe = cell_probe(pc.iv.lo, pc.iv.hi);
      const double own = pc.q.eval(probe);
      for (std::size_t j = 0; j < pieces_.size(); ++j) {
        if (j == k) continue;
        const double other = pieces_[j].q.eval(probe);
        if (own > other + 1e-9 * std::max({1.0, std::abs(own), std::abs(other)}))
          throw internal_error("envelope: non-minimal piece");
      }
    }
  }

  // Releases construction scratch memory; call once building is finished.
  void finalize() {
    pieces_.shrink_to_fit();
    scratch_.clear();
    scratch_.shrink_to_fit();
  }

 private:
  static constexpr long kMuSource = -1;
  static constexpr long kNoSource = -2;

  std::size_t locate(double y) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), y,
                               [](double v, const Piece& p) { return v < p.iv.lo; });
    return static_cast<std::size_t>(it - pieces_.begin()) - 1;
  }

  static double cell_probe(double x0, double x1) {
    if (std::isfinite(x0) && std::isfinite(x1)) return 0.5 * (x0 + x1);
    if (std::isfinite(x1)) return x1 - 1.0;
    if (std::isfinite(x0)) return x0 + 1.0;
    return 0.0;
  }

  // Does mu drop below p anywhere on [lo, hi] by more than the tie
  // tolerance? Checks the minimizer of d = mu - p without root finding.
  static bool dips_below(const Quadratic& mu, const Quadratic& p, double lo,
                         double hi) {
    const double da = mu.a - p.a;
    const double db = mu.b - p.b;
    double y;
    if (da > 0.0) {
      y = std::clamp(-db / (2.0 * da), lo, hi);
      if (!std::isfinite(y)) y = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    } else if (da == 0.0) {
      if (db == 0.0) {
        y = cell_probe(lo, hi);
      } else {
        y = (db > 0.0) ? lo : hi;
        if (!std::isfinite(y)) return true;  // d is unbounded below that way
      }
    } else {
      if (!std::isfinite(lo) || !std::isfinite(hi)) return true;
      const double dlo = (da * lo + db) * lo + (mu.c - p.c);
      const double dhi = (da * hi + db) * hi + (mu.c - p.c);
      y = (dlo < dhi) ? lo : hi;
    }
    const double mv = mu.eval(y);
    const double pv = p.eval(y);
    return mv < pv && !detail::values_tie(mv, pv);
  }

  void append(double x0, double x1, const Quadratic& q, long src) {
    if (!scratch_.empty() && last_src_ == src) {
      scratch_.back().iv.hi = x1;
      return;
    }
    scratch_.push_back(Piece{{x0, x1}, q});
    last_src_ = src;
  }

  void note_size() {
    max_size_seen_ = std::max(max_size_seen_, static_cast<int>(pieces_.size()));
  }

  std::vector<Piece> pieces_;
  std::vector<Piece> scratch_;
  long last_src_ = kNoSource;
  int max_size_seen_ = 0;
  std::uint64_t insert_count_ = 0;
};

}  // namespace pwlfit
