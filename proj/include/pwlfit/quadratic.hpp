#pragma once

#include <cmath>
#include <limits>

#include "pwlfit/common.hpp"
#include "pwlfit/errors.hpp"

namespace pwlfit {

// Strictly convex univariate quadratic a*y^2 + b*y + c. Carries the
// metadata needed to rebuild a solution path once the dynamic program has
// finished: the breakpoint index it was generated with, the affine map
// y' = kappa*y + eta to the minimizing next value, and the piece it was
// generated from (one stage closer to the end of the horizon).
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  int gen_index = -1;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  const Quadratic* parent = nullptr;

  double eval(double y) const { return (a * y + b) * y + c; }
  double argmin() const { return -b / (2.0 * a); }
  double min_value() const { return c - b * b / (4.0 * a); }

  bool has_recovery() const { return std::isfinite(kappa) && std::isfinite(eta); }
  double next_value(double y) const { return kappa * y + eta; }

  bool same_function(const Quadratic& o) const {
    return a == o.a && b == o.b && c == o.c;
  }
};

inline Quadratic make_quadratic(double a, double b, double c) {
  Quadratic q;
  q.a = a;
  q.b = b;
  q.c = c;
  return q;
}

enum class IntersectKind {
  identical,  // same function everywhere
  none,       // no real crossing (parallel offset or negative discriminant)
  tangent,    // discriminant within tolerance of zero: touch, no sign change
  single,     // equal leading coefficients, one crossing
  two,        // two distinct crossings
};

struct Intersection {
  IntersectKind kind = IntersectKind::none;
  int count = 0;
  double root[2] = {0.0, 0.0};  // increasing when count == 2
};

// Real solutions of p(y) == q(y). Tangencies (discriminant within a
// relative tolerance of zero) are classified separately and carry the
// touch point but are not treated as sign changes by the envelope.
inline Intersection intersect(const Quadratic& p, const Quadratic& q) {
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  const double dc = p.c - q.c;
  Intersection out;

  if (da == 0.0) {
    if (db == 0.0) {
      out.kind = (dc == 0.0) ? IntersectKind::identical : IntersectKind::none;
      return out;
    }
    out.kind = IntersectKind::single;
    out.count = 1;
    out.root[0] = -dc / db;
    return out;
  }

  const double disc = db * db - 4.0 * da * dc;
  const double tol = detail::kEpsRel * std::max(db * db, std::abs(4.0 * da * dc));
  if (disc <= tol) {
    if (disc >= -tol) {
      out.kind = IntersectKind::tangent;
      out.count = 1;
      out.root[0] = -db / (2.0 * da);
    }
    return out;  // kind stays none for clearly negative discriminant
  }

  const double s = std::sqrt(disc);
  const double w = -(db + std::copysign(s, db)) / 2.0;
  double r0 = w / da;
  double r1 = dc / w;
  if (r0 > r1) std::swap(r0, r1);
  out.kind = IntersectKind::two;
  out.count = 2;
  out.root[0] = r0;
  out.root[1] = r1;
  return out;
}

}  // namespace pwlfit
