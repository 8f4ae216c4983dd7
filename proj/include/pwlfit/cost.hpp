#pragma once

#include "pwlfit/errors.hpp"
#include "pwlfit/signal.hpp"

namespace pwlfit {

// Transition cost between breakpoints i and i' as a quadratic form in the
// endpoint values (y, y'):
//   l(y, y') = [y y'] P [y y']^T + q^T [y y'] + r
// with P symmetric. For a continuous signal this is the exact integral of
// the squared difference between the chord and the piecewise-linear signal
// over [t_i, t_i']; for a discrete signal the sum over samples i..i'-1
// (the cost at i' belongs to the succeeding segment).
struct QuadraticForm2 {
  double p11 = 0.0;
  double p12 = 0.0;
  double p22 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double r = 0.0;

  double eval(double y, double yp) const {
    return p11 * y * y + 2.0 * p12 * y * yp + p22 * yp * yp + q1 * y + q2 * yp + r;
  }
};

inline double eval_qf(const QuadraticForm2& qf, double y, double yp) {
  return qf.eval(y, yp);
}

inline QuadraticForm2 transition_cost(const Signal& s, const Moments& m, int i, int ip) {
  if (!(0 <= i && i < ip && ip <= s.n()))
    throw invalid_input("transition_cost: need 0 <= i < i' <= N");

  QuadraticForm2 qf;
  const double s1 = m.sum1(i, ip);
  const double s2 = m.sum2(i, ip);
  qf.r = m.sum3(i, ip);

  if (s.kind() == SignalKind::continuous) {
    const double ti = s.time(i);
    const double tip = s.time(ip);
    const double dt = tip - ti;
    qf.p11 = dt / 3.0;
    qf.p22 = dt / 3.0;
    qf.p12 = dt / 6.0;
    qf.q1 = -2.0 * (tip * s1 - s2) / dt;
    qf.q2 = -2.0 * (s2 - ti * s1) / dt;
  } else {
    const double d = static_cast<double>(ip - i);
    qf.p11 = (d + 1.0) * (2.0 * d + 1.0) / (6.0 * d);
    qf.p22 = (d - 1.0) * (2.0 * d - 1.0) / (6.0 * d);
    qf.p12 = (d * d - 1.0) / (6.0 * d);
    qf.q1 = -2.0 * (static_cast<double>(ip) * s1 - s2) / d;
    qf.q2 = -2.0 * (s2 - static_cast<double>(i) * s1) / d;
  }
  return qf;
}

}  // namespace pwlfit
