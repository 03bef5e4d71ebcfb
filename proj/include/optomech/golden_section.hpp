#pragma once

#include <cmath>
#include <utility>

namespace optomech {

template <class Real>
struct ScalarMinimum {
  Real x;
  Real value;
  int evaluations;
};

/// Golden-section search for the minimum of a unimodal `f` on [a, b].
/// Stops once the bracket is narrower than `rel_tol` times the initial
/// width. The endpoints are scored as well, so a minimum sitting on the
/// boundary is returned exactly.
template <class Real, class F>
ScalarMinimum<Real> golden_section_minimize(F&& f, Real a, Real b, Real rel_tol = Real(1e-10),
                                            int max_iter = 200) {
  if (b < a) std::swap(a, b);
  const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
  const Real width0 = b - a;

  ScalarMinimum<Real> best{a, f(a), 1};
  auto consider = [&best](Real x, Real fx) {
    if (fx < best.value) {
      best.x = x;
      best.value = fx;
    }
  };
  if (!(width0 > Real(0))) return best;
  consider(b, f(b));
  ++best.evaluations;

  Real lo = a, hi = b;
  Real u = hi - inv_phi * (hi - lo);
  Real v = lo + inv_phi * (hi - lo);
  Real fu = f(u), fv = f(v);
  best.evaluations += 2;
  for (int it = 0; it < max_iter && (hi - lo) > rel_tol * width0; ++it) {
    if (fu < fv) {
      hi = v;
      v = u;
      fv = fu;
      u = hi - inv_phi * (hi - lo);
      fu = f(u);
    } else {
      lo = u;
      u = v;
      fu = fv;
      v = lo + inv_phi * (hi - lo);
      fv = f(v);
    }
    ++best.evaluations;
  }
  consider(u, fu);
  consider(v, fv);
  return best;
}

}  // namespace optomech
