#include "fipriv/quadrature.hpp"

#include <cmath>

#include "fipriv/errors.hpp"

namespace fipriv {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  bool failed = false;
};

double simpson(double h, double fa, double fm, double fb) {
  return (fa + 4.0 * fm + fb) * (h / 6.0);
}

double refine(SimpsonState& st, double a, double m, double b, double fa, double fm, double fb,
              double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = simpson(m - a, fa, flm, fm);
  const double right = simpson(b - m, fm, frm, fb);
  const double err = (left + right - whole) / 15.0;
  if (std::abs(err) <= tol || depth <= 0) {
    if (depth <= 0 && std::abs(err) > tol) st.failed = true;
    return left + right + err;
  }
  return refine(st, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         refine(st, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 QuadratureOptions options) {
  if (!(lo < hi)) throw Error("integrate: requires lo < hi");
  SimpsonState st{f};
  const double mid = 0.5 * (lo + hi);
  const double fa = f(lo);
  const double fm = f(mid);
  const double fb = f(hi);
  const double whole = simpson(hi - lo, fa, fm, fb);
  const double result =
      refine(st, lo, mid, hi, fa, fm, fb, whole, options.abs_tol, options.max_depth);
  if (st.failed && options.strict)
    throw QuadratureFailureError("integrate: tolerance unreachable within depth budget");
  return result;
}

}  // namespace fipriv
