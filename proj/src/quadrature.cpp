#include "hetridge/quadrature.hpp"

namespace hetridge {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
  if (depth < 0) throw QuadratureFailure("adaptive_simpson: recursion budget exhausted");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  return recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace hetridge
