#ifndef GSE_NUMERICS_HPP
#define GSE_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "gse/errors.hpp"

namespace gse::numerics {

// Classic fixed-step RK4. State is any Eigen fixed vector (or scalar-like
// type supporting +, scalar *).
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + 0.5 * h * k1));
    const State k3 = f(t + 0.5 * h, State(y + 0.5 * h * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Single Cash-Karp RK45 step; returns (y5, err_inf).
template <typename State, typename Rhs>
std::pair<State, double> rk45_step(const Rhs& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + h / 5.0, State(y + h * (k1 / 5.0)));
    const State k3 = f(t + 3.0 * h / 10.0, State(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
    const State k4 = f(t + 3.0 * h / 5.0,
                       State(y + h * (3.0 / 10.0 * k1 - 9.0 / 10.0 * k2 + 6.0 / 5.0 * k3)));
    const State k5 = f(t + h, State(y + h * (-11.0 / 54.0 * k1 + 5.0 / 2.0 * k2 -
                                             70.0 / 27.0 * k3 + 35.0 / 27.0 * k4)));
    const State k6 =
        f(t + 7.0 * h / 8.0,
          State(y + h * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 + 575.0 / 13824.0 * k3 +
                         44275.0 / 110592.0 * k4 + 253.0 / 4096.0 * k5)));
    const State y5 = y + h * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4 +
                              512.0 / 1771.0 * k6);
    const State y4 = y + h * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                              13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 + 1.0 / 4.0 * k6);
    const State d = y5 - y4;
    double err = 0.0;
    for (int i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i]));
    return {y5, err};
}

// Brent's method on [a, b]. Caller guarantees f(a) * f(b) <= 0.
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double xtol = 1e-14, int maxit = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw NoRoot("brent: endpoints do not bracket a root", fa, fb);
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < maxit; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double fa, double m,
                      double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                                   double b, double fb, double m, double fm, double whole,
                                   double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, lm, flm, m, fm);
    const double right = simpson(f, m, fm, rm, frm, b, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature to absolute tolerance. Handles sqrt-type
// endpoint singularities by recursion depth alone (max_depth 48).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double abs_tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(f, a, fa, m, fm, b, fb);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

}  // namespace gse::numerics

#endif
