#ifndef GSE_ERRORS_HPP
#define GSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gse {

// Operating point has no equilibrium: i_d * X_g > U_g.
struct NoEquilibrium : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inner i_q/U_t fixed point failed to converge (pathological TVC gains).
struct AlgebraicLoopDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive step size dropped below the hard floor.
struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bisection could not bracket a stable/unstable transition.
struct NoBracket : std::runtime_error {
    NoBracket(const std::string& msg, bool always_stable_)
        : std::runtime_error(msg), always_stable(always_stable_) {}
    bool always_stable;
};

// Root equation has no sign change on the search bracket.
struct NoRoot : std::runtime_error {
    NoRoot(const std::string& msg, double f_lo_, double f_hi_)
        : std::runtime_error(msg), f_lo(f_lo_), f_hi(f_hi_) {}
    double f_lo;
    double f_hi;
};

// arccos argument fell outside [-1, 1].
struct ArgOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fault trajectory never reaches the candidate clearing angle.
struct NeverReached : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gse

#endif
