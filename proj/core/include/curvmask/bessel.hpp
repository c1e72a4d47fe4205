#pragma once

namespace curvmask {

/// Bessel function of the first kind J_n(x) for integer order n in {0, 1, 2}.
/// Power series for |x| <= 12, Hankel asymptotic expansion beyond. Absolute
/// error stays below 1e-10 for |x| <= 200.
double bessel_j(int order, double x);

}  // namespace curvmask
