#pragma once

#include <vector>

namespace mrkc {

/// T_j(x) together with its first two derivatives.
struct ChebTriple {
    double value;  // T_j(x)
    double d1;     // T_j'(x)
    double d2;     // T_j''(x)
};

/// Evaluate the Chebyshev polynomial of the first kind of the given degree at
/// x, returning value, first and second derivative in one pass of the
/// three-term recurrence. Valid for any real x, in particular x > 1 where the
/// trigonometric form does not apply.
ChebTriple cheb_eval(int degree, double x);

/// T_degree(x) and its derivatives up to `order`, returned as
/// {T, T', T'', ..., T^(order)}.
std::vector<double> cheb_derivatives(int degree, double x, int order);

}  // namespace mrkc
