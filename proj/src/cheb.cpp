#include "mrkc/cheb.hpp"

#include <cmath>
#include <string>

#include "mrkc/errors.hpp"

namespace mrkc {

ChebTriple cheb_eval(int degree, double x) {
    if (degree < 0) {
        throw InvalidInputError("cheb_eval: degree must be >= 0, got " + std::to_string(degree));
    }
    if (!std::isfinite(x)) {
        throw InvalidInputError("cheb_eval: x must be finite");
    }
    ChebTriple prev{1.0, 0.0, 0.0};  // T_0
    if (degree == 0) return prev;
    ChebTriple cur{x, 1.0, 0.0};  // T_1
    for (int j = 2; j <= degree; ++j) {
        // T_j = 2x T_{j-1} - T_{j-2}, differentiated twice in lockstep.
        ChebTriple next;
        next.value = 2.0 * x * cur.value - prev.value;
        next.d1 = 2.0 * cur.value + 2.0 * x * cur.d1 - prev.d1;
        next.d2 = 4.0 * cur.d1 + 2.0 * x * cur.d2 - prev.d2;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> cheb_derivatives(int degree, double x, int order) {
    if (degree < 0 || order < 0) {
        throw InvalidInputError("cheb_derivatives: degree and order must be >= 0");
    }
    if (!std::isfinite(x)) {
        throw InvalidInputError("cheb_derivatives: x must be finite");
    }
    std::vector<double> prev(order + 1, 0.0), cur(order + 1, 0.0), next(order + 1, 0.0);
    prev[0] = 1.0;  // T_0
    if (degree == 0) return prev;
    cur[0] = x;  // T_1
    if (order >= 1) cur[1] = 1.0;
    for (int j = 2; j <= degree; ++j) {
        next[0] = 2.0 * x * cur[0] - prev[0];
        for (int k = 1; k <= order; ++k) {
            // d^k/dx^k of 2x T_{j-1}: 2x T_{j-1}^(k) + 2k T_{j-1}^(k-1)
            next[k] = 2.0 * x * cur[k] + 2.0 * k * cur[k - 1] - prev[k];
        }
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    return cur;
}

}  // namespace mrkc
