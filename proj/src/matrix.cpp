#include "mrkc/matrix.hpp"

#include <cmath>

#include "mrkc/errors.hpp"

namespace mrkc {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void matvec(const DenseMatrix& a, const Vec& x, Vec& y, Exec exec) {
    if (static_cast<int>(x.size()) != a.cols()) {
        throw InvalidInputError("matvec: dimension mismatch");
    }
    y.resize(a.rows());
    const double* data = a.data().data();
    const int cols = a.cols();
    parallel_for(a.rows(), exec, [&](std::int64_t i) {
        const double* row = data + i * cols;
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    });
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Exec exec) {
    if (a.cols() != b.rows()) {
        throw InvalidInputError("matmul: dimension mismatch");
    }
    DenseMatrix c(a.rows(), b.cols());
    const int n = a.cols(), bc = b.cols();
    parallel_for(a.rows(), exec, [&](std::int64_t i) {
        for (int k = 0; k < n; ++k) {
            const double aik = a(static_cast<int>(i), k);
            if (aik == 0.0) continue;
            for (int j = 0; j < bc; ++j) {
                c(static_cast<int>(i), j) += aik * b(k, j);
            }
        }
    });
    return c;
}

double frobenius_norm(const DenseMatrix& a) {
    double acc = 0.0;
    for (double v : a.data()) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace mrkc
