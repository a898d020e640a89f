#pragma once

#include <vector>

#include "mrkc/parallel.hpp"

namespace mrkc {

using Vec = std::vector<double>;

/// Small dense row-major matrix; dimensions in this project stay <= ~512.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

    static DenseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// y = A x. Rows are independent dot products, so the parallel path is
/// bit-identical to the serial one.
void matvec(const DenseMatrix& a, const Vec& x, Vec& y, Exec exec = Exec::seq);

/// C = A B.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Exec exec = Exec::seq);

double frobenius_norm(const DenseMatrix& a);

}  // namespace mrkc
