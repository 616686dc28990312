#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace reluforge {

using Vec = std::vector<double>;

// Dense row-major matrix. Deliberately minimal: the constructions need
// block assembly and mat-vec, nothing else.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows && c < cols);
        return a[r * cols + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows && c < cols);
        return a[r * cols + c];
    }

    // y = A x + b
    void apply(const double* x, const double* b, double* y) const {
        for (std::size_t r = 0; r < rows; ++r) {
            double s = b ? b[r] : 0.0;
            const double* row = a.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
            y[r] = s;
        }
    }

    // copy `src` into this matrix with its top-left corner at (r0, c0)
    void put_block(std::size_t r0, std::size_t c0, const Mat& src) {
        assert(r0 + src.rows <= rows && c0 + src.cols <= cols);
        for (std::size_t r = 0; r < src.rows; ++r)
            for (std::size_t c = 0; c < src.cols; ++c)
                (*this)(r0 + r, c0 + c) = src(r, c);
    }
};

inline Mat matmul(const Mat& A, const Mat& B) {
    assert(A.cols == B.rows);
    Mat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            double v = A(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += v * B(k, j);
        }
    return C;
}

inline Vec matvec(const Mat& A, const Vec& x) {
    assert(A.cols == x.size());
    Vec y(A.rows);
    A.apply(x.data(), nullptr, y.data());
    return y;
}

} // namespace reluforge
