#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace dpsched {

// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    double* row(int r) { return a_.data() + static_cast<std::size_t>(r) * cols_; }
    const double* row(int r) const { return a_.data() + static_cast<std::size_t>(r) * cols_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// LU factorisation with partial pivoting, reusable for many right-hand sides.
class LuFactor {
public:
    // ok() is false when a pivot falls below rel_tol times the largest entry.
    explicit LuFactor(Matrix a, double rel_tol = 1e-13);

    bool ok() const { return ok_; }
    std::vector<double> solve(std::vector<double> b) const;

private:
    Matrix lu_;
    std::vector<int> perm_;
    bool ok_ = false;
};

// Solves A x = b by LU with partial pivoting.  Returns nothing when a pivot
// falls below rel_tol times the largest entry of A.
std::optional<std::vector<double>> lu_solve(Matrix a, std::vector<double> b,
                                            double rel_tol = 1e-13);

} // namespace dpsched
