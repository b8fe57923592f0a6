#include "dpsched/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dpsched {

LuFactor::LuFactor(Matrix a, double rel_tol) : lu_(std::move(a))
{
    const int n = lu_.rows();
    perm_.resize(n);
    for (int i = 0; i < n; ++i)
        perm_[i] = i;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            scale = std::max(scale, std::abs(lu_(i, j)));
    if (scale == 0.0)
        return;
    const double tiny = rel_tol * scale;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(lu_(r, col)) > std::abs(lu_(piv, col)))
                piv = r;
        if (std::abs(lu_(piv, col)) <= tiny)
            return;
        if (piv != col) {
            for (int j = 0; j < n; ++j)
                std::swap(lu_(piv, j), lu_(col, j));
            std::swap(perm_[piv], perm_[col]);
        }
        const double* prow = lu_.row(col);
        for (int r = col + 1; r < n; ++r) {
            double* rr = lu_.row(r);
            double factor = rr[col] / prow[col];
            rr[col] = factor;
            if (factor == 0.0)
                continue;
            for (int j = col + 1; j < n; ++j)
                rr[j] -= factor * prow[j];
        }
    }
    ok_ = true;
}

std::vector<double> LuFactor::solve(std::vector<double> b) const
{
    const int n = lu_.rows();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        double s = b[perm_[i]];
        const double* r = lu_.row(i);
        for (int j = 0; j < i; ++j)
            s -= r[j] * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        const double* r = lu_.row(i);
        for (int j = i + 1; j < n; ++j)
            s -= r[j] * x[j];
        x[i] = s / r[i];
    }
    return x;
}

std::optional<std::vector<double>> lu_solve(Matrix a, std::vector<double> b, double rel_tol)
{
    LuFactor lu(std::move(a), rel_tol);
    if (!lu.ok())
        return std::nullopt;
    return lu.solve(std::move(b));
}

} // namespace dpsched
