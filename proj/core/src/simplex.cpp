#include "dpsched/simplex.hpp"

#include "dpsched/error.hpp"
#include "dpsched/linalg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpsched {

namespace {

class Tableau {
public:
    Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt)
    {
        n_ = lp.num_vars();
        m_ = static_cast<int>(lp.rows.size());
        int slacks = 0;
        int artificials = 0;
        for (const auto& r : lp.rows) {
            if (static_cast<int>(r.coef.size()) != n_)
                throw Error(Errc::MalformedConfig,
                            fmt::format("constraint '{}' has {} coefficients, expected {}", r.name,
                                        r.coef.size(), n_));
            Sense s = flipped(r) ? flip(r.sense) : r.sense;
            if (s != Sense::Equal)
                ++slacks;
            if (s != Sense::LessEq)
                ++artificials;
        }
        first_art_ = n_ + slacks;
        cols_ = first_art_ + artificials;
        t_ = Matrix(m_, cols_ + 1);
        std_ = Matrix(m_, cols_);
        rhs_.assign(m_, 0.0);
        basis_.assign(m_, -1);

        int s = n_;
        int a = first_art_;
        for (int i = 0; i < m_; ++i) {
            const auto& r = lp.rows[i];
            double sign = flipped(r) ? -1.0 : 1.0;
            Sense sense = flipped(r) ? flip(r.sense) : r.sense;
            for (int j = 0; j < n_; ++j)
                std_(i, j) = sign * r.coef[j];
            rhs_[i] = sign * r.rhs;
            if (sense == Sense::LessEq) {
                std_(i, s) = 1.0;
                basis_[i] = s++;
            }
            else {
                if (sense == Sense::GreaterEq)
                    std_(i, s++) = -1.0;
                std_(i, a) = 1.0;
                basis_[i] = a++;
            }
        }
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < cols_; ++j)
                t_(i, j) = std_(i, j);
            t_(i, cols_) = rhs_[i];
        }
        obj_.assign(cols_ + 1, 0.0);
    }

    // Returns the phase I optimum (sum of artificials).
    double phase1()
    {
        cost_.assign(cols_, 0.0);
        for (int j = first_art_; j < cols_; ++j)
            cost_[j] = 1.0;
        reset_objective();
        run(cols_);
        return -obj_[cols_];
    }

    void drive_out_artificials()
    {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < first_art_)
                continue;
            int best = -1;
            for (int j = 0; j < first_art_; ++j)
                if (std::abs(t_(i, j)) > opt_.pivot_tol && (best < 0 || std::abs(t_(i, j)) > std::abs(t_(i, best))))
                    best = j;
            if (best >= 0)
                pivot(i, best);
            // otherwise the row is redundant; its artificial stays basic at zero
        }
    }

    void phase2(const std::vector<double>& c)
    {
        cost_.assign(cols_, 0.0);
        for (int j = 0; j < n_; ++j)
            cost_[j] = c[j];
        reset_objective();
        run(first_art_);
    }

    std::vector<double> solution() const
    {
        std::vector<double> x(cols_, 0.0);
        for (int i = 0; i < m_; ++i)
            x[basis_[i]] = t_(i, cols_);
        if (opt_.refine) {
            Matrix b(m_, m_);
            for (int i = 0; i < m_; ++i)
                for (int k = 0; k < m_; ++k)
                    b(i, k) = std_(i, basis_[k]);
            if (auto xb = lu_solve(b, rhs_, 1e-14)) {
                bool ok = true;
                for (int k = 0; k < m_; ++k)
                    if ((*xb)[k] < -opt_.feas_tol || !std::isfinite((*xb)[k]))
                        ok = false;
                if (ok)
                    for (int k = 0; k < m_; ++k)
                        x[basis_[k]] = (*xb)[k];
            }
        }
        x.resize(n_);
        return x;
    }

    int iterations() const { return iterations_; }

private:
    static bool flipped(const Constraint& r) { return r.rhs < 0.0; }
    static Sense flip(Sense s)
    {
        return s == Sense::LessEq ? Sense::GreaterEq : s == Sense::GreaterEq ? Sense::LessEq : s;
    }

    void reset_objective()
    {
        std::copy(cost_.begin(), cost_.end(), obj_.begin());
        obj_[cols_] = 0.0;
        price_out();
    }

    // Rebuilds B^-1 [A | b] from the original data so rounding from earlier
    // pivots does not pile up.
    void reinvert()
    {
        Matrix b(m_, m_);
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < m_; ++k)
                b(i, k) = std_(i, basis_[k]);
        LuFactor lu(b, 1e-14);
        if (!lu.ok())
            throw Error(Errc::NumericalInconsistency,
                        fmt::format("simplex basis became singular after {} pivots", iterations_));
        std::vector<double> col(m_);
        for (int j = 0; j < cols_; ++j) {
            for (int i = 0; i < m_; ++i)
                col[i] = std_(i, j);
            col = lu.solve(col);
            for (int i = 0; i < m_; ++i)
                t_(i, j) = std::abs(col[i]) < 1e-15 ? 0.0 : col[i];
        }
        auto x = lu.solve(rhs_);
        for (int i = 0; i < m_; ++i)
            t_(i, cols_) = x[i] < 0.0 && x[i] > -opt_.feas_tol ? 0.0 : x[i];
        reset_objective();
    }

    void price_out()
    {
        for (int i = 0; i < m_; ++i) {
            double cb = obj_[basis_[i]];
            if (cb == 0.0)
                continue;
            const double* r = t_.row(i);
            for (int j = 0; j <= cols_; ++j)
                obj_[j] -= cb * r[j];
        }
    }

    // Columns >= limit never enter.
    void run(int limit)
    {
        int stall = 0;
        int since_reinvert = 0;
        bool fresh = false;
        for (;;) {
            bool bland = opt_.rule == PivotRule::Bland || stall > 50;
            int enter = -1;
            double best = -opt_.opt_tol;
            for (int j = 0; j < limit; ++j) {
                if (obj_[j] < best) {
                    enter = j;
                    if (bland)
                        break;
                    best = obj_[j];
                }
            }
            if (enter < 0) {
                // Confirm optimality on a freshly rebuilt tableau.
                if (fresh)
                    return;
                reinvert();
                since_reinvert = 0;
                fresh = true;
                continue;
            }
            fresh = false;

            int leave = bland ? bland_ratio(enter) : harris_ratio(enter);
            // A tiny pivot or an empty column may be drift; decide on fresh numbers.
            if ((leave < 0 || t_(leave, enter) < 1e-7) && since_reinvert > 0) {
                reinvert();
                since_reinvert = 0;
                continue;
            }
            if (leave < 0)
                throw Error(Errc::Unbounded, "linear program is unbounded");
            stall = t_(leave, cols_) <= 1e-12 ? stall + 1 : 0;
            pivot(leave, enter);
            if (++iterations_ > opt_.max_iterations)
                throw Error(Errc::IterationLimit,
                            fmt::format("simplex exceeded {} iterations", opt_.max_iterations));
            if (++since_reinvert >= 64) {
                reinvert();
                since_reinvert = 0;
            }
        }
    }

    // Rows that block within the Harris bound; among them the smallest basic
    // index wins, but only if its pivot is not much smaller than the best one.
    // Taking the smallest index regardless lets degenerate vertices pick
    // pivots of 1e-10 and the basis goes singular.
    int bland_ratio(int enter) const
    {
        double bound = harris_bound(enter);
        double amax = 0.0;
        for (int i = 0; i < m_; ++i) {
            double a = t_(i, enter);
            if (a > opt_.pivot_tol && std::max(t_(i, cols_), 0.0) / a <= bound)
                amax = std::max(amax, a);
        }
        int leave = -1;
        for (int i = 0; i < m_; ++i) {
            double a = t_(i, enter);
            if (a < 0.1 * amax || a <= opt_.pivot_tol || std::max(t_(i, cols_), 0.0) / a > bound)
                continue;
            if (leave < 0 || basis_[i] < basis_[leave])
                leave = i;
        }
        return leave;
    }

    double harris_bound(int enter) const
    {
        double bound = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m_; ++i) {
            double a = t_(i, enter);
            if (a > opt_.pivot_tol)
                bound = std::min(bound, (std::max(t_(i, cols_), 0.0) + harris_tol) / a);
        }
        return bound;
    }

    // Harris two-pass test: find the longest step that keeps every basic
    // variable above -tol, then take the largest pivot among rows blocking
    // within that step.  Avoids tiny pivots on nearly tied rows.
    int harris_ratio(int enter) const
    {
        double bound = harris_bound(enter);
        int leave = -1;
        for (int i = 0; i < m_; ++i) {
            double a = t_(i, enter);
            if (a <= opt_.pivot_tol || std::max(t_(i, cols_), 0.0) / a > bound)
                continue;
            if (leave < 0 || a > t_(leave, enter))
                leave = i;
        }
        return leave;
    }

    static constexpr double harris_tol = 1e-12;

    void pivot(int r, int c)
    {
        double* pr = t_.row(r);
        double inv = 1.0 / pr[c];
        for (int j = 0; j <= cols_; ++j)
            pr[j] *= inv;
        pr[c] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == r)
                continue;
            double* ri = t_.row(i);
            double f = ri[c];
            if (f == 0.0)
                continue;
            for (int j = 0; j <= cols_; ++j)
                ri[j] -= f * pr[j];
            ri[c] = 0.0;
            if (ri[cols_] < 0.0 && ri[cols_] > -2.0 * harris_tol)
                ri[cols_] = 0.0;
        }
        double f = obj_[c];
        if (f != 0.0) {
            for (int j = 0; j <= cols_; ++j)
                obj_[j] -= f * pr[j];
            obj_[c] = 0.0;
        }
        basis_[r] = c;
    }

    SimplexOptions opt_;
    int n_ = 0;
    int m_ = 0;
    int first_art_ = 0;
    int cols_ = 0;
    Matrix t_;   // B^-1 [A | b]
    Matrix std_; // original standard-form A
    std::vector<double> rhs_;
    std::vector<double> cost_; // current phase costs
    std::vector<double> obj_;  // reduced costs, last entry = -objective
    std::vector<int> basis_;
    int iterations_ = 0;
};

} // namespace

SimplexResult simplex_solve(const LinearProgram& lp, const SimplexOptions& opt)
{
    Tableau tab(lp, opt);
    SimplexResult out;
    double bscale = 1.0;
    for (const auto& r : lp.rows)
        bscale = std::max(bscale, std::abs(r.rhs));

    out.phase1_residual = tab.phase1();
    if (out.phase1_residual > opt.feas_tol * bscale) {
        out.status = LpStatus::Infeasible;
        out.iterations = tab.iterations();
        return out;
    }
    tab.drive_out_artificials();
    tab.phase2(lp.objective);
    out.status = LpStatus::Optimal;
    out.x = tab.solution();
    out.iterations = tab.iterations();
    out.objective = lp.objective_offset;
    for (int j = 0; j < lp.num_vars(); ++j)
        out.objective += lp.objective[j] * out.x[j];

    // Last line of defence: the answer must satisfy the original rows.
    for (int j = 0; j < lp.num_vars(); ++j)
        if (out.x[j] < -opt.feas_tol)
            throw Error(Errc::NumericalInconsistency,
                        fmt::format("simplex returned {} = {}",
                                    j < static_cast<int>(lp.var_names.size()) ? lp.var_names[j] : fmt::format("x{}", j),
                                    out.x[j]));
    for (const auto& r : lp.rows) {
        double a = 0.0;
        for (int j = 0; j < lp.num_vars(); ++j)
            a += r.coef[j] * out.x[j];
        double viol = r.sense == Sense::Equal ? std::abs(a - r.rhs) : r.sense == Sense::LessEq ? a - r.rhs : r.rhs - a;
        if (viol > opt.feas_tol * std::max(1.0, std::abs(r.rhs)))
            throw Error(Errc::NumericalInconsistency,
                        fmt::format("simplex solution violates row '{}' by {}", r.name, viol));
    }
    return out;
}

} // namespace dpsched
