#pragma once

#include <string>
#include <vector>

namespace dpsched {

enum class Sense { LessEq, Equal, GreaterEq };

struct Constraint {
    std::vector<double> coef; // one per variable
    Sense sense = Sense::LessEq;
    double rhs = 0.0;
    std::string name;
};

// minimise objective . x + objective_offset subject to rows, x >= 0.
struct LinearProgram {
    std::vector<double> objective;
    double objective_offset = 0.0;
    std::vector<Constraint> rows;
    std::vector<std::string> var_names;

    int num_vars() const { return static_cast<int>(objective.size()); }
};

enum class PivotRule {
    Bland,           // smallest eligible index, never cycles
    DantzigThenBland // most negative reduced cost, Bland after a degenerate stall
};

struct SimplexOptions {
    double pivot_tol = 1e-10;
    double feas_tol = 1e-8;
    double opt_tol = 1e-8;
    int max_iterations = 200000;
    PivotRule rule = PivotRule::DantzigThenBland;
    bool refine = true; // re-solve the final basis from the original data
};

enum class LpStatus { Optimal, Infeasible };

struct SimplexResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
    double phase1_residual = 0.0; // sum of artificials after phase I
};

// Dense two-phase tableau simplex.  Throws Error(Unbounded) or
// Error(IterationLimit); infeasibility is reported through the status.
SimplexResult simplex_solve(const LinearProgram& lp, const SimplexOptions& opt = {});

} // namespace dpsched
