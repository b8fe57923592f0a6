#pragma once

#include "dpsched/lp.hpp"
#include "dpsched/policy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dpsched {

struct SolveOptions {
    // Accept budgets below the stabilising power.  The buffer then overflows
    // and the optimum may park mass at a full buffer.
    bool allow_lossy = false;
    SimplexOptions simplex;
};

struct Schedule {
    double p_aver = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;
    LpSolution lp;
    RecoveredPolicy recovered;
    std::optional<ThresholdDescriptor> thresholds; // empty if the policy is not dual-threshold
    std::vector<std::string> warnings;
};

// Budget -> LP -> recovered policy -> thresholds.  Throws Error(Infeasible)
// when p_aver is below the stabilising power (unless allowed) or negative.
Schedule solve_budget(const ValidatedSpec& spec, double p_aver, const SolveOptions& opt = {});

struct SweepPoint {
    double p_aver = 0.0;
    bool feasible = false;
    double delay = 0.0;
    double power = 0.0;
    std::string summary; // thresholds and fractional point
    std::vector<std::string> warnings;
};

// One LP per budget, spread over worker threads; results are in grid order.
std::vector<SweepPoint> sweep(const ValidatedSpec& spec, const std::vector<double>& budgets,
                              const SolveOptions& opt = {}, unsigned threads = 0);

std::vector<double> linear_grid(double lo, double hi, int points);

struct CurveCheck {
    bool non_increasing = true;
    bool convex = true;
    std::vector<double> kinks; // budgets where the slope changes, estimated
    std::vector<std::string> problems;
};

// Checks monotonicity and convexity of the feasible points of a sweep and
// locates slope changes by intersecting neighbouring linear pieces.
CurveCheck check_curve(const std::vector<SweepPoint>& points, double tol = 1e-7);

} // namespace dpsched
