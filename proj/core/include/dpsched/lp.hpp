#pragma once

#include "dpsched/linalg.hpp"
#include "dpsched/model.hpp"
#include "dpsched/simplex.hpp"

#include <iosfwd>
#include <vector>

namespace dpsched {

// xi = sum_{m=1}^{M-1} m(m+1)/2 theta_{m+1}
double xi_constant(const std::vector<double>& theta);

// r_i = Pr{a > i}, i = 0..M-1.  Throws DegenerateArrivals if r_0 = 0.
std::vector<double> r_coeffs(const std::vector<double>& theta);

// Row k expresses pi_k as a linear function of y (variables ordered k*W + w).
// Row 0 is l_1/r_0; later rows follow from the cut equation between k-1 and k.
struct GMatrix {
    Matrix g; // (K+1) x W(K+1)
};

GMatrix build_g(const ValidatedSpec& spec);

// pi_k = rows(k) . y + offset[k].  Rows 0..K-1 come from G, row K from
// normalisation.
struct OccupancyMap {
    Matrix rows;
    std::vector<double> offset;

    std::vector<double> apply(const std::vector<double>& y) const;
};

OccupancyMap occupancy_map(const ValidatedSpec& spec, const GMatrix& g);

struct LpProblem {
    LinearProgram program; // y_{k,w} at k*W + w, then pi_k at (K+1)*W + k
    int K = 0;
    int W = 0;
    double p_aver = 0.0;
    double abar = 0.0;
    double xi = 0.0;
    std::vector<double> power_coef;    // eta_w P_w on the y variables, 0 on pi
    std::vector<double> overflow_coef; // overflow rate as pi . overflow_coef
};

// Delay-minimising LP for a finite buffer.  pi is kept as a variable next to
// y and tied to it by the K cut equations and normalisation; eliminating it
// with the occupancy map gives the LP in y alone, with the same optimum.
// Inequalities: the power budget and y_{k,w} <= Pr{t = k+1} for every (k, w),
// which pins y_{K,w} = 0.  The objective is sum k pi_k / abar.
LpProblem build_lp(const ValidatedSpec& spec, double p_aver);

struct LpSolution {
    int K = 0;
    int W = 0;
    std::vector<double> y;  // k*W + w
    std::vector<double> pi;
    double delay = 0.0;     // LP objective
    double power = 0.0;
    double overflow = 0.0;  // packets lost per slot at the buffer limit
    int iterations = 0;

    double y_at(int k, int w) const { return y[static_cast<std::size_t>(k) * W + w]; }
};

// Throws Error(Infeasible) if no y satisfies the constraints.
LpSolution solve(const LpProblem& problem, const SimplexOptions& opt = {});

// The boundary term of the objective evaluated at pi.  Zero when the top M
// states are empty.
double boundary_term(const ValidatedSpec& spec, const std::vector<double>& pi);

// Cheapest power that can serve abar packets per slot: fill the best channels
// first, each channel serving at most its probability.
double min_stable_power(const ValidatedSpec& spec);

// Power of the policy that sends whenever the queue is non-empty.
double saturation_power(const ValidatedSpec& spec);

// CPLEX LP text format, for cross-checking with other solvers.
void write_lp_format(const LpProblem& problem, std::ostream& os);

} // namespace dpsched
