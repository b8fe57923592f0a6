#include "dpsched/lp.hpp"

#include "dpsched/chain.hpp"
#include "dpsched/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dpsched {

double xi_constant(const std::vector<double>& theta)
{
    const int M = static_cast<int>(theta.size()) - 1;
    double xi = 0.0;
    for (int m = 1; m <= M - 1; ++m)
        xi += 0.5 * m * (m + 1) * theta[m + 1];
    return xi;
}

std::vector<double> r_coeffs(const std::vector<double>& theta)
{
    const int M = static_cast<int>(theta.size()) - 1;
    std::vector<double> r(std::max(M, 1), 0.0);
    for (int i = 0; i < M; ++i)
        for (int m = i + 1; m <= M; ++m)
            r[i] += theta[m];
    if (M < 1 || r[0] <= 0.0)
        throw Error(Errc::DegenerateArrivals, "arrival.probs: no arrivals ever (theta_0 = 1)");
    return r;
}

GMatrix build_g(const ValidatedSpec& spec)
{
    const int K = spec.K();
    const int W = spec.W();
    const auto r = r_coeffs(spec.arrival_probs());
    GMatrix out{Matrix(K + 1, W * (K + 1))};
    Matrix& g = out.g;
    for (int k = 0; k <= K; ++k) {
        for (int w = 0; w < W; ++w)
            g(k, k * W + w) = spec.eta(w);
        for (int i = 1; i < static_cast<int>(r.size()) && k - i >= 0; ++i)
            for (int j = 0; j < g.cols(); ++j)
                g(k, j) -= r[i] * g(k - i, j);
        for (int j = 0; j < g.cols(); ++j)
            g(k, j) /= r[0];
    }
    return out;
}

std::vector<double> OccupancyMap::apply(const std::vector<double>& y) const
{
    std::vector<double> pi(offset);
    for (int k = 0; k < rows.rows(); ++k)
        for (int j = 0; j < rows.cols(); ++j)
            pi[k] += rows(k, j) * y[j];
    return pi;
}

OccupancyMap occupancy_map(const ValidatedSpec& spec, const GMatrix& g)
{
    const int K = spec.K();
    const int n = g.g.cols();
    OccupancyMap out{Matrix(K + 1, n), std::vector<double>(K + 1, 0.0)};
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n; ++j) {
            out.rows(k, j) = g.g(k, j);
            out.rows(K, j) -= g.g(k, j);
        }
    out.offset[K] = 1.0;
    return out;
}

namespace {

// Pr{t = j | q = i}
double post_arrival_prob(const ValidatedSpec& spec, int i, int j)
{
    if (j > spec.K() || j < i)
        return 0.0;
    return j < spec.K() ? spec.theta(j - i) : spec.arrival_tail(spec.K() - i);
}

std::string var_name(int k, int w)
{
    return fmt::format("y_{}_{}", k, w + 1);
}

} // namespace

double boundary_term(const ValidatedSpec& spec, const std::vector<double>& pi)
{
    const auto r = r_coeffs(spec.arrival_probs());
    const int K = spec.K();
    double b = 0.0;
    for (int i = 0; i < static_cast<int>(r.size()); ++i)
        for (int j = std::max(K - i, 0); j <= K; ++j)
            b += r[i] * (j + i) * pi[j];
    return b;
}

LpProblem build_lp(const ValidatedSpec& spec, double p_aver)
{
    const int K = spec.K();
    const int W = spec.W();
    const int ny = (K + 1) * W;
    const int n = ny + K + 1;
    const double abar = spec.mean_arrival();
    const auto r = r_coeffs(spec.arrival_probs());

    LpProblem out;
    out.K = K;
    out.W = W;
    out.p_aver = p_aver;
    out.abar = abar;
    out.xi = xi_constant(spec.arrival_probs());
    auto pi_var = [ny](int k) { return ny + k; };

    LinearProgram& lp = out.program;
    lp.var_names.reserve(n);
    for (int k = 0; k <= K; ++k)
        for (int w = 0; w < W; ++w)
            lp.var_names.push_back(var_name(k, w));
    for (int k = 0; k <= K; ++k)
        lp.var_names.push_back(fmt::format("pi_{}", k));

    // Mean queue over abar.  Substituting the cut equations turns this into
    // (sum k eta_w y_{k,w} - xi + boundary)/abar^2 in y alone, but that form
    // recovers tail states as differences of O(1) numbers.
    lp.objective.assign(n, 0.0);
    for (int k = 0; k <= K; ++k)
        lp.objective[pi_var(k)] = k / abar;

    out.power_coef.assign(n, 0.0);
    for (int k = 0; k <= K; ++k)
        for (int w = 0; w < W; ++w)
            out.power_coef[k * W + w] = spec.eta(w) * spec.power(w);
    lp.rows.push_back({out.power_coef, Sense::LessEq, p_aver, "power"});

    // Flow across the cut between k-1 and k: arrivals that jump over it
    // balance departures from post-arrival state k.
    for (int k = 1; k <= K; ++k) {
        Constraint c{std::vector<double>(n, 0.0), Sense::Equal, 0.0, fmt::format("cut_{}", k)};
        for (int j = std::max(0, k - static_cast<int>(r.size())); j < k; ++j)
            c.coef[pi_var(j)] = r[k - 1 - j];
        for (int w = 0; w < W; ++w)
            c.coef[(k - 1) * W + w] = -spec.eta(w);
        lp.rows.push_back(std::move(c));
    }
    Constraint norm{std::vector<double>(n, 0.0), Sense::Equal, 1.0, "total"};
    for (int k = 0; k <= K; ++k)
        norm.coef[pi_var(k)] = 1.0;
    lp.rows.push_back(std::move(norm));

    // y_{k,w} <= Pr{t = k+1}; nothing sits above K, so y_{K,w} = 0.
    for (int k = 0; k <= K; ++k)
        for (int w = 0; w < W; ++w) {
            Constraint c{std::vector<double>(n, 0.0), Sense::LessEq, 0.0, fmt::format("bound_{}_{}", k, w + 1)};
            c.coef[k * W + w] = 1.0;
            for (int i = std::max(0, k + 1 - spec.M()); i <= std::min(k + 1, K); ++i)
                c.coef[pi_var(i)] = -post_arrival_prob(spec, i, k + 1);
            lp.rows.push_back(std::move(c));
        }

    out.overflow_coef.assign(K + 1, 0.0);
    for (int j = 0; j <= K; ++j)
        for (int m = 0; m <= spec.M(); ++m)
            out.overflow_coef[j] += spec.theta(m) * std::max(j + m - K, 0);
    return out;
}

LpSolution solve(const LpProblem& problem, const SimplexOptions& opt)
{
    auto res = simplex_solve(problem.program, opt);
    if (res.status == LpStatus::Infeasible)
        throw Error(Errc::Infeasible,
                    fmt::format("no schedule meets power budget {} (phase I residual {})",
                                problem.p_aver, res.phase1_residual));
    const std::size_t ny = static_cast<std::size_t>(problem.K + 1) * problem.W;
    for (std::size_t v = 0; v < res.x.size(); ++v) {
        double& x = res.x[v];
        if (x < 0.0) {
            if (x < -1e-10)
                throw Error(Errc::InconsistentSolution,
                            fmt::format("{} = {} is negative", problem.program.var_names[v], x));
            x = 0.0;
        }
    }
    LpSolution out;
    out.K = problem.K;
    out.W = problem.W;
    out.iterations = res.iterations;
    out.y.assign(res.x.begin(), res.x.begin() + ny);
    out.pi.assign(res.x.begin() + ny, res.x.end());
    for (int w = 0; w < problem.W; ++w)
        out.y[static_cast<std::size_t>(problem.K) * problem.W + w] = 0.0;

    out.delay = problem.program.objective_offset;
    for (std::size_t v = 0; v < res.x.size(); ++v) {
        out.delay += problem.program.objective[v] * res.x[v];
        out.power += problem.power_coef[v] * res.x[v];
    }
    for (int j = 0; j <= problem.K; ++j)
        out.overflow += problem.overflow_coef[j] * out.pi[j];
    return out;
}

double min_stable_power(const ValidatedSpec& spec)
{
    double need = spec.mean_arrival();
    double cost = 0.0;
    for (int w = spec.W() - 1; w >= 0 && need > 0.0; --w) {
        double x = std::min(spec.eta(w), need);
        cost += spec.power(w) * x;
        need -= x;
    }
    return cost;
}

double saturation_power(const ValidatedSpec& spec)
{
    return analyze(spec, always_transmit(spec)).metrics.power;
}

void write_lp_format(const LpProblem& problem, std::ostream& os)
{
    const auto& lp = problem.program;
    auto write_expr = [&](const std::vector<double>& coef) {
        int on_line = 0;
        bool first = true;
        for (int v = 0; v < lp.num_vars(); ++v) {
            double c = coef[v];
            if (c == 0.0)
                continue;
            if (on_line == 4) {
                os << "\n   ";
                on_line = 0;
            }
            os << (c < 0 ? " - " : first ? " " : " + ") << fmt::format("{:.17g}", std::abs(c))
               << ' ' << lp.var_names[v];
            first = false;
            ++on_line;
        }
        if (first)
            os << " 0 " << lp.var_names[0];
    };

    os << fmt::format("\\ delay LP, K = {}, W = {}, budget = {:.17g}\n", problem.K, problem.W,
                      problem.p_aver);
    os << fmt::format("\\ objective constant: {:.17g}\n", lp.objective_offset);
    os << "Minimize\n obj:";
    write_expr(lp.objective);
    os << "\nSubject To\n";
    for (const auto& row : lp.rows) {
        os << ' ' << row.name << ':';
        write_expr(row.coef);
        const char* op = row.sense == Sense::LessEq ? "<=" : row.sense == Sense::Equal ? "=" : ">=";
        os << fmt::format(" {} {:.17g}\n", op, row.rhs);
    }
    os << "End\n";
}

} // namespace dpsched
