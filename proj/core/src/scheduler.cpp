#include "dpsched/scheduler.hpp"

#include "parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dpsched {

Schedule solve_budget(const ValidatedSpec& spec, double p_aver, const SolveOptions& opt)
{
    Schedule s;
    s.p_aver = p_aver;
    s.p_min = min_stable_power(spec);
    s.p_max = saturation_power(spec);
    if (!(p_aver >= 0.0))
        throw Error(Errc::Infeasible, fmt::format("power budget {} is negative", p_aver));
    // Slack so that P_min printed to 9 digits and read back still counts.
    if (p_aver < s.p_min * (1.0 - 1e-9) && !opt.allow_lossy)
        throw Error(Errc::Infeasible,
                    fmt::format("power budget {:.9g} is below P_min = {:.9g}, the least power "
                                "that keeps the queue stable",
                                p_aver, s.p_min));

    s.lp = solve(build_lp(spec, p_aver), opt.simplex);
    s.recovered = recover_policy(spec, s.lp);
    try {
        s.thresholds = extract_thresholds(s.recovered.policy, s.recovered.reachable);
    }
    catch (const StructureViolationError& e) {
        s.warnings.push_back(e.what());
    }

    if (s.lp.overflow > 1e-9)
        s.warnings.push_back(fmt::format(
            "buffer overflows at {:.3g} packets/slot; increase buffer.capacity", s.lp.overflow));
    const int K = spec.K();
    if (s.recovered.reachable[K]) {
        for (int w = 0; w < spec.W(); ++w)
            if (s.recovered.policy(K, w) < 1.0 - classify_tol) {
                s.warnings.push_back(fmt::format(
                    "policy does not always send at a full buffer (channel {}); increase "
                    "buffer.capacity",
                    w + 1));
                break;
            }
    }
    return s;
}

std::vector<SweepPoint> sweep(const ValidatedSpec& spec, const std::vector<double>& budgets,
                              const SolveOptions& opt, unsigned threads)
{
    std::vector<SweepPoint> out(budgets.size());
    detail::parallel_for(budgets.size(), threads, [&](std::size_t i) {
        SweepPoint& pt = out[i];
        pt.p_aver = budgets[i];
        try {
            Schedule s = solve_budget(spec, budgets[i], opt);
            pt.feasible = true;
            pt.delay = s.lp.delay;
            pt.power = s.lp.power;
            if (s.thresholds) {
                pt.summary = format_thresholds(*s.thresholds);
                if (s.thresholds->fractional)
                    pt.summary += fmt::format(" frac=({},{},{:.9g})", s.thresholds->fractional->k,
                                              s.thresholds->fractional->w + 1,
                                              s.thresholds->fractional->value);
            }
            else {
                pt.summary = "not-threshold";
            }
            pt.warnings = std::move(s.warnings);
        }
        catch (const Error& e) {
            if (e.code() != Errc::Infeasible)
                throw;
            pt.feasible = false;
            pt.summary = "infeasible";
        }
    });
    return out;
}

std::vector<double> linear_grid(double lo, double hi, int points)
{
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return g;
}

CurveCheck check_curve(const std::vector<SweepPoint>& points, double tol)
{
    CurveCheck out;
    std::vector<const SweepPoint*> f;
    for (const auto& p : points)
        if (p.feasible)
            f.push_back(&p);
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i]->delay > f[i - 1]->delay + tol) {
            out.non_increasing = false;
            out.problems.push_back(fmt::format("delay rises between budgets {:.9g} and {:.9g}",
                                               f[i - 1]->p_aver, f[i]->p_aver));
        }

    std::vector<double> slope;
    for (std::size_t i = 1; i < f.size(); ++i)
        slope.push_back((f[i]->delay - f[i - 1]->delay) / (f[i]->p_aver - f[i - 1]->p_aver));
    for (std::size_t i = 1; i < slope.size(); ++i) {
        double h = f[i + 1]->p_aver - f[i - 1]->p_aver;
        if (slope[i] < slope[i - 1] - tol / h * 4) {
            out.convex = false;
            out.problems.push_back(
                fmt::format("slope drops from {:.9g} to {:.9g} at budget {:.9g}", slope[i - 1],
                            slope[i], f[i]->p_aver));
        }
    }

    // Runs of equal slope are linear pieces.  Two pieces separated by at most
    // one odd segment meet at a single kink, where their lines cross.
    auto same = [&](double a, double b) { return std::abs(a - b) <= 1e-6 * (1.0 + std::abs(a)); };
    struct Run {
        std::size_t first, last;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < slope.size();) {
        std::size_t j = i;
        while (j + 1 < slope.size() && same(slope[j + 1], slope[i]))
            ++j;
        if (j > i)
            runs.push_back({i, j});
        i = j + 1;
    }
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const Run& a = runs[r - 1];
        const Run& b = runs[r];
        if (b.first - a.last > 2)
            continue;
        double a1 = slope[a.first], b1 = f[a.first]->delay - a1 * f[a.first]->p_aver;
        double a2 = slope[b.first], b2 = f[b.first]->delay - a2 * f[b.first]->p_aver;
        out.kinks.push_back((b2 - b1) / (a1 - a2));
    }
    return out;
}

} // namespace dpsched
