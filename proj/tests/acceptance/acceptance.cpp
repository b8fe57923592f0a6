// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero if any criterion fails.

#include "dpsched/chain.hpp"
#include "dpsched/error.hpp"
#include "dpsched/heuristic.hpp"
#include "dpsched/lp.hpp"
#include "dpsched/oracle.hpp"
#include "dpsched/policy.hpp"
#include "dpsched/scheduler.hpp"
#include "dpsched/sim.hpp"
#include "specs.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace dpsched;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    template <typename... Args>
    void note(fmt::format_string<Args...> f, Args&&... args)
    {
        notes.push_back(fmt::format(f, std::forward<Args>(args)...));
    }

    template <typename... Args>
    void fail(fmt::format_string<Args...> f, Args&&... args)
    {
        pass = false;
        notes.push_back("FAIL " + fmt::format(f, std::forward<Args>(args)...));
    }
};

// Every solved instance across all criteria feeds the metric identity check.
struct IdentityLog {
    int checked = 0;
    double worst = 0.0;
    std::vector<std::string> failures;

    void record(const ValidatedSpec& spec, const Schedule& s, const std::string& where)
    {
        ++checked;
        try {
            auto a = analyze(spec, s.recovered.policy);
            double gap = std::abs(a.metrics.delay - s.lp.delay);
            worst = std::max(worst, gap);
            if (gap > 1e-8)
                failures.push_back(fmt::format("{}: chain {:.12g} vs LP {:.12g}", where, a.metrics.delay, s.lp.delay));
        }
        catch (const Error& e) {
            failures.push_back(fmt::format("{}: {}", where, e.what()));
        }
    }
};

IdentityLog identity;

// The small instances shared by criteria 1 and 4.
std::vector<ValidatedSpec> small_instances()
{
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> K(2, 4);
    std::vector<ValidatedSpec> out;
    for (int i = 0; i < 6; ++i)
        out.push_back(testing::random_spec(rng, K(rng), 2, 2, 0.95));
    return out;
}

SolveOptions lossy()
{
    SolveOptions o;
    o.allow_lossy = true;
    return o;
}

Outcome lp_matches_oracle()
{
    Outcome o;
    int n = 0;
    double worst = 0.0;
    for (const auto& spec : small_instances()) {
        auto hull = lower_hull(enumerate_policies(spec, EnumMode::All).points);
        double lo = hull.vertices.front().power;
        double hi = saturation_power(spec) * 1.1;
        for (double p : linear_grid(lo, hi, 20)) {
            auto s = solve_budget(spec, p, lossy());
            identity.record(spec, s, fmt::format("small K={} p={:.6g}", spec.K(), p));
            double gap = std::abs(s.lp.delay - *hull.evaluate(p));
            worst = std::max(worst, gap);
            if (gap > 1e-6)
                o.fail("K={} p={:.9g}: LP {:.12g} hull {:.12g}", spec.K(), p, s.lp.delay, *hull.evaluate(p));
        }
        ++n;
    }
    o.note("{} instances x 20 budgets, worst |LP - hull| = {:.3g}", n, worst);
    return o;
}

Outcome simulation_agrees()
{
    Outcome o;
    auto spec = testing::two_channel(30);
    double pmin = min_stable_power(spec);
    double pmax = saturation_power(spec);
    o.note("P_min {:.9g}  P_max {:.9g}  K {}  10^6 slots per budget", pmin, pmax, spec.K());
    std::uint64_t seed = 100;
    for (double p : linear_grid(pmin, pmax, 5)) {
        auto s = solve_budget(spec, p);
        identity.record(spec, s, fmt::format("two_channel p={:.6g}", p));
        auto r = simulate(spec, s.recovered.policy, {1000000, seed++});
        double zd = (r.mean_delay - s.lp.delay) / r.se_delay;
        double zp = r.se_power > 0 ? (r.mean_power - s.lp.power) / r.se_power : 0.0;
        bool ok = std::abs(zd) <= 3.0 && std::abs(zp) <= 3.0;
        std::string line = fmt::format("p {:.6g}: D {:.6g} sim {:.6g} (z {:+.2f})  P {:.6g} sim {:.6g} (z {:+.2f})", p,
                                       s.lp.delay, r.mean_delay, zd, s.lp.power, r.mean_power, zp);
        if (ok)
            o.note("{}", line);
        else
            o.fail("{}", line);
    }
    return o;
}

// Grows K by half until the top M states carry less than 1e-12 of the mass,
// so the solution is not shaped by the buffer edge.
Schedule solve_with_room(SystemSpec raw, double u, ValidatedSpec& spec_out)
{
    for (;;) {
        auto spec = validate_spec(raw);
        double pmin = min_stable_power(spec);
        double pmax = saturation_power(spec);
        auto s = solve_budget(spec, pmin + u * (pmax - pmin));
        double top = 0.0;
        for (int k = spec.K() - spec.M() + 1; k <= spec.K(); ++k)
            top += s.lp.pi[k];
        if (top < 1e-12 || spec.K() >= 400) {
            spec_out = spec;
            return s;
        }
        raw.capacity = raw.capacity * 3 / 2 + 1;
    }
}

Outcome structure_suite()
{
    Outcome o;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> W(2, 4);
    std::uniform_int_distribution<int> M(1, 3);
    std::uniform_real_distribution<double> U(0.2, 1.0);
    const char* names[] = {"single_fractional", "threshold_monotone", "channel_order", "mask_agreement"};
    int counts[4] = {};
    int solved = 0;
    int largest_K = 0;
    for (int i = 0; i < 60; ++i) {
        int w = W(rng);
        int m = M(rng);
        auto raw = testing::random_spec(rng, 2 * m + 4, w, m).raw();
        double u = U(rng);
        ValidatedSpec spec = validate_spec(raw);
        Schedule s;
        try {
            s = solve_with_room(raw, u, spec);
        }
        catch (const Error& e) {
            o.fail("instance {}: {}", i, e.what());
            continue;
        }
        ++solved;
        largest_K = std::max(largest_K, spec.K());
        identity.record(spec, s, fmt::format("random {}", i));
        auto rep = verify_structure(spec, s.lp, s.recovered);
        for (int c = 0; c < 4; ++c) {
            const auto* r = rep.find(names[c]);
            if (!r || !r->passed) {
                ++counts[c];
                o.fail("instance {} (K={} W={} M={} u={:.3f}): {} {}", i, spec.K(), w, m, u, names[c],
                       r ? r->detail : "missing");
            }
        }
    }
    if (solved < 50)
        o.fail("only {} instances solved", solved);
    o.note("{} instances, K up to {}; failures: fractional {} monotone {} channel-order {} masks {}", solved,
           largest_K, counts[0], counts[1], counts[2], counts[3]);
    return o;
}

Outcome curve_properties()
{
    Outcome o;

    auto f8 = testing::two_channel(30);
    double pmin = min_stable_power(f8);
    double pmax = saturation_power(f8);
    auto grid = linear_grid(pmin, pmax * 1.1, 60);
    auto pts = sweep(f8, grid);
    auto curve = check_curve(pts);
    if (!curve.non_increasing || !curve.convex)
        for (const auto& p : curve.problems)
            o.fail("two_channel sweep: {}", p);
    double flat = 0.0;
    int beyond = 0;
    auto at_max = solve_budget(f8, pmax);
    for (const auto& p : pts)
        if (p.p_aver >= pmax) {
            ++beyond;
            flat = std::max(flat, std::abs(p.delay - at_max.lp.delay));
        }
    if (flat > 1e-9)
        o.fail("two_channel: delay varies by {:.3g} above P_max", flat);
    o.note("two_channel: 60 budgets monotone and convex, {} kinks, flat to {:.3g} over {} budgets past P_max",
           curve.kinks.size(), flat, beyond);

    double worst_vertex = 0.0;
    double worst_mid = 0.0;
    double worst_kink = 0.0;
    int vertices = 0;
    int kinks = 0;
    for (const auto& spec : small_instances()) {
        auto hull = lower_hull(enumerate_policies(spec, EnumMode::All).points);
        const auto& v = hull.vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto s = solve_budget(spec, v[i].power, lossy());
            identity.record(spec, s, "hull vertex");
            worst_vertex = std::max(worst_vertex, std::abs(s.lp.delay - v[i].delay));
            ++vertices;
            if (i + 1 < v.size()) {
                double mid = 0.5 * (v[i].power + v[i + 1].power);
                auto m = solve_budget(spec, mid, lossy());
                worst_mid = std::max(worst_mid, std::abs(m.lp.delay - 0.5 * (v[i].delay + v[i + 1].delay)));
            }
        }
        // Dense sweep; every slope change must sit on a hull vertex.
        auto sp = sweep(spec, linear_grid(v.front().power, saturation_power(spec) * 1.1, 400), lossy());
        auto c = check_curve(sp);
        if (!c.non_increasing || !c.convex)
            for (const auto& p : c.problems)
                o.fail("small K={}: {}", spec.K(), p);
        for (double k : c.kinks) {
            double best = INFINITY;
            for (const auto& x : v)
                best = std::min(best, std::abs(x.power - k));
            worst_kink = std::max(worst_kink, best);
            ++kinks;
        }
    }
    if (worst_vertex > 1e-6)
        o.fail("LP at a hull vertex is off by {:.3g}", worst_vertex);
    if (worst_mid > 1e-6)
        o.fail("LP between hull vertices is off the chord by {:.3g}", worst_mid);
    if (worst_kink > 1e-6)
        o.fail("a kink lies {:.3g} from the nearest hull vertex", worst_kink);
    o.note("small: {} hull vertices within {:.3g}, chords within {:.3g}, {} kinks within {:.3g} of a vertex",
           vertices, worst_vertex, worst_mid, kinks, worst_kink);
    return o;
}

Outcome heuristic_dominance()
{
    Outcome o;
    auto spec = testing::four_channel(30);
    auto table = build_table(spec);
    double pmin = min_stable_power(spec);
    double pmax = saturation_power(spec);
    std::set<double> table_delays;
    for (const auto& e : table.entries)
        table_delays.insert(e.delay);

    double prev = INFINITY;
    int points = 0;
    int below_pmax = 0;
    std::vector<double> touching;
    double worst = INFINITY;
    for (double p : linear_grid(pmin, pmax * 1.1, 200)) {
        auto s = solve_budget(spec, p);
        identity.record(spec, s, fmt::format("four_channel p={:.6g}", p));
        double h = lookup(table, p).delay;
        ++points;
        double gap = h - s.lp.delay;
        worst = std::min(worst, gap);
        if (gap < -1e-9)
            o.fail("p {:.9g}: heuristic {:.12g} below LP {:.12g}", p, h, s.lp.delay);
        if (h > prev)
            o.fail("p {:.9g}: heuristic delay rose from {:.12g} to {:.12g}", p, prev, h);
        if (!table_delays.count(h))
            o.fail("p {:.9g}: heuristic value is not a table entry", p);
        prev = h;
        if (std::abs(gap) <= 1e-9) {
            touching.push_back(p);
            if (p < pmax)
                ++below_pmax;
        }
    }
    if (touching.empty())
        o.fail("no grid point where the two curves meet");
    o.note("{} table entries, {} budgets on [P_min, 1.1 P_max], min(heuristic - LP) = {:.3g}", table.entries.size(),
           points, worst);
    o.note("curves meet at {} budgets, {} of them below P_max = {:.9g}{}", touching.size(), below_pmax, pmax,
           touching.empty() ? "" : fmt::format(" (first at {:.9g})", touching.front()));
    return o;
}

Outcome reference_curves()
{
    Outcome o;
    o.note("informational: the channel tables behind the reference curves are not available, so their");
    o.note("exact values are not compared; criteria 1 to 6 check the same model against derived oracles");
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
        double limit; // seconds, 0 = none
    };
    std::vector<Criterion> all = {
        {1, "LP optimum equals the lower hull of all deterministic policies", lp_matches_oracle, 10.0},
        {2, "simulation agrees with analysis on the two-channel instance", simulation_agrees, 30.0},
        {3, "structure of optimal policies on random instances", structure_suite, 0.0},
        {4, "trade-off curve is monotone, convex, piecewise linear, saturating", curve_properties, 0.0},
        {5, "chain delay of the recovered policy equals the LP objective", nullptr, 0.0},
        {6, "two-threshold heuristic versus the LP on the four-channel instance", heuristic_dominance, 0.0},
        {7, "reference curve values (informational)", reference_curves, 0.0},
    };

    bool all_pass = true;
    auto report = [&](const Criterion& c, Outcome o, double secs) {
        if (c.limit > 0 && secs > c.limit)
            o.fail("took {:.2f} s, limit {:.0f} s", secs, c.limit);
        all_pass = all_pass && o.pass;
        fmt::print("{} criterion {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs);
        for (const auto& n : o.notes)
            fmt::print("    {}\n", n);
        std::fflush(stdout);
    };

    for (const auto& c : all) {
        if (c.id == 5)
            continue; // reported last, after every solve has been logged
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        }
        catch (const std::exception& e) {
            o.fail("exception: {}", e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report(c, o, secs);
    }

    Outcome id;
    for (const auto& f : identity.failures)
        id.fail("{}", f);
    id.note("{} solved instances from criteria 1 to 4 and 6, worst gap {:.3g}", identity.checked, identity.worst);
    report(all[4], id, 0.0);

    return all_pass ? 0 : 1;
}
