// dpsched: command-line front end.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad input, 3 infeasible budget,
// 4 numerical trouble, 5 a verification check failed.

#include "dpsched/chain.hpp"
#include "dpsched/config.hpp"
#include "dpsched/error.hpp"
#include "dpsched/heuristic.hpp"
#include "dpsched/lp.hpp"
#include "dpsched/oracle.hpp"
#include "dpsched/policy.hpp"
#include "dpsched/scheduler.hpp"
#include "dpsched/sim.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

using namespace dpsched;

namespace {

enum Exit { Ok = 0, Other = 1, Input = 2, NoBudget = 3, Numerical = 4, VerifyFailed = 5 };

int exit_code(Errc c)
{
    switch (c) {
    case Errc::Infeasible:
    case Errc::NoFeasibleEntry:
        return NoBudget;
    case Errc::NumericalInconsistency:
    case Errc::SingularSystem:
    case Errc::InconsistentSolution:
    case Errc::Unbounded:
    case Errc::IterationLimit:
        return Numerical;
    case Errc::StructureViolation:
        return VerifyFailed;
    default:
        return Input;
    }
}

std::string num(double x)
{
    return fmt::format("{:.9g}", x);
}

struct Common {
    std::string config;
    std::optional<double> p_aver;
    std::string out;
    std::string format = "text";
    bool allow_lossy = false;
    unsigned threads = 0;
};

// Output goes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path.empty())
            return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_)
            throw Error(Errc::Io, fmt::format("cannot write {}", path));
    }

    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

double need_budget(const Common& c, const Config& cfg)
{
    if (c.p_aver)
        return *c.p_aver;
    if (cfg.p_aver)
        return *cfg.p_aver;
    throw Error(Errc::MalformedConfig, "solve.p_aver: not set in the config and no --p-aver given");
}

SolveOptions solve_options(const Common& c)
{
    SolveOptions o;
    o.allow_lossy = c.allow_lossy;
    return o;
}

void warn(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        fmt::print(stderr, "warning: {}\n", w);
}

int cmd_solve(const Common& c)
{
    auto cfg = load_config(c.config);
    auto spec = validate_spec(cfg.spec);
    double p = need_budget(c, cfg);
    auto s = solve_budget(spec, p, solve_options(c));
    warn(s.warnings);

    Sink sink(c.out);
    auto& os = sink.os();
    if (c.format == "csv") {
        fmt::print(os, "# dpsched solve v1\n");
        fmt::print(os, "p_aver,delay,power,p_min,p_max,thresholds\n");
        fmt::print(os, "{},{},{},{},{},\"{}\"\n", num(p), num(s.lp.delay), num(s.lp.power), num(s.p_min),
                   num(s.p_max), s.thresholds ? format_thresholds(*s.thresholds) : "not dual-threshold");
        return Ok;
    }
    fmt::print(os, "budget      {}\n", num(p));
    fmt::print(os, "P_min       {}\n", num(s.p_min));
    fmt::print(os, "P_max       {}\n", num(s.p_max));
    fmt::print(os, "delay       {}\n", num(s.lp.delay));
    fmt::print(os, "power       {}\n", num(s.lp.power));
    if (s.lp.overflow > 0)
        fmt::print(os, "overflow    {}\n", num(s.lp.overflow));
    if (s.thresholds)
        fmt::print(os, "thresholds  {}\n", format_thresholds(*s.thresholds));
    else
        fmt::print(os, "thresholds  not a dual-threshold policy\n");
    fmt::print(os, "\n{}", render_policy(s.recovered.policy, s.recovered.reachable));
    return Ok;
}

struct SweepArgs {
    std::optional<double> p_min;
    std::optional<double> p_max;
    std::optional<int> points;
};

int cmd_sweep(const Common& c, const SweepArgs& a)
{
    auto cfg = load_config(c.config);
    auto spec = validate_spec(cfg.spec);
    double lo = a.p_min ? *a.p_min : cfg.sweep_p_min ? *cfg.sweep_p_min : min_stable_power(spec);
    double hi = a.p_max ? *a.p_max : cfg.sweep_p_max ? *cfg.sweep_p_max : saturation_power(spec);
    int n = a.points ? *a.points : cfg.sweep_points ? *cfg.sweep_points : 50;
    if (n < 2)
        throw Error(Errc::MalformedConfig, "sweep.points: need at least 2");
    if (!(lo < hi))
        throw Error(Errc::MalformedConfig, fmt::format("sweep.p_min: {} is not below p_max {}", lo, hi));

    auto pts = sweep(spec, linear_grid(lo, hi, n), solve_options(c), c.threads);
    Sink sink(c.out);
    auto& os = sink.os();
    // Infeasible budgets keep their row with nan delay and power.
    fmt::print(os, "# dpsched sweep v1\n");
    fmt::print(os, "p_aver,feasible,delay,power,thresholds\n");
    for (const auto& p : pts) {
        fmt::print(os, "{},{},{},{},\"{}\"\n", num(p.p_aver), p.feasible ? 1 : 0,
                   p.feasible ? num(p.delay) : "nan", p.feasible ? num(p.power) : "nan", p.summary);
        for (const auto& w : p.warnings)
            fmt::print(stderr, "warning: p_aver {}: {}\n", num(p.p_aver), w);
    }
    auto curve = check_curve(pts);
    for (const auto& pr : curve.problems)
        fmt::print(stderr, "warning: {}\n", pr);
    return Ok;
}

struct SimArgs {
    std::optional<std::uint64_t> seed;
    std::optional<long long> slots;
};

int cmd_simulate(const Common& c, const SimArgs& a)
{
    auto cfg = load_config(c.config);
    auto spec = validate_spec(cfg.spec);
    double p = need_budget(c, cfg);
    auto s = solve_budget(spec, p, solve_options(c));
    warn(s.warnings);

    SimConfig sc;
    sc.seed = a.seed ? *a.seed : cfg.sim_seed ? *cfg.sim_seed : 1;
    sc.slots = a.slots ? *a.slots : cfg.sim_slots ? *cfg.sim_slots : 1000000;
    auto r = simulate(spec, s.recovered.policy, sc);

    Sink sink(c.out);
    auto& os = sink.os();
    fmt::print(os, "# dpsched simulate v1\n");
    fmt::print(os, "p_aver,seed,slots,warmup,sim_delay,se_delay,sim_power,se_power,overflow,lp_delay,lp_power\n");
    fmt::print(os, "{},{},{},{},{},{},{},{},{},{},{}\n", num(p), r.seed, r.slots, r.warmup, num(r.mean_delay),
               num(r.se_delay), num(r.mean_power), num(r.se_power), r.overflow_count, num(s.lp.delay),
               num(s.lp.power));
    return Ok;
}

struct OracleArgs {
    std::string mode = "all";
    int points = 20;
};

int cmd_oracle(const Common& c, const OracleArgs& a)
{
    auto cfg = load_config(c.config);
    auto spec = validate_spec(cfg.spec);
    auto mode = a.mode == "threshold" ? EnumMode::ThresholdOnly : EnumMode::All;
    auto e = enumerate_policies(spec, mode, c.threads);
    auto hull = lower_hull(e.points);

    // Overlay: the LP optimum against the hull on a grid spanning its vertices.
    double lo = std::max(hull.vertices.front().power, min_stable_power(spec));
    double hi = saturation_power(spec) * 1.1;
    auto grid = linear_grid(lo, hi, std::max(a.points, 2));
    auto lp = sweep(spec, grid, solve_options(c), c.threads);
    double worst = 0.0;
    int compared = 0;
    for (const auto& pt : lp) {
        auto h = hull.evaluate(pt.p_aver);
        if (!pt.feasible || !h)
            continue;
        worst = std::max(worst, std::abs(pt.delay - *h));
        ++compared;
    }

    Sink sink(c.out);
    auto& os = sink.os();
    fmt::print(os, "# dpsched oracle v1\n");
    fmt::print(os, "index,power,delay,ergodic,on_hull\n");
    std::vector<char> on_hull(e.points.size(), 0);
    for (const auto& v : hull.vertices)
        on_hull[v.source] = 1;
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        const auto& p = e.points[i];
        fmt::print(os, "{},{},{},{},{}\n", i, p.ergodic ? num(p.power) : "nan", p.ergodic ? num(p.delay) : "nan",
                   p.ergodic ? 1 : 0, static_cast<int>(on_hull[i]));
    }
    fmt::print(stderr, "policies {}  hull vertices {}  budgets compared {}  max |LP - hull| {}\n",
               e.points.size(), hull.vertices.size(), compared, num(worst));
    return worst <= 1e-6 ? Ok : VerifyFailed;
}

int cmd_verify(const Common& c)
{
    auto cfg = load_config(c.config);
    auto spec = validate_spec(cfg.spec);
    double p = need_budget(c, cfg);
    auto s = solve_budget(spec, p, solve_options(c));
    warn(s.warnings);
    auto rep = verify_structure(spec, s.lp, s.recovered);

    Sink sink(c.out);
    auto& os = sink.os();
    bool ok = true;
    for (const auto& ch : rep.checks) {
        const char* tag = ch.passed ? "pass" : ch.advisory ? "note" : "FAIL";
        if (!ch.passed && !ch.advisory)
            ok = false;
        fmt::print(os, "{:<20} {}{}{}\n", ch.name, tag, ch.detail.empty() ? "" : "  ", ch.detail);
    }
    return ok ? Ok : VerifyFailed;
}

struct TableArgs {
    std::string load;
};

int cmd_table(const Common& c, const TableArgs& a)
{
    auto cfg = load_config(c.config);
    auto spec = validate_spec(cfg.spec);
    PolicyTable table;
    if (!a.load.empty()) {
        std::ifstream in(a.load);
        if (!in)
            throw Error(Errc::Io, fmt::format("cannot read {}", a.load));
        table = load_table(in);
        check_table_spec(table, spec);
    }
    else {
        table = build_table(spec, c.threads);
    }

    if (!c.p_aver) {
        Sink sink(c.out);
        save_table(table, sink.os());
        return Ok;
    }
    auto e = lookup(table, *c.p_aver);
    auto r = refine(spec, table, *c.p_aver);
    Sink sink(c.out);
    auto& os = sink.os();
    fmt::print(os, "# dpsched table-lookup v1\n");
    fmt::print(os, "p_aver,k_split,w1,w2,delay,power,refined_delay,refined_power,refined_f\n");
    fmt::print(os, "{},{},{},{},{},{},{},{},{}\n", num(*c.p_aver), e.key.k_split, e.key.w1, e.key.w2,
               num(e.delay), num(e.power), num(r.delay), num(r.power),
               r.fractional ? num(r.fractional->value) : "");
    return Ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Delay-optimal scheduling under an average power budget"};
    app.require_subcommand(1);

    Common c;
    auto common = [&c](CLI::App* sub) {
        sub->add_option("--config", c.config, "JSON system description")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", c.out, "write output here instead of stdout");
        sub->add_flag("--allow-lossy", c.allow_lossy, "accept budgets below the stabilising power");
        sub->add_option("--threads", c.threads, "worker threads, 0 = hardware");
    };

    auto* solve = app.add_subcommand("solve", "solve the LP at one budget and print the policy");
    common(solve);
    solve->add_option("--p-aver", c.p_aver, "average power budget");
    solve->add_option("--format", c.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "trade-off curve over a budget grid, as CSV");
    common(sweep_cmd);
    sweep_cmd->add_option("--p-min", sw.p_min, "first budget, default P_min");
    sweep_cmd->add_option("--p-max", sw.p_max, "last budget, default P_max");
    sweep_cmd->add_option("--points", sw.points, "grid size, default 50");
    sweep_cmd->add_option("--format", c.format, "output is always csv")->check(CLI::IsMember({"csv"}));

    SimArgs sa;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the optimal policy");
    common(sim);
    sim->add_option("--p-aver", c.p_aver, "average power budget");
    sim->add_option("--seed", sa.seed, "run seed, default from config");
    sim->add_option("--slots", sa.slots, "slots to simulate, default from config")->check(CLI::PositiveNumber);
    sim->add_option("--format", c.format, "output is always csv")->check(CLI::IsMember({"csv"}));

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "enumerate deterministic policies and compare with the LP");
    common(oracle);
    oracle->add_option("--mode", oa.mode, "all or threshold")->check(CLI::IsMember({"all", "threshold"}));
    oracle->add_option("--points", oa.points, "budgets in the LP overlay");
    oracle->add_option("--format", c.format, "output is always csv")->check(CLI::IsMember({"csv"}));

    auto* verify = app.add_subcommand("verify", "solve and run the structural checks");
    common(verify);
    verify->add_option("--p-aver", c.p_aver, "average power budget");

    TableArgs ta;
    auto* table = app.add_subcommand("table", "two-threshold heuristic: build or load the table");
    common(table);
    table->add_option("--load", ta.load, "read a saved table instead of building one")->check(CLI::ExistingFile);
    table->add_option("--p-aver", c.p_aver, "look up this budget instead of printing the table");
    table->add_option("--format", c.format, "output is always csv")->check(CLI::IsMember({"csv"}));

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Ok : Input;
    }

    try {
        if (*solve)
            return cmd_solve(c);
        if (*sweep_cmd)
            return cmd_sweep(c, sw);
        if (*sim)
            return cmd_simulate(c, sa);
        if (*oracle)
            return cmd_oracle(c, oa);
        if (*verify)
            return cmd_verify(c);
        if (*table)
            return cmd_table(c, ta);
    }
    catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_code(e.code());
    }
    catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Other;
    }
    return Other;
}
