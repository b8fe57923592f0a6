#include "dpsched/policy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dpsched {

namespace {

bool is_one(double f) { return f >= 1.0 - classify_tol; }
bool is_zero(double f) { return f <= classify_tol; }
bool is_fraction(double f) { return !is_one(f) && !is_zero(f); }

// Number of worst channels that do not always send.
int row_threshold(const Policy& p, int k)
{
    int t = 0;
    for (int w = 0; w < p.W(); ++w)
        if (!is_one(p(k, w)))
            t = w + 1;
    return t;
}

} // namespace

std::vector<char> reachable_states(const ValidatedSpec& spec, const std::vector<double>& pi)
{
    auto visit = decision_state_probs(spec, pi);
    std::vector<char> out(visit.size(), 0);
    out[0] = 1;
    for (std::size_t k = 1; k < visit.size(); ++k)
        out[k] = visit[k] > reach_tol;
    return out;
}

RecoveredPolicy recover_policy(const ValidatedSpec& spec, const LpSolution& sol)
{
    const int K = spec.K();
    const int W = spec.W();
    RecoveredPolicy out;
    out.pi.pi = sol.pi;
    for (double& p : out.pi.pi)
        p = std::max(p, 0.0);
    out.visit = decision_state_probs(spec, out.pi.pi);
    out.reachable = reachable_states(spec, out.pi.pi);
    out.policy = Policy(K, W);

    for (int k = 1; k <= K; ++k) {
        if (!out.reachable[k])
            continue;
        for (int w = 0; w < W; ++w) {
            // Judge the excess on y, not on the ratio: tiny visit
            // probabilities magnify rounding in f.
            double y = sol.y_at(k - 1, w);
            if (y < -1e-9 || y - out.visit[k] > 1e-9)
                throw Error(Errc::InconsistentSolution,
                            fmt::format("y_{}_{} = {} is outside [0, Pr{{t = {}}} = {}]", k - 1,
                                        w + 1, y, k, out.visit[k]));
            double f = y / out.visit[k];
            if (y <= snap_tol)
                f = 0.0;
            else if (out.visit[k] - y <= snap_tol)
                f = 1.0;
            out.policy.set(k, w, std::clamp(f, 0.0, 1.0));
        }
    }

    for (int k = 1; k <= K; ++k) {
        if (out.reachable[k])
            continue;
        int t = -1;
        for (int j = 1; j < k; ++j)
            if (out.reachable[j])
                t = t < 0 ? row_threshold(out.policy, j) : std::min(t, row_threshold(out.policy, j));
        for (int j = k + 1; j <= K && t < 0; ++j)
            if (out.reachable[j])
                t = row_threshold(out.policy, j);
        t = std::max(t, 0);
        for (int w = 0; w < W; ++w)
            out.policy.set(k, w, w >= t ? 1.0 : 0.0);
    }
    return out;
}

StructureReport check_policy_structure(const Policy& p, const std::vector<char>& reachable)
{
    const int K = p.K();
    const int W = p.W();
    StructureReport rep;

    // Each visited row: zeros, then at most one fraction, then ones.
    CheckResult row{"channel_threshold"};
    for (int k = 1; k <= K; ++k) {
        if (!reachable[k])
            continue;
        int stage = 0; // 0 zeros, 1 fraction seen, 2 ones
        for (int w = 0; w < W; ++w) {
            double f = p(k, w);
            int s = is_zero(f) ? 0 : is_fraction(f) ? 1 : 2;
            if (s < stage || (s == 1 && stage == 1)) {
                row.passed = false;
                row.cells.push_back({k, w});
            }
            stage = std::max(stage, s);
        }
    }
    rep.checks.push_back(row);

    CheckResult col{"queue_threshold"};
    for (int w = 0; w < W; ++w) {
        int stage = 0;
        for (int k = 1; k <= K; ++k) {
            if (!reachable[k])
                continue;
            double f = p(k, w);
            int s = is_zero(f) ? 0 : is_fraction(f) ? 1 : 2;
            if (s < stage || (s == 1 && stage == 1)) {
                col.passed = false;
                col.cells.push_back({k, w});
            }
            stage = std::max(stage, s);
        }
    }
    rep.checks.push_back(col);

    CheckResult mono{"threshold_monotone"};
    int prev_k = -1;
    for (int k = 1; k <= K; ++k) {
        if (!reachable[k])
            continue;
        if (prev_k > 0 && row_threshold(p, k) > row_threshold(p, prev_k)) {
            mono.passed = false;
            mono.cells.push_back({k, row_threshold(p, k) - 1});
        }
        prev_k = k;
    }
    rep.checks.push_back(mono);

    CheckResult frac{"single_fractional"};
    for (int k = 1; k <= K; ++k)
        for (int w = 0; w < W && reachable[k]; ++w)
            if (is_fraction(p(k, w)))
                frac.cells.push_back({k, w});
    frac.passed = frac.cells.size() <= 1;
    frac.detail = fmt::format("{} fractional entries", frac.cells.size());
    rep.checks.push_back(frac);

    // T and I both read off the policy; the 0/1 regions they describe must
    // agree on visited states.
    CheckResult mask{"mask_agreement"};
    std::vector<int> I(W, 0);
    for (int w = 0; w < W; ++w)
        for (int k = 1; k <= K; ++k)
            if (reachable[k] && !is_one(p(k, w)))
                I[w] = k;
    for (int k = 1; k <= K; ++k) {
        if (!reachable[k])
            continue;
        int t = row_threshold(p, k);
        for (int w = 0; w < W; ++w)
            if ((w >= t) != (k > I[w])) {
                mask.passed = false;
                mask.cells.push_back({k, w});
            }
    }
    rep.checks.push_back(mask);

    for (auto& c : rep.checks)
        if (!c.passed && c.detail.empty()) {
            std::string cells;
            for (const auto& x : c.cells)
                cells += fmt::format(" ({},{})", x.k, x.w + 1);
            c.detail = "at" + cells;
        }
    return rep;
}

bool StructureReport::ok() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed || c.advisory; });
}

const CheckResult* StructureReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

ThresholdDescriptor extract_thresholds(const Policy& p, const std::vector<char>& reachable)
{
    auto rep = check_policy_structure(p, reachable);
    std::vector<Cell> bad;
    std::string names;
    for (const auto& c : rep.checks)
        if (!c.passed) {
            bad.insert(bad.end(), c.cells.begin(), c.cells.end());
            names += (names.empty() ? "" : ", ") + c.name + " " + c.detail;
        }
    if (!bad.empty())
        throw StructureViolationError("not a dual-threshold policy: " + names, bad);

    ThresholdDescriptor d;
    d.T.assign(p.K() + 1, 0);
    d.T[0] = p.W();
    for (int k = 1; k <= p.K(); ++k)
        d.T[k] = row_threshold(p, k);
    d.I.assign(p.W(), 0);
    for (int w = 0; w < p.W(); ++w)
        for (int k = 1; k <= p.K(); ++k)
            if (reachable[k] && !is_one(p(k, w)))
                d.I[w] = k;
    for (int k = 1; k <= p.K(); ++k)
        for (int w = 0; w < p.W() && reachable[k]; ++w)
            if (is_fraction(p(k, w)))
                d.fractional = FractionalPoint{k, w, p(k, w)};
    return d;
}

StructureReport verify_structure(const ValidatedSpec& spec, const LpSolution& sol,
                                 const RecoveredPolicy& rec)
{
    StructureReport rep = check_policy_structure(rec.policy, rec.reachable);

    CheckResult order{"channel_order"};
    for (int k = 0; k <= sol.K; ++k)
        for (int w = 0; w + 1 < sol.W; ++w)
            if (sol.y_at(k, w) > sol.y_at(k, w + 1) + 1e-9) {
                order.passed = false;
                order.cells.push_back({k, w});
            }
    if (!order.passed)
        order.detail = fmt::format("y decreases in the channel at {} cells", order.cells.size());
    rep.checks.insert(rep.checks.begin(), order);

    CheckResult trip{"round_trip"};
    try {
        auto a = analyze(spec, rec.policy);
        double dd = std::abs(a.metrics.delay - sol.delay);
        double dp = std::abs(a.metrics.power - sol.power);
        trip.passed = dd <= 1e-7 && dp <= 1e-7;
        trip.detail = fmt::format("chain delay {:.9g} vs LP {:.9g}; chain power {:.9g} vs LP {:.9g}",
                                  a.metrics.delay, sol.delay, a.metrics.power, sol.power);
    }
    catch (const Error& e) {
        trip.passed = false;
        trip.detail = e.what();
    }
    rep.checks.push_back(trip);

    // Guidance only: the buffer should sit M states above every queue threshold.
    CheckResult margin{"buffer_margin"};
    margin.advisory = true;
    int top = 0;
    for (int w = 0; w < spec.W(); ++w)
        for (int k = 1; k <= spec.K(); ++k)
            if (rec.reachable[k] && rec.policy(k, w) < 1.0 - classify_tol)
                top = std::max(top, k);
    margin.passed = spec.K() > top + spec.M() - 1 && sol.overflow <= 1e-9;
    margin.detail = fmt::format("largest queue threshold {}, M = {}, K = {}, overflow {:.3g}/slot",
                                top, spec.M(), spec.K(), sol.overflow);
    rep.checks.push_back(margin);
    return rep;
}

std::string render_policy(const Policy& p, const std::vector<char>& reachable)
{
    std::string out = "   k |";
    for (int w = 0; w < p.W(); ++w)
        out += fmt::format(" {:>8}", fmt::format("w={}", w + 1));
    out += '\n';
    for (int k = 1; k <= p.K(); ++k) {
        out += fmt::format("{:>4}{}|", k, reachable[k] ? ' ' : '*');
        for (int w = 0; w < p.W(); ++w) {
            double f = p(k, w);
            if (is_zero(f))
                out += fmt::format(" {:>8}", "0");
            else if (is_one(f))
                out += fmt::format(" {:>8}", "1");
            else
                out += fmt::format(" {:>8.6f}", f);
        }
        out += '\n';
    }
    return out;
}

std::string format_thresholds(const ThresholdDescriptor& d)
{
    std::string t;
    for (std::size_t k = 1; k < d.T.size(); ++k)
        t += fmt::format("{}{}", k > 1 ? " " : "", d.T[k]);
    std::string i;
    for (std::size_t w = 0; w < d.I.size(); ++w)
        i += fmt::format("{}{}", w > 0 ? " " : "", d.I[w]);
    return fmt::format("T=[{}] I=[{}]", t, i);
}

} // namespace dpsched
