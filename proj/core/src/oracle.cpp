#include "dpsched/oracle.hpp"

#include "dpsched/chain.hpp"
#include "dpsched/error.hpp"
#include "parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace dpsched {

namespace {

void threshold_sequences(int K, int W, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == K) {
        out.push_back(cur);
        return;
    }
    int hi = cur.empty() ? W : cur.back();
    for (int t = hi; t >= 0; --t) {
        cur.push_back(t);
        threshold_sequences(K, W, cur, out);
        cur.pop_back();
    }
}

PolicyPoint evaluate(const ValidatedSpec& spec, const Policy& p)
{
    PolicyPoint pt;
    try {
        auto a = analyze(spec, p);
        pt.power = a.metrics.power;
        pt.delay = a.metrics.delay;
    }
    catch (const SingularSystemError&) {
        pt.ergodic = false;
    }
    return pt;
}

} // namespace

Enumeration enumerate_policies(const ValidatedSpec& spec, EnumMode mode, unsigned threads)
{
    Enumeration e;
    e.mode = mode;
    std::size_t count = 0;
    if (mode == EnumMode::All) {
        int bits = spec.K() * spec.W();
        if (bits > max_enumeration_bits)
            throw Error(Errc::TooLarge,
                        fmt::format("K*W = {} exceeds the enumeration cap of {} bits", bits,
                                    max_enumeration_bits));
        count = std::size_t{1} << bits;
    }
    else {
        std::vector<int> cur;
        threshold_sequences(spec.K(), spec.W(), cur, e.thresholds);
        count = e.thresholds.size();
        if (count > (std::size_t{1} << max_enumeration_bits))
            throw Error(Errc::TooLarge, "too many threshold policies to enumerate");
    }
    e.points.resize(count);
    detail::parallel_for(count, threads, [&](std::size_t i) {
        e.points[i] = evaluate(spec, enumerated_policy(spec, e, i));
    });
    return e;
}

Policy enumerated_policy(const ValidatedSpec& spec, const Enumeration& e, std::size_t i)
{
    Policy p(spec.K(), spec.W());
    for (int k = 1; k <= spec.K(); ++k)
        for (int w = 0; w < spec.W(); ++w) {
            bool on = e.mode == EnumMode::All ? (i >> ((k - 1) * spec.W() + w)) & 1u
                                              : w >= e.thresholds[i][k - 1];
            if (on)
                p.set(k, w, 1.0);
        }
    return p;
}

std::optional<double> Hull::evaluate(double p) const
{
    if (vertices.empty() || p < vertices.front().power)
        return std::nullopt;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        const auto& a = vertices[i - 1];
        const auto& b = vertices[i];
        if (p <= b.power)
            return a.delay + (b.delay - a.delay) * (p - a.power) / (b.power - a.power);
    }
    return vertices.back().delay;
}

Hull lower_hull(const std::vector<PolicyPoint>& points)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].ergodic)
            idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].power != points[b].power)
            return points[a].power < points[b].power;
        return points[a].delay < points[b].delay;
    });

    constexpr double eps = 1e-12;
    std::vector<HullVertex> h;
    for (std::size_t i : idx) {
        HullVertex v{points[i].power, points[i].delay, i};
        if (!h.empty() && v.power <= h.back().power + eps)
            continue; // same power, higher or equal delay
        while (h.size() >= 2) {
            const auto& a = h[h.size() - 2];
            const auto& b = h.back();
            double cross = (b.power - a.power) * (v.delay - a.delay) -
                           (b.delay - a.delay) * (v.power - a.power);
            if (cross > eps)
                break;
            h.pop_back();
        }
        h.push_back(v);
    }

    Hull out;
    for (const auto& v : h) {
        if (!out.vertices.empty() && v.delay >= out.vertices.back().delay - eps)
            break;
        out.vertices.push_back(v);
    }
    return out;
}

} // namespace dpsched
