#include "dpsched/model.hpp"

#include "dpsched/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace dpsched {

namespace {

constexpr double sum_tol = 1e-12;

std::vector<double> normalised(std::vector<double> p, const char* field)
{
    if (p.empty())
        throw Error(Errc::NonStochastic, fmt::format("{}: must not be empty", field));
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || p[i] < 0.0 || p[i] > 1.0)
            throw Error(Errc::NonStochastic,
                        fmt::format("{}[{}] = {} is not a probability", field, i, p[i]));
        total += p[i];
    }
    if (std::abs(total - 1.0) > sum_tol)
        throw Error(Errc::NonStochastic,
                    fmt::format("{}: entries sum to {:.17g}, expected 1", field, total));
    for (double& v : p)
        v /= total;
    return p;
}

} // namespace

double ValidatedSpec::arrival_tail(int m) const
{
    double tail = 0.0;
    for (int i = std::max(m, 0); i <= M(); ++i)
        tail += theta_[i];
    return tail;
}

ValidatedSpec validate_spec(const SystemSpec& spec)
{
    ValidatedSpec out;
    out.theta_ = normalised(spec.arrival_probs, "arrival.probs");
    while (out.theta_.size() > 1 && out.theta_.back() == 0.0)
        out.theta_.pop_back();
    out.eta_ = normalised(spec.channel_probs, "channel.probs");

    if (spec.channel_powers.size() != out.eta_.size())
        throw Error(Errc::MalformedConfig,
                    fmt::format("channel.powers has {} entries but channel.probs has {}",
                                spec.channel_powers.size(), out.eta_.size()));
    for (std::size_t w = 0; w < spec.channel_powers.size(); ++w) {
        double p = spec.channel_powers[w];
        if (!std::isfinite(p) || p <= 0.0)
            throw Error(Errc::NonDecreasingPower,
                        fmt::format("channel.powers[{}] = {} must be positive", w, p));
        if (w > 0 && !(p < spec.channel_powers[w - 1]))
            throw Error(Errc::NonDecreasingPower,
                        fmt::format("channel.powers must be strictly decreasing "
                                    "(entry {} = {} follows {})",
                                    w, p, spec.channel_powers[w - 1]));
    }
    out.power_ = spec.channel_powers;

    double mean = 0.0;
    for (std::size_t m = 0; m < out.theta_.size(); ++m)
        mean += static_cast<double>(m) * out.theta_[m];
    if (mean <= 0.0)
        throw Error(Errc::DegenerateArrivals, "arrival.probs: mean arrival rate is 0");
    if (mean >= 1.0)
        throw Error(Errc::UnstableArrival,
                    fmt::format("arrival.probs: mean arrival rate {} must be below 1 packet/slot",
                                mean));
    out.mean_ = mean;

    if (spec.capacity < 1 || spec.capacity < out.M())
        throw Error(Errc::CapacityTooSmall,
                    fmt::format("buffer.capacity = {} is below the largest burst {}",
                                spec.capacity, out.M()));
    out.capacity_ = spec.capacity;
    return out;
}

Policy::Policy(int K, int W)
    : K_(K), W_(W), f_(static_cast<std::size_t>(K + 1) * W, 0.0)
{
    if (K < 1 || W < 1)
        throw Error(Errc::MalformedPolicy, "policy needs K >= 1 and W >= 1");
}

void Policy::set(int k, int w, double value)
{
    if (k < 0 || k > K_ || w < 0 || w >= W_)
        throw Error(Errc::MalformedPolicy, fmt::format("policy index ({}, {}) out of range", k, w));
    if (!(value >= 0.0 && value <= 1.0))
        throw Error(Errc::MalformedPolicy,
                    fmt::format("f[{}][{}] = {} is not a probability", k, w, value));
    if (k == 0 && value != 0.0)
        throw Error(Errc::MalformedPolicy, "f[0][w] must be 0: nothing to send");
    f_[index(k, w)] = value;
}

Policy make_policy(const std::vector<std::vector<double>>& rows)
{
    if (rows.size() < 2 || rows[0].empty())
        throw Error(Errc::MalformedPolicy, "policy needs at least two rows and one column");
    int K = static_cast<int>(rows.size()) - 1;
    int W = static_cast<int>(rows[0].size());
    Policy p(K, W);
    for (int k = 0; k <= K; ++k) {
        if (static_cast<int>(rows[k].size()) != W)
            throw Error(Errc::MalformedPolicy, fmt::format("policy row {} has wrong width", k));
        for (int w = 0; w < W; ++w)
            p.set(k, w, rows[k][w]);
    }
    return p;
}

void check_policy(const ValidatedSpec& spec, const Policy& policy)
{
    if (policy.K() != spec.K() || policy.W() != spec.W())
        throw Error(Errc::MalformedPolicy,
                    fmt::format("policy is {}x{} but the spec needs {}x{}", policy.K() + 1,
                                policy.W(), spec.K() + 1, spec.W()));
}

Policy always_transmit(const ValidatedSpec& spec)
{
    Policy p(spec.K(), spec.W());
    for (int k = 1; k <= spec.K(); ++k)
        for (int w = 0; w < spec.W(); ++w)
            p.set(k, w, 1.0);
    return p;
}

Policy never_transmit(const ValidatedSpec& spec)
{
    return Policy(spec.K(), spec.W());
}

} // namespace dpsched
