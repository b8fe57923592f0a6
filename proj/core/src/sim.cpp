#include "dpsched/sim.hpp"

#include "dpsched/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dpsched {

std::mt19937_64 make_stream(std::uint64_t seed, Stream id)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    return std::mt19937_64(seq);
}

namespace {

class Slot {
public:
    Slot(const ValidatedSpec& spec, const Policy& policy, std::uint64_t seed)
        : spec_(spec),
          policy_(policy),
          arrivals_(make_stream(seed, Stream::Arrivals)),
          channel_(make_stream(seed, Stream::Channel)),
          coin_(make_stream(seed, Stream::Coin)),
          theta_(spec.arrival_probs().begin(), spec.arrival_probs().end()),
          eta_(spec.channel_probs().begin(), spec.channel_probs().end())
    {
    }

    struct Outcome {
        int q;
        int dropped;
        double power;
    };

    Outcome step(int q)
    {
        int a = theta_(arrivals_);
        int h = eta_(channel_);
        int t = std::min(q + a, spec_.K());
        int dropped = q + a - t;
        int s = t > 0 && unit_(coin_) < policy_(t, h) ? 1 : 0;
        return {t - s, dropped, s * spec_.power(h)};
    }

private:
    const ValidatedSpec& spec_;
    const Policy& policy_;
    std::mt19937_64 arrivals_;
    std::mt19937_64 channel_;
    std::mt19937_64 coin_;
    std::discrete_distribution<int> theta_;
    std::discrete_distribution<int> eta_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

} // namespace

double batch_means_se(std::vector<double> means)
{
    auto stats = [](const std::vector<double>& x, double& mean, double& var, double& rho) {
        const double n = static_cast<double>(x.size());
        mean = 0.0;
        for (double v : x)
            mean += v;
        mean /= n;
        var = 0.0;
        double cov = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            var += (x[i] - mean) * (x[i] - mean);
            if (i > 0)
                cov += (x[i] - mean) * (x[i - 1] - mean);
        }
        rho = var > 0.0 ? cov / var : 0.0;
        var /= n - 1.0;
    };
    if (means.size() < 2)
        return 0.0;
    double mean = 0.0;
    double var = 0.0;
    double rho = 0.0;
    stats(means, mean, var, rho);
    // Batches shorter than the correlation time leave the batch means
    // correlated and the error understated; merge neighbours until the lag-1
    // correlation looks like noise.
    while (means.size() >= 20 && rho > 2.0 / std::sqrt(static_cast<double>(means.size()))) {
        std::vector<double> merged;
        for (std::size_t i = 0; i + 1 < means.size(); i += 2)
            merged.push_back(0.5 * (means[i] + means[i + 1]));
        means = std::move(merged);
        stats(means, mean, var, rho);
    }
    return std::sqrt(var / static_cast<double>(means.size()));
}

SimResult simulate(const ValidatedSpec& spec, const Policy& policy, const SimConfig& cfg)
{
    check_policy(spec, policy);
    if (cfg.slots < 1)
        throw Error(Errc::MalformedConfig, "sim.slots must be at least 1");
    long long warmup = cfg.warmup < 0 ? cfg.slots / 100 : cfg.warmup;
    if (warmup >= cfg.slots)
        throw Error(Errc::MalformedConfig, "warmup must be shorter than sim.slots");

    SimResult r;
    r.seed = cfg.seed;
    r.slots = cfg.slots;
    r.warmup = warmup;

    Slot slot(spec, policy, cfg.seed);
    int q = 0;
    for (long long n = 0; n < warmup; ++n)
        q = slot.step(q).q;

    const long long measured = cfg.slots - warmup;
    const long long batches = std::min<long long>(std::max(cfg.batches, 2), measured);
    const long long per_batch = measured / batches;
    std::vector<double> bq(batches, 0.0);
    std::vector<double> bp(batches, 0.0);
    double sum_q = 0.0;
    double sum_p = 0.0;
    for (long long n = 0; n < measured; ++n) {
        auto o = slot.step(q);
        q = o.q;
        sum_q += q;
        sum_p += o.power;
        r.overflow_count += o.dropped;
        long long b = n / per_batch;
        if (b < batches) {
            bq[b] += q;
            bp[b] += o.power;
        }
    }
    r.mean_queue = sum_q / measured;
    r.mean_power = sum_p / measured;
    r.mean_delay = r.mean_queue / spec.mean_arrival();

    for (double& x : bq)
        x /= per_batch;
    for (double& x : bp)
        x /= per_batch;
    r.se_queue = batch_means_se(bq);
    r.se_power = batch_means_se(bp);
    r.se_delay = r.se_queue / spec.mean_arrival();
    return r;
}

TransitionEstimate estimate_transition(const ValidatedSpec& spec, const Policy& policy, int k,
                                       long long samples, std::uint64_t seed)
{
    check_policy(spec, policy);
    if (k < 0 || k > spec.K())
        throw Error(Errc::MalformedConfig, fmt::format("state {} is outside 0..K", k));
    if (samples < 1)
        throw Error(Errc::MalformedConfig, "samples must be positive");
    Slot slot(spec, policy, seed);
    TransitionEstimate out;
    out.samples = samples;
    std::vector<long long> count(spec.K() + 1, 0);
    for (long long n = 0; n < samples; ++n)
        ++count[slot.step(k).q];
    for (long long c : count) {
        double p = static_cast<double>(c) / samples;
        out.freq.push_back(p);
        out.se.push_back(std::sqrt(p * (1.0 - p) / samples));
    }
    return out;
}

} // namespace dpsched
