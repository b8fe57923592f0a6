#pragma once

#include "dpsched/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace dpsched {

// Each random component draws from its own mt19937_64, seeded from the run
// seed and a fixed stream id, so changing how one component consumes numbers
// leaves the others untouched.
enum class Stream : std::uint32_t { Arrivals = 1, Channel = 2, Coin = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream id);

struct SimConfig {
    long long slots = 1000000;
    std::uint64_t seed = 1;
    long long warmup = -1; // negative: 1% of slots
    int batches = 100;     // for batch-means standard errors
};

struct SimResult {
    std::uint64_t seed = 0;
    long long slots = 0;
    long long warmup = 0;
    double mean_queue = 0.0;
    double mean_delay = 0.0; // mean_queue / abar
    double mean_power = 0.0;
    double se_queue = 0.0;
    double se_delay = 0.0;
    double se_power = 0.0;
    long long overflow_count = 0; // packets dropped after warmup
};

// Slot by slot: a ~ theta, h ~ eta, t = min(q + a, K), s ~ Bernoulli(f(t, h)),
// q = t - s.  Queue and power are averaged over the slots after warmup.
SimResult simulate(const ValidatedSpec& spec, const Policy& policy, const SimConfig& config);

// Standard error of the grand mean from equal-length batch means.  Adjacent
// batches are merged pairwise while their lag-1 correlation exceeds
// 2/sqrt(count), stopping before fewer than 10 remain.
double batch_means_se(std::vector<double> means);

struct TransitionEstimate {
    long long samples = 0;
    std::vector<double> freq; // empirical Pr{q' = l | q = k}
    std::vector<double> se;   // binomial standard error per entry
};

// One-step transitions out of a forced state k.
TransitionEstimate estimate_transition(const ValidatedSpec& spec, const Policy& policy, int k,
                                       long long samples, std::uint64_t seed);

} // namespace dpsched
