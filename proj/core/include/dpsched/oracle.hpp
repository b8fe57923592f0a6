#pragma once

#include "dpsched/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dpsched {

enum class EnumMode {
    All,          // every 0/1 policy, capped at 2^24
    ThresholdOnly // T_1 >= ... >= T_K, each in 0..W
};

struct PolicyPoint {
    double power = 0.0;
    double delay = 0.0;
    bool ergodic = true; // false: several closed classes, metrics undefined
};

struct Enumeration {
    EnumMode mode = EnumMode::All;
    std::vector<PolicyPoint> points;
    std::vector<std::vector<int>> thresholds; // ThresholdOnly: T_1..T_K per point
};

inline constexpr int max_enumeration_bits = 24;

// Throws Error(TooLarge) when All mode would need more than 2^24 policies.
Enumeration enumerate_policies(const ValidatedSpec& spec, EnumMode mode, unsigned threads = 0);

// The i-th enumerated policy.  In All mode bit (k-1)*W + w of i is f(k, w).
Policy enumerated_policy(const ValidatedSpec& spec, const Enumeration& e, std::size_t i);

struct HullVertex {
    double power;
    double delay;
    std::size_t source; // index into the input points
};

struct Hull {
    std::vector<HullVertex> vertices; // power increasing, delay decreasing

    // Least delay reachable with power <= p by mixing vertices; empty if p is
    // below every point.
    std::optional<double> evaluate(double p) const;
};

Hull lower_hull(const std::vector<PolicyPoint>& points);

} // namespace dpsched
