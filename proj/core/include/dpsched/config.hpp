#pragma once

#include "dpsched/model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace dpsched {

// JSON configuration:
//   arrival.probs, channel.probs, channel.powers, buffer.capacity   required
//   solve.p_aver, sweep.{p_min,p_max,points}, sim.{slots,seed}       optional
struct Config {
    SystemSpec spec;
    std::optional<double> p_aver;
    std::optional<double> sweep_p_min;
    std::optional<double> sweep_p_max;
    std::optional<int> sweep_points;
    std::optional<long long> sim_slots;
    std::optional<std::uint64_t> sim_seed;
};

// Throws Error(MalformedConfig) naming the offending field.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

} // namespace dpsched
