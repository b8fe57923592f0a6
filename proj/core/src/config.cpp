#include "dpsched/config.hpp"

#include "dpsched/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dpsched {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why)
{
    throw Error(Errc::MalformedConfig, fmt::format("{}: {}", field, why));
}

const json* find(const json& root, const std::string& section, const std::string& key)
{
    auto s = root.find(section);
    if (s == root.end())
        return nullptr;
    if (!s->is_object())
        bad(section, "must be an object");
    auto k = s->find(key);
    return k == s->end() ? nullptr : &*k;
}

const json& require(const json& root, const std::string& section, const std::string& key)
{
    const json* v = find(root, section, key);
    if (!v)
        bad(section + "." + key, "missing");
    return *v;
}

std::vector<double> numbers(const json& v, const std::string& field)
{
    if (!v.is_array() || v.empty())
        bad(field, "must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            bad(field, "must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

double number(const json& v, const std::string& field)
{
    if (!v.is_number())
        bad(field, "must be a number");
    return v.get<double>();
}

long long integer(const json& v, const std::string& field)
{
    if (!v.is_number_integer())
        bad(field, "must be an integer");
    return v.get<long long>();
}

} // namespace

Config parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    }
    catch (const json::parse_error& e) {
        throw Error(Errc::MalformedConfig, fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!root.is_object())
        bad("config", "top level must be an object");

    Config c;
    c.spec.arrival_probs = numbers(require(root, "arrival", "probs"), "arrival.probs");
    c.spec.channel_probs = numbers(require(root, "channel", "probs"), "channel.probs");
    c.spec.channel_powers = numbers(require(root, "channel", "powers"), "channel.powers");
    long long cap = integer(require(root, "buffer", "capacity"), "buffer.capacity");
    if (cap < 1 || cap > 100000)
        bad("buffer.capacity", fmt::format("{} is out of range", cap));
    c.spec.capacity = static_cast<int>(cap);

    if (const json* v = find(root, "solve", "p_aver"))
        c.p_aver = number(*v, "solve.p_aver");
    if (const json* v = find(root, "sweep", "p_min"))
        c.sweep_p_min = number(*v, "sweep.p_min");
    if (const json* v = find(root, "sweep", "p_max"))
        c.sweep_p_max = number(*v, "sweep.p_max");
    if (const json* v = find(root, "sweep", "points")) {
        long long n = integer(*v, "sweep.points");
        if (n < 2 || n > 1000000)
            bad("sweep.points", "must be between 2 and 1000000");
        c.sweep_points = static_cast<int>(n);
    }
    if (const json* v = find(root, "sim", "slots")) {
        c.sim_slots = integer(*v, "sim.slots");
        if (*c.sim_slots < 1)
            bad("sim.slots", "must be positive");
    }
    if (const json* v = find(root, "sim", "seed")) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
            bad("sim.seed", "must be a non-negative integer");
        c.sim_seed = v->get<std::uint64_t>();
    }
    return c;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, fmt::format("cannot open config file {}", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace dpsched
