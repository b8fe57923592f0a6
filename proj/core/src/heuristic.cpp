#include "dpsched/heuristic.hpp"

#include "dpsched/chain.hpp"
#include "dpsched/error.hpp"
#include "parallel.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace dpsched {

namespace {

constexpr const char* table_magic = "# dpsched policy table v1";
constexpr double inf = std::numeric_limits<double>::infinity();

TableEntry evaluate(const ValidatedSpec& spec, const SimplePolicyKey& key)
{
    TableEntry e{key, inf, inf};
    try {
        auto a = analyze(spec, induced_policy(spec, key));
        e.delay = a.metrics.delay;
        e.power = a.metrics.power;
    }
    catch (const SingularSystemError&) {
    }
    return e;
}

bool better(const TableEntry& a, const TableEntry& b)
{
    if (a.delay != b.delay)
        return a.delay < b.delay;
    if (a.power != b.power)
        return a.power < b.power;
    return a.key < b.key;
}

} // namespace

Policy induced_policy(const ValidatedSpec& spec, const SimplePolicyKey& key)
{
    if (key.k_split < 1 || key.k_split > spec.K() || key.w1 < 0 || key.w1 > spec.W() ||
        key.w2 < 0 || key.w2 > spec.W())
        throw Error(Errc::MalformedPolicy,
                    fmt::format("key ({}, {}, {}) out of range", key.k_split, key.w1, key.w2));
    Policy p(spec.K(), spec.W());
    for (int k = 1; k <= spec.K(); ++k) {
        int t = k <= key.k_split ? key.w1 : key.w2;
        for (int w = t; w < spec.W(); ++w)
            p.set(k, w, 1.0);
    }
    return p;
}

PolicyTable build_table(const ValidatedSpec& spec, unsigned threads)
{
    PolicyTable table;
    table.spec = spec.raw();
    for (int k = 1; k <= spec.K(); ++k)
        for (int w1 = 0; w1 <= spec.W(); ++w1)
            for (int w2 = 0; w2 <= spec.W(); ++w2)
                table.entries.push_back({{k, w1, w2}, inf, inf});
    detail::parallel_for(table.entries.size(), threads, [&](std::size_t i) {
        table.entries[i] = evaluate(spec, table.entries[i].key);
    });
    return table;
}

TableEntry lookup(const PolicyTable& table, double p_aver)
{
    const TableEntry* best = nullptr;
    for (const auto& e : table.entries)
        if (e.power <= p_aver && (!best || better(e, *best)))
            best = &e;
    if (!best)
        throw Error(Errc::NoFeasibleEntry,
                    fmt::format("no tabulated policy uses at most {:.9g} power", p_aver));
    return *best;
}

RefinedPolicy refine(const ValidatedSpec& spec, const PolicyTable& table, double p_aver)
{
    TableEntry base = lookup(table, p_aver);
    RefinedPolicy out{base.key, induced_policy(spec, base.key), base.delay, base.power, {}};
    const SimplePolicyKey& key = base.key;
    if (key.w1 <= key.w2)
        return out;

    const int k = key.k_split;
    const int w = key.w1 - 1;
    auto at = [&](double x) {
        Policy p = out.policy;
        p.set(k, w, x);
        return std::pair{p, analyze(spec, p).metrics};
    };
    double lo = 0.0;
    double hi = 1.0;
    auto [p_hi, m_hi] = at(1.0);
    if (m_hi.power <= p_aver) {
        lo = 1.0;
    }
    else {
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (at(mid).second.power <= p_aver)
                lo = mid;
            else
                hi = mid;
        }
    }
    if (lo == 0.0)
        return out;
    auto [p_lo, m_lo] = at(lo);
    out.policy = p_lo;
    out.delay = m_lo.delay;
    out.power = m_lo.power;
    if (lo < 1.0)
        out.fractional = FractionalPoint{k, w, lo};
    return out;
}

void save_table(const PolicyTable& table, std::ostream& os)
{
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (double x : v)
            s += fmt::format(" {:.17g}", x);
        return s;
    };
    os << table_magic << '\n';
    os << "# arrival.probs" << list(table.spec.arrival_probs) << '\n';
    os << "# channel.probs" << list(table.spec.channel_probs) << '\n';
    os << "# channel.powers" << list(table.spec.channel_powers) << '\n';
    os << "# buffer.capacity " << table.spec.capacity << '\n';
    os << "k_split,w1,w2,delay,power\n";
    for (const auto& e : table.entries)
        os << fmt::format("{},{},{},{:.17g},{:.17g}\n", e.key.k_split, e.key.w1, e.key.w2, e.delay,
                          e.power);
}

PolicyTable load_table(std::istream& is)
{
    auto fail = [](const std::string& why) {
        return Error(Errc::Io, "policy table: " + why);
    };
    std::string line;
    if (!std::getline(is, line) || line != table_magic)
        throw fail("missing or unsupported version header");

    PolicyTable t;
    auto read_list = [&](const std::string& field) {
        if (!std::getline(is, line) || line.rfind("# " + field, 0) != 0)
            throw fail("expected header field " + field);
        std::istringstream ss(line.substr(field.size() + 2));
        std::vector<double> v;
        std::string tok;
        while (ss >> tok)
            v.push_back(std::strtod(tok.c_str(), nullptr));
        return v;
    };
    t.spec.arrival_probs = read_list("arrival.probs");
    t.spec.channel_probs = read_list("channel.probs");
    t.spec.channel_powers = read_list("channel.powers");
    auto cap = read_list("buffer.capacity");
    if (cap.size() != 1)
        throw fail("bad buffer.capacity");
    t.spec.capacity = static_cast<int>(cap[0]);
    if (!std::getline(is, line) || line != "k_split,w1,w2,delay,power")
        throw fail("missing column header");

    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        TableEntry e;
        char* p = line.data();
        char* end = nullptr;
        e.key.k_split = static_cast<int>(std::strtol(p, &end, 10));
        if (*end != ',')
            throw fail("bad row: " + line);
        e.key.w1 = static_cast<int>(std::strtol(end + 1, &end, 10));
        if (*end != ',')
            throw fail("bad row: " + line);
        e.key.w2 = static_cast<int>(std::strtol(end + 1, &end, 10));
        if (*end != ',')
            throw fail("bad row: " + line);
        e.delay = std::strtod(end + 1, &end);
        if (*end != ',')
            throw fail("bad row: " + line);
        e.power = std::strtod(end + 1, &end);
        if (*end != '\0')
            throw fail("bad row: " + line);
        t.entries.push_back(e);
    }
    std::size_t expected = static_cast<std::size_t>(t.K()) * (t.W() + 1) * (t.W() + 1);
    if (t.entries.size() != expected)
        throw fail(fmt::format("{} rows, expected {}", t.entries.size(), expected));
    return t;
}

void check_table_spec(const PolicyTable& table, const ValidatedSpec& spec)
{
    SystemSpec s = spec.raw();
    if (s.arrival_probs != table.spec.arrival_probs || s.channel_probs != table.spec.channel_probs ||
        s.channel_powers != table.spec.channel_powers || s.capacity != table.spec.capacity)
        throw Error(Errc::MalformedConfig, "policy table was built for a different configuration");
}

} // namespace dpsched
