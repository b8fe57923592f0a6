#pragma once

#include "dpsched/model.hpp"
#include "dpsched/policy.hpp"

#include <compare>
#include <iosfwd>
#include <optional>
#include <vector>

namespace dpsched {

// Two queue intervals, one channel threshold each: states 1..k_split send
// iff the 1-based channel exceeds w1, states above k_split iff it exceeds w2.
// Thresholds run over 0..W so that "always send" is expressible.
struct SimplePolicyKey {
    int k_split = 1;
    int w1 = 0;
    int w2 = 0;

    auto operator<=>(const SimplePolicyKey&) const = default;
};

Policy induced_policy(const ValidatedSpec& spec, const SimplePolicyKey& key);

struct TableEntry {
    SimplePolicyKey key;
    double delay = 0.0; // +inf if the induced chain has several closed classes
    double power = 0.0; // +inf likewise
};

struct PolicyTable {
    SystemSpec spec; // the validated spec the table was built for
    std::vector<TableEntry> entries; // ordered by key

    int K() const { return spec.capacity; }
    int W() const { return static_cast<int>(spec.channel_probs.size()); }
};

PolicyTable build_table(const ValidatedSpec& spec, unsigned threads = 0);

// Minimum-delay entry with power <= p_aver; ties go to lower power, then to
// the smaller key.  Throws Error(NoFeasibleEntry).
TableEntry lookup(const PolicyTable& table, double p_aver);

struct RefinedPolicy {
    SimplePolicyKey key;
    Policy policy;
    double delay = 0.0;
    double power = 0.0;
    std::optional<FractionalPoint> fractional;
};

// Looks up p_aver, then spends the leftover budget on the entry (k_split, w1):
// that entry is raised by bisection until the power meets p_aver.  Only done
// when w1 > w2, which keeps the result a dual-threshold policy.
RefinedPolicy refine(const ValidatedSpec& spec, const PolicyTable& table, double p_aver);

void save_table(const PolicyTable& table, std::ostream& os);
PolicyTable load_table(std::istream& is);

// Throws MalformedConfig if the table was built for a different spec.
void check_table_spec(const PolicyTable& table, const ValidatedSpec& spec);

} // namespace dpsched
