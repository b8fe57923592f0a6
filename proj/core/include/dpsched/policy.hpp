#pragma once

#include "dpsched/chain.hpp"
#include "dpsched/error.hpp"
#include "dpsched/lp.hpp"
#include "dpsched/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpsched {

// Entries within this distance of 0 or 1 count as deterministic.
inline constexpr double classify_tol = 1e-6;
// A post-arrival state is visited if Pr{t = k} exceeds this.
inline constexpr double reach_tol = 1e-10;
// y within this of 0 or of Pr{t = k} is solver noise and snaps f to 0 or 1.
inline constexpr double snap_tol = 1e-13;

struct RecoveredPolicy {
    Policy policy;
    StationaryDist pi;           // from the LP, not from the chain
    std::vector<double> visit;   // Pr{t = k}
    std::vector<char> reachable; // visit[k] > reach_tol; entry 0 is always set
};

// f(k, w) = y_{k-1,w} / Pr{t = k}, snapped at the ends.  States that are
// never visited take the smallest channel threshold of the visited states
// below (the nearest visited state above if there is none), which keeps the
// thresholds non-increasing; fractional entries are not copied.
RecoveredPolicy recover_policy(const ValidatedSpec& spec, const LpSolution& solution);

std::vector<char> reachable_states(const ValidatedSpec& spec, const std::vector<double>& pi);

struct FractionalPoint {
    int k;
    int w; // 0-based channel index
    double value;
};

// T[k]: number of worst channels on which state k does not always send, so
// f(k, w) = 1 iff w >= T[k] (0-based w).  T[0] is W by convention.
// I[w]: largest visited state that does not always send on channel w, so
// f(k, w) = 1 iff k > I[w].
struct ThresholdDescriptor {
    std::vector<int> T;
    std::vector<int> I;
    std::optional<FractionalPoint> fractional;
};

// Throws StructureViolationError with the offending cells when the policy on
// visited states is not a dual-threshold policy with at most one fractional
// entry and non-increasing T.
ThresholdDescriptor extract_thresholds(const Policy& policy, const std::vector<char>& reachable);

struct CheckResult {
    CheckResult() = default;
    explicit CheckResult(std::string n) : name(std::move(n)) {}

    std::string name;
    bool passed = true;
    bool advisory = false; // informational, never fails a run
    std::string detail;
    std::vector<Cell> cells;
};

struct StructureReport {
    std::vector<CheckResult> checks;

    bool ok() const;
    const CheckResult* find(const std::string& name) const;
};

// Pure checks on a policy restricted to visited states.
StructureReport check_policy_structure(const Policy& policy, const std::vector<char>& reachable);

// All policy checks plus the LP-side ones: y ordering in the channel, chain
// round trip of delay and power, and the buffer margin.
StructureReport verify_structure(const ValidatedSpec& spec, const LpSolution& solution,
                                 const RecoveredPolicy& recovered);

// Grid of f with one row per queue state; unvisited rows are marked.
std::string render_policy(const Policy& policy, const std::vector<char>& reachable);

std::string format_thresholds(const ThresholdDescriptor& d);

} // namespace dpsched
