#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dpsched {

enum class Errc {
    NonStochastic,
    NonDecreasingPower,
    UnstableArrival,
    CapacityTooSmall,
    DegenerateArrivals,
    MalformedPolicy,
    MalformedConfig,
    NumericalInconsistency,
    SingularSystem,
    InconsistentSolution,
    Infeasible,
    Unbounded,
    IterationLimit,
    StructureViolation,
    NoFeasibleEntry,
    TooLarge,
    Io,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Thrown when the chain has more than one closed class.  Carries the states
// of each closed class so the caller can see what split the chain.
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& what, std::vector<std::vector<int>> classes)
        : Error(Errc::SingularSystem, what), classes_(std::move(classes)) {}

    const std::vector<std::vector<int>>& closed_classes() const { return classes_; }

private:
    std::vector<std::vector<int>> classes_;
};

struct Cell {
    int k;
    int w;
};

class StructureViolationError : public Error {
public:
    StructureViolationError(const std::string& what, std::vector<Cell> cells)
        : Error(Errc::StructureViolation, what), cells_(std::move(cells)) {}

    const std::vector<Cell>& cells() const { return cells_; }

private:
    std::vector<Cell> cells_;
};

} // namespace dpsched
