#include "dpsched/error.hpp"

namespace dpsched {

const char* errc_name(Errc code)
{
    switch (code) {
    case Errc::NonStochastic: return "NonStochastic";
    case Errc::NonDecreasingPower: return "NonDecreasingPower";
    case Errc::UnstableArrival: return "UnstableArrival";
    case Errc::CapacityTooSmall: return "CapacityTooSmall";
    case Errc::DegenerateArrivals: return "DegenerateArrivals";
    case Errc::MalformedPolicy: return "MalformedPolicy";
    case Errc::MalformedConfig: return "MalformedConfig";
    case Errc::NumericalInconsistency: return "NumericalInconsistency";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::InconsistentSolution: return "InconsistentSolution";
    case Errc::Infeasible: return "Infeasible";
    case Errc::Unbounded: return "Unbounded";
    case Errc::IterationLimit: return "IterationLimit";
    case Errc::StructureViolation: return "StructureViolation";
    case Errc::NoFeasibleEntry: return "NoFeasibleEntry";
    case Errc::TooLarge: return "TooLarge";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

} // namespace dpsched
