#include "mgf/error.hpp"

namespace mgf {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::AntiParallelDuplicate: return "AntiParallelDuplicate";
    case Errc::NonPositiveLength: return "NonPositiveLength";
    case Errc::Disconnected: return "Disconnected";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::DuplicateVertex: return "DuplicateVertex";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::NonPositiveDensity: return "NonPositiveDensity";
    case Errc::InvalidDensity: return "InvalidDensity";
    case Errc::InvalidCellCount: return "InvalidCellCount";
    case Errc::MissingRate: return "MissingRate";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case Errc::NotAnEdge: return "NotAnEdge";
    case Errc::TooFewCells: return "TooFewCells";
    case Errc::ResidualTooLarge: return "ResidualTooLarge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::SingularStageMatrix: return "SingularStageMatrix";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::NegativeMassBeyondTolerance: return "NegativeMassBeyondTolerance";
    case Errc::InfeasibleFlux: return "InfeasibleFlux";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::MappingMismatch: return "MappingMismatch";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace mgf
