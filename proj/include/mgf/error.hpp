#pragma once

#include <stdexcept>
#include <string>

namespace mgf {

enum class Errc {
  SelfLoop,
  AntiParallelDuplicate,
  NonPositiveLength,
  Disconnected,
  UnknownVertex,
  UnknownEdge,
  DuplicateVertex,
  NonPositiveWeight,
  NonPositiveDensity,
  InvalidDensity,
  InvalidCellCount,
  MissingRate,
  NonPositiveRate,
  NonPositiveEpsilon,
  NotAnEdge,
  TooFewCells,
  ResidualTooLarge,
  DimensionMismatch,
  InvalidConfig,
  SingularStageMatrix,
  NonFiniteState,
  StepUnderflow,
  NegativeMassBeyondTolerance,
  InfeasibleFlux,
  GridMismatch,
  MappingMismatch,
  MalformedCsv,
  ConfigError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mgf
