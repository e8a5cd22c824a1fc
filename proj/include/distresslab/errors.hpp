#pragma once

#include <stdexcept>
#include <string>

namespace distress {

// Every failure the library reports, one code per contract violation.
enum class Errc {
  // csv / dataset assembly
  MissingColumn,
  MalformedNumber,
  DuplicateCompanyYear,
  MissingYearPair,
  NonPositiveTotalAssets,
  EmptyDataset,
  SingleClassDataset,
  // numerics
  ConstantColumn,
  NotSymmetric,
  NoConvergence,
  NegativeStatistic,
  TooFewRows,
  SingularCorrelation,
  DimensionMismatch,
  // clustering
  InvalidK,
  LabelCountMismatch,
  // chaid
  DegenerateFeature,
  InvalidFeature,
  // logit
  PerfectSeparation,
  NotConverged,
  // pipeline
  InvalidFraction,
  InvalidConfig,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace distress
