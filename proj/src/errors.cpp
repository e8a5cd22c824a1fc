#include "distresslab/errors.hpp"

namespace distress {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedNumber: return "MalformedNumber";
    case Errc::DuplicateCompanyYear: return "DuplicateCompanyYear";
    case Errc::MissingYearPair: return "MissingYearPair";
    case Errc::NonPositiveTotalAssets: return "NonPositiveTotalAssets";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::SingleClassDataset: return "SingleClassDataset";
    case Errc::ConstantColumn: return "ConstantColumn";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NegativeStatistic: return "NegativeStatistic";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::SingularCorrelation: return "SingularCorrelation";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidK: return "InvalidK";
    case Errc::LabelCountMismatch: return "LabelCountMismatch";
    case Errc::DegenerateFeature: return "DegenerateFeature";
    case Errc::InvalidFeature: return "InvalidFeature";
    case Errc::PerfectSeparation: return "PerfectSeparation";
    case Errc::NotConverged: return "NotConverged";
    case Errc::InvalidFraction: return "InvalidFraction";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace distress
