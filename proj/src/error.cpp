#include "mfvol/error.hpp"

namespace mfvol {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::DuplicateBar: return "DuplicateBar";
    case Errc::AllMissingColumn: return "AllMissingColumn";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::UncoveredMonth: return "UncoveredMonth";
    case Errc::NonContiguousMonths: return "NonContiguousMonths";
    case Errc::EmptyPanel: return "EmptyPanel";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::InsufficientBars: return "InsufficientBars";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyMonth: return "EmptyMonth";
    case Errc::BadShape: return "BadShape";
    case Errc::BadParameter: return "BadParameter";
    case Errc::BadSpec: return "BadSpec";
    case Errc::InsufficientLags: return "InsufficientLags";
    case Errc::NonPositiveTruth: return "NonPositiveTruth";
    case Errc::NonPositiveInput: return "NonPositiveInput";
    case Errc::TooShort: return "TooShort";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NonFiniteLikelihood: return "NonFiniteLikelihood";
    case Errc::ZeroRvSum: return "ZeroRvSum";
    case Errc::NonPositiveLambda: return "NonPositiveLambda";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::NonPositiveTau: return "NonPositiveTau";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::DegenerateTruth: return "DegenerateTruth";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::DivergedLoss: return "DivergedLoss";
  }
  return "Unknown";
}

}  // namespace mfvol
