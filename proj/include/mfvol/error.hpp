#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfvol {

/// Failure kinds raised across the library. Anything listed after
/// `NonFiniteLikelihood` is a numerical failure; the rest are input or
/// validation problems. The CLI maps the two families to exit codes 3 and 2.
enum class Errc {
  MissingFile,
  MalformedRow,
  NonPositivePrice,
  DuplicateBar,
  AllMissingColumn,
  ZeroVariance,
  UncoveredMonth,
  NonContiguousMonths,
  EmptyPanel,
  MissingColumn,
  InsufficientBars,
  LengthMismatch,
  EmptyMonth,
  BadShape,
  BadParameter,
  BadSpec,
  InsufficientLags,
  NonPositiveTruth,
  NonPositiveInput,
  TooShort,
  EmptyDataset,
  // numerical
  NonFiniteLikelihood,
  ZeroRvSum,
  NonPositiveLambda,
  RankDeficient,
  NonPositiveTau,
  NoConvergence,
  DegenerateData,
  DegenerateTruth,
  NonFiniteInput,
  NonFiniteGradient,
  DivergedLoss,
};

std::string_view to_string(Errc code) noexcept;

inline bool is_numerical(Errc code) noexcept {
  return static_cast<int>(code) >= static_cast<int>(Errc::NonFiniteLikelihood);
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace mfvol
