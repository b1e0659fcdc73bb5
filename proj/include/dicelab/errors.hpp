#pragma once

#include <stdexcept>
#include <string>

namespace dicelab {

/// Domain error categories raised by the library. The CLI maps every one of
/// these to exit code 1 together with a machine-readable error object.
enum class Errc {
  duplicate_face,
  too_large,
  alphabet_mismatch,
  unequal_multiplicities,
  budget_exceeded,
  unsupported_pair,
  ties_present,
  not_psd,
  degenerate_direction,
  degenerate_normalization,
  unsamplable_law,
  invalid_fraction,
  invalid_argument,
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::duplicate_face: return "DuplicateFace";
    case Errc::too_large: return "TooLarge";
    case Errc::alphabet_mismatch: return "AlphabetMismatch";
    case Errc::unequal_multiplicities: return "UnequalMultiplicities";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::unsupported_pair: return "UnsupportedPair";
    case Errc::ties_present: return "TiesPresent";
    case Errc::not_psd: return "NotPSD";
    case Errc::degenerate_direction: return "DegenerateDirection";
    case Errc::degenerate_normalization: return "DegenerateNormalization";
    case Errc::unsamplable_law: return "UnsamplableLaw";
    case Errc::invalid_fraction: return "InvalidFraction";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dicelab
