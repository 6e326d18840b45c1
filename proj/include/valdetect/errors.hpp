#pragma once

#include <stdexcept>
#include <string>

namespace valdetect {

// Failure categories surfaced by the library.  The CLI maps Error to exit
// code 1 (bad input / unsupported request); assertion-style math failures in
// verification suites use exit code 2 and are not exceptions.
enum class Errc {
  OutOfContext,    // element/class mentions a basis index the context lacks
  ContextMismatch, // two operands built over different contexts
  TooLarge,        // enumeration would exceed the configured cap
  BadModulus,      // q is not a prime power, or q !≡ 1 (mod 2*ell)
  UnsupportedEll,  // ell is not an odd prime <= 13
  PrecisionLoss,   // truncated series has no visible leading term
  ZeroElement,     // class/symbol of 0 requested
  NotInChain,      // valuation id outside the canonical chain
  NotSandwiched,   // subgroup not between the unit filtration steps
  NotValuative,    // v_from_H called on a non-valuative subgroup
  NotRigid,        // decomposition requested for a non-rigid subgroup
  NoWitnessFound,  // search exhausted without the promised witness
  NotACL,          // centralizer requested for a non-ACL subgroup
  SpecParse,       // malformed field-spec / element / subgroup syntax
  CoincidentPoints, // line through a point and itself
  CoincidentLines,  // intersection of a line with itself
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::OutOfContext: return "OutOfContext";
    case Errc::ContextMismatch: return "ContextMismatch";
    case Errc::TooLarge: return "TooLarge";
    case Errc::BadModulus: return "BadModulus";
    case Errc::UnsupportedEll: return "UnsupportedEll";
    case Errc::PrecisionLoss: return "PrecisionLoss";
    case Errc::ZeroElement: return "ZeroElement";
    case Errc::NotInChain: return "NotInChain";
    case Errc::NotSandwiched: return "NotSandwiched";
    case Errc::NotValuative: return "NotValuative";
    case Errc::NotRigid: return "NotRigid";
    case Errc::NoWitnessFound: return "NoWitnessFound";
    case Errc::NotACL: return "NotACL";
    case Errc::SpecParse: return "SpecParse";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::CoincidentLines: return "CoincidentLines";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace valdetect
