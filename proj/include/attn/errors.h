#ifndef ATTN_ERRORS_H_
#define ATTN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace attn {

// Root of every error raised by the library. Each subclass names one failure
// mode so callers (and the CLI's exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad probabilities, unknown labels, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownComponent : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Conditioning on an event the prior assigns probability zero.
class ZeroMassEvent : public Error {
 public:
  using Error::Error;
};

// Bayes update on a message that cannot occur under the current belief.
class ZeroProbabilityMessage : public Error {
 public:
  using Error::Error;
};

// Information is not worth at least one visit.
class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

// The substitutes condition was not verified and the caller did not force.
class ConditionNotVerified : public Error {
 public:
  using Error::Error;
};

class SubsetSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

// A receiver routine that needs AoN rate tables met a sender without one.
class NonAoNPolicy : public Error {
 public:
  using Error::Error;
};

class RoundLimitExceeded : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateCurve : public Error {
 public:
  using Error::Error;
};

}  // namespace attn

#endif  // ATTN_ERRORS_H_
