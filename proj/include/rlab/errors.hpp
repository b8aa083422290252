#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

// All throwing paths in the library use these types so callers can tell a
// modelling error (bad input) from an honest "could not decide at this
// precision". Anything derived from std::logic_error here indicates the
// caller broke a precondition; runtime_error descendants are in-band
// outcomes of exact computation.

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Sqrt of a certifiably negative quantity.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Division by an exact zero.
struct DivideByZero : std::runtime_error {
  explicit DivideByZero(const std::string& what) : std::runtime_error(what) {}
};

// The refinement ladder hit its precision cap before a decision was forced.
struct PrecisionExhausted : std::runtime_error {
  explicit PrecisionExhausted(const std::string& what)
      : std::runtime_error(what) {}
};

// Generator family outside the exponent/field shapes the span module handles.
struct UnsupportedShape : std::runtime_error {
  explicit UnsupportedShape(const std::string& what)
      : std::runtime_error(what) {}
};

// Bohr spec whose frequency structure admits no closed-form density.
struct UnsupportedStructure : std::runtime_error {
  explicit UnsupportedStructure(const std::string& what)
      : std::runtime_error(what) {}
};

// Set operations across different truncation horizons.
struct HorizonMismatch : std::runtime_error {
  explicit HorizonMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

// Largeness diagnostics on an empty truncated set.
struct EmptySet : std::runtime_error {
  explicit EmptySet(const std::string& what) : std::runtime_error(what) {}
};

// A certificate failed verification; the message names the first failing
// inequality.
struct CertInvalid : std::runtime_error {
  explicit CertInvalid(const std::string& what) : std::runtime_error(what) {}
};

// A shipped parameter inequality failed its certified check.
struct ConstraintViolated : std::runtime_error {
  explicit ConstraintViolated(const std::string& what)
      : std::runtime_error(what) {}
};

// An experiment pipeline assertion (clause of a run) failed.
struct AssertionFailed : std::runtime_error {
  explicit AssertionFailed(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rlab
