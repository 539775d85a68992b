#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unitfree {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownFunction : public Error {
 public:
  UnknownFunction(const std::string& name, std::size_t offset)
      : Error("unknown function '" + name + "' at offset " + std::to_string(offset)),
        name_(name),
        offset_(offset) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

#define UNITFREE_DEFINE_ERROR(Name) \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

UNITFREE_DEFINE_ERROR(EvalError);
UNITFREE_DEFINE_ERROR(ChartMismatch);
UNITFREE_DEFINE_ERROR(EmptySampleSet);
UNITFREE_DEFINE_ERROR(ZeroConversionFactor);
UNITFREE_DEFINE_ERROR(PointOffSurface);
UNITFREE_DEFINE_ERROR(PointOutOfRegion);
UNITFREE_DEFINE_ERROR(NonIntegrableInput);
UNITFREE_DEFINE_ERROR(InvalidProduct);
UNITFREE_DEFINE_ERROR(MissingInverse);
UNITFREE_DEFINE_ERROR(ZeroDenominator);
UNITFREE_DEFINE_ERROR(StepFailure);
UNITFREE_DEFINE_ERROR(TooFewSamples);
UNITFREE_DEFINE_ERROR(NonSymmetricMetric);
UNITFREE_DEFINE_ERROR(NonPositiveDefinite);
UNITFREE_DEFINE_ERROR(ConfigError);

#undef UNITFREE_DEFINE_ERROR

}  // namespace unitfree
