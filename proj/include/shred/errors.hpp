#pragma once

#include <stdexcept>
#include <string>

namespace shred {

/// Broad failure class. The CLI maps these onto exit codes
/// (validation -> 2, numerical -> 3).
enum class ErrorCategory { validation, numerical, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define SHRED_DEFINE_ERROR(Name, Base, Category)                         \
  class Name : public Base {                                             \
   public:                                                               \
    explicit Name(const std::string& what) : Base(Category, what) {}     \
                                                                         \
   protected:                                                            \
    Name(ErrorCategory category, const std::string& what)                \
        : Base(category, what) {}                                        \
  };

// Contract violations on inputs.
SHRED_DEFINE_ERROR(ValidationError, Error, ErrorCategory::validation)
SHRED_DEFINE_ERROR(DimensionMismatch, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(UnsupportedBoundaryOperator, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(TooManyModes, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(StepTooLarge, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(IndexOutOfRange, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(PathLengthMismatch, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(CountMismatch, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(LayoutMismatch, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(GridMismatch, ValidationError, ErrorCategory::validation)
SHRED_DEFINE_ERROR(ConfigError, ValidationError, ErrorCategory::validation)

// Numerical failures surfaced by the theory or the optimizer.
SHRED_DEFINE_ERROR(NumericalError, Error, ErrorCategory::numerical)
SHRED_DEFINE_ERROR(NonRealField, NumericalError, ErrorCategory::numerical)
SHRED_DEFINE_ERROR(BlowUp, NumericalError, ErrorCategory::numerical)
SHRED_DEFINE_ERROR(IllConditioned, NumericalError, ErrorCategory::numerical)
// Exactly rank-deficient; a special case of ill conditioning.
SHRED_DEFINE_ERROR(SingularSystem, IllConditioned, ErrorCategory::numerical)
SHRED_DEFINE_ERROR(Diverged, NumericalError, ErrorCategory::numerical)

// File formats.
SHRED_DEFINE_ERROR(FormatError, Error, ErrorCategory::io)
SHRED_DEFINE_ERROR(UnsupportedVersion, FormatError, ErrorCategory::io)

#undef SHRED_DEFINE_ERROR

}  // namespace shred
