#pragma once

#include <stdexcept>
#include <string>

namespace zermelo {

// The CLI maps these onto its exit codes (1, 2, 3).
enum class ErrorCategory { domain = 1, numerical = 2, input = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string name, const std::string &what)
      : std::runtime_error(what), category_(category), name_(std::move(name)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string &name() const noexcept { return name_; }

 private:
  ErrorCategory category_;
  std::string name_;
};

#define ZERMELO_DEFINE_ERROR(Type, Category)                                   \
  class Type : public Error {                                                  \
   public:                                                                     \
    explicit Type(const std::string &what) : Error(ErrorCategory::Category, #Type, what) {} \
  }

// |W| >= 1 (up to the guard band) at a queried position.
ZERMELO_DEFINE_ERROR(ConvexityViolation, domain);
ZERMELO_DEFINE_ERROR(NotWeakEverywhere, domain);
// Cross-track wind too strong to hold a straight track over ground.
ZERMELO_DEFINE_ERROR(InfeasibleTrack, domain);

ZERMELO_DEFINE_ERROR(DegenerateHessian, numerical);
ZERMELO_DEFINE_ERROR(StepFailure, numerical);
ZERMELO_DEFINE_ERROR(NoConnection, numerical);
ZERMELO_DEFINE_ERROR(CoverageUnreachable, numerical);

ZERMELO_DEFINE_ERROR(ZeroVector, input);
ZERMELO_DEFINE_ERROR(BadParams, input);

#undef ZERMELO_DEFINE_ERROR

}  // namespace zermelo
