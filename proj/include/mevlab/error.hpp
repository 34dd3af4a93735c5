#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mevlab {

enum class ErrorCode {
  CurveViolation,
  InvalidPrice,
  NegativeReserve,
  InvalidStep,
  InvalidOrder,
  NoLimitState,
  TooManyOrders,
  NoReports,
  UnknownOrder,
  UnknownArbitrageur,
  InvalidPrior,
  InvalidDistribution,
  EmptyInput,
  InvalidArgument,
  Schema,
};

std::string_view to_string(ErrorCode code);

// Domain failure raised by library operations. The code is stable; the
// message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mevlab
