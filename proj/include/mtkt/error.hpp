#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtkt {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kDecode,
  kDegenerateExponent,
  kNoSignatureForElement,
  kSessionConsumed,
  kWitnessMismatch,
  kInsufficientShares,
  kDuplicateUser,
  kUnknownUser,
  kBadSignature,
  kBadProof,
  kIndexAlreadyUsed,
  kIndexOutOfRange,
  kQuotaExhausted,
  kTokenExpired,
  kBadValidatorSignature,
  kNotAuthenticated,
  kInternal,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mtkt
