#include "mtkt/error.hpp"

namespace mtkt {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kDecode: return "DecodeError";
    case ErrorCode::kDegenerateExponent: return "DegenerateExponent";
    case ErrorCode::kNoSignatureForElement: return "NoSignatureForElement";
    case ErrorCode::kSessionConsumed: return "SessionConsumed";
    case ErrorCode::kWitnessMismatch: return "WitnessMismatch";
    case ErrorCode::kInsufficientShares: return "InsufficientShares";
    case ErrorCode::kDuplicateUser: return "DuplicateUser";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kBadSignature: return "BadSignature";
    case ErrorCode::kBadProof: return "BadProof";
    case ErrorCode::kIndexAlreadyUsed: return "IndexAlreadyUsed";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kQuotaExhausted: return "QuotaExhausted";
    case ErrorCode::kTokenExpired: return "TokenExpired";
    case ErrorCode::kBadValidatorSignature: return "BadValidatorSignature";
    case ErrorCode::kNotAuthenticated: return "NotAuthenticated";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace mtkt
