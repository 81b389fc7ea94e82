#pragma once

#include <stdexcept>
#include <string>

namespace roy {

enum class ErrorCode {
  invalid_argument,
  invalid_params,
  unsupported_params,
  resample_cap,
  rank_deficient,
  not_positive_definite,
  domain,
  degenerate_dof,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define ROY_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  };

ROY_DEFINE_ERROR(InvalidArgument, ErrorCode::invalid_argument)
ROY_DEFINE_ERROR(InvalidParams, ErrorCode::invalid_params)
ROY_DEFINE_ERROR(UnsupportedParams, ErrorCode::unsupported_params)
ROY_DEFINE_ERROR(ResampleCapExceeded, ErrorCode::resample_cap)
ROY_DEFINE_ERROR(RankDeficient, ErrorCode::rank_deficient)
ROY_DEFINE_ERROR(NotPositiveDefinite, ErrorCode::not_positive_definite)
ROY_DEFINE_ERROR(DomainError, ErrorCode::domain)
ROY_DEFINE_ERROR(DegenerateDof, ErrorCode::degenerate_dof)
ROY_DEFINE_ERROR(IoError, ErrorCode::io)

#undef ROY_DEFINE_ERROR

}  // namespace roy
