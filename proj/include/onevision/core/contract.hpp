#pragma once

#include <stdexcept>
#include <string>

namespace onevision {

/// Raised when a caller breaks a documented precondition. These are
/// programming errors, not recoverable runtime conditions.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

[[noreturn]] void contract_failure(const char* expr, const char* file, int line, const std::string& msg);

}  // namespace onevision

#define OV_EXPECTS(cond, msg)                                                  \
  do {                                                                         \
    if (!(cond)) ::onevision::contract_failure(#cond, __FILE__, __LINE__, msg); \
  } while (false)
