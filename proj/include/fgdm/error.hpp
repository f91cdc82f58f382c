#pragma once

#include <stdexcept>
#include <string>

namespace fgdm {

/// Base for every error raised by the library. Each module derives its own
/// kinds so callers can catch exactly what a contract names.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fgdm
