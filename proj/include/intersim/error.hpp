#pragma once

#include <stdexcept>
#include <string>

namespace intersim {

// Raised for invalid inputs, malformed files and violated call contracts.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace intersim
