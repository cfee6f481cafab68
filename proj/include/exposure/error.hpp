#pragma once

#include <stdexcept>
#include <string>

namespace exposure {

/// Invalid caller input: out-of-range ids, empty samples, bad parameters,
/// malformed files. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace exposure
