#pragma once

#include <stdexcept>
#include <string>

namespace polreg {

/// Bad configuration or input data: rejected before (or instead of) playing.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A declared contract was broken while playing, e.g. an adversary exceeded
/// the range/drift bounds a reduction relies on to normalize losses.
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace polreg
