#pragma once

#include <stdexcept>
#include <string>

namespace lfp {

// Malformed input text (bad columns, non-integer fields, ...).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input describing an invalid structure (cycles, disconnected trees).
class StructureError : public std::runtime_error {
 public:
  explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller broke an API precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Separable-corpus generation ran out of resampling budget.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(const std::string& msg, double achieved_margin)
      : std::runtime_error(msg), achieved_margin(achieved_margin) {}
  double achieved_margin;
};

}  // namespace lfp
