// common.hpp - shared error type and small utilities
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tfs {

// Raised for malformed grammars: signature violations, parse errors,
// ill-typed descriptions, unloadable files.
struct GrammarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using TypeId = int32_t;
using FeatId = int32_t;
using NodeId = int32_t;

constexpr TypeId kNoType = -1;
constexpr NodeId kNoNode = -1;

}  // namespace tfs
