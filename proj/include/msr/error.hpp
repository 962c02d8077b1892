// Error type shared by every engine module.
#pragma once

#include <stdexcept>
#include <string>

namespace msr {

// All engine-level failures (chart mismatches, unsolvable systems, bad
// preconditions) are reported through this type.  Parser diagnostics get
// their own richer error in scenario.hpp.
class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace msr
