#pragma once

#include <stdexcept>
#include <string>

namespace nestedot {

/// Bad argument or broken type invariant (maps to CLI exit code 3).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical verification failed its stated tolerance (maps to CLI exit code 2).
class ToleranceError : public std::runtime_error {
public:
    explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nestedot
