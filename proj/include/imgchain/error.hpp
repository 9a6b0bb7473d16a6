#pragma once

#include <stdexcept>
#include <string>

namespace imgchain {

// Bad input data: corrupt files, invalid arguments, unresolvable names.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A chain or replica failed verification.
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace imgchain
