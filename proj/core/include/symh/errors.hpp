#pragma once

#include <stdexcept>
#include <string>

namespace symh {

// Raised for mathematically invalid inputs and resolution failures.
// The CLI maps this to exit code 1; usage problems exit with 2.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace symh
