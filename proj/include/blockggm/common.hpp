#pragma once

#include <stdexcept>
#include <string>

namespace blockggm {

/* Raised for malformed user input: bad dimensions, NaNs in data files,
   out-of-range options, unparsable files.  The CLI maps it to exit code 2. */
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/* Raised when a numerical routine cannot deliver a trustworthy result:
   non-positive-definite matrices where positive definiteness is required,
   fixed-point iterations that hit their cap, quadrature that fails to
   converge.  The CLI maps it to exit code 3. */
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace blockggm
