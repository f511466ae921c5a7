#ifndef PAP_ERRORS_HPP
#define PAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pap {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or parameters (bad specs, windows outside grid,
// schema violations). CLI exit code 2.
class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

// Numerical-invariant failure at run time (wrap-around, unitarity drift,
// undersampling, degenerate inputs). CLI exit code 3.
class numeric_error : public error {
public:
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

// A built-in result check failed while running with --check. CLI exit code 4.
class check_failure : public error {
public:
    explicit check_failure(const std::string& msg) : error(msg) {}
};

}  // namespace pap

#endif
