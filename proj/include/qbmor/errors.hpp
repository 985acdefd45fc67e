#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qbmor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A linear solve hit a (numerically) singular matrix. When the matrix came
/// from evaluating a matrix function, `argument()` holds the frequency.
class SingularMatrix : public Error {
public:
    explicit SingularMatrix(const std::string& what) : Error(what) {}
    SingularMatrix(const std::string& what, std::complex<double> argument)
        : Error(format(what, argument)), argument_(argument), has_argument_(true) {}

    [[nodiscard]] std::complex<double> argument() const noexcept { return argument_; }
    [[nodiscard]] bool has_argument() const noexcept { return has_argument_; }

private:
    static std::string format(const std::string& what, std::complex<double> s) {
        std::ostringstream os;
        os.precision(17);
        os << what << " at s = " << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i";
        return os.str();
    }

    std::complex<double> argument_{};
    bool has_argument_ = false;
};

class RankTooSmall : public Error {
public:
    using Error::Error;
};

class RankDeficientBasis : public Error {
public:
    using Error::Error;
};

class TargetOrderUnreachable : public Error {
public:
    using Error::Error;
};

class NegativeDelay : public Error {
public:
    using Error::Error;
};

/// Newton divergence, non-finite state or blow-up during time stepping.
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

class ZeroReference : public Error {
public:
    using Error::Error;
};

class IOFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace qbmor
