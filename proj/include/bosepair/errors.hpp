#ifndef BOSEPAIR_ERRORS_HPP
#define BOSEPAIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bosepair {

// Error kinds map onto CLI exit codes: validation -> 1, numerical -> 2, io -> 3.
enum class ErrorKind { validation = 1, numerical = 2, io = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg)
        : Error(ErrorKind::validation, msg) {}
};

class NumericsError : public Error {
public:
    explicit NumericsError(const std::string& msg)
        : Error(ErrorKind::numerical, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

/// Input-data problem located at a specific line of a text file.
class DataError : public ValidationError {
public:
    DataError(const std::string& msg, long line)
        : ValidationError(msg + " (line " + std::to_string(line) + ")"),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// The Bogoliubov factor radicand went negative: the potential is too
/// attractive at this wave number for a stable collective mode.
class StabilityViolation : public NumericsError {
public:
    StabilityViolation(double q, double radicand)
        : NumericsError("collective-mode stability violated at q = " +
                        std::to_string(q) +
                        " (radicand = " + std::to_string(radicand) + ")"),
          q_(q), radicand_(radicand) {}
    double q() const { return q_; }
    double radicand() const { return radicand_; }

private:
    double q_, radicand_;
};

/// Non-positive argument in the pair-fluctuation logarithm: the pair
/// approximation broke down at this state point. Surfaced, never clamped.
class ThermoInstability : public NumericsError {
public:
    ThermoInstability(double q, double temperature)
        : NumericsError("pair approximation unstable at q = " +
                        std::to_string(q) +
                        ", T = " + std::to_string(temperature) + " K"),
          q_(q), temperature_(temperature) {}
    double q() const { return q_; }
    double temperature() const { return temperature_; }

private:
    double q_, temperature_;
};

/// Effective-mass kernel sum reached or exceeded one.
class UnphysicalMass : public NumericsError {
public:
    explicit UnphysicalMass(double kernel_sum)
        : NumericsError("effective-mass kernel sum = " +
                        std::to_string(kernel_sum) + " >= 1"),
          kernel_sum_(kernel_sum) {}
    double kernel_sum() const { return kernel_sum_; }

private:
    double kernel_sum_;
};

} // namespace bosepair

#endif
