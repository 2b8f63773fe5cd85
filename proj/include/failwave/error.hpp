#pragma once

#include <stdexcept>
#include <string>

namespace failwave {

/// Which exit class an error belongs to when surfaced by the CLI.
enum class ErrorClass { Config, Runtime };

/// Base of every error raised by the library. `kind()` is a stable
/// identifier ("MissingKey", "CflViolation", ...) used by tests and the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, ErrorClass cls, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), class_(cls) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorClass error_class() const noexcept { return class_; }

private:
    std::string kind_;
    ErrorClass class_;
};

class MissingKey : public Error {
public:
    explicit MissingKey(std::string key)
        : Error("MissingKey", ErrorClass::Config, key), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class InvalidValue : public Error {
public:
    InvalidValue(std::string key, std::string reason)
        : Error("InvalidValue", ErrorClass::Config, key + " " + reason),
          key_(std::move(key)), reason_(std::move(reason)) {}
    const std::string& key() const noexcept { return key_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& what) : Error("ShapeMismatch", ErrorClass::Config, what) {}
};

class ConfigConflict : public Error {
public:
    explicit ConfigConflict(const std::string& what) : Error("ConfigConflict", ErrorClass::Config, what) {}
};

class CflViolation : public Error {
public:
    CflViolation(double dt, double dx, double c_max)
        : Error("CflViolation", ErrorClass::Runtime,
                "dt=" + std::to_string(dt) + " dx=" + std::to_string(dx) +
                    " c_max=" + std::to_string(c_max) + " gives Courant number " +
                    std::to_string(c_max * dt / dx) + " > 1"),
          dt_(dt), dx_(dx), c_max_(c_max) {}
    double dt() const noexcept { return dt_; }
    double dx() const noexcept { return dx_; }
    double c_max() const noexcept { return c_max_; }

private:
    double dt_, dx_, c_max_;
};

class DiffusionStabilityViolation : public Error {
public:
    explicit DiffusionStabilityViolation(double number)
        : Error("DiffusionStabilityViolation", ErrorClass::Runtime,
                "explicit diffusion number " + std::to_string(number) + " > 1/2"),
          number_(number) {}
    double number() const noexcept { return number_; }

private:
    double number_;
};

class SingularLambda : public Error {
public:
    SingularLambda()
        : Error("SingularLambda", ErrorClass::Runtime,
                "lambda = 0 cannot drive parabolic damage stepping; use the clifton runner") {}
};

class PositivityViolation : public Error {
public:
    explicit PositivityViolation(double value)
        : Error("PositivityViolation", ErrorClass::Runtime,
                "gamma dropped to " + std::to_string(value) + " under a logistic source") {}
};

class AdmissibilityViolation : public Error {
public:
    AdmissibilityViolation(double time, double min_z_gdot, double tol)
        : Error("AdmissibilityViolation", ErrorClass::Runtime,
                "Z*dGamma/dt = " + std::to_string(min_z_gdot) + " < -" + std::to_string(tol) +
                    " at t=" + std::to_string(time)),
          time_(time), value_(min_z_gdot) {}
    double time() const noexcept { return time_; }
    double value() const noexcept { return value_; }

private:
    double time_, value_;
};

class NonpositiveSpeed : public Error {
public:
    explicit NonpositiveSpeed(double v)
        : Error("NonpositiveSpeed", ErrorClass::Runtime, "front speed " + std::to_string(v) + " <= 0") {}
};

class NoFrontDetected : public Error {
public:
    explicit NoFrontDetected(const std::string& what) : Error("NoFrontDetected", ErrorClass::Runtime, what) {}
};

class NoPlateau : public Error {
public:
    explicit NoPlateau(const std::string& what) : Error("NoPlateau", ErrorClass::Runtime, what) {}
};

class TooFewLevels : public Error {
public:
    explicit TooFewLevels(std::size_t n)
        : Error("TooFewLevels", ErrorClass::Runtime, std::to_string(n) + " time levels, need >= 3") {}
};

class SingularBasis : public Error {
public:
    explicit SingularBasis(double cond)
        : Error("SingularBasis", ErrorClass::Runtime,
                "Gram matrix condition number " + std::to_string(cond) + " exceeds 1e12") {}
};

} // namespace failwave
