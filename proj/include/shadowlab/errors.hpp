#pragma once

#include <stdexcept>
#include <string>

#include "shadowlab/types.hpp"

namespace shadowlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A theorem's hypothesis is not met by the supplied constants.
class NotApplicableError : public Error {
public:
    using Error::Error;
};

class StiffnessError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RegistryError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class StructureError : public Error {
public:
    using Error::Error;
};

class AdmissibilityError : public Error {
public:
    using Error::Error;
};

class ContainmentError : public Error {
public:
    ContainmentError(const std::string& what, double exit_time)
        : Error(what), exit_time_(exit_time) {}
    [[nodiscard]] double exit_time() const noexcept { return exit_time_; }

private:
    double exit_time_;
};

class HypothesisViolated : public Error {
public:
    HypothesisViolated(const std::string& what, Vector witness, double value)
        : Error(what), witness_(std::move(witness)), value_(value) {}
    [[nodiscard]] const Vector& witness() const noexcept { return witness_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    Vector witness_;
    double value_;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, int iterations, double last_ratio)
        : Error(what), iterations_(iterations), last_ratio_(last_ratio) {}
    [[nodiscard]] int iterations() const noexcept { return iterations_; }
    [[nodiscard]] double last_ratio() const noexcept { return last_ratio_; }

private:
    int iterations_;
    double last_ratio_;
};

}  // namespace shadowlab
