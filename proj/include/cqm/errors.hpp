#pragma once

#include <stdexcept>
#include <string>

namespace cqm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    InvalidParams(std::string field, std::string reason)
        : Error("invalid parameter '" + field + "': " + reason),
          field_(std::move(field)),
          reason_(std::move(reason)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

/// A formula was evaluated outside the coupling regime it is derived for.
class RegimeError : public Error {
public:
    using Error::Error;
};

class NotInSuperradiantRegime : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class CutoffTooSmall : public Error {
public:
    using Error::Error;
};

/// Probability mass reached the top of the truncated Fock space.
class TruncationLeak : public Error {
public:
    TruncationLeak(double tail_mass, int n_cut)
        : Error("truncation leak: tail mass " + std::to_string(tail_mass) +
                " at n_cut=" + std::to_string(n_cut)),
          tail_mass_(tail_mass),
          n_cut_(n_cut) {}

    [[nodiscard]] double tail_mass() const noexcept { return tail_mass_; }
    [[nodiscard]] int n_cut() const noexcept { return n_cut_; }

private:
    double tail_mass_;
    int n_cut_;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class StepUnstable : public Error {
public:
    using Error::Error;
};

class NonPositiveData : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cqm
