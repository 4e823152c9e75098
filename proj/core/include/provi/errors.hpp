#pragma once

#include <stdexcept>
#include <string>

namespace provi {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A real tagged as smooth reached a non-smooth consumer (comparison,
/// discontinuous density, parameter slot that forbids learned inputs).
struct SmoothnessViolation : Error {
    SmoothnessViolation(std::string origin_, std::string consumer_)
        : Error("smoothness violation: smooth value" +
                (origin_.empty() ? std::string{} : " from '" + origin_ + "'") +
                " used by non-smooth consumer '" + consumer_ + "'"),
          origin(std::move(origin_)),
          consumer(std::move(consumer_)) {}
    std::string origin;
    std::string consumer;
};

/// Two traces being concatenated share a name.
struct DisjointnessViolation : Error {
    explicit DisjointnessViolation(std::string name_)
        : Error("trace concatenation clashes on name '" + name_ + "'"), name(std::move(name_)) {}
    std::string name;
};

/// A simulated execution tried to reuse an address.
struct DuplicateNameError : Error {
    explicit DuplicateNameError(std::string name_)
        : Error("address '" + name_ + "' used twice in one execution"), name(std::move(name_)) {}
    std::string name;
};

/// Parameter or argument outside the numeric domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// Ground value accessed at the wrong type.
struct TypeError : Error {
    using Error::Error;
};

/// Operation not available for the given program (e.g. exhaustive
/// enumeration of an infinite-support primitive).
struct UnsupportedError : Error {
    using Error::Error;
};

/// Invalid run configuration (CLI / config file).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace provi
