#pragma once

#include <stdexcept>
#include <string>

namespace dsc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FrameMismatch : public Error {
public:
    using Error::Error;
};

class ConditioningNotSupported : public Error {
public:
    using Error::Error;
};

class NotABeliefFunction : public Error {
public:
    using Error::Error;
};

class NodeOutOfRange : public Error {
public:
    using Error::Error;
};

class NotBayesian : public Error {
public:
    using Error::Error;
};

class NotDirichlet : public Error {
public:
    using Error::Error;
};

class NotRankOne : public Error {
public:
    using Error::Error;
};

class NotODC : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Scenario failed validation; `field()` names the offending JSON path.
class InvalidScenario : public Error {
public:
    InvalidScenario(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class EngineMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace dsc
