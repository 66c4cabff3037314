#pragma once

#include <stdexcept>
#include <string>

namespace szego {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class InvalidMatrix : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NotInW : public Error {
public:
    NotInW(const std::string& what, double deviation) : Error(what), deviation_(deviation) {}
    double deviation() const { return deviation_; }

private:
    double deviation_;
};

class FitError : public Error {
public:
    using Error::Error;
};

class FixedPointDivergence : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Raised when the integrated state stops being finite or its L2 mass runs away.
class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

}  // namespace szego
