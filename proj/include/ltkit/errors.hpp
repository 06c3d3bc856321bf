#pragma once

#include <stdexcept>
#include <string>

namespace ltkit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed literals, violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operands built over different prime contexts.
class ContextMismatch : public Error {
public:
    ContextMismatch() : Error("context mismatch") {}
};

/// A result could not be certified to the requested number of digits.
class PrecisionShortfall : public Error {
public:
    PrecisionShortfall(const std::string& what, int have, int need)
        : Error(what + ": certified precision " + std::to_string(have) + " < required " +
                std::to_string(need)),
          have_(have), need_(need) {}
    int have() const noexcept { return have_; }
    int need() const noexcept { return need_; }

private:
    int have_;
    int need_;
};

/// A computation exceeded a configured size or time budget.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

/// An identity that must hold by theory failed: an implementation bug.
class IdentityViolation : public Error {
public:
    using Error::Error;
};

} // namespace ltkit
