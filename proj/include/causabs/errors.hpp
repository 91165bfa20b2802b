#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causabs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed model, query, clustering or file contents.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : ValidationError(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

// P(A | B) requested with P(B) = 0.
class UndefinedConditional : public Error {
public:
    using Error::Error;
};

} // namespace causabs
