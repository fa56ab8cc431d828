#pragma once

#include <stdexcept>
#include <string>

namespace freqgen {

enum class ErrorCode {
    SyntaxError,
    DuplicateRule,
    UndeclaredAxiom,
    WeightForNonAtom,
    UnknownAtom,
    UnproductiveClass,
    EpsilonCycle,
    NotRegular,
    NotContextFree,
    EmptyClassAtSize,
    SizeOutOfRange,
    UnknownClass,
    InvalidWeight,
    InvalidTarget,
    PeriodicSpec,
    NoRootInRange,
    DegenerateDerivative,
    NoSolutionFound,
    ZeroObservedFrequency,
    InfeasibleTarget,
    DomainError,
    EmptyFiber,
    BudgetExceeded,
    CacheMismatch,
    IoError,
};

const char* code_name(ErrorCode c);

// Exit status class used by the command line tool.
int exit_status(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int col, const std::string& msg)
        : Error(ErrorCode::SyntaxError,
                std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_;
    int col_;
};

}  // namespace freqgen
