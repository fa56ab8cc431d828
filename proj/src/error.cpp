#include "freqgen/error.hpp"

namespace freqgen {

const char* code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateRule: return "DuplicateRule";
    case ErrorCode::UndeclaredAxiom: return "UndeclaredAxiom";
    case ErrorCode::WeightForNonAtom: return "WeightForNonAtom";
    case ErrorCode::UnknownAtom: return "UnknownAtom";
    case ErrorCode::UnproductiveClass: return "UnproductiveClass";
    case ErrorCode::EpsilonCycle: return "EpsilonCycle";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::NotContextFree: return "NotContextFree";
    case ErrorCode::EmptyClassAtSize: return "EmptyClassAtSize";
    case ErrorCode::SizeOutOfRange: return "SizeOutOfRange";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::PeriodicSpec: return "PeriodicSpec";
    case ErrorCode::NoRootInRange: return "NoRootInRange";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::NoSolutionFound: return "NoSolutionFound";
    case ErrorCode::ZeroObservedFrequency: return "ZeroObservedFrequency";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyFiber: return "EmptyFiber";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::CacheMismatch: return "CacheMismatch";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

int exit_status(ErrorCode c) {
    switch (c) {
    case ErrorCode::SyntaxError:
    case ErrorCode::DuplicateRule:
    case ErrorCode::UndeclaredAxiom:
    case ErrorCode::WeightForNonAtom:
    case ErrorCode::UnknownAtom:
    case ErrorCode::UnproductiveClass:
    case ErrorCode::EpsilonCycle:
    case ErrorCode::NotRegular:
    case ErrorCode::NotContextFree:
    case ErrorCode::UnknownClass:
    case ErrorCode::InvalidWeight:
    case ErrorCode::InvalidTarget:
    case ErrorCode::PeriodicSpec:
    case ErrorCode::IoError:
    case ErrorCode::CacheMismatch:
        return 3;
    case ErrorCode::BudgetExceeded:
        return 5;
    default:
        return 4;
    }
}

}  // namespace freqgen
