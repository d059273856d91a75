#pragma once

#include <stdexcept>
#include <string>

namespace regressgan {

// Shape/dimension mismatches between tensors, matrices or CSV schemas.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameter outside its mathematical domain (e.g. Tweedie power outside (1,2)).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite values where finite ones are required.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// API misuse: preconditions on call structure (non-scalar backward root, ...).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// CSV / config file problems: missing columns, unknown keys, bad cells.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Linear algebra failure (Cholesky breakdown at maximum jitter).
class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace regressgan
