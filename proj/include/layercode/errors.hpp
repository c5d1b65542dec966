#pragma once

#include <stdexcept>
#include <string>

namespace layercode {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Check matrices fail hx·hzᵀ = 0.
class CommutationViolation : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Syndrome outside the column space of the relevant check matrix (a meta-check fails).
class InvalidSyndrome : public Error {
public:
    using Error::Error;
};

class DefectAssignmentFailure : public Error {
public:
    using Error::Error;
};

class SiteOffLayer : public Error {
public:
    using Error::Error;
};

class InfeasibleParity : public Error {
public:
    using Error::Error;
};

class NoOppositeSector : public Error {
public:
    using Error::Error;
};

class NonCodeOperator : public Error {
public:
    using Error::Error;
};

/// A decoder stage contract was broken; indicates a bug rather than bad input.
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

class SamplerStuck : public Error {
public:
    using Error::Error;
};

}  // namespace layercode
