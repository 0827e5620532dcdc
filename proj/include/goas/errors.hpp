#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace goas {

// Base class of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Stereographic projection is undefined at the north pole.
class NearNorthPole : public Error {
public:
    using Error::Error;
};

// Ray parallel to the paraboloid axis: the polar radius diverges.
class DegenerateDirection : public Error {
public:
    using Error::Error;
};

class UnknownName : public Error {
public:
    using Error::Error;
};

class EmptyDomain : public Error {
public:
    using Error::Error;
};

class AllPointsZeroDensity : public Error {
public:
    using Error::Error;
};

class Overflow : public Error {
public:
    using Error::Error;
};

class SolverFailure : public Error {
public:
    using Error::Error;
};

class EnergyMismatch : public Error {
public:
    using Error::Error;
};

class ZeroDensityInit : public Error {
public:
    using Error::Error;
};

class DegenerateVariance : public Error {
public:
    using Error::Error;
};

// A reflector cell received no construction rays; the dual surface cannot
// be built for it.
class EmptyCell : public Error {
public:
    EmptyCell(std::size_t cell, const std::string& msg) : Error(msg), cell(cell) {}
    std::size_t cell;
};

// The dual re-simulation loop failed to land a proposal in the target cell.
class RetryCapExceeded : public Error {
public:
    RetryCapExceeded(std::size_t cell, const std::string& msg) : Error(msg), cell(cell) {}
    std::size_t cell;
};

} // namespace goas
