#pragma once

#include <stdexcept>
#include <string>

namespace polyhybrid
{

enum class ErrorCode
{
    InvalidArgument,
    DegeneratePolygon,
    AsymmetricAdjacency,
    BadDegree,
    NonManifoldEdge,
    InconsistentOrientation,
    InvalidMesh,
    NonStarShaped,
    ZeroLengthFacet,
    SingularMass,
    DegreeTooLow,
    FaceOutOfSlice,
    BadPartition,
    BlockShapeMismatch,
    SingularSaddle,
    SingularInterior,
    NotConverged,
    IndefiniteDetected,
    DofMapMismatch,
    LayoutMismatch,
    IoError,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by static condensation when a cell block cannot be factorised.
class SingularInterior : public Error
{
public:
    explicit SingularInterior(int cell);

    int cell() const noexcept { return cell_; }

private:
    int cell_;
};

/// Raised by iterative solvers (and the control fixed point) that run out of iterations.
class NotConverged : public Error
{
public:
    NotConverged(int iterations, double residual, const std::string& what = "iteration");

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace polyhybrid
