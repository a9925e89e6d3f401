#include "polyhybrid/error.hpp"

#include <sstream>

namespace polyhybrid
{

const char* to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::AsymmetricAdjacency: return "AsymmetricAdjacency";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::NonStarShaped: return "NonStarShaped";
    case ErrorCode::ZeroLengthFacet: return "ZeroLengthFacet";
    case ErrorCode::SingularMass: return "SingularMass";
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::FaceOutOfSlice: return "FaceOutOfSlice";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::BlockShapeMismatch: return "BlockShapeMismatch";
    case ErrorCode::SingularSaddle: return "SingularSaddle";
    case ErrorCode::SingularInterior: return "SingularInterior";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::IndefiniteDetected: return "IndefiniteDetected";
    case ErrorCode::DofMapMismatch: return "DofMapMismatch";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
  : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

SingularInterior::SingularInterior(int cell)
  : Error(ErrorCode::SingularInterior, "interior block of cell " + std::to_string(cell) + " is singular"),
    cell_(cell)
{
}

namespace
{
std::string not_converged_message(int iterations, double residual, const std::string& what)
{
    std::ostringstream os;
    os << what << " did not converge after " << iterations << " iterations (residual " << residual << ")";
    return os.str();
}
} // namespace

NotConverged::NotConverged(int iterations, double residual, const std::string& what)
  : Error(ErrorCode::NotConverged, not_converged_message(iterations, residual, what)),
    iterations_(iterations),
    residual_(residual)
{
}

void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace polyhybrid
