#pragma once

#include "polyhybrid/polytope.hpp"
#include "polyhybrid/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace polyhybrid
{

enum class ValueShape
{
    Scalar,
    Vector,
    SymTensor,
};

/// Number of stored components: 1, 2 or 3.
///
/// Symmetric tensors use the orthonormal coordinates (xx, yy, xy) where the
/// third basis tensor is (e1 e2^T + e2 e1^T) / sqrt(2), so Frobenius products
/// become plain dot products of the coordinates.
int num_components(ValueShape shape);

/// Number of monomials of total degree <= k in `dim` variables.
int monomial_count(int dim, int k);

/// Exponents of the 2D scaled monomials, ordered by total degree then by decreasing x power.
std::vector<std::array<int, 2>> monomial_exponents(int k);

/// Polynomial basis on a cell (dim 2) or a facet (dim 1) built from scaled monomials.
///
/// Cell monomials use (x - centroid) / diameter; facet monomials use the arc
/// coordinate (x - midpoint) . tangent / length. A change-of-basis matrix
/// (rows = basis functions, columns = monomials) records orthonormalisation
/// and zero-mean restriction. Vector and tensor bases repeat the scalar basis
/// for every component, component-major.
class PolyBasis
{
public:
    PolyBasis() = default;

    static PolyBasis cell(const Polygon& poly, int degree, ValueShape shape = ValueShape::Scalar);
    static PolyBasis facet(const Point2& a, const Point2& b, int degree, ValueShape shape = ValueShape::Scalar);

    int face_dim() const { return face_dim_; }
    int degree() const { return degree_; }
    ValueShape shape() const { return shape_; }
    int components() const { return num_components(shape_); }
    const Point2& center() const { return center_; }
    double scale() const { return scale_; }
    const Point2& tangent() const { return tangent_; }

    int scalar_dim() const { return static_cast<int>(change_.rows()); }
    int dim() const { return scalar_dim() * components(); }
    int monomial_dim() const { return static_cast<int>(change_.cols()); }
    const Eigen::MatrixXd& change_of_basis() const { return change_; }
    bool is_zero_mean() const { return zero_mean_; }

    /// Scalar function values, (scalar_dim x npoints).
    Eigen::MatrixXd values(const std::vector<Point2>& pts) const;
    /// Ambient gradient components of the scalar functions: [d/dx, d/dy], each (scalar_dim x npoints).
    std::array<Eigen::MatrixXd, 2> gradients(const std::vector<Point2>& pts) const;
    /// Laplacians of the scalar functions (zero on facets).
    Eigen::MatrixXd laplacians(const std::vector<Point2>& pts) const;

    /// Component c of every basis function, (dim x npoints).
    Eigen::MatrixXd component_values(const std::vector<Point2>& pts, int c) const;

    /// Mass matrix of the scalar functions for the given rule.
    Eigen::MatrixXd scalar_mass(const QuadratureRule& q) const;

    /// Basis with identity scalar mass matrix (lower-triangular change); throws SingularMass.
    PolyBasis orthonormalize(const QuadratureRule& q) const;

    /// Drops the constant and removes the mean of every other function; throws DegreeTooLow.
    PolyBasis zero_mean(const QuadratureRule& q) const;

    /// Polynomial with these coefficients as a combination of monomials.
    Eigen::VectorXd to_monomials(const Eigen::VectorXd& scalar_coeffs) const;

private:
    Eigen::MatrixXd monomial_values(const std::vector<Point2>& pts) const;

    int face_dim_ = 2;
    int degree_ = 0;
    ValueShape shape_ = ValueShape::Scalar;
    Point2 center_ = Point2::Zero();
    double scale_ = 1.0;
    Point2 tangent_ = Point2(1.0, 0.0);
    Eigen::MatrixXd change_;
    bool zero_mean_ = false;
};

} // namespace polyhybrid
