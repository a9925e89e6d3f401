#pragma once

#include "polyhybrid/polytope.hpp"

#include <vector>

namespace polyhybrid
{

/// Points in physical coordinates with positive weights.
struct QuadratureRule
{
    std::vector<Point2> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double measure() const;
};

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule on the triangle (a,b,c) exact for polynomials of total degree `degree`.
QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c, int degree);

/// Fan triangulation from the centroid; throws NonStarShaped when a fan triangle is not positive.
QuadratureRule cell_quadrature(const Polygon& poly, int degree);

/// Gauss-Legendre rule on the segment [a,b] with ceil((degree+1)/2) points.
QuadratureRule facet_quadrature(const Point2& a, const Point2& b, int degree);

} // namespace polyhybrid
