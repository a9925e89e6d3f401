#pragma once

#include "polyhybrid/polytope.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace polyhybrid
{

using ScalarField = std::function<double(const Point2&)>;
using VectorField = std::function<Point2(const Point2&)>;
using TensorField = std::function<Eigen::Matrix2d(const Point2&)>;

/// -lap u = f in the unit square, u = g on the boundary (g is the exact u).
struct PoissonCase
{
    std::string name;
    ScalarField u;
    VectorField grad;
    ScalarField f;
};

/// Cases: "quadratic" (x^2 + y^2), "sine", "constant", "zero".
PoissonCase poisson_case(const std::string& name);

/// -div(2 mu eps(u) + lambda div(u) I) = f; grad has rows grad(u_i).
struct ElasticityCase
{
    std::string name;
    double lambda = 1.0;
    double mu = 1.0;
    VectorField u;
    TensorField grad;
    VectorField f;
};

/// Cases: "rigid", "quadratic", "sine".
ElasticityCase elasticity_case(const std::string& name, double lambda, double mu);

/// -lap u + grad p = f, div u = 0, with zero-mean pressure.
struct StokesCase
{
    std::string name;
    VectorField u;
    TensorField grad;
    ScalarField p;
    VectorField f;
};

/// Cases: "linear" (u = (y, x), p = 0), "smooth" (curl of a sine bubble).
StokesCase stokes_case(const std::string& name);

/// Distributed control with box constraints:
/// -lap u = f + z, -lap p = u - u_d, z = clamp(-p / alpha, z_a, z_b), u = p = 0 on the boundary.
struct ControlCase
{
    std::string name;
    double alpha = 0.1;
    double za = -1.0;
    double zb = 0.5;
    ScalarField u;
    VectorField grad_u;
    ScalarField p;
    VectorField grad_p;
    ScalarField z;
    ScalarField f;
    ScalarField u_d;
};

/// Case "constructed": u = sin(pi x) sin(pi y), p = -0.1 sin(pi x) sin(pi y).
ControlCase control_case(const std::string& name, double alpha, double za, double zb);

double clamp_control(double value, double za, double zb);

} // namespace polyhybrid
