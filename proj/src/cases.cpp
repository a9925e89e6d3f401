#include "polyhybrid/cases.hpp"

#include "polyhybrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polyhybrid
{

namespace
{
constexpr double pi = std::numbers::pi;

double sinsin(const Point2& x)
{
    return std::sin(pi * x.x()) * std::sin(pi * x.y());
}

Point2 grad_sinsin(const Point2& x)
{
    return {pi * std::cos(pi * x.x()) * std::sin(pi * x.y()), pi * std::sin(pi * x.x()) * std::cos(pi * x.y())};
}
} // namespace

PoissonCase poisson_case(const std::string& name)
{
    PoissonCase c;
    c.name = name;
    if (name == "quadratic")
    {
        c.u = [](const Point2& x) { return x.x() * x.x() + x.y() * x.y(); };
        c.grad = [](const Point2& x) { return Point2(2.0 * x.x(), 2.0 * x.y()); };
        c.f = [](const Point2&) { return -4.0; };
    }
    else if (name == "sine")
    {
        c.u = sinsin;
        c.grad = grad_sinsin;
        c.f = [](const Point2& x) { return 2.0 * pi * pi * sinsin(x); };
    }
    else if (name == "constant")
    {
        c.u = [](const Point2&) { return 1.5; };
        c.grad = [](const Point2&) { return Point2(0.0, 0.0); };
        c.f = [](const Point2&) { return 0.0; };
    }
    else if (name == "zero")
    {
        c.u = [](const Point2&) { return 0.0; };
        c.grad = [](const Point2&) { return Point2(0.0, 0.0); };
        c.f = [](const Point2&) { return 0.0; };
    }
    else
        fail(ErrorCode::InvalidArgument, "unknown Poisson case '" + name + "'");
    return c;
}

ElasticityCase elasticity_case(const std::string& name, double lambda, double mu)
{
    ElasticityCase c;
    c.name = name;
    c.lambda = lambda;
    c.mu = mu;
    if (name == "rigid")
    {
        c.u = [](const Point2& x) { return Point2(0.3 - 0.5 * x.y(), -0.2 + 0.5 * x.x()); };
        c.grad = [](const Point2&) {
            Eigen::Matrix2d g;
            g << 0.0, -0.5, 0.5, 0.0;
            return g;
        };
        c.f = [](const Point2&) { return Point2(0.0, 0.0); };
    }
    else if (name == "quadratic")
    {
        // u = (x^2 + 2xy, y^2 - x^2): lap u = (2, 0), grad div u = (2, 4)
        c.u = [](const Point2& x) {
            return Point2(x.x() * x.x() + 2.0 * x.x() * x.y(), x.y() * x.y() - x.x() * x.x());
        };
        c.grad = [](const Point2& x) {
            Eigen::Matrix2d g;
            g << 2.0 * x.x() + 2.0 * x.y(), 2.0 * x.x(), -2.0 * x.x(), 2.0 * x.y();
            return g;
        };
        c.f = [lambda, mu](const Point2&) { return Point2(-(2.0 * mu + 2.0 * (lambda + mu)), -4.0 * (lambda + mu)); };
    }
    else if (name == "sine")
    {
        // both components equal sin(pi x) sin(pi y)
        c.u = [](const Point2& x) {
            const double s = sinsin(x);
            return Point2(s, s);
        };
        c.grad = [](const Point2& x) {
            const Point2 g = grad_sinsin(x);
            Eigen::Matrix2d m;
            m.row(0) = g.transpose();
            m.row(1) = g.transpose();
            return m;
        };
        c.f = [lambda, mu](const Point2& x) {
            const double ss = sinsin(x);
            const double cc = std::cos(pi * x.x()) * std::cos(pi * x.y());
            const double v = 2.0 * mu * pi * pi * ss - (lambda + mu) * pi * pi * (cc - ss);
            return Point2(v, v);
        };
    }
    else
        fail(ErrorCode::InvalidArgument, "unknown elasticity case '" + name + "'");
    return c;
}

StokesCase stokes_case(const std::string& name)
{
    StokesCase c;
    c.name = name;
    if (name == "linear")
    {
        c.u = [](const Point2& x) { return Point2(x.y(), x.x()); };
        c.grad = [](const Point2&) {
            Eigen::Matrix2d g;
            g << 0.0, 1.0, 1.0, 0.0;
            return g;
        };
        c.p = [](const Point2&) { return 0.0; };
        c.f = [](const Point2&) { return Point2(0.0, 0.0); };
    }
    else if (name == "smooth")
    {
        // u = curl of sin^2(pi x) sin^2(pi y); p = sin(2 pi x) cos(2 pi y) has zero mean
        c.u = [](const Point2& x) {
            const double sx = std::sin(pi * x.x());
            const double sy = std::sin(pi * x.y());
            return Point2(pi * sx * sx * std::sin(2.0 * pi * x.y()), -pi * std::sin(2.0 * pi * x.x()) * sy * sy);
        };
        c.grad = [](const Point2& x) {
            const double sx = std::sin(pi * x.x());
            const double sy = std::sin(pi * x.y());
            const double s2x = std::sin(2.0 * pi * x.x());
            const double s2y = std::sin(2.0 * pi * x.y());
            Eigen::Matrix2d g;
            g << pi * pi * s2x * s2y, 2.0 * pi * pi * sx * sx * std::cos(2.0 * pi * x.y()),
                -2.0 * pi * pi * std::cos(2.0 * pi * x.x()) * sy * sy, -pi * pi * s2x * s2y;
            return g;
        };
        c.p = [](const Point2& x) { return std::sin(2.0 * pi * x.x()) * std::cos(2.0 * pi * x.y()); };
        c.f = [](const Point2& x) {
            const double sx = std::sin(pi * x.x());
            const double sy = std::sin(pi * x.y());
            const double s2x = std::sin(2.0 * pi * x.x());
            const double s2y = std::sin(2.0 * pi * x.y());
            const double c2x = std::cos(2.0 * pi * x.x());
            const double c2y = std::cos(2.0 * pi * x.y());
            const double p3 = pi * pi * pi;
            const double lap1 = 2.0 * p3 * c2x * s2y - 4.0 * p3 * sx * sx * s2y;
            const double lap2 = 4.0 * p3 * s2x * sy * sy - 2.0 * p3 * s2x * c2y;
            return Point2(-lap1 + 2.0 * pi * c2x * c2y, -lap2 - 2.0 * pi * s2x * s2y);
        };
    }
    else
        fail(ErrorCode::InvalidArgument, "unknown Stokes case '" + name + "'");
    return c;
}

double clamp_control(double value, double za, double zb)
{
    return std::min(zb, std::max(za, value));
}

ControlCase control_case(const std::string& name, double alpha, double za, double zb)
{
    if (name != "constructed")
        fail(ErrorCode::InvalidArgument, "unknown control case '" + name + "'");
    if (!(alpha > 0.0))
        fail(ErrorCode::InvalidArgument, "alpha must be positive");
    if (!(za < zb))
        fail(ErrorCode::InvalidArgument, "control bounds need z_a < z_b");
    ControlCase c;
    c.name = name;
    c.alpha = alpha;
    c.za = za;
    c.zb = zb;
    const double amp = 0.1;
    c.u = sinsin;
    c.grad_u = grad_sinsin;
    c.p = [amp](const Point2& x) { return -amp * sinsin(x); };
    c.grad_p = [amp](const Point2& x) { return Point2(-amp * grad_sinsin(x)); };
    c.z = [amp, alpha, za, zb](const Point2& x) { return clamp_control(amp * sinsin(x) / alpha, za, zb); };
    c.f = [z = c.z](const Point2& x) { return 2.0 * pi * pi * sinsin(x) - z(x); };
    c.u_d = [amp](const Point2& x) { return (1.0 + 2.0 * amp * pi * pi) * sinsin(x); };
    return c;
}

} // namespace polyhybrid
