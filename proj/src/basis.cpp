#include "polyhybrid/basis.hpp"

#include "polyhybrid/error.hpp"

#include <cmath>

namespace polyhybrid
{

int num_components(ValueShape shape)
{
    switch (shape)
    {
    case ValueShape::Scalar: return 1;
    case ValueShape::Vector: return 2;
    case ValueShape::SymTensor: return 3;
    }
    return 1;
}

int monomial_count(int dim, int k)
{
    if (k < 0)
        return 0;
    return dim == 1 ? k + 1 : (k + 1) * (k + 2) / 2;
}

std::vector<std::array<int, 2>> monomial_exponents(int k)
{
    std::vector<std::array<int, 2>> e;
    for (int d = 0; d <= k; ++d)
        for (int j = 0; j <= d; ++j)
            e.push_back({d - j, j});
    return e;
}

namespace
{
double ipow(double x, int p)
{
    double r = 1.0;
    for (int i = 0; i < p; ++i)
        r *= x;
    return r;
}
} // namespace

PolyBasis PolyBasis::cell(const Polygon& poly, int degree, ValueShape shape)
{
    if (degree < 0)
        fail(ErrorCode::InvalidArgument, "basis degree must be nonnegative");
    PolyBasis b;
    b.face_dim_ = 2;
    b.degree_ = degree;
    b.shape_ = shape;
    b.center_ = poly.centroid();
    b.scale_ = poly.diameter();
    const int m = monomial_count(2, degree);
    b.change_ = Eigen::MatrixXd::Identity(m, m);
    return b;
}

PolyBasis PolyBasis::facet(const Point2& a, const Point2& c, int degree, ValueShape shape)
{
    if (degree < 0)
        fail(ErrorCode::InvalidArgument, "basis degree must be nonnegative");
    const double len = (c - a).norm();
    if (len <= 1e-12)
        fail(ErrorCode::ZeroLengthFacet, "segment endpoints coincide");
    PolyBasis b;
    b.face_dim_ = 1;
    b.degree_ = degree;
    b.shape_ = shape;
    b.center_ = 0.5 * (a + c);
    b.scale_ = len;
    b.tangent_ = (c - a) / len;
    const int m = monomial_count(1, degree);
    b.change_ = Eigen::MatrixXd::Identity(m, m);
    return b;
}

Eigen::MatrixXd PolyBasis::monomial_values(const std::vector<Point2>& pts) const
{
    const int np = static_cast<int>(pts.size());
    const int m = monomial_dim();
    Eigen::MatrixXd v(m, np);
    if (face_dim_ == 1)
    {
        for (int q = 0; q < np; ++q)
        {
            const double s = (pts[q] - center_).dot(tangent_) / scale_;
            double p = 1.0;
            for (int i = 0; i < m; ++i, p *= s)
                v(i, q) = p;
        }
        return v;
    }
    const auto e = monomial_exponents(degree_);
    for (int q = 0; q < np; ++q)
    {
        const double x = (pts[q].x() - center_.x()) / scale_;
        const double y = (pts[q].y() - center_.y()) / scale_;
        for (int i = 0; i < m; ++i)
            v(i, q) = ipow(x, e[i][0]) * ipow(y, e[i][1]);
    }
    return v;
}

Eigen::MatrixXd PolyBasis::values(const std::vector<Point2>& pts) const
{
    return change_ * monomial_values(pts);
}

std::array<Eigen::MatrixXd, 2> PolyBasis::gradients(const std::vector<Point2>& pts) const
{
    const int np = static_cast<int>(pts.size());
    const int m = monomial_dim();
    Eigen::MatrixXd gx(m, np);
    Eigen::MatrixXd gy(m, np);
    if (face_dim_ == 1)
    {
        for (int q = 0; q < np; ++q)
        {
            const double s = (pts[q] - center_).dot(tangent_) / scale_;
            for (int i = 0; i < m; ++i)
            {
                const double ds = i == 0 ? 0.0 : i * ipow(s, i - 1) / scale_;
                gx(i, q) = ds * tangent_.x();
                gy(i, q) = ds * tangent_.y();
            }
        }
    }
    else
    {
        const auto e = monomial_exponents(degree_);
        for (int q = 0; q < np; ++q)
        {
            const double x = (pts[q].x() - center_.x()) / scale_;
            const double y = (pts[q].y() - center_.y()) / scale_;
            for (int i = 0; i < m; ++i)
            {
                const int a = e[i][0];
                const int c = e[i][1];
                gx(i, q) = a == 0 ? 0.0 : a * ipow(x, a - 1) * ipow(y, c) / scale_;
                gy(i, q) = c == 0 ? 0.0 : c * ipow(x, a) * ipow(y, c - 1) / scale_;
            }
        }
    }
    return {change_ * gx, change_ * gy};
}

Eigen::MatrixXd PolyBasis::laplacians(const std::vector<Point2>& pts) const
{
    const int np = static_cast<int>(pts.size());
    const int m = monomial_dim();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, np);
    if (face_dim_ == 2)
    {
        const auto e = monomial_exponents(degree_);
        const double h2 = scale_ * scale_;
        for (int q = 0; q < np; ++q)
        {
            const double x = (pts[q].x() - center_.x()) / scale_;
            const double y = (pts[q].y() - center_.y()) / scale_;
            for (int i = 0; i < m; ++i)
            {
                const int a = e[i][0];
                const int c = e[i][1];
                double v = 0.0;
                if (a >= 2)
                    v += a * (a - 1) * ipow(x, a - 2) * ipow(y, c);
                if (c >= 2)
                    v += c * (c - 1) * ipow(x, a) * ipow(y, c - 2);
                l(i, q) = v / h2;
            }
        }
    }
    return change_ * l;
}

Eigen::MatrixXd PolyBasis::component_values(const std::vector<Point2>& pts, int c) const
{
    const Eigen::MatrixXd s = values(pts);
    const int m = scalar_dim();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim(), static_cast<Eigen::Index>(pts.size()));
    v.middleRows(c * m, m) = s;
    return v;
}

Eigen::MatrixXd PolyBasis::scalar_mass(const QuadratureRule& q) const
{
    const Eigen::MatrixXd v = values(q.points);
    const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), static_cast<Eigen::Index>(q.weights.size()));
    return v * w.asDiagonal() * v.transpose();
}

PolyBasis PolyBasis::orthonormalize(const QuadratureRule& q) const
{
    const Eigen::MatrixXd m = scalar_mass(q);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::SingularMass, "mass matrix is not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();
    const double dmax = l.diagonal().maxCoeff();
    if (l.diagonal().minCoeff() <= 1e-13 * dmax)
        fail(ErrorCode::SingularMass, "mass matrix is numerically singular");
    PolyBasis b = *this;
    b.change_ = llt.matrixL().solve(change_);
    return b;
}

PolyBasis PolyBasis::zero_mean(const QuadratureRule& q) const
{
    if (zero_mean_)
        return *this;
    if (degree_ < 1)
        fail(ErrorCode::DegreeTooLow, "zero-mean restriction needs degree >= 1");
    const Eigen::MatrixXd v = values(q.points);
    const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), static_cast<Eigen::Index>(q.weights.size()));
    const double measure = w.sum();
    const Eigen::VectorXd means = v * w / measure;
    // monomial 0 is the constant function
    Eigen::MatrixXd c = change_.bottomRows(change_.rows() - 1);
    c.col(0) -= means.tail(means.size() - 1);
    PolyBasis b = *this;
    b.change_ = c;
    b.zero_mean_ = true;
    return b;
}

Eigen::VectorXd PolyBasis::to_monomials(const Eigen::VectorXd& scalar_coeffs) const
{
    return change_.transpose() * scalar_coeffs;
}

} // namespace polyhybrid
