#include "polyhybrid/quadrature.hpp"

#include "polyhybrid/error.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace polyhybrid
{

double QuadratureRule::measure() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

namespace
{

void compute_gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace

void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (npoints < 1)
        fail(ErrorCode::InvalidArgument, "gauss-legendre rule needs at least one point");
    static std::mutex mutex;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(npoints);
    if (it == cache.end())
    {
        std::vector<double> x;
        std::vector<double> w;
        compute_gauss_legendre(npoints, x, w);
        it = cache.emplace(npoints, std::make_pair(std::move(x), std::move(w))).first;
    }
    nodes = it->second.first;
    weights = it->second.second;
}

QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c, int degree)
{
    if (degree < 0)
        degree = 0;
    // collapsed tensor rule: the Jacobian of the Duffy map adds one degree in u
    const int nu = (degree + 2 + 1) / 2;
    const int nv = (degree + 1 + 1) / 2;
    std::vector<double> xu;
    std::vector<double> wu;
    std::vector<double> xv;
    std::vector<double> wv;
    gauss_legendre(nu, xu, wu);
    gauss_legendre(nv, xv, wv);
    const double twice_area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    QuadratureRule rule;
    rule.points.reserve(nu * nv);
    rule.weights.reserve(nu * nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
        {
            const double u = xu[i];
            const double v = xv[j];
            const double l1 = u * (1.0 - v);
            const double l2 = u * v;
            rule.points.push_back(a + l1 * (b - a) + l2 * (c - a));
            rule.weights.push_back(wu[i] * wv[j] * u * twice_area);
        }
    return rule;
}

QuadratureRule cell_quadrature(const Polygon& poly, int degree)
{
    QuadratureRule rule;
    const auto& v = poly.vertices();
    const Point2& c = poly.centroid();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % n];
        const double a2 = (p - c).x() * (q - c).y() - (p - c).y() * (q - c).x();
        if (a2 <= 1e-14 * poly.area())
            fail(ErrorCode::NonStarShaped, "fan triangle " + std::to_string(i) + " has non-positive area");
        auto tri = triangle_quadrature(c, p, q, degree);
        rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
        rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
    }
    return rule;
}

QuadratureRule facet_quadrature(const Point2& a, const Point2& b, int degree)
{
    const double len = (b - a).norm();
    if (len <= 1e-12)
        fail(ErrorCode::ZeroLengthFacet, "segment endpoints coincide");
    const int np = std::max(1, (degree + 2) / 2);
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(np, x, w);
    QuadratureRule rule;
    rule.points.reserve(np);
    rule.weights.reserve(np);
    for (int i = 0; i < np; ++i)
    {
        rule.points.push_back(a + x[i] * (b - a));
        rule.weights.push_back(w[i] * len);
    }
    return rule;
}

} // namespace polyhybrid
