#pragma once

#include "polyhybrid/mesh.hpp"

#include <memory>

namespace testing_helpers
{

inline std::shared_ptr<const polyhybrid::PolytopalMesh> share(polyhybrid::PolytopalMesh m)
{
    return std::make_shared<const polyhybrid::PolytopalMesh>(std::move(m));
}

inline std::shared_ptr<const polyhybrid::PolytopalMesh> unit_square()
{
    return share(polyhybrid::cartesian_mesh(1));
}

inline std::shared_ptr<const polyhybrid::PolytopalMesh> voronoi(int n)
{
    return share(polyhybrid::voronoi_mesh(n));
}

/// Voronoi mesh of jittered grid sites, so cells are genuine polygons.
inline std::shared_ptr<const polyhybrid::PolytopalMesh> jittered(int n, unsigned seed = 7)
{
    return share(polyhybrid::voronoi_mesh(polyhybrid::perturbed_grid_sites(n, 0.3, seed)));
}

} // namespace testing_helpers
