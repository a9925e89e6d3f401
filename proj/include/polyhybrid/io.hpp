#pragma once

#include "polyhybrid/condensation.hpp"
#include "polyhybrid/drivers.hpp"
#include "polyhybrid/mesh.hpp"
#include "polyhybrid/spaces.hpp"

#include <map>
#include <string>
#include <vector>

namespace polyhybrid
{

/// Legacy ASCII VTK polydata with one polygon per cell.
void write_vtk_mesh(const PolytopalMesh& mesh, const std::string& path);

/// Cell fields sampled at the cell vertices; points are duplicated per cell so
/// discontinuous fields stay exact. Facet fields are skipped.
void write_vtk_solution(const PolytopalMesh& mesh, const std::map<std::string, FEFunction>& fields,
                        const std::string& path);

/// {cells, facets, vertices, h_max, total_area} as a JSON string.
std::string mesh_summary_json(const PolytopalMesh& mesh);
void write_mesh_summary(const PolytopalMesh& mesh, const std::string& path);

/// Fixed-format float used by the convergence tables.
std::string format_float(double value);

/// Header plus one row per resolution.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
void write_text(const std::string& text, const std::string& path);

/// Matrix Market coordinate format ("general", real).
void write_matrix_market(const SparseMatrix& matrix, const std::string& path);

} // namespace polyhybrid
