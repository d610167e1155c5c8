#pragma once

#include "vemcdr/forms.hpp"
#include "vemcdr/mesh.hpp"
#include "vemcdr/projectors.hpp"
#include "vemcdr/space.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vemcdr {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Global system A u = F in compressed row storage.
struct LinearSystem
{
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::map<std::size_t, double> constrained;

    // pre-elimination copy, kept for residual checks
    SparseMatrix original_matrix;
    Eigen::VectorXd original_rhs;
};

/// Per-cell data kept from assembly for post-processing.
struct CellData
{
    CellGeometry geometry;
    ProjectorSet projectors;
    double delta = 0.0;
};

struct AssemblyResult
{
    LinearSystem system;
    std::vector<CellData> cells;
    std::vector<std::string> warnings;
};

struct AssemblyOptions
{
    unsigned threads = 1;
};

/// Builds geometry and projectors for every cell. Per-cell work may run on
/// several threads; results are stored by cell id.
std::vector<CellData> build_cell_data(const PolyMesh& mesh, int k, const CoefficientSet& coeffs,
                                      const StabilizationConfig& config, unsigned threads = 1);

/// Scatter-adds the local forms in ascending cell order.
AssemblyResult assemble(const PolyMesh& mesh, const DofMap& dofs, const CoefficientSet& coeffs,
                        const StabilizationConfig& config, const AssemblyOptions& opts = {});

/// Eliminates Dirichlet DOFs: constrained rows become identity rows and the
/// known columns move to the right-hand side.
void apply_dirichlet(LinearSystem& system, const DirichletData& data);

enum class SolverKind { direct, bicgstab, gmres };

SolverKind parse_solver_kind(std::string_view name);
std::string to_string(SolverKind kind);

struct SolveOptions
{
    SolverKind method = SolverKind::direct;
    double tol = 1e-10;
    int max_iter = 5000;
};

struct SolveStats
{
    int iterations = 0;
    double residual = 0.0;  ///< |A u - F| / |F| on the constrained system
    double fill = 0.0;      ///< nnz(factors) / nnz(A)
};

struct Solution
{
    Eigen::VectorXd u;
    SolveStats stats;
};

Solution solve(const LinearSystem& system, const SolveOptions& opts = {});

/// Matrix Market coordinate export (real general).
void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);

} // namespace vemcdr
