#pragma once

#include "vemcdr/assembly.hpp"
#include "vemcdr/forms.hpp"
#include "vemcdr/mesh.hpp"
#include "vemcdr/space.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vemcdr {

/// Exact solution with its gradient, for error measurement.
struct ExactSolution
{
    ScalarField u;
    ScalarField ux;
    ScalarField uy;
};

struct ErrorReport
{
    double err_L2 = 0.0;
    double err_H1 = 0.0;
    double err_triple = 0.0;
    // squared contributions; err_triple^2 is their sum
    double eps_part = 0.0;
    double c0_part = 0.0;
    double stream_part = 0.0;
    std::size_t ndof = 0;
    double h_max = 0.0;
};

/// Errors of a DOF vector measured through its polynomial projections:
/// Pi_k u_h for L2, grad Pi_nabla u_h for H1 and the diffusive part of the
/// triple norm, Pi_{k-1} grad u_h for the streamline part. `cells` supplies
/// projectors and the delta values used by the scheme.
ErrorReport compute_errors(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                           const ExactSolution& exact, const CoefficientSet& coeffs,
                           const std::vector<CellData>& cells);

/// Triple norm of u_h itself (exact solution zero).
double triple_norm(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                   const CoefficientSet& coeffs, const std::vector<CellData>& cells);

struct ProblemSolution
{
    DofMap dofs;
    std::vector<CellData> cells;
    Eigen::VectorXd u;
    SolveStats stats;
    std::vector<std::string> warnings;
};

/// Assemble, constrain and solve one problem.
ProblemSolution solve_problem(const PolyMesh& mesh, int k, const CoefficientSet& coeffs,
                              const StabilizationConfig& config, const SolveOptions& solver,
                              unsigned threads = 1);

struct MeshSpec
{
    MeshKind kind = MeshKind::quad;
    std::size_t nx = 4;
    std::size_t ny = 4;
    double perturb = 0.0;
    std::uint64_t seed = 0;
};

struct StudyConfig
{
    MeshSpec mesh;  ///< coarsest level; level l uses nx * 2^l by ny * 2^l
    int k = 2;
    int levels = 4;
    CoefficientSet coeffs;
    ExactSolution exact;
    StabilizationConfig stabilization;
    SolveOptions solver;
    unsigned threads = 1;
};

struct ConvergenceRow
{
    int level = 0;
    double h_max = 0.0;
    std::size_t ndof = 0;
    double err_L2 = 0.0;
    double err_H1 = 0.0;
    double err_triple = 0.0;
    std::optional<double> rate_L2;
    std::optional<double> rate_H1;
    std::optional<double> rate_triple;
};

struct StudyResult
{
    std::vector<ConvergenceRow> rows;
    std::vector<ErrorReport> reports;
    std::vector<QualityReport> quality;
    std::vector<std::string> flags;
    std::vector<std::string> warnings;
};

inline constexpr const char* k1_convection_flag =
    "k = 1 with dominant convection: the scheme is not expected to converge, rates are informational";

/// Mesh Peclet number max|b| h / (2 eps) above which a problem counts as
/// convection dominated.
bool convection_dominated(const PolyMesh& mesh, const CoefficientSet& coeffs);

StudyResult convergence_study(const StudyConfig& config);

double observed_rate(double err_coarse, double err_fine, double h_coarse, double h_fine);

inline constexpr const char* csv_header =
    "level,h_max,ndof,err_L2,err_H1,err_triple,rate_L2,rate_H1,rate_triple";

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
std::string write_csv(const std::vector<ConvergenceRow>& rows);

struct Box
{
    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;

    bool contains(const Point& p) const noexcept
    {
        return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
    }
};

/// Bound a solution obeying a maximum principle cannot exceed: the larger of
/// max |u_b| on the boundary and max |f| / min c when c is bounded below by a
/// positive constant.
double max_principle_bound(const PolyMesh& mesh, const CoefficientSet& coeffs, int quad_degree = 8);

/// max |Pi_nabla u_h| over cell quadrature points inside `region`, minus
/// `bound`. Positive values are overshoot.
double oscillation_probe(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                         const std::vector<CellData>& cells, const Box& region, double bound);

} // namespace vemcdr
