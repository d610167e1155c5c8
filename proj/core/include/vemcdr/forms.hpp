#pragma once

#include "vemcdr/mesh.hpp"
#include "vemcdr/projectors.hpp"
#include "vemcdr/quadrature.hpp"
#include "vemcdr/space.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vemcdr {

using VectorField = std::function<Point(const Point&)>;

/// Data of -eps lap(u) + b.grad(u) + c u = f, u = u_b on the boundary.
struct CoefficientSet
{
    double epsilon = 1.0;
    VectorField b = [](const Point&) { return Point(0.0, 0.0); };
    ScalarField c = [](const Point&) { return 0.0; };
    ScalarField f = [](const Point&) { return 0.0; };
    ScalarField u_b = [](const Point&) { return 0.0; };
    std::optional<ScalarField> div_b;  ///< central differences when absent
    double c0 = 1.0;                   ///< lower bound of c - div(b)/2
};

enum class DeltaMode { paper, supg_classic, off };

DeltaMode parse_delta_mode(std::string_view name);
std::string to_string(DeltaMode mode);

/// Constants of the streamline-diffusion parameter and multipliers of the
/// dofi-dofi stabilizers. The analytical constants cannot be computed; they
/// default to 1.
struct StabilizationConfig
{
    double mu1 = 1.0;          ///< inverse inequality ||lap v|| <= mu1 h^-1 |v|_1
    double mu2 = 1.0;          ///< inverse inequality |v|_1 <= mu2 h^-1 ||v||
    double c_I = 1.0;          ///< approximation constant of Pi_{k-1} grad
    double alpha_star = 1.0;
    double gamma_star = 1.0;
    double s_star = 1.0;
    double stab_scale_a = 1.0;
    double stab_scale_c = 1.0;
    double stab_scale_sym = 1.0;
    double stab_scale_supg = 1.0;
    DeltaMode delta_mode = DeltaMode::paper;

    void validate() const;
};

/// Coefficients sampled at the assembly quadrature points of one cell.
struct CellSamples
{
    QuadRule rule;
    std::vector<Point> b;
    std::vector<double> c;
    std::vector<double> div_b;
    double c_max = 0.0;     ///< max |c|
    double b_max = 0.0;     ///< max |b|
    double div_b_mean = 0.0;
    double coercivity_min = 0.0;  ///< min of c - div(b)/2
};

/// Quadrature degree used for element integrals: 2k + 2.
int assembly_degree(int k);

double divergence(const CoefficientSet& coeffs, const Point& x, double h);

CellSamples sample_coefficients(const CellGeometry& cell, int k, const CoefficientSet& coeffs);

/// Control parameter from cell data. Branches with a zero denominator are
/// inactive; the result always satisfies eps * delta <= h_T^2.
double compute_delta(double h_T, double epsilon, double c0, double c_max, double b_max,
                     const StabilizationConfig& config);
double compute_delta(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                     const StabilizationConfig& config);

struct LocalForms
{
    Eigen::MatrixXd A;  ///< a + (-b_sym + b_skew) + c + b_stab; A(i, j) = A_h(phi_j, phi_i)
    Eigen::VectorXd F;
    double delta = 0.0;

    Eigen::MatrixXd a;
    Eigen::MatrixXd b_sym;
    Eigen::MatrixXd b_skew;
    Eigen::MatrixXd c;
    Eigen::MatrixXd b_stab;

    // stabilizers alone (already contained in the parts above)
    Eigen::MatrixXd s_a;
    Eigen::MatrixXd s_sym;
    Eigen::MatrixXd s_c;
    Eigen::MatrixXd s_stab;

    std::vector<std::string> warnings;
};

LocalForms local_matrix(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                        const StabilizationConfig& config, const ProjectorSet& proj);

/// Same as above with a prescribed control parameter (polynomial-consistency
/// checks fix delta_T).
LocalForms local_matrix(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                        const StabilizationConfig& config, const ProjectorSet& proj, double delta);

/// Load vector with f_h = P_{k-2}(f) and its streamline companion.
Eigen::VectorXd local_rhs(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                          const ProjectorSet& proj, double delta);

/// L2 projection of f onto P^{degree}(T), in cell_basis(cell, degree).
Eigen::VectorXd project_source(const CellGeometry& cell, const ScalarField& f, int degree,
                               int quad_degree);

} // namespace vemcdr
