#include "vemcdr/assembly.hpp"

#include "vemcdr/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <exception>
#include <iomanip>
#include <ostream>
#include <thread>

namespace vemcdr {

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers with static
// chunking; the first exception is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += threads)
                        body(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

std::vector<CellData> build_cell_data(const PolyMesh& mesh, int k, const CoefficientSet& coeffs,
                                      const StabilizationConfig& config, unsigned threads)
{
    std::vector<CellData> cells(mesh.num_cells());
    parallel_for(mesh.num_cells(), threads, [&](std::size_t c) {
        CellData& d = cells[c];
        d.geometry = cell_geometry(mesh, c);
        d.projectors = build_projectors(d.geometry, k);
        d.delta = compute_delta(d.geometry, k, coeffs, config);
    });
    return cells;
}

AssemblyResult assemble(const PolyMesh& mesh, const DofMap& dofs, const CoefficientSet& coeffs,
                        const StabilizationConfig& config, const AssemblyOptions& opts)
{
    config.validate();
    if (!(coeffs.epsilon > 0.0))
        throw ParameterError("diffusion coefficient must be positive");
    const int k = dofs.k();

    AssemblyResult res;
    res.cells = build_cell_data(mesh, k, coeffs, config, opts.threads);

    std::vector<LocalForms> local(mesh.num_cells());
    parallel_for(mesh.num_cells(), opts.threads, [&](std::size_t c) {
        const CellData& d = res.cells[c];
        local[c] = local_matrix(d.geometry, k, coeffs, config, d.projectors, d.delta);
    });

    // deterministic scatter in ascending cell order
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto& ids = dofs.cell_dofs(c);
        const LocalForms& lf = local[c];
        for (std::size_t i = 0; i < ids.size(); ++i) {
            rhs[static_cast<Eigen::Index>(ids[i])] += lf.F[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j < ids.size(); ++j)
                triplets.emplace_back(static_cast<int>(ids[i]), static_cast<int>(ids[j]),
                                      lf.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        for (const auto& w : res.cells[c].projectors.warnings)
            res.warnings.push_back(w);
        for (const auto& w : lf.warnings)
            res.warnings.push_back(w);
    }
    const auto n = static_cast<Eigen::Index>(dofs.size());
    res.system.matrix.resize(n, n);
    res.system.matrix.setFromTriplets(triplets.begin(), triplets.end());
    res.system.matrix.makeCompressed();
    res.system.rhs = rhs;
    res.system.original_matrix = res.system.matrix;
    res.system.original_rhs = rhs;
    return res;
}

void apply_dirichlet(LinearSystem& system, const DirichletData& data)
{
    const auto n = system.matrix.rows();
    if (static_cast<Eigen::Index>(data.ids.size()) != data.values.size())
        throw UsageError("Dirichlet ids and values differ in length");
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < data.ids.size(); ++i) {
        if (data.ids[i] >= static_cast<std::size_t>(n))
            throw ParameterError("Dirichlet DOF id " + std::to_string(data.ids[i]) + " out of range");
        fixed[data.ids[i]] = 1;
        g[static_cast<Eigen::Index>(data.ids[i])] = data.values[static_cast<Eigen::Index>(i)];
        system.constrained[data.ids[i]] = data.values[static_cast<Eigen::Index>(i)];
    }
    for (const auto& [id, v] : system.constrained) {
        fixed[id] = 1;
        g[static_cast<Eigen::Index>(id)] = v;
    }

    // move known columns to the right-hand side, then replace constrained rows
    system.rhs -= system.matrix * g;
    SparseMatrix& a = system.matrix;
    for (Eigen::Index r = 0; r < n; ++r) {
        const bool row_fixed = fixed[static_cast<std::size_t>(r)];
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
            if (row_fixed)
                it.valueRef() = it.col() == r ? 1.0 : 0.0;
            else if (fixed[static_cast<std::size_t>(it.col())])
                it.valueRef() = 0.0;
        }
        if (row_fixed)
            system.rhs[r] = g[r];
    }
    a.prune(0.0);
    // pruning may drop a zero diagonal on a constrained row; restore it
    for (const auto& [id, v] : system.constrained)
        a.coeffRef(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(id)) = 1.0;
    a.makeCompressed();
}

SolverKind parse_solver_kind(std::string_view name)
{
    if (name == "direct") return SolverKind::direct;
    if (name == "bicgstab") return SolverKind::bicgstab;
    if (name == "gmres") return SolverKind::gmres;
    throw ParameterError("unknown solver '" + std::string(name) + "'");
}

std::string to_string(SolverKind kind)
{
    switch (kind) {
    case SolverKind::direct: return "direct";
    case SolverKind::bicgstab: return "bicgstab";
    case SolverKind::gmres: return "gmres";
    }
    return "unknown";
}

namespace {

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& u, const Eigen::VectorXd& f)
{
    const double nf = f.norm();
    const double r = (a * u - f).norm();
    return nf > 0.0 ? r / nf : r;
}

template <typename Solver>
Solution run_iterative(Solver& solver, const LinearSystem& sys, const SolveOptions& opts, const char* name)
{
    solver.setTolerance(opts.tol);
    solver.setMaxIterations(opts.max_iter);
    solver.preconditioner().setDroptol(1e-6);
    solver.preconditioner().setFillfactor(20);
    solver.compute(sys.matrix);
    if (solver.info() != Eigen::Success)
        throw SolverError(std::string(name) + ": incomplete LU factorisation failed");
    Solution s;
    s.u = solver.solve(sys.rhs);
    s.stats.iterations = static_cast<int>(solver.iterations());
    s.stats.residual = relative_residual(sys.matrix, s.u, sys.rhs);
    s.stats.fill = 20.0;
    if (!s.u.allFinite() || s.stats.residual > 10.0 * opts.tol)
        throw NonConvergenceError(std::string(name) + " did not converge", s.stats.residual,
                                  s.stats.iterations);
    return s;
}

} // namespace

Solution solve(const LinearSystem& sys, const SolveOptions& opts)
{
    if (sys.matrix.rows() != sys.matrix.cols() || sys.matrix.rows() != sys.rhs.size())
        throw UsageError("linear system has inconsistent dimensions");

    switch (opts.method) {
    case SolverKind::direct: {
        const Eigen::SparseMatrix<double> a = sys.matrix;  // SparseLU wants column storage
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(a);
        lu.factorize(a);
        if (lu.info() != Eigen::Success)
            throw SolverError("sparse LU failed: " + lu.lastErrorMessage());
        Solution s;
        s.u = lu.solve(sys.rhs);
        if (lu.info() != Eigen::Success || !s.u.allFinite())
            throw SolverError("sparse LU solve failed");
        s.stats.residual = relative_residual(sys.matrix, s.u, sys.rhs);
        s.stats.fill = double(lu.nnzL() + lu.nnzU()) / double(std::max<Eigen::Index>(a.nonZeros(), 1));
        return s;
    }
    case SolverKind::bicgstab: {
        Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> solver;
        return run_iterative(solver, sys, opts, "BiCGSTAB");
    }
    case SolverKind::gmres: {
        Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<double>> solver;
        solver.set_restart(60);
        return run_iterative(solver, sys, opts, "GMRES");
    }
    }
    throw UsageError("unknown solver");
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    const auto prec = out.precision();
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    out.precision(prec);
}

} // namespace vemcdr
