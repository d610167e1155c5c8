#pragma once

#include "vemcdr/assembly.hpp"
#include "vemcdr/expr.hpp"
#include "vemcdr/forms.hpp"
#include "vemcdr/harness.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace vemcdr {

/// Everything a run needs. Expression fields hold source text and are
/// compiled by coefficients() / exact(); validate() parses them all.
struct RunConfig
{
    int k = 2;

    MeshSpec mesh;
    std::string mesh_file;  ///< read instead of generating when non-empty

    double epsilon = 1.0;
    double c0 = 1.0;
    std::string bx = "0";
    std::string by = "0";
    std::string c = "0";
    std::string f = "0";
    std::string ub = "0";
    std::optional<std::string> divb;

    std::optional<std::string> exact_u;
    std::optional<std::string> exact_ux;
    std::optional<std::string> exact_uy;

    StabilizationConfig stabilization;
    SolveOptions solver;
    unsigned threads = 1;

    int levels = 4;
    std::string output;

    void validate() const;
    CoefficientSet coefficients() const;
    /// Present only when all three exact-solution expressions are given.
    std::optional<ExactSolution> exact() const;
    PolyMesh build_mesh() const;
    StudyConfig study() const;
};

/// Flat `key = value` format with [section] headers; strings quoted, numbers
/// bare, `#` starts a comment. Errors carry the line number.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
/// Throws UsageError("config not found: ...") when the file cannot be opened.
RunConfig load_config(const std::string& path);

ScalarField compile_scalar(const std::string& text);

} // namespace vemcdr
