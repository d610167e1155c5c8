#include "vemcdr/config.hpp"

#include "vemcdr/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string_view>

namespace vemcdr {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Value
{
    std::string text;
    bool quoted = false;
    std::size_t line = 0;
};

// Strips a trailing comment, honouring quotes.
std::string_view strip_comment(std::string_view s)
{
    bool in_quote = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"')
            in_quote = !in_quote;
        else if (s[i] == '#' && !in_quote)
            return s.substr(0, i);
    }
    return s;
}

Value parse_value(std::string_view raw, std::size_t line)
{
    Value v;
    v.line = line;
    if (raw.empty())
        throw ParseError("missing value", line);
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw ParseError("unterminated string", line);
        const auto inner = raw.substr(1, raw.size() - 2);
        if (inner.find('"') != std::string_view::npos)
            throw ParseError("stray quote in string", line);
        v.text = std::string(inner);
        v.quoted = true;
    } else {
        v.text = std::string(raw);
    }
    return v;
}

double as_number(const Value& v, const std::string& key)
{
    if (v.quoted)
        throw ParseError("'" + key + "' expects a number, got a string", v.line);
    double out = 0.0;
    const char* end = v.text.data() + v.text.size();
    const auto [p, ec] = std::from_chars(v.text.data(), end, out);
    if (ec != std::errc() || p != end)
        throw ParseError("'" + key + "' expects a number, got '" + v.text + "'", v.line);
    return out;
}

long long as_integer(const Value& v, const std::string& key)
{
    if (v.quoted)
        throw ParseError("'" + key + "' expects an integer, got a string", v.line);
    long long out = 0;
    const char* end = v.text.data() + v.text.size();
    const auto [p, ec] = std::from_chars(v.text.data(), end, out);
    if (ec != std::errc() || p != end)
        throw ParseError("'" + key + "' expects an integer, got '" + v.text + "'", v.line);
    return out;
}

std::string as_string(const Value& v, const std::string& key)
{
    if (!v.quoted)
        throw ParseError("'" + key + "' expects a quoted string", v.line);
    return v.text;
}

// Expression fields accept either a quoted expression or a bare number.
std::string as_expression(const Value& v, const std::string& key)
{
    if (!v.quoted)
        (void)as_number(v, key);
    const std::string& text = v.text;
    try {
        (void)expr::Expression::parse(text);
    } catch (const expr::SyntaxError& e) {
        throw ParseError("'" + key + "': " + e.what(), v.line);
    }
    return text;
}

std::size_t as_count(const Value& v, const std::string& key)
{
    const long long n = as_integer(v, key);
    if (n < 1)
        throw ParseError("'" + key + "' must be at least 1", v.line);
    return static_cast<std::size_t>(n);
}

template <typename Parse>
auto wrap(const Value& v, Parse&& parse)
{
    try {
        return parse(v.text);
    } catch (const ParameterError& e) {
        throw ParseError(e.what(), v.line);
    }
}

void apply(RunConfig& cfg, const std::string& section, const std::string& key, const Value& v)
{
    using Setter = std::function<void(RunConfig&, const Value&)>;
    static const std::map<std::string, Setter> table = {
        {".k", [](RunConfig& c, const Value& v) { c.k = static_cast<int>(as_integer(v, "k")); }},

        {"mesh.kind", [](RunConfig& c, const Value& v) {
             as_string(v, "kind");
             c.mesh.kind = wrap(v, [](const std::string& s) { return parse_mesh_kind(s); });
         }},
        {"mesh.nx", [](RunConfig& c, const Value& v) { c.mesh.nx = as_count(v, "nx"); }},
        {"mesh.ny", [](RunConfig& c, const Value& v) { c.mesh.ny = as_count(v, "ny"); }},
        {"mesh.perturb", [](RunConfig& c, const Value& v) { c.mesh.perturb = as_number(v, "perturb"); }},
        {"mesh.seed", [](RunConfig& c, const Value& v) {
             const long long s = as_integer(v, "seed");
             if (s < 0)
                 throw ParseError("'seed' must be non-negative", v.line);
             c.mesh.seed = static_cast<std::uint64_t>(s);
         }},
        {"mesh.file", [](RunConfig& c, const Value& v) { c.mesh_file = as_string(v, "file"); }},

        {"coefficients.eps", [](RunConfig& c, const Value& v) { c.epsilon = as_number(v, "eps"); }},
        {"coefficients.c0", [](RunConfig& c, const Value& v) { c.c0 = as_number(v, "c0"); }},
        {"coefficients.bx", [](RunConfig& c, const Value& v) { c.bx = as_expression(v, "bx"); }},
        {"coefficients.by", [](RunConfig& c, const Value& v) { c.by = as_expression(v, "by"); }},
        {"coefficients.c", [](RunConfig& c, const Value& v) { c.c = as_expression(v, "c"); }},
        {"coefficients.f", [](RunConfig& c, const Value& v) { c.f = as_expression(v, "f"); }},
        {"coefficients.ub", [](RunConfig& c, const Value& v) { c.ub = as_expression(v, "ub"); }},
        {"coefficients.divb", [](RunConfig& c, const Value& v) { c.divb = as_expression(v, "divb"); }},

        {"exact.u", [](RunConfig& c, const Value& v) { c.exact_u = as_expression(v, "u"); }},
        {"exact.ux", [](RunConfig& c, const Value& v) { c.exact_ux = as_expression(v, "ux"); }},
        {"exact.uy", [](RunConfig& c, const Value& v) { c.exact_uy = as_expression(v, "uy"); }},

        {"stabilization.mu1", [](RunConfig& c, const Value& v) { c.stabilization.mu1 = as_number(v, "mu1"); }},
        {"stabilization.mu2", [](RunConfig& c, const Value& v) { c.stabilization.mu2 = as_number(v, "mu2"); }},
        {"stabilization.c_I", [](RunConfig& c, const Value& v) { c.stabilization.c_I = as_number(v, "c_I"); }},
        {"stabilization.alpha_star",
         [](RunConfig& c, const Value& v) { c.stabilization.alpha_star = as_number(v, "alpha_star"); }},
        {"stabilization.gamma_star",
         [](RunConfig& c, const Value& v) { c.stabilization.gamma_star = as_number(v, "gamma_star"); }},
        {"stabilization.s_star",
         [](RunConfig& c, const Value& v) { c.stabilization.s_star = as_number(v, "s_star"); }},
        {"stabilization.stab_scale_a",
         [](RunConfig& c, const Value& v) { c.stabilization.stab_scale_a = as_number(v, "stab_scale_a"); }},
        {"stabilization.stab_scale_c",
         [](RunConfig& c, const Value& v) { c.stabilization.stab_scale_c = as_number(v, "stab_scale_c"); }},
        {"stabilization.stab_scale_sym",
         [](RunConfig& c, const Value& v) { c.stabilization.stab_scale_sym = as_number(v, "stab_scale_sym"); }},
        {"stabilization.stab_scale_supg",
         [](RunConfig& c, const Value& v) { c.stabilization.stab_scale_supg = as_number(v, "stab_scale_supg"); }},
        {"stabilization.delta_mode", [](RunConfig& c, const Value& v) {
             as_string(v, "delta_mode");
             c.stabilization.delta_mode = wrap(v, [](const std::string& s) { return parse_delta_mode(s); });
         }},

        {"solver.method", [](RunConfig& c, const Value& v) {
             as_string(v, "method");
             c.solver.method = wrap(v, [](const std::string& s) { return parse_solver_kind(s); });
         }},
        {"solver.tol", [](RunConfig& c, const Value& v) { c.solver.tol = as_number(v, "tol"); }},
        {"solver.max_iter",
         [](RunConfig& c, const Value& v) { c.solver.max_iter = static_cast<int>(as_count(v, "max_iter")); }},
        {"solver.threads",
         [](RunConfig& c, const Value& v) { c.threads = static_cast<unsigned>(as_count(v, "threads")); }},

        {"study.levels", [](RunConfig& c, const Value& v) { c.levels = static_cast<int>(as_integer(v, "levels")); }},
        {"study.output", [](RunConfig& c, const Value& v) { c.output = as_string(v, "output"); }},
    };
    const auto it = table.find(section + "." + key);
    if (it == table.end()) {
        const std::string where = section.empty() ? "top level" : "section [" + section + "]";
        throw ParseError("unknown key '" + key + "' at " + where, v.line);
    }
    it->second(cfg, v);
}

} // namespace

ScalarField compile_scalar(const std::string& text)
{
    auto e = std::make_shared<const expr::Expression>(expr::Expression::parse(text));
    return [e](const Point& x) { return (*e)(x.x(), x.y()); };
}

RunConfig parse_config(std::istream& in)
{
    static const char* sections[] = {"mesh", "coefficients", "exact", "stabilization", "solver", "study"};
    RunConfig cfg;
    std::string section;
    std::map<std::string, std::size_t> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view s = trim(strip_comment(raw));
        if (s.empty())
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ParseError("malformed section header", line);
            const std::string name(trim(s.substr(1, s.size() - 2)));
            if (std::find(std::begin(sections), std::end(sections), name) == std::end(sections))
                throw ParseError("unknown section [" + name + "]", line);
            section = name;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line);
        const std::string key(trim(s.substr(0, eq)));
        if (key.empty())
            throw ParseError("missing key before '='", line);
        const std::string full = section + "." + key;
        if (const auto prev = seen.find(full); prev != seen.end())
            throw ParseError("duplicate key '" + key + "' (first set on line " +
                                 std::to_string(prev->second) + ")",
                             line);
        seen[full] = line;
        apply(cfg, section, key, parse_value(trim(s.substr(eq + 1)), line));
    }
    try {
        cfg.validate();
    } catch (const ParameterError& e) {
        throw ParseError(e.what(), line);
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("config not found: " + path);
    return parse_config(in);
}

void RunConfig::validate() const
{
    if (k < 1 || k > 4)
        throw ParameterError("k must lie in [1, 4], got " + std::to_string(k));
    if (levels < 1 || levels > 8)
        throw ParameterError("levels must lie in [1, 8], got " + std::to_string(levels));
    if (!(epsilon > 0.0))
        throw ParameterError("eps must be positive");
    if (!(c0 > 0.0))
        throw ParameterError("c0 must be positive");
    if (!(solver.tol > 0.0))
        throw ParameterError("solver tolerance must be positive");
    if (!(mesh.perturb >= 0.0 && mesh.perturb < 0.5))
        throw ParameterError("perturb must lie in [0, 0.5)");
    stabilization.validate();
    for (const std::string* e : {&bx, &by, &c, &f, &ub})
        (void)expr::Expression::parse(*e);
    for (const auto* e : {&divb, &exact_u, &exact_ux, &exact_uy})
        if (*e)
            (void)expr::Expression::parse(**e);
}

CoefficientSet RunConfig::coefficients() const
{
    CoefficientSet cs;
    cs.epsilon = epsilon;
    cs.c0 = c0;
    const ScalarField fx = compile_scalar(bx);
    const ScalarField fy = compile_scalar(by);
    cs.b = [fx, fy](const Point& x) { return Point(fx(x), fy(x)); };
    cs.c = compile_scalar(c);
    cs.f = compile_scalar(f);
    cs.u_b = compile_scalar(ub);
    if (divb)
        cs.div_b = compile_scalar(*divb);
    return cs;
}

std::optional<ExactSolution> RunConfig::exact() const
{
    if (!exact_u && !exact_ux && !exact_uy)
        return std::nullopt;
    if (!exact_u || !exact_ux || !exact_uy)
        throw UsageError("[exact] needs u, ux and uy together");
    return ExactSolution{compile_scalar(*exact_u), compile_scalar(*exact_ux), compile_scalar(*exact_uy)};
}

PolyMesh RunConfig::build_mesh() const
{
    if (!mesh_file.empty()) {
        std::ifstream in(mesh_file);
        if (!in)
            throw UsageError("mesh file not found: " + mesh_file);
        return read_mesh(in);
    }
    return generate_mesh(mesh.kind, mesh.nx, mesh.ny, mesh.perturb, mesh.seed);
}

StudyConfig RunConfig::study() const
{
    if (!mesh_file.empty())
        throw UsageError("a convergence study refines generated meshes; remove [mesh] file");
    const auto ex = exact();
    if (!ex)
        throw UsageError("a convergence study needs [exact] u, ux and uy");
    StudyConfig s;
    s.mesh = mesh;
    s.k = k;
    s.levels = levels;
    s.coeffs = coefficients();
    s.exact = *ex;
    s.stabilization = stabilization;
    s.solver = solver;
    s.threads = threads;
    return s;
}

} // namespace vemcdr
