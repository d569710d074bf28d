#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "loglab/benchmarks.hpp"
#include "loglab/cn_solver.hpp"
#include "loglab/error.hpp"
#include "loglab/expansion.hpp"
#include "loglab/fitting.hpp"
#include "loglab/grid.hpp"
#include "loglab/portfolio.hpp"
#include "loglab/quadrature.hpp"
#include "loglab/report.hpp"
#include "loglab/residuals.hpp"
#include "loglab/version.hpp"

namespace loglab {

enum class Experiment {
    ExpandEval,
    RemainderAudit,
    FitFunction,
    FitPde,
    PdeResidual,
    HeatBench,
    RcdBench,
    PortfolioBench,
};

inline const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::ExpandEval: return "expand-eval";
        case Experiment::RemainderAudit: return "remainder-audit";
        case Experiment::FitFunction: return "fit-function";
        case Experiment::FitPde: return "fit-pde";
        case Experiment::PdeResidual: return "pde-residual";
        case Experiment::HeatBench: return "heat-bench";
        case Experiment::RcdBench: return "rcd-bench";
        case Experiment::PortfolioBench: return "portfolio-bench";
    }
    return "unknown";
}

inline const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = {
        Experiment::ExpandEval,   Experiment::RemainderAudit,
        Experiment::FitFunction,  Experiment::FitPde,
        Experiment::PdeResidual,  Experiment::HeatBench,
        Experiment::RcdBench,     Experiment::PortfolioBench,
    };
    return all;
}

inline Experiment parse_experiment(const std::string& name) {
    for (Experiment e : all_experiments())
        if (name == experiment_name(e)) return e;
    fail(ErrorCode::ConfigParse, "unknown experiment '" + name + "'");
}

// Per-experiment parameter schema: key, type ('r' real, 'i' integer,
// 's' string), default rendering. Unknown keys and unparsable values are
// rejected up front so a typo cannot silently fall back to a default.
struct ParamDef {
    const char* key;
    char type;
    const char* def;
};

inline const std::vector<ParamDef>& experiment_schema(Experiment e) {
    static const std::vector<ParamDef> expand_eval = {
        {"a1", 'r', "1"},     {"a2", 'r', "-1"},   {"a3", 'r', "2"},
        {"x_min", 'r', "0.5"}, {"x_max", 'r', "5"}, {"nx", 'i', "101"},
    };
    static const std::vector<ParamDef> remainder_audit = {
        {"c", 'r', "1"},        {"alpha", 'r', "1"},   {"f_c", 'r', "0"},
        {"fprime_c", 'r', "1"}, {"x_min", 'r', "1"},   {"x_max", 'r', "3"},
        {"nx", 'i', "41"},      {"abs_tol", 'r', "1e-10"},
        {"max_depth", 'i', "40"},
    };
    static const std::vector<ParamDef> fit_function = {
        {"target", 's', "sin"},    {"x_min", 'r', "0.1"},
        {"x_max", 'r', "2"},       {"n", 'i', "200"},
        {"gen_a1", 'r', "0.5"},    {"gen_a2", 'r', "-1"},
        {"gen_a3", 'r', "2"},      {"gen_c", 'r', "3"},
        {"n_shift_probes", 'i', "64"}, {"refine_tol", 'r', "1e-10"},
    };
    static const std::vector<ParamDef> fit_pde = {
        {"equation", 's', "rcd"}, {"r", 'r', "0.05"},
        {"sigma", 'r', "0.2"},    {"k", 'r', "1"},
        {"x_min", 'r', "0.5"},    {"x_max", 'r', "5"},
        {"nx", 'i', "41"},        {"t_min", 'r', "0"},
        {"t_max", 'r', "1"},      {"nt", 'i', "21"},
        {"bc_source", 's', "linear"},
        {"bc_penalty_weight", 'r', "1000"},
        {"n_shift_probes", 'i', "64"}, {"refine_tol", 'r', "1e-10"},
        {"fix_a2", 's', ""},
    };
    static const std::vector<ParamDef> pde_residual = {
        {"equation", 's', "rcd"}, {"r", 'r', "0.05"},
        {"sigma", 'r', "0.2"},    {"k", 'r', "1"},
        {"a1", 'r', "1"},         {"a2", 'r', "-1"},
        {"a3", 'r', "2"},         {"x_min", 'r', "0.5"},
        {"x_max", 'r', "5"},      {"nx", 'i', "101"},
        {"t_min", 'r', "0"},      {"t_max", 'r', "1"},
        {"nt", 'i', "101"},
    };
    static const std::vector<ParamDef> heat_bench = {
        {"k", 'r', "1"},          {"x_min", 'r', "0"},
        {"x_max", 'r', "1"},      {"T", 'r', "0.5"},
        {"nx", 'i', "201"},       {"nt", 'i', "201"},
        {"conv_base_nx", 'i', "26"}, {"conv_levels", 'i', "4"},
    };
    static const std::vector<ParamDef> rcd_bench = {
        {"r", 'r', "0.05"},       {"sigma", 'r', "0.2"},
        {"x_min", 'r', "0.5"},    {"x_max", 'r', "8"},
        {"T", 'r', "1"},          {"nx", 'i', "201"},
        {"nt", 'i', "201"},       {"conv_base_nx", 'i', "26"},
        {"conv_levels", 'i', "4"}, {"strike", 'r', "2"},
        {"smooth_eps", 'r', "0.25"},
    };
    static const std::vector<ParamDef> portfolio_bench = {
        {"mu", 'r', "0.1"},       {"r", 'r', "0.05"},
        {"sigma", 'r', "0.2"},    {"T", 'r', "1"},
        {"x0", 'r', "1"},         {"n_paths", 'i', "10000"},
        {"n_steps", 'i', "252"},  {"a1", 'r', "1"},
        {"a2", 'r', "-1"},        {"a3", 'r', "2"},
        {"gamma", 'r', "1"},      {"pi_const", 'r', "0"},
    };
    switch (e) {
        case Experiment::ExpandEval: return expand_eval;
        case Experiment::RemainderAudit: return remainder_audit;
        case Experiment::FitFunction: return fit_function;
        case Experiment::FitPde: return fit_pde;
        case Experiment::PdeResidual: return pde_residual;
        case Experiment::HeatBench: return heat_bench;
        case Experiment::RcdBench: return rcd_bench;
        case Experiment::PortfolioBench: return portfolio_bench;
    }
    return expand_eval;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_real(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (!t.empty()) {
        char* end = nullptr;
        const double x = std::strtod(t.c_str(), &end);
        if (end == t.c_str() + t.size() && std::isfinite(x)) return x;
    }
    fail(ErrorCode::TypeMismatch,
         "value for key '" + key + "' is not a finite real number: '" + v + "'");
}

inline long long parse_integer(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (!t.empty()) {
        char* end = nullptr;
        const long long x = std::strtoll(t.c_str(), &end, 10);
        if (end == t.c_str() + t.size()) return x;
    }
    fail(ErrorCode::TypeMismatch,
         "value for key '" + key + "' is not an integer: '" + v + "'");
}

inline void check_param_type(const ParamDef& def, const std::string& value) {
    if (def.type == 'r')
        (void)parse_real(def.key, value);
    else if (def.type == 'i')
        (void)parse_integer(def.key, value);
}

}  // namespace detail

struct RunConfig {
    Experiment experiment = Experiment::ExpandEval;
    // Schema-ordered (key, raw value) pairs, defaults filled in. Raw strings
    // are kept so the manifest echoes exactly what was configured.
    std::vector<std::pair<std::string, std::string>> params;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 42;

    const std::string& str(const std::string& key) const {
        for (const auto& [k, v] : params)
            if (k == key) return v;
        fail(ErrorCode::UnknownKey, "internal: key '" + key + "' not in config");
    }
    double real(const std::string& key) const {
        return detail::parse_real(key, str(key));
    }
    long long integer(const std::string& key) const {
        return detail::parse_integer(key, str(key));
    }
};

// Line-oriented key=value parsing: '#' starts a comment, blank lines are
// skipped, a repeated key within one source is an error (silent last-wins
// hides typos in hand-edited files).
inline std::vector<std::pair<std::string, std::string>> parse_kv_text(
    const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigParse,
                 "line " + std::to_string(lineno) + ": expected key=value, got '" +
                     line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            fail(ErrorCode::ConfigParse,
                 "line " + std::to_string(lineno) + ": empty key");
        for (const auto& [k, v] : out)
            if (k == key)
                fail(ErrorCode::DuplicateKey,
                     "key '" + key + "' assigned more than once");
        out.emplace_back(key, value);
    }
    return out;
}

// Validates merged key-value pairs against the experiment's schema and
// produces a typed, default-filled config. "experiment", "seed" and "out"
// are core keys accepted for every experiment.
inline RunConfig make_run_config(
    Experiment e, const std::vector<std::pair<std::string, std::string>>& kv) {
    RunConfig c;
    c.experiment = e;
    const auto& schema = experiment_schema(e);
    std::vector<std::pair<std::string, std::string>> provided;
    for (const auto& [k, v] : kv) {
        if (k == "experiment") continue;
        if (k == "seed") {
            const long long s = detail::parse_integer("seed", v);
            if (s < 0)
                fail(ErrorCode::TypeMismatch,
                     "value for key 'seed' must be nonnegative, got '" + v + "'");
            c.seed = static_cast<std::uint64_t>(s);
            continue;
        }
        if (k == "out") {
            c.output_dir = v;
            continue;
        }
        const ParamDef* def = nullptr;
        for (const auto& d : schema)
            if (k == d.key) {
                def = &d;
                break;
            }
        if (!def)
            fail(ErrorCode::UnknownKey, "unknown key '" + k + "' for experiment '" +
                                            experiment_name(e) + "'");
        detail::check_param_type(*def, v);
        provided.emplace_back(k, v);
    }
    for (const auto& d : schema) {
        const std::string* v = nullptr;
        for (const auto& [k, pv] : provided)
            if (k == d.key) {
                v = &pv;
                break;
            }
        c.params.emplace_back(d.key, v ? *v : d.def);
    }
    return c;
}

// Full config-file reading: the text must name its experiment.
inline RunConfig parse_config(const std::string& text) {
    const auto kv = parse_kv_text(text);
    for (const auto& [k, v] : kv)
        if (k == "experiment") return make_run_config(parse_experiment(v), kv);
    fail(ErrorCode::ConfigParse, "config must set experiment=<name>");
}

namespace detail {

struct OutputFile {
    std::string name;
    std::string content;
};

struct ExperimentResult {
    std::vector<OutputFile> files;
    std::vector<std::pair<std::string, std::string>> summary;
};

inline std::string bool_str(bool b) { return b ? "true" : "false"; }

inline ExperimentResult run_expand_eval(const RunConfig& c) {
    const TiedLogExpansion1D e(c.real("a1"), c.real("a2"), c.real("a3"));
    const Grid1D g(c.real("x_min"), c.real("x_max"),
                   static_cast<int>(c.integer("nx")));
    CsvBuilder csv("x,value,d_dx,d2_dx2");
    double max_abs = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        const double v = eval(e, x);
        csv.row({fmt_num(x), fmt_num(v), fmt_num(d_dx(e, x)),
                 fmt_num(d2_dx2(e, x))});
        max_abs = std::max(max_abs, std::abs(v));
    }
    ExperimentResult res;
    res.files.push_back({"expand_eval.csv", csv.str()});
    res.summary.emplace_back("nodes", std::to_string(g.n));
    res.summary.emplace_back("max_abs_value", fmt_num(max_abs));
    return res;
}

inline ExperimentResult run_remainder_audit(const RunConfig& c) {
    const DerivationConstants d(c.real("c"), c.real("alpha"), c.real("f_c"),
                                c.real("fprime_c"));
    const QuadratureSpec q(c.real("abs_tol"),
                           static_cast<int>(c.integer("max_depth")));
    const Grid1D g(c.real("x_min"), c.real("x_max"),
                   static_cast<int>(c.integer("nx")));
    CsvBuilder csv("x,closed_form,quadrature,abs_diff");
    double max_diff = 0.0, max_diff_frozen = 0.0;
    double cf_last = 0.0, run_last = 0.0, frozen_last = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        const double cf = remainder_closed_form(d, x);
        const double qd = double_quadrature_remainder(d, x, q);
        const double fz = double_quadrature_remainder_frozen(d, x, q);
        csv.row({fmt_num(x), fmt_num(cf), fmt_num(qd),
                 fmt_num(std::abs(cf - qd))});
        max_diff = std::max(max_diff, std::abs(cf - qd));
        max_diff_frozen = std::max(max_diff_frozen, std::abs(cf - fz));
        cf_last = cf;
        run_last = qd;
        frozen_last = fz;
    }
    ExperimentResult res;
    res.files.push_back({"remainder_audit.csv", csv.str()});
    res.summary.emplace_back("max_abs_diff", fmt_num(max_diff));
    res.summary.emplace_back("max_abs_diff_frozen_reading", fmt_num(max_diff_frozen));
    res.summary.emplace_back("closed_form_at_x_max", fmt_num(cf_last));
    res.summary.emplace_back("running_reading_at_x_max", fmt_num(run_last));
    res.summary.emplace_back("frozen_reading_at_x_max", fmt_num(frozen_last));
    return res;
}

inline void append_fit_csv(ExperimentResult& res, const FitReport& rep) {
    CsvBuilder csv("a1,a2,a3,rmse,max_abs_err,n_samples,converged");
    csv.row({fmt_num(rep.a1), fmt_num(rep.a2), fmt_num(rep.a3),
             fmt_num(rep.rmse), fmt_num(rep.max_abs_err),
             std::to_string(rep.n_samples), bool_str(rep.converged)});
    res.files.push_back({"fit_report.csv", csv.str()});
    res.summary.emplace_back("a1", fmt_num(rep.a1));
    res.summary.emplace_back("a2", fmt_num(rep.a2));
    res.summary.emplace_back("a3", fmt_num(rep.a3));
    res.summary.emplace_back("rmse", fmt_num(rep.rmse));
    res.summary.emplace_back("max_abs_err", fmt_num(rep.max_abs_err));
    res.summary.emplace_back("converged", bool_str(rep.converged));
    res.summary.emplace_back("shift_by_convention", bool_str(rep.shift_by_convention));
}

inline ExperimentResult run_fit_function(const RunConfig& c) {
    const Grid1D g(c.real("x_min"), c.real("x_max"),
                   static_cast<int>(c.integer("n")));
    const std::string& target = c.str("target");
    std::vector<Sample1D> samples;
    samples.reserve(static_cast<std::size_t>(g.n));
    if (target == "sin") {
        for (int i = 0; i < g.n; ++i)
            samples.push_back({g.node(i), std::sin(g.node(i))});
    } else if (target == "tied") {
        const TiedLogExpansion1D gen(c.real("gen_a1"), c.real("gen_a2"),
                                     c.real("gen_a3"));
        for (int i = 0; i < g.n; ++i)
            samples.push_back({g.node(i), eval(gen, g.node(i))});
    } else if (target == "constant") {
        const double v = c.real("gen_c");
        for (int i = 0; i < g.n; ++i) samples.push_back({g.node(i), v});
    } else {
        fail(ErrorCode::TypeMismatch,
             "value for key 'target' must be sin, tied or constant, got '" +
                 target + "'");
    }
    FitConfig cfg;
    cfg.n_shift_probes = static_cast<int>(c.integer("n_shift_probes"));
    cfg.refine_tol = c.real("refine_tol");
    const FitReport rep = fit_function_1d(samples, cfg);
    ExperimentResult res;
    res.summary.emplace_back("target", target);
    append_fit_csv(res, rep);
    return res;
}

inline PdeEquation equation_from_config(const RunConfig& c) {
    const std::string& eq = c.str("equation");
    if (eq == "rcd") return RCDParams(c.real("r"), c.real("sigma"));
    if (eq == "heat") return HeatParams(c.real("k"));
    fail(ErrorCode::TypeMismatch,
         "value for key 'equation' must be rcd or heat, got '" + eq + "'");
}

inline ExperimentResult run_fit_pde(const RunConfig& c) {
    const PdeEquation eq = equation_from_config(c);
    const Grid1D xg(c.real("x_min"), c.real("x_max"),
                    static_cast<int>(c.integer("nx")));
    const Grid1D tg(c.real("t_min"), c.real("t_max"),
                    static_cast<int>(c.integer("nt")));
    const std::string& src = c.str("bc_source");
    const double r = c.real("r");
    const double k = c.real("k");
    auto bc_value = [&](double x, double t) {
        if (src == "linear") return x;
        if (src == "exponential") return std::exp(r * t);
        if (src == "quadratic") return x * x + 2.0 * k * t;
        fail(ErrorCode::TypeMismatch,
             "value for key 'bc_source' must be linear, exponential or "
             "quadratic, got '" + src + "'");
    };
    std::vector<BoundarySample> boundary;
    for (int it = 0; it < tg.n; ++it) {
        const double t = tg.node(it);
        boundary.push_back({xg.x_min, t, bc_value(xg.x_min, t)});
        boundary.push_back({xg.x_max, t, bc_value(xg.x_max, t)});
    }
    const bool is_rcd = std::holds_alternative<RCDParams>(eq);
    const double anchor_t = is_rcd ? tg.x_max : tg.x_min;
    for (int ix = 1; ix + 1 < xg.n; ++ix)
        boundary.push_back({xg.node(ix), anchor_t, bc_value(xg.node(ix), anchor_t)});

    FitConfig cfg;
    cfg.n_shift_probes = static_cast<int>(c.integer("n_shift_probes"));
    cfg.refine_tol = c.real("refine_tol");
    cfg.bc_penalty_weight = c.real("bc_penalty_weight");
    if (!c.str("fix_a2").empty()) cfg.fix_a2 = c.real("fix_a2");
    const FitReport rep = fit_pde_residual(eq, xg, tg, boundary, cfg);
    ExperimentResult res;
    res.summary.emplace_back("equation", c.str("equation"));
    res.summary.emplace_back("bc_source", src);
    append_fit_csv(res, rep);
    return res;
}

inline ExperimentResult run_pde_residual(const RunConfig& c) {
    const PdeEquation eq = equation_from_config(c);
    const TiedLogExpansion2D e(c.real("a1"), c.real("a2"), c.real("a3"));
    const Grid1D xg(c.real("x_min"), c.real("x_max"),
                    static_cast<int>(c.integer("nx")));
    const Grid1D tg(c.real("t_min"), c.real("t_max"),
                    static_cast<int>(c.integer("nt")));
    const ResidualReport rep = residual_sweep(e, eq, xg, tg, nullptr);
    CsvBuilder csv("x,t,residual");
    for (const auto& s : rep.samples)
        csv.row({fmt_num(s.x), fmt_num(s.t), fmt_num(s.residual)});
    ExperimentResult res;
    res.files.push_back({"residual_report.csv", csv.str()});
    res.summary.emplace_back("equation", c.str("equation"));
    res.summary.emplace_back("rms_residual", fmt_num(rep.rms_residual));
    res.summary.emplace_back("max_abs_residual", fmt_num(rep.max_abs_residual));
    res.summary.emplace_back("rows_emitted", std::to_string(rep.samples.size()));
    return res;
}

// Successive-refinement self-convergence: each level doubles the interval
// counts, diffs are max-norm gaps between consecutive levels on the shared
// (coarser) nodes, and the order estimate comes from the finest pair.
struct ConvergenceStudy {
    std::vector<int> nx;
    std::vector<double> diffs;   // diffs[l] = gap between level l and l+1
    std::vector<double> orders;  // log2(diffs[j] / diffs[j+1])
    double observed_order = 0.0;
};

template <class SolveAtLevel>
inline ConvergenceStudy self_convergence(int base_nx, int levels,
                                         const SolveAtLevel& solve) {
    if (levels < 3)
        fail(ErrorCode::InvalidConstants,
             "convergence study needs at least 3 levels, got " + std::to_string(levels));
    if (base_nx < 5)
        fail(ErrorCode::InvalidConstants,
             "convergence study base grid too small: " + std::to_string(base_nx));
    ConvergenceStudy st;
    std::vector<std::vector<double>> slices;
    for (int l = 0; l < levels; ++l) {
        const int nx = (base_nx - 1) * (1 << l) + 1;
        st.nx.push_back(nx);
        slices.push_back(solve(nx));
    }
    for (int l = 0; l + 1 < levels; ++l) {
        double d = 0.0;
        const auto& coarse = slices[static_cast<std::size_t>(l)];
        const auto& fine = slices[static_cast<std::size_t>(l + 1)];
        for (std::size_t i = 0; i < coarse.size(); ++i)
            d = std::max(d, std::abs(fine[2 * i] - coarse[i]));
        st.diffs.push_back(d);
    }
    for (std::size_t j = 0; j + 1 < st.diffs.size(); ++j)
        st.orders.push_back(std::log2(st.diffs[j] / st.diffs[j + 1]));
    st.observed_order = st.orders.back();
    return st;
}

inline void append_convergence_rows(CsvBuilder& csv, const ConvergenceStudy& st) {
    for (std::size_t l = 0; l < st.diffs.size(); ++l)
        csv.row({"self_convergence_diff", std::to_string(st.nx[l + 1]),
                 std::to_string(st.nx[l + 1]), fmt_num(st.diffs[l])});
    for (std::size_t j = 0; j < st.orders.size(); ++j)
        csv.row({"observed_order", std::to_string(st.nx[j + 2]),
                 std::to_string(st.nx[j + 2]), fmt_num(st.orders[j])});
}

inline ExperimentResult run_heat_bench(const RunConfig& c) {
    const double k = c.real("k");
    const double x_min = c.real("x_min");
    const double x_max = c.real("x_max");
    const double T = c.real("T");
    const int nx = static_cast<int>(c.integer("nx"));
    const int nt = static_cast<int>(c.integer("nt"));
    if (!(T > 0.0)) fail(ErrorCode::ParamDomain, "T must be positive");

    // Quadratic-in-x, linear-in-t solution: both CN averages are exact for
    // it, so the only error left is roundoff.
    auto exact = [&](double x, double t) { return x * x + 2.0 * k * t; };
    const Grid1D xg(x_min, x_max, nx);
    const Grid1D tg(0.0, T, nt);
    const CNSolution sol = cn_solve_heat(
        k, [&](double x) { return exact(x, 0.0); },
        [&](double t) { return exact(x_min, t); },
        [&](double t) { return exact(x_max, t); }, xg, tg);
    double manuf_err = 0.0;
    for (int it = 0; it < nt; ++it)
        for (int ix = 0; ix < nx; ++ix)
            manuf_err = std::max(manuf_err, std::abs(sol.value(it, ix) -
                                                     exact(xg.node(ix), tg.node(it))));

    // Smooth heat-kernel data for the order study; kernel offset t0 keeps
    // the initial slice resolvable on the coarsest grid.
    const double t0 = 0.05;
    const double xc = 0.5 * (x_min + x_max);
    auto kernel = [&](double x, double t) {
        const double s = 4.0 * k * (t + t0);
        return std::exp(-(x - xc) * (x - xc) / s) / std::sqrt(3.14159265358979323846 * s);
    };
    const auto study = self_convergence(
        static_cast<int>(c.integer("conv_base_nx")),
        static_cast<int>(c.integer("conv_levels")), [&](int n) {
            const Grid1D xgl(x_min, x_max, n);
            const Grid1D tgl(0.0, T, n);
            const CNSolution s = cn_solve_heat(
                k, [&](double x) { return kernel(x, 0.0); },
                [&](double t) { return kernel(x_min, t); },
                [&](double t) { return kernel(x_max, t); }, xgl, tgl);
            std::vector<double> slice(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                slice[static_cast<std::size_t>(i)] = s.value(n - 1, i);
            return slice;
        });

    CsvBuilder csv("case,nx,nt,value");
    csv.row({"manufactured_max_abs_error", std::to_string(nx), std::to_string(nt),
             fmt_num(manuf_err)});
    append_convergence_rows(csv, study);
    ExperimentResult res;
    res.files.push_back({"heat_bench.csv", csv.str()});
    res.summary.emplace_back("manufactured_max_abs_error", fmt_num(manuf_err));
    res.summary.emplace_back("observed_order", fmt_num(study.observed_order));
    return res;
}

inline ExperimentResult run_rcd_bench(const RunConfig& c) {
    const double r = c.real("r");
    const double sigma = c.real("sigma");
    const double x_min = c.real("x_min");
    const double x_max = c.real("x_max");
    const double T = c.real("T");
    const int nx = static_cast<int>(c.integer("nx"));
    const int nt = static_cast<int>(c.integer("nt"));
    if (!(T > 0.0)) fail(ErrorCode::ParamDomain, "T must be positive");
    const Grid1D xg(x_min, x_max, nx);
    const Grid1D tg(0.0, T, nt);

    // V = x is killed exactly by the operator (including the one-sided edge
    // rows), so the march preserves it to roundoff.
    const CNSolution lin =
        cn_solve_rcd(r, sigma, [](double x) { return x; }, xg, tg);
    double lin_err = 0.0;
    for (int it = 0; it < nt; ++it)
        for (int ix = 0; ix < nx; ++ix)
            lin_err = std::max(lin_err, std::abs(lin.value(it, ix) - xg.node(ix)));

    // V = e^{rt}: x-independent, exercises the reaction term and the CN
    // rational approximation of e^{-r dt} (error O((r dt)^3) per step).
    const double erT = std::exp(r * T);
    const CNSolution expo =
        cn_solve_rcd(r, sigma, [&](double) { return erT; }, xg, tg);
    double exp_err = 0.0;
    for (int it = 0; it < nt; ++it) {
        const double ex = std::exp(r * tg.node(it));
        for (int ix = 0; ix < nx; ++ix)
            exp_err = std::max(exp_err, std::abs(expo.value(it, ix) - ex));
    }

    // Smoothed-kink terminal data for the order study: the hard kink would
    // drag the measured order below 2 without changing what the solver does.
    const double K = c.real("strike");
    const double eps = c.real("smooth_eps");
    if (!(eps > 0.0)) fail(ErrorCode::ParamDomain, "smooth_eps must be positive");
    auto payoff = [&](double x) {
        const double d = x - K;
        return 0.5 * (d + std::sqrt(d * d + eps * eps));
    };
    const auto study = self_convergence(
        static_cast<int>(c.integer("conv_base_nx")),
        static_cast<int>(c.integer("conv_levels")), [&](int n) {
            const Grid1D xgl(x_min, x_max, n);
            const Grid1D tgl(0.0, T, n);
            const CNSolution s = cn_solve_rcd(r, sigma, payoff, xgl, tgl);
            std::vector<double> slice(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) slice[static_cast<std::size_t>(i)] = s.value(0, i);
            return slice;
        });

    CsvBuilder csv("case,nx,nt,value");
    csv.row({"manufactured_linear_max_abs_error", std::to_string(nx),
             std::to_string(nt), fmt_num(lin_err)});
    csv.row({"manufactured_exponential_max_abs_error", std::to_string(nx),
             std::to_string(nt), fmt_num(exp_err)});
    append_convergence_rows(csv, study);
    ExperimentResult res;
    res.files.push_back({"rcd_bench.csv", csv.str()});
    res.summary.emplace_back("manufactured_linear_max_abs_error", fmt_num(lin_err));
    res.summary.emplace_back("manufactured_exponential_max_abs_error", fmt_num(exp_err));
    res.summary.emplace_back("observed_order", fmt_num(study.observed_order));
    return res;
}

inline ExperimentResult run_portfolio_bench(const RunConfig& c) {
    const MarketParams m(c.real("mu"), c.real("r"), c.real("sigma"), c.real("T"),
                         c.real("x0"));
    const int n_paths = static_cast<int>(c.integer("n_paths"));
    const int n_steps = static_cast<int>(c.integer("n_steps"));
    const std::vector<Policy> policies = {
        Policy(AnsatzPolicy(TiedLogExpansion2D(c.real("a1"), c.real("a2"),
                                               c.real("a3")))),
        Policy(MertonPolicy(c.real("gamma"))),
        Policy(ConstantPolicy(c.real("pi_const"))),
    };
    const auto ests = policy_tournament(m, policies, n_paths, n_steps, c.seed);

    CsvBuilder csv("policy,n_paths,n_steps,seed,mean_utility,std_err,bankrupt_paths");
    for (std::size_t i = 0; i < policies.size(); ++i) {
        const auto& est = ests[i];
        csv.row({policy_label(policies[i]), std::to_string(est.n_paths),
                 std::to_string(n_steps), std::to_string(est.seed),
                 fmt_num(est.mean_utility), fmt_num(est.std_err),
                 std::to_string(est.bankrupt_paths)});
    }
    const double excess = m.mu - m.r;
    const double closed_form =
        std::log(m.x0) + (m.r + excess * excess / (2.0 * m.sigma * m.sigma)) * m.T;
    ExperimentResult res;
    res.files.push_back({"mc_report.csv", csv.str()});
    res.summary.emplace_back("closed_form_merton_log_utility", fmt_num(closed_form));
    static const char* names[] = {"ansatz", "merton", "constant"};
    for (std::size_t i = 0; i < ests.size(); ++i) {
        res.summary.emplace_back(std::string(names[i]) + "_mean_utility",
                                 fmt_num(ests[i].mean_utility));
        res.summary.emplace_back(std::string(names[i]) + "_std_err",
                                 fmt_num(ests[i].std_err));
        res.summary.emplace_back(std::string(names[i]) + "_bankrupt_paths",
                                 std::to_string(ests[i].bankrupt_paths));
    }
    res.summary.emplace_back("merton_gap_to_closed_form",
                             fmt_num(ests[1].mean_utility - closed_form));
    return res;
}

inline ExperimentResult dispatch_experiment(const RunConfig& c) {
    switch (c.experiment) {
        case Experiment::ExpandEval: return run_expand_eval(c);
        case Experiment::RemainderAudit: return run_remainder_audit(c);
        case Experiment::FitFunction: return run_fit_function(c);
        case Experiment::FitPde: return run_fit_pde(c);
        case Experiment::PdeResidual: return run_pde_residual(c);
        case Experiment::HeatBench: return run_heat_bench(c);
        case Experiment::RcdBench: return run_rcd_bench(c);
        case Experiment::PortfolioBench: return run_portfolio_bench(c);
    }
    fail(ErrorCode::ConfigParse, "unhandled experiment");
}

}  // namespace detail

struct RunManifest {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::pair<std::string, std::string>> files;  // (name, sha256)
    std::filesystem::path output_dir;
    std::filesystem::path manifest_path;

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    }
};

// Executes one experiment: writes its CSV outputs into output_dir, then a
// manifest.txt with the echoed configuration, summary scalars and a sha256
// line per output file. The manifest is written last so its presence
// certifies complete outputs.
inline RunManifest run(const RunConfig& c) {
    const auto t_start = std::chrono::steady_clock::now();
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec)
        fail(ErrorCode::Io,
             "cannot create output directory " + c.output_dir.string() + ": " +
                 ec.message());

    const detail::ExperimentResult result = detail::dispatch_experiment(c);

    Manifest man;
    man.set("tool", std::string(kToolName) + "/" + kToolVersion);
    man.set("experiment", experiment_name(c.experiment));
    man.set("seed", std::to_string(c.seed));
    for (const auto& [k, v] : c.params) man.set("param." + k, v);
    for (const auto& [k, v] : result.summary) man.set("summary." + k, v);

    for (const auto& f : result.files) {
        write_file(c.output_dir / f.name, f.content);
        man.add_file(f.name, f.content);
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
    man.set("duration_ms", std::to_string(elapsed));

    const auto manifest_path = c.output_dir / "manifest.txt";
    write_file(manifest_path, man.text());
    return RunManifest{man.entries(), man.files(), c.output_dir, manifest_path};
}

}  // namespace loglab
