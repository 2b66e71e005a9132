#include "ato/solver.hpp"

#include "glpk_api.hpp"

#include <dlfcn.h>

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <mutex>

#ifndef ATO_GLPK_DEFAULT_PATH
#define ATO_GLPK_DEFAULT_PATH ""
#endif

namespace ato {

namespace glpk {

namespace {

struct Loader {
    Api table{};
    bool ok = false;
    std::string path;
    std::string error;
};

/// The wheel-bundled GLPK has mangled sibling dependencies that are not on
/// any default search path, so everything next to it is pre-loaded first.
void preload_siblings(const std::filesystem::path& lib) {
    std::error_code ec;
    auto dir = lib.parent_path();
    if (dir.empty() || !std::filesystem::is_directory(dir, ec)) return;
    // Two passes: a sibling may depend on another sibling.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("lib", 0) != 0 || name.find(".so") == std::string::npos) continue;
            if (entry.path() == lib) continue;
            dlopen(entry.path().c_str(), RTLD_NOW | RTLD_GLOBAL);
        }
    }
}

template <typename F>
bool resolve(void* handle, F& fn, const char* name, std::string& error) {
    fn = reinterpret_cast<F>(dlsym(handle, name));
    if (!fn) {
        error = std::string("missing GLPK symbol: ") + name;
        return false;
    }
    return true;
}

Loader load_library() {
    Loader out;
    std::vector<std::string> candidates;
    if (const char* env = std::getenv("ATO_GLPK_PATH")) {
        candidates.emplace_back(env); // exclusive override
    } else {
        if (ATO_GLPK_DEFAULT_PATH[0] != '\0') candidates.emplace_back(ATO_GLPK_DEFAULT_PATH);
        candidates.emplace_back("libglpk.so.40");
        candidates.emplace_back("libglpk.so");
    }

    void* handle = nullptr;
    for (const std::string& cand : candidates) {
        if (cand.find('/') != std::string::npos) preload_siblings(cand);
        handle = dlopen(cand.c_str(), RTLD_NOW | RTLD_GLOBAL);
        if (handle) {
            out.path = cand;
            break;
        }
        const char* why = dlerror();
        out.error = why ? why : "dlopen failed";
    }
    if (!handle) {
        out.error = "cannot load GLPK shared library (" + out.error + ")";
        return out;
    }

    Api& t = out.table;
    bool all = resolve(handle, t.create_prob, "glp_create_prob", out.error) &&
               resolve(handle, t.delete_prob, "glp_delete_prob", out.error) &&
               resolve(handle, t.set_obj_dir, "glp_set_obj_dir", out.error) &&
               resolve(handle, t.add_rows, "glp_add_rows", out.error) &&
               resolve(handle, t.add_cols, "glp_add_cols", out.error) &&
               resolve(handle, t.set_row_bnds, "glp_set_row_bnds", out.error) &&
               resolve(handle, t.set_col_bnds, "glp_set_col_bnds", out.error) &&
               resolve(handle, t.set_obj_coef, "glp_set_obj_coef", out.error) &&
               resolve(handle, t.set_col_kind, "glp_set_col_kind", out.error) &&
               resolve(handle, t.load_matrix, "glp_load_matrix", out.error) &&
               resolve(handle, t.simplex, "glp_simplex", out.error) &&
               resolve(handle, t.get_status, "glp_get_status", out.error) &&
               resolve(handle, t.get_obj_val, "glp_get_obj_val", out.error) &&
               resolve(handle, t.get_col_prim, "glp_get_col_prim", out.error) &&
               resolve(handle, t.intopt, "glp_intopt", out.error) &&
               resolve(handle, t.mip_status, "glp_mip_status", out.error) &&
               resolve(handle, t.mip_obj_val, "glp_mip_obj_val", out.error) &&
               resolve(handle, t.mip_col_val, "glp_mip_col_val", out.error) &&
               resolve(handle, t.init_smcp, "glp_init_smcp", out.error) &&
               resolve(handle, t.init_iocp, "glp_init_iocp", out.error) &&
               resolve(handle, t.term_out, "glp_term_out", out.error) &&
               resolve(handle, t.version, "glp_version", out.error) &&
               resolve(handle, t.ios_mip_gap, "glp_ios_mip_gap", out.error) &&
               resolve(handle, t.ios_reason, "glp_ios_reason", out.error) &&
               resolve(handle, t.ios_heur_sol, "glp_ios_heur_sol", out.error) &&
               resolve(handle, t.free_env, "glp_free_env", out.error);
    if (!all) return out;

    // ABI sanity: the control structs are declared locally, so verify the
    // library writes the documented defaults where this build expects them.
    glp_iocp probe;
    t.init_iocp(&probe);
    if (std::abs(probe.tol_int - 1e-5) > 1e-12 || std::abs(probe.tol_obj - 1e-7) > 1e-14 ||
        probe.out_frq != 5000) {
        out.error = "GLPK control-struct layout mismatch; refusing to use backend";
        return out;
    }

    out.ok = true;
    return out;
}

const Loader& loader() {
    static Loader instance = load_library();
    return instance;
}

} // namespace

const Api& api() {
    const Loader& l = loader();
    if (!l.ok) throw SolverUnavailable("GLPK backend unavailable: " + l.error);
    return l.table;
}

bool available() { return loader().ok; }

std::string resolved_path() { return loader().path; }

void release_thread_state() {
    if (loader().ok) loader().table.free_env();
}

} // namespace glpk

std::string solve_status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::gap_limit: return "gap-limit";
    case SolveStatus::time_limit: return "time-limit";
    case SolveStatus::infeasible: return "infeasible";
    }
    return "?";
}

void SolverConfig::validate() const {
    require(time_limit_s > 0.0, "solver: time limit must be positive");
    require(relative_gap >= 0.0 && relative_gap < 1.0, "solver: relative gap outside [0,1)");
    require(threads >= 1, "solver: thread count must be >= 1");
    require(backend == "glpk", "solver: unknown backend '" + backend + "'");
}

bool solver_backend_available() { return glpk::available(); }

std::string solver_backend_description() {
    if (!glpk::available()) return "unavailable";
    return std::string("GLPK ") + glpk::api().version() + " (" + glpk::resolved_path() + ")";
}

void solver_release_thread_state() { glpk::release_thread_state(); }

namespace {

struct GlpkProblem {
    glp_prob* p;
    const glpk::Api& g;
    explicit GlpkProblem(const glpk::Api& api) : p(api.create_prob()), g(api) {}
    ~GlpkProblem() { g.delete_prob(p); }
    GlpkProblem(const GlpkProblem&) = delete;
    GlpkProblem& operator=(const GlpkProblem&) = delete;
};

struct CallbackState {
    double gap = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double>* incumbent = nullptr; // 1-based array when present
    bool injected = false;
};

void intopt_callback(glp_tree* t, void* info) {
    auto* state = static_cast<CallbackState*>(info);
    const glpk::Api& g = glpk::api();
    double gap = g.ios_mip_gap(t);
    if (std::isfinite(gap)) state->gap = gap;
    if (state->incumbent && !state->injected && g.ios_reason(t) == GLP_IHEUR) {
        g.ios_heur_sol(t, state->incumbent->data());
        state->injected = true;
    }
}

int clamp_time_ms(double seconds) {
    double ms = seconds * 1000.0;
    if (ms >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
    return std::max(1, static_cast<int>(ms));
}

} // namespace

MilpSolution solve_milp(const MilpModel& model, const SolverConfig& cfg,
                        const IncumbentHeuristic& heuristic) {
    cfg.validate();
    model.validate();
    const glpk::Api& g = glpk::api();
    g.term_out(GLP_OFF);

    GlpkProblem prob(g);
    g.set_obj_dir(prob.p, model.maximize ? GLP_MAX : GLP_MIN);

    const int n = model.num_vars();
    const int m = model.num_rows();
    g.add_cols(prob.p, n);
    bool any_integer = false;
    for (int v = 0; v < n; ++v) {
        const MilpVar& var = model.vars()[v];
        double lo = var.lower;
        double up = var.upper;
        if (var.kind == VarKind::integer_nonneg) {
            any_integer = true;
            g.set_col_kind(prob.p, v + 1, GLP_IV);
            // GLPK requires integral bounds on integer columns.
            lo = std::ceil(lo - 1e-9);
            if (std::isfinite(up)) up = std::floor(up + 1e-9);
        }
        if (std::isfinite(up))
            g.set_col_bnds(prob.p, v + 1, lo == up ? GLP_FX : GLP_DB, lo, up);
        else
            g.set_col_bnds(prob.p, v + 1, GLP_LO, lo, 0.0);
        g.set_obj_coef(prob.p, v + 1, var.obj);
    }

    std::size_t nnz = 0;
    for (const MilpRow& r : model.rows()) nnz += r.terms.size();
    std::vector<int> ia(nnz + 1, 0), ja(nnz + 1, 0);
    std::vector<double> ar(nnz + 1, 0.0);
    if (m > 0) {
        g.add_rows(prob.p, m);
        std::size_t k = 1;
        for (int r = 0; r < m; ++r) {
            const MilpRow& row = model.rows()[r];
            switch (row.sense) {
            case RowSense::eq: g.set_row_bnds(prob.p, r + 1, GLP_FX, row.rhs, row.rhs); break;
            case RowSense::le: g.set_row_bnds(prob.p, r + 1, GLP_UP, 0.0, row.rhs); break;
            case RowSense::ge: g.set_row_bnds(prob.p, r + 1, GLP_LO, row.rhs, 0.0); break;
            }
            for (const MilpTerm& t : row.terms) {
                ia[k] = r + 1;
                ja[k] = t.var + 1;
                ar[k] = t.coef;
                ++k;
            }
        }
        g.load_matrix(prob.p, static_cast<int>(nnz), ia.data(), ja.data(), ar.data());
    }

    MilpSolution out;
    const auto started = std::chrono::steady_clock::now();
    auto remaining_s = [&]() {
        double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return std::max(1.0, cfg.time_limit_s - used);
    };

    // Root LP first. Branch and bound then runs without the MIP presolver
    // so the heuristic callback addresses the original columns. Dual
    // simplex with primal fallback: the primal stalls badly on the larger
    // multistage relaxations.
    glp_smcp sp;
    g.init_smcp(&sp);
    sp.msg_lev = GLP_MSG_OFF;
    sp.presolve = GLP_ON;
    sp.meth = GLP_DUALP;
    sp.tm_lim = clamp_time_ms(cfg.time_limit_s);
    int rc = g.simplex(prob.p, &sp);
    int status = g.get_status(prob.p);
    if (rc == GLP_ENOPFS || status == GLP_NOFEAS) {
        out.status = SolveStatus::infeasible;
        return out;
    }
    if (rc == GLP_ENODFS || status == GLP_UNBND)
        throw Error("solver: LP relaxation is unbounded");
    if (rc == GLP_ETMLIM) throw Error("solver: LP time limit reached without optimum");
    if (rc != 0 || status != GLP_OPT)
        throw Error("solver: LP failed (rc=" + std::to_string(rc) +
                    ", status=" + std::to_string(status) + ")");

    if (!any_integer) {
        out.status = SolveStatus::optimal;
        out.objective = g.get_obj_val(prob.p);
        out.gap = 0.0;
        out.values.resize(n);
        for (int v = 0; v < n; ++v) out.values[v] = g.get_col_prim(prob.p, v + 1);
        return out;
    }

    // Candidate incumbent from the LP point; injected only if it replays
    // cleanly (the backend does not check feasibility itself).
    std::vector<double> incumbent1; // 1-based for glp_ios_heur_sol
    CallbackState state;
    if (heuristic) {
        std::vector<double> lp_values(n);
        for (int v = 0; v < n; ++v) lp_values[v] = g.get_col_prim(prob.p, v + 1);
        std::vector<double> candidate = heuristic(lp_values);
        if (static_cast<int>(candidate.size()) == n && model.max_violation(candidate) <= 1e-9) {
            incumbent1.resize(n + 1, 0.0);
            for (int v = 0; v < n; ++v) incumbent1[v + 1] = candidate[v];
            state.incumbent = &incumbent1;
        }
    }

    glp_iocp ip;
    g.init_iocp(&ip);
    ip.msg_lev = GLP_MSG_OFF;
    ip.presolve = GLP_OFF; // reuse the optimal basis from the simplex above
    ip.tm_lim = clamp_time_ms(remaining_s());
    ip.mip_gap = cfg.relative_gap;
    ip.tol_int = 1e-7; // tight enough to round exactly, above simplex precision
    ip.cb_func = intopt_callback;
    ip.cb_info = &state;

    rc = g.intopt(prob.p, &ip);
    status = g.mip_status(prob.p);

    if (rc == GLP_ENOPFS || rc == GLP_ENODFS || status == GLP_NOFEAS) {
        out.status = SolveStatus::infeasible;
        return out;
    }
    const bool have_solution = status == GLP_OPT || status == GLP_FEAS;
    if (rc == GLP_ETMLIM) {
        if (!have_solution) throw Error("solver: time limit reached without a feasible solution");
        out.status = SolveStatus::time_limit;
    } else if (rc == GLP_EMIPGAP) {
        out.status = SolveStatus::gap_limit;
    } else if (rc == 0 && have_solution) {
        out.status = status == GLP_OPT ? SolveStatus::optimal : SolveStatus::gap_limit;
    } else {
        throw Error("solver: MIP failed (rc=" + std::to_string(rc) +
                    ", status=" + std::to_string(status) + ")");
    }

    out.objective = g.mip_obj_val(prob.p);
    out.gap = out.status == SolveStatus::optimal
                  ? 0.0
                  : (std::isfinite(state.gap) ? state.gap : cfg.relative_gap);
    out.values.resize(n);
    for (int v = 0; v < n; ++v) out.values[v] = g.mip_col_val(prob.p, v + 1);
    return out;
}

} // namespace ato
