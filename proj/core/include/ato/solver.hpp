#pragma once

#include "ato/common.hpp"
#include "ato/milp.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ato {

/// Thrown when no MILP backend can be loaded.
class SolverUnavailable : public Error {
public:
    explicit SolverUnavailable(const std::string& what) : Error(what) {}
};

enum class SolveStatus { optimal, gap_limit, time_limit, infeasible };

std::string solve_status_name(SolveStatus s);

struct SolverConfig {
    double time_limit_s = 120.0;
    double relative_gap = 1e-4;
    int threads = 1; // reserved; the GLPK backend is single-threaded
    std::string backend = "glpk";

    void validate() const;
};

struct MilpSolution {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    double gap = 0.0;                // relative gap at termination (0 when proven optimal)
    std::vector<double> values;      // per variable, creation order; empty when infeasible
};

/// Maps the LP-relaxation values to a candidate integer solution. When the
/// candidate is feasible it is handed to the backend as a starting
/// incumbent; branch and bound then only has to close the bound.
using IncumbentHeuristic = std::function<std::vector<double>(const std::vector<double>&)>;

/// Solves the model with the configured backend. Throws SolverUnavailable
/// when the backend cannot be loaded and ato::Error on backend failures;
/// infeasibility is reported through the status, not an exception.
MilpSolution solve_milp(const MilpModel& model, const SolverConfig& cfg,
                        const IncumbentHeuristic& heuristic = {});

bool solver_backend_available();
std::string solver_backend_description();

/// Frees per-thread backend state; call at the end of worker threads.
void solver_release_thread_state();

} // namespace ato
