#pragma once

#include "ato/fosva.hpp"
#include "ato/instance.hpp"
#include "ato/models.hpp"
#include "ato/scenario.hpp"
#include "ato/solver.hpp"

namespace ato {

/// Default sampling cap: three times the average one-period component
/// requirement (floored at one piece for components no item uses).
std::vector<double> default_inventory_cap(const Instance& inst,
                                          const std::vector<double>& mean_demand);

/// Trains the terminal-inventory value approximation on two-stage solves.
/// Monthly mode trains one approximation per calendar month on that month's
/// two-stage tree (root demand is the month's rounded empirical mean, the
/// second stage holds the following month's observations); pooled mode
/// trains a single approximation on the all-observations tree. Months train
/// independently and in parallel when `threads` allows.
SeasonalValueApprox train_fosva(const Instance& inst, const History& history,
                                const FosvaConfig& cfg, const SolverConfig& solver_cfg,
                                int threads = 1, TrainStats* stats = nullptr);

} // namespace ato
