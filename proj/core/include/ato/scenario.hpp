#pragma once

#include "ato/common.hpp"
#include "ato/demand.hpp"

#include <array>
#include <string>
#include <vector>

namespace ato {

enum class TreeKind { TS, TS_NOS, MP_N, MS3, MS3_N, DET };

std::string tree_kind_name(TreeKind kind);

struct TreeNode {
    int id = 0;
    int parent = -1; // -1 for the root
    double prob = 1.0; // unconditional
    std::vector<int> demand;
    int stage = 0;
};

/// Rooted demand tree. Nodes are stored in depth-first preorder, so parents
/// always precede children and node ids equal vector positions.
struct ScenarioTree {
    std::vector<TreeNode> nodes;
    TreeKind kind = TreeKind::TS;
    int tail_length = 0;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_items() const { return nodes.empty() ? 0 : static_cast<int>(nodes[0].demand.size()); }
    int num_stages() const;
    std::vector<int> leaves() const;
    std::vector<std::vector<int>> children() const;

    /// Structural checks: root probability 1, per-stage probability mass 1,
    /// parents one stage up, leaves aligned at the last stage.
    void validate() const;
};

/// Per-calendar-month observation lists; entry m holds every demand vector
/// the history recorded in month m.
using MonthObservations = std::array<std::vector<std::vector<int>>, 12>;

MonthObservations group_history_by_month(const History& history);

/// Arithmetic mean of the month's observations (unrounded).
std::vector<double> empirical_month_mean(const History& history, int month);
std::vector<double> empirical_month_mean(const MonthObservations& by_month, int month);

struct TreeOptions {
    /// Pair month+1 and month+2 observations from the same historical year
    /// instead of crossing them (N scenarios instead of N^2).
    bool ms3_same_year = false;
};

/// Builds the requested structure from historical observations.
///
/// tail_length is the number of future periods the tree covers:
///   TS, TS_NOS  -> ignored (always one future stage)
///   MP_N        -> one stochastic stage plus tail_length-1 mean nodes (>= 2)
///   MS3         -> ignored (two stochastic stages)
///   MS3_N       -> two stochastic stages plus tail_length-2 mean nodes (>= 3)
///   DET         -> tail_length mean nodes in a chain (>= 1)
///
/// root_demand is the demand realized at the current period; month
/// arithmetic wraps modulo 12.
ScenarioTree build_tree(TreeKind kind, const History& history, int current_month,
                        const std::vector<int>& root_demand, int tail_length = 0,
                        const TreeOptions& options = {});

/// Branching-1 chain carrying a known demand path; path[0] is the root.
/// Used for the perfect-information benchmark.
ScenarioTree build_chain_from_path(const std::vector<std::vector<int>>& path);

} // namespace ato
