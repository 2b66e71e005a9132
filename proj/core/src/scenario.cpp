#include "ato/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ato {

std::string tree_kind_name(TreeKind kind) {
    switch (kind) {
    case TreeKind::TS: return "TS";
    case TreeKind::TS_NOS: return "TS_noS";
    case TreeKind::MP_N: return "MP_n";
    case TreeKind::MS3: return "MS3";
    case TreeKind::MS3_N: return "MS3_n";
    case TreeKind::DET: return "DET";
    }
    return "?";
}

int ScenarioTree::num_stages() const {
    int max_stage = 0;
    for (const TreeNode& n : nodes) max_stage = std::max(max_stage, n.stage);
    return max_stage + 1;
}

std::vector<std::vector<int>> ScenarioTree::children() const {
    std::vector<std::vector<int>> ch(nodes.size());
    for (const TreeNode& n : nodes)
        if (n.parent >= 0) ch[n.parent].push_back(n.id);
    return ch;
}

std::vector<int> ScenarioTree::leaves() const {
    std::vector<bool> has_child(nodes.size(), false);
    for (const TreeNode& n : nodes)
        if (n.parent >= 0) has_child[n.parent] = true;
    std::vector<int> out;
    for (const TreeNode& n : nodes)
        if (!has_child[n.id]) out.push_back(n.id);
    return out;
}

void ScenarioTree::validate() const {
    require(!nodes.empty(), "tree: empty");
    require(nodes[0].parent == -1 && nodes[0].stage == 0, "tree: node 0 must be the root");
    require(std::abs(nodes[0].prob - 1.0) <= 1e-12, "tree: root probability must be 1");

    std::map<int, double> stage_mass;
    const int items = num_items();
    for (const TreeNode& n : nodes) {
        require(n.id == static_cast<int>(&n - nodes.data()),
                "tree: node ids must index the node vector");
        require(static_cast<int>(n.demand.size()) == items, "tree: ragged demand vectors");
        require(n.prob > 0.0 && n.prob <= 1.0 + 1e-12, "tree: probability outside (0,1]");
        for (int d : n.demand) require(d >= 0, "tree: negative demand");
        if (n.id > 0) {
            require(n.parent >= 0 && n.parent < n.id, "tree: parent must precede child");
            require(nodes[n.parent].stage == n.stage - 1, "tree: parent must be one stage up");
        }
        stage_mass[n.stage] += n.prob;
    }
    for (const auto& [stage, mass] : stage_mass)
        require(std::abs(mass - 1.0) <= 1e-9,
                "tree: probability mass at stage " + std::to_string(stage) + " is not 1");

    const int last = num_stages() - 1;
    for (int leaf : leaves())
        require(nodes[leaf].stage == last, "tree: leaves must share the maximal stage");
}

MonthObservations group_history_by_month(const History& history) {
    history.validate();
    MonthObservations by_month;
    for (int row = 0; row < history.months(); ++row)
        by_month[history.month_of_row(row)].push_back(history.observations[row]);
    return by_month;
}

std::vector<double> empirical_month_mean(const MonthObservations& by_month, int month) {
    require(month >= 0 && month < 12, "month index must be in 0..11");
    const auto& obs = by_month[month];
    require(!obs.empty(), "no observations for month " + std::to_string(month));
    std::vector<double> mean(obs[0].size(), 0.0);
    for (const auto& row : obs)
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
    for (double& m : mean) m /= static_cast<double>(obs.size());
    return mean;
}

std::vector<double> empirical_month_mean(const History& history, int month) {
    return empirical_month_mean(group_history_by_month(history), month);
}

namespace {

std::vector<int> rounded(const std::vector<double>& mean) {
    std::vector<int> out(mean.size());
    for (std::size_t j = 0; j < mean.size(); ++j) out[j] = to_piece_count(mean[j]);
    return out;
}

int add_node(ScenarioTree& tree, int parent, double prob, std::vector<int> demand, int stage) {
    TreeNode n;
    n.id = tree.num_nodes();
    n.parent = parent;
    n.prob = prob;
    n.demand = std::move(demand);
    n.stage = stage;
    tree.nodes.push_back(std::move(n));
    return tree.nodes.back().id;
}

/// Appends a branching-1 chain of mean-demand nodes under `parent`,
/// inheriting its unconditional probability.
void add_mean_tail(ScenarioTree& tree, const MonthObservations& by_month, int parent,
                   int first_month, int first_stage, int length) {
    int at = parent;
    for (int t = 0; t < length; ++t) {
        int month = (first_month + t) % 12;
        at = add_node(tree, at, tree.nodes[at].prob,
                      rounded(empirical_month_mean(by_month, month)), first_stage + t);
    }
}

} // namespace

ScenarioTree build_tree(TreeKind kind, const History& history, int current_month,
                        const std::vector<int>& root_demand, int tail_length,
                        const TreeOptions& options) {
    require(current_month >= 0 && current_month < 12, "build_tree: bad month index");
    require(history.months() > 0, "build_tree: empty history");
    require(static_cast<int>(root_demand.size()) == history.num_items(),
            "build_tree: root demand dimension mismatch");

    const MonthObservations by_month = group_history_by_month(history);
    const int next = (current_month + 1) % 12;
    const int after = (current_month + 2) % 12;

    auto month_obs = [&](int m) -> const std::vector<std::vector<int>>& {
        require(!by_month[m].empty(),
                "build_tree: no observations for month " + std::to_string(m));
        return by_month[m];
    };

    ScenarioTree tree;
    tree.kind = kind;
    tree.tail_length = tail_length;
    add_node(tree, -1, 1.0, root_demand, 0);

    switch (kind) {
    case TreeKind::TS: {
        const auto& obs = month_obs(next);
        const double p = 1.0 / static_cast<double>(obs.size());
        for (const auto& d : obs) add_node(tree, 0, p, d, 1);
        tree.tail_length = 1;
        break;
    }
    case TreeKind::TS_NOS: {
        const int total = history.months();
        const double p = 1.0 / static_cast<double>(total);
        for (int m = 0; m < 12; ++m)
            for (const auto& d : by_month[m]) add_node(tree, 0, p, d, 1);
        tree.tail_length = 1;
        break;
    }
    case TreeKind::MP_N: {
        require(tail_length >= 2, "build_tree: MP_n requires tail_length >= 2");
        const auto& obs = month_obs(next);
        const double p = 1.0 / static_cast<double>(obs.size());
        for (const auto& d : obs) {
            int child = add_node(tree, 0, p, d, 1);
            add_mean_tail(tree, by_month, child, after, 2, tail_length - 1);
        }
        break;
    }
    case TreeKind::MS3:
    case TreeKind::MS3_N: {
        int tail = 0;
        if (kind == TreeKind::MS3_N) {
            require(tail_length >= 3, "build_tree: MS3_n requires tail_length >= 3");
            tail = tail_length - 2;
        } else {
            tree.tail_length = 2;
        }
        const auto& first = month_obs(next);
        const auto& second = month_obs(after);
        const double p1 = 1.0 / static_cast<double>(first.size());
        for (std::size_t a = 0; a < first.size(); ++a) {
            int child = add_node(tree, 0, p1, first[a], 1);
            if (options.ms3_same_year) {
                require(first.size() == second.size(),
                        "build_tree: same-year pairing needs equal month counts");
                int grand = add_node(tree, child, p1, second[a], 2);
                if (tail > 0)
                    add_mean_tail(tree, by_month, grand, (current_month + 3) % 12, 3, tail);
            } else {
                const double p2 = p1 / static_cast<double>(second.size());
                for (const auto& d : second) {
                    int grand = add_node(tree, child, p2, d, 2);
                    if (tail > 0)
                        add_mean_tail(tree, by_month, grand, (current_month + 3) % 12, 3, tail);
                }
            }
        }
        break;
    }
    case TreeKind::DET: {
        require(tail_length >= 1, "build_tree: DET requires tail_length >= 1");
        add_mean_tail(tree, by_month, 0, next, 1, tail_length);
        break;
    }
    }

    tree.validate();
    return tree;
}

ScenarioTree build_chain_from_path(const std::vector<std::vector<int>>& path) {
    require(!path.empty(), "build_chain_from_path: empty path");
    ScenarioTree tree;
    tree.kind = TreeKind::DET;
    tree.tail_length = static_cast<int>(path.size()) - 1;
    add_node(tree, -1, 1.0, path[0], 0);
    for (std::size_t t = 1; t < path.size(); ++t)
        add_node(tree, static_cast<int>(t) - 1, 1.0, path[t], static_cast<int>(t));
    tree.validate();
    return tree;
}

} // namespace ato
