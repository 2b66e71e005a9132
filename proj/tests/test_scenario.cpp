#include "ato/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace ato;

namespace {

/// Deterministic little history: years * 12 rows over `items` items with
/// recognizable per-month values.
History make_history(int years, int items, int salt = 0) {
    History h;
    h.start_month = 0;
    for (int t = 0; t < years * 12; ++t) {
        std::vector<int> row(items);
        for (int j = 0; j < items; ++j) row[j] = 10 * (t % 12) + j + (salt + t / 12) % 3;
        h.observations.push_back(std::move(row));
    }
    return h;
}

std::vector<int> zeros(int n) { return std::vector<int>(n, 0); }

} // namespace

TEST_CASE("grouping by month splits a ten-year history evenly") {
    History h = make_history(10, 3);
    auto by_month = group_history_by_month(h);
    for (int m = 0; m < 12; ++m) CHECK(by_month[m].size() == 10);

    History one = make_history(1, 3);
    auto single = group_history_by_month(one);
    for (int m = 0; m < 12; ++m) CHECK(single[m].size() == 1);
}

TEST_CASE("grouping preserves the observation multiset") {
    History h = make_history(5, 2, 1);
    h.start_month = 3; // months wrap
    auto by_month = group_history_by_month(h);
    std::vector<std::vector<int>> regrouped;
    for (int m = 0; m < 12; ++m)
        for (const auto& row : by_month[m]) regrouped.push_back(row);
    std::vector<std::vector<int>> original = h.observations;
    std::sort(regrouped.begin(), regrouped.end());
    std::sort(original.begin(), original.end());
    CHECK(regrouped == original);
}

TEST_CASE("empirical month mean matches direct summation") {
    History h = make_history(10, 3);
    auto by_month = group_history_by_month(h);
    for (int m = 0; m < 12; ++m) {
        auto mean = empirical_month_mean(h, m);
        for (int j = 0; j < 3; ++j) {
            double direct = 0.0;
            for (const auto& row : by_month[m]) direct += row[j];
            direct /= static_cast<double>(by_month[m].size());
            CHECK(mean[j] == doctest::Approx(direct).epsilon(1e-12));
        }
    }

    History single = make_history(1, 2);
    auto mean0 = empirical_month_mean(single, 4);
    CHECK(mean0[0] == doctest::Approx(single.observations[4][0]));
}

TEST_CASE("TS tree: root plus one child per next-month observation") {
    History h = make_history(10, 3);
    std::vector<int> root{7, 8, 9};
    ScenarioTree tree = build_tree(TreeKind::TS, h, 4, root);
    CHECK(tree.num_nodes() == 11);
    CHECK(tree.nodes[0].demand == root);
    CHECK(tree.num_stages() == 2);
    auto by_month = group_history_by_month(h);
    for (int k = 0; k < 10; ++k) {
        CHECK(tree.nodes[1 + k].prob == doctest::Approx(0.1));
        CHECK(tree.nodes[1 + k].demand == by_month[5][k]);
        CHECK(tree.nodes[1 + k].parent == 0);
    }
}

TEST_CASE("TS_noS pools the whole history") {
    History h = make_history(10, 2);
    ScenarioTree tree = build_tree(TreeKind::TS_NOS, h, 0, zeros(2));
    CHECK(tree.num_nodes() == 1 + 120);
    for (int n = 1; n < tree.num_nodes(); ++n)
        CHECK(tree.nodes[n].prob == doctest::Approx(1.0 / 120.0));
}

TEST_CASE("MP_n adds a mean tail below every scenario") {
    History h = make_history(5, 2);
    ScenarioTree tree = build_tree(TreeKind::MP_N, h, 0, zeros(2), 3);
    // 1 root + 5 children + 5 * 2 tail nodes
    CHECK(tree.num_nodes() == 1 + 5 + 10);
    CHECK(tree.num_stages() == 4);

    auto by_month = group_history_by_month(h);
    auto mean_of = [&](int month) {
        auto mean = empirical_month_mean(by_month, month);
        std::vector<int> r(mean.size());
        for (std::size_t j = 0; j < mean.size(); ++j)
            r[j] = static_cast<int>(std::lround(mean[j]));
        return r;
    };
    auto children = tree.children();
    for (int child : children[0]) {
        REQUIRE(children[child].size() == 1);
        int t2 = children[child][0];
        CHECK(tree.nodes[t2].demand == mean_of(2));
        CHECK(tree.nodes[t2].prob == doctest::Approx(0.2));
        REQUIRE(children[t2].size() == 1);
        int t3 = children[t2][0];
        CHECK(tree.nodes[t3].demand == mean_of(3));
        CHECK(children[t3].empty());
    }
}

TEST_CASE("MS3 crosses observations and MS3 with tail extends them") {
    History h = make_history(10, 2);
    ScenarioTree ms3 = build_tree(TreeKind::MS3, h, 0, zeros(2));
    CHECK(ms3.num_nodes() == 1 + 10 + 100);
    CHECK(ms3.leaves().size() == 100);
    for (int leaf : ms3.leaves()) CHECK(ms3.nodes[leaf].prob == doctest::Approx(0.01));

    ScenarioTree tailed = build_tree(TreeKind::MS3_N, h, 0, zeros(2), 4);
    CHECK(tailed.num_nodes() == 1 + 10 + 100 + 200);
    CHECK(tailed.num_stages() == 5);
    CHECK(tailed.leaves().size() == 100);

    TreeOptions same_year;
    same_year.ms3_same_year = true;
    ScenarioTree paired = build_tree(TreeKind::MS3, h, 0, zeros(2), 0, same_year);
    CHECK(paired.num_nodes() == 1 + 10 + 10);
    CHECK(paired.leaves().size() == 10);
}

TEST_CASE("DET is a branching-1 chain of monthly means") {
    History h = make_history(3, 2);
    ScenarioTree det = build_tree(TreeKind::DET, h, 10, zeros(2), 12);
    CHECK(det.num_nodes() == 13);
    for (int n = 1; n < det.num_nodes(); ++n) {
        CHECK(det.nodes[n].parent == n - 1);
        CHECK(det.nodes[n].prob == doctest::Approx(1.0));
    }
    // Month arithmetic wraps: first future month after 10 is 11, then 0.
    auto mean11 = empirical_month_mean(h, 11);
    CHECK(det.nodes[1].demand[0] == static_cast<int>(std::lround(mean11[0])));
    auto mean0 = empirical_month_mean(h, 0);
    CHECK(det.nodes[2].demand[0] == static_cast<int>(std::lround(mean0[0])));
}

TEST_CASE("stage probability mass is 1 for every kind") {
    History h = make_history(5, 2);
    std::vector<std::pair<TreeKind, int>> kinds{
        {TreeKind::TS, 0},   {TreeKind::TS_NOS, 0}, {TreeKind::MP_N, 4},
        {TreeKind::MS3, 0},  {TreeKind::MS3_N, 3},  {TreeKind::DET, 6},
    };
    for (auto [kind, tail] : kinds) {
        ScenarioTree tree = build_tree(kind, h, 7, zeros(2), tail);
        std::map<int, double> mass;
        for (const TreeNode& n : tree.nodes) mass[n.stage] += n.prob;
        for (const auto& [stage, total] : mass)
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        tree.validate(); // parents one stage up, aligned leaves
    }
}

TEST_CASE("identical observations make TS informationally deterministic") {
    History h;
    h.start_month = 0;
    for (int t = 0; t < 36; ++t) h.observations.push_back({5, 6});
    ScenarioTree tree = build_tree(TreeKind::TS, h, 0, {5, 6});
    for (int n = 1; n < tree.num_nodes(); ++n) CHECK(tree.nodes[n].demand == std::vector<int>{5, 6});
}

TEST_CASE("chains from explicit paths carry the path verbatim") {
    std::vector<std::vector<int>> path{{1, 2}, {3, 4}, {5, 6}};
    ScenarioTree chain = build_chain_from_path(path);
    CHECK(chain.num_nodes() == 3);
    for (int t = 0; t < 3; ++t) {
        CHECK(chain.nodes[t].demand == path[t]);
        CHECK(chain.nodes[t].stage == t);
    }
}

TEST_CASE("bad tree requests are rejected") {
    History h = make_history(2, 2);
    CHECK_THROWS_AS(build_tree(TreeKind::MP_N, h, 0, zeros(2), 0), Error);
    CHECK_THROWS_AS(build_tree(TreeKind::MS3_N, h, 0, zeros(2), 2), Error);
    CHECK_THROWS_AS(build_tree(TreeKind::DET, h, 0, zeros(2), 0), Error);
    CHECK_THROWS_AS(build_tree(TreeKind::TS, h, 12, zeros(2)), Error);
    History empty;
    CHECK_THROWS_AS(build_tree(TreeKind::TS, empty, 0, zeros(2)), Error);
    CHECK_THROWS_AS(build_tree(TreeKind::TS, h, 0, zeros(3)), Error); // dimension
}

TEST_CASE("node ids are depth-first preorder") {
    History h = make_history(3, 2);
    ScenarioTree tree = build_tree(TreeKind::MS3_N, h, 0, zeros(2), 3);
    // Parent of every node precedes it, and each stochastic child's tail is
    // emitted before the next sibling (preorder).
    auto children = tree.children();
    int expected = 1;
    std::vector<int> stack{0};
    // replay DFS and compare ids
    std::vector<int> dfs;
    std::vector<int> to_visit{0};
    while (!to_visit.empty()) {
        int at = to_visit.back();
        to_visit.pop_back();
        dfs.push_back(at);
        for (auto it = children[at].rbegin(); it != children[at].rend(); ++it)
            to_visit.push_back(*it);
    }
    (void)expected;
    for (std::size_t k = 0; k < dfs.size(); ++k) CHECK(dfs[k] == static_cast<int>(k));
}
