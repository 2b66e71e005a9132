#include "ato/serialize.hpp"

#include "ato/experiment.hpp"
#include "ato/rng.hpp"

#include <doctest.h>

#include <sstream>

using namespace ato;

TEST_CASE("instance round-trips through JSON") {
    Instance a = generate_instance(InstanceConfig{}, 5);
    compute_capacities(a, 1.2, std::vector<double>(35, 100.0));
    a.initial_inventory.assign(60, 3);
    std::string text = instance_to_json(a);
    Instance b = instance_from_json(text);
    CHECK(a.component_cost == b.component_cost);
    CHECK(a.price == b.price);
    CHECK(a.gozinto == b.gozinto);
    CHECK(a.capacity == b.capacity);
    CHECK(a.machine_time == b.machine_time);
    CHECK(a.family_of_item == b.family_of_item);
    CHECK(a.initial_inventory == b.initial_inventory);
}

TEST_CASE("demand model and history round-trip") {
    DemandModel m = canonical_demand_model(CorrelationMode::family, {12, 7, 5, 3, 3, 1, 1, 1, 1, 1});
    DemandModel m2 = demand_model_from_json(demand_model_to_json(m));
    CHECK(m2.base.mu1 == m.base.mu1);
    CHECK(m2.season.factors == m.season.factors);
    CHECK(m2.weights == m.weights);
    CHECK(m2.family_sizes == m.family_sizes);
    CHECK((m2.correlation_mode == CorrelationMode::family));

    RngStream rng(9);
    History h = generate_history(m, 3, rng);
    History h2 = history_from_json(history_to_json(h));
    CHECK(h.observations == h2.observations);
    CHECK(h.start_month == h2.start_month);
}

TEST_CASE("value approximations round-trip with full precision") {
    SeasonalValueApprox v;
    v.monthly = false;
    ValueApprox va = ValueApprox::identity(2);
    va.components[0] = PiecewiseValue{{0.0, 1.5, 7.25}, {2.125, 0.33333333333333331, -0.125}};
    v.approx = {va};
    SeasonalValueApprox v2 = value_approx_from_json(value_approx_to_json(v));
    CHECK(v2.monthly == false);
    CHECK(v2.approx[0].components[0].breakpoints == va.components[0].breakpoints);
    CHECK(v2.approx[0].components[0].slopes == va.components[0].slopes);
}

TEST_CASE("malformed documents are rejected with context") {
    CHECK_THROWS_WITH_AS(instance_from_json("not json"), doctest::Contains("malformed"),
                         Error);
    CHECK_THROWS_WITH_AS(instance_from_json("{}"), doctest::Contains("missing field"), Error);
    CHECK_THROWS_AS(demand_model_from_json(R"({"mu1": "abc"})"), Error);
    CHECK_THROWS_AS(history_from_json(R"({"start_month": 99, "observations": []})"), Error);
}

TEST_CASE("history CSV has a month column and one row per observation") {
    DemandModel m = canonical_demand_model(CorrelationMode::independent, {2, 1});
    RngStream rng(3);
    History h = generate_history(m, 1, rng);
    std::ostringstream os;
    write_history_csv(os, h);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "month,item_0,item_1,item_2");
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 12);
}

TEST_CASE("tree dumps list nodes in stored depth-first order") {
    History h;
    h.start_month = 0;
    for (int t = 0; t < 24; ++t) h.observations.push_back({t, t + 1});
    ScenarioTree tree = build_tree(TreeKind::MP_N, h, 0, {0, 0}, 3);
    std::string text = tree_to_json(tree);
    // ids appear in ascending order in the dump
    std::size_t at = 0;
    for (int id = 0; id < tree.num_nodes(); ++id) {
        std::string needle = "\"id\":" + std::to_string(id);
        // dump(2) inserts a space after the colon
        needle = "\"id\": " + std::to_string(id);
        std::size_t pos = text.find(needle, at);
        REQUIRE(pos != std::string::npos);
        at = pos;
    }
    CHECK(text.find("\"kind\": \"MP_n\"") != std::string::npos);
}

TEST_CASE("content hashes are stable and collision-separated on edits") {
    std::string a = "the same text";
    CHECK(content_hash(a) == content_hash(a));
    CHECK(content_hash(a) != content_hash("the same text!"));
    CHECK(content_hash(a).size() == 16);
}

TEST_CASE("experiment config parses the documented fields") {
    std::string text = R"({
      "instance": {"num_components": 18, "num_end_items": 10, "num_machines": 2,
                    "family_sizes": [4,3,2], "family_component_counts": [6,5,4],
                    "num_outcast_items": 1},
      "correlation": "family",
      "years": [3, 5],
      "gammas": [1.0, 1.3],
      "policies": [{"kind": "FOSVA"}, {"kind": "MP_n", "tail": 3}, {"kind": "SS", "alpha": 10}],
      "fosva": {"iterations": 5, "smoothing": 0.5},
      "solver": {"time_limit_s": 30, "relative_gap": 0.0001},
      "simulation": {"horizon_months": 12, "replications": 2},
      "seed": 99,
      "threads": 2
    })";
    ExperimentConfig cfg = experiment_config_from_json(text);
    CHECK(cfg.instance_config.num_components == 18);
    CHECK(cfg.years_list == std::vector<int>{3, 5});
    CHECK(cfg.gammas == std::vector<double>{1.0, 1.3});
    REQUIRE(cfg.policies.size() == 3);
    CHECK(cfg.policies[1].kind == "MP_n");
    CHECK(cfg.policies[1].tail == 3);
    CHECK(cfg.policies[2].alpha == 10.0);
    CHECK(cfg.fosva.iterations == 5);
    CHECK(cfg.simulation.replications == 2);
    CHECK(cfg.seed == 99);
    cfg.validate();

    CHECK_THROWS_AS(experiment_config_from_json("{]"), Error);
    ExperimentConfig bad = cfg;
    bad.policies[0].kind = "WAT";
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("records CSV round-trips") {
    std::vector<RecordSummary> records;
    RecordSummary r;
    r.policy = "MS3_3";
    r.years = 10;
    r.gamma = 1.3;
    r.replication = 4;
    r.profit = 123.456;
    r.avg_inventory = 78.9;
    r.lost_sales = 12.0;
    r.pi_profit = 456.0;
    r.pi_avg_inventory = 44.0;
    records.push_back(r);
    auto parsed = records_from_csv(records_to_csv(records));
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].policy == "MS3_3");
    CHECK(parsed[0].years == 10);
    CHECK(parsed[0].gamma == doctest::Approx(1.3));
    CHECK(parsed[0].profit == doctest::Approx(123.456));
    CHECK(parsed[0].pi_profit == doctest::Approx(456.0));
}
