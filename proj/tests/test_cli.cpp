#include "ato/serialize.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string out_file = (fs::temp_directory_path() / "ato_cli_out.txt").string();
    std::string cmd = env + " " + std::string(ATO_CLI_PATH) + " " + args + " > " + out_file +
                      " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string tiny_config(const fs::path& dir, int horizon, int replications,
                        const std::string& policies) {
    std::string text = R"({
      "instance": {"num_components": 5, "num_end_items": 3, "num_machines": 2,
                    "family_sizes": [2], "family_component_counts": [3],
                    "family_common_components": 1,
                    "num_outcast_items": 1, "mean_demand_sample_size": 200},
      "correlation": "independent",
      "years": [3],
      "gammas": [1.2],
      "policies": )" + policies +
                       R"(,
      "fosva": {"iterations": 2},
      "solver": {"time_limit_s": 20, "relative_gap": 0.001},
      "simulation": {"horizon_months": )" + std::to_string(horizon) +
                       R"(, "replications": )" + std::to_string(replications) + R"(},
      "seed": 12345,
      "threads": 2
    })";
    fs::path p = dir / "config.json";
    ato::write_text_file(p.string(), text);
    return p.string();
}

} // namespace

TEST_CASE("unknown subcommands exit with the usage code") {
    CHECK(run_cli("frobnicate").exit_code == 64);
    CHECK(run_cli("").exit_code == 64);
}

TEST_CASE("malformed configs exit with the data code") {
    fs::path dir = fresh_dir("ato_cli_badcfg");
    fs::path cfg = dir / "bad.json";
    ato::write_text_file(cfg.string(), "{this is not json");
    RunResult r = run_cli("generate-instance --config " + cfg.string());
    CHECK(r.exit_code == 65);
    CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("a missing solver backend exits with the unavailable code") {
    fs::path dir = fresh_dir("ato_cli_nosolver");
    std::string cfg = tiny_config(dir, 1, 1, R"([{"kind": "TS"}])");
    RunResult r = run_cli("simulate --config " + cfg + " --out " + (dir / "out").string(),
                          "ATO_GLPK_PATH=/nonexistent/libglpk.so");
    CHECK(r.exit_code == 69);
    CHECK(r.output.find("backend unavailable") != std::string::npos);
}

TEST_CASE("generate-instance writes a loadable instance") {
    fs::path dir = fresh_dir("ato_cli_inst");
    fs::path out = dir / "instance.json";
    RunResult r = run_cli("generate-instance --seed 3 --gamma 1.1 --out " + out.string());
    CHECK(r.exit_code == 0);
    ato::Instance inst = ato::instance_from_json(ato::read_text_file(out.string()));
    CHECK(inst.num_components() == 60);
    CHECK(inst.capacities_set());
}

TEST_CASE("generate-history writes rows-by-months CSV") {
    fs::path dir = fresh_dir("ato_cli_hist");
    fs::path out = dir / "history.csv";
    RunResult r = run_cli("generate-history --seed 5 --years 3 --out " + out.string());
    CHECK(r.exit_code == 0);
    std::ifstream in(out.string());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("month,item_0", 0) == 0);
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 36);
}

TEST_CASE("simulate produces per-period and aggregate files plus a manifest") {
    fs::path dir = fresh_dir("ato_cli_sim");
    std::string cfg = tiny_config(dir, 2, 1, R"([{"kind": "TS"}])");
    fs::path out = dir / "out";
    RunResult r = run_cli("simulate --config " + cfg + " --out " + out.string());
    REQUIRE(r.exit_code == 0);
    for (const char* f : {"periods.csv", "records.csv", "metrics.csv", "profit_table.csv",
                          "inventory_table.csv", "lost_sales_table.csv", "manifest.json"})
        CHECK(fs::exists(out / f));

    // periods.csv: header + 2 PI rows + 2 policy rows
    std::ifstream in((out / "periods.csv").string());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("policy,years,gamma,replication,period,month", 0) == 0);
    int ts_rows = 0, pi_rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("TS,", 0) == 0) ++ts_rows;
        if (line.rfind("PI,", 0) == 0) ++pi_rows;
    }
    CHECK(ts_rows == 2);
    CHECK(pi_rows == 2);
}

TEST_CASE("identical config and seed produce byte-identical outputs") {
    fs::path dir = fresh_dir("ato_cli_det");
    std::string cfg = tiny_config(dir, 2, 2, R"([{"kind": "TS"}, {"kind": "SS", "alpha": 25}])");
    fs::path out1 = dir / "a";
    fs::path out2 = dir / "b";
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + out1.string()).exit_code == 0);
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + out2.string()).exit_code == 0);
    for (const char* f : {"periods.csv", "records.csv", "metrics.csv"})
        CHECK(ato::read_text_file((out1 / f).string()) ==
              ato::read_text_file((out2 / f).string()));
}

TEST_CASE("report reproduces the aggregate tables from records.csv") {
    fs::path dir = fresh_dir("ato_cli_report");
    std::string cfg = tiny_config(dir, 2, 1, R"([{"kind": "TS"}])");
    fs::path out = dir / "out";
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + out.string()).exit_code == 0);
    fs::path rep = dir / "rep";
    RunResult r = run_cli("report --records " + (out / "records.csv").string() + " --out " +
                          rep.string());
    CHECK(r.exit_code == 0);
    CHECK(ato::read_text_file((rep / "metrics.csv").string()) ==
          ato::read_text_file((out / "metrics.csv").string()));
}

TEST_CASE("dump-tree emits the documented structure") {
    fs::path dir = fresh_dir("ato_cli_tree");
    fs::path out = dir / "tree.json";
    RunResult r = run_cli("dump-tree --kind MS3 --years 3 --seed 1 --out " + out.string());
    CHECK(r.exit_code == 0);
    std::string text = ato::read_text_file(out.string());
    CHECK(text.find("\"kind\": \"MS3\"") != std::string::npos);
    CHECK(r.output.find("9 scenarios") != std::string::npos); // 3 years -> 3x3
}

TEST_CASE("the full grid shape matches the reported tables") {
    // 9 policies x 1 year-setting x 2 gammas with a 1-month horizon: checks
    // the wide-table layout (rows = years x gamma, columns = policies).
    fs::path dir = fresh_dir("ato_cli_grid");
    std::string policies = R"([
        {"kind": "FOSVA"}, {"kind": "TS"}, {"kind": "TS_noS"},
        {"kind": "MP_n", "tail": 2}, {"kind": "MP_n", "tail": 3}, {"kind": "MP_n", "tail": 4},
        {"kind": "MS3"}, {"kind": "MS3_n", "tail": 3}, {"kind": "MS3_n", "tail": 4}])";
    std::string text = R"({
      "instance": {"num_components": 5, "num_end_items": 3, "num_machines": 2,
                    "family_sizes": [2], "family_component_counts": [3],
                    "family_common_components": 1,
                    "num_outcast_items": 1, "mean_demand_sample_size": 200},
      "correlation": "independent",
      "years": [3],
      "gammas": [1.0, 1.3],
      "policies": )" + policies + R"(,
      "fosva": {"iterations": 1},
      "solver": {"time_limit_s": 20, "relative_gap": 0.001},
      "simulation": {"horizon_months": 1, "replications": 1},
      "seed": 7,
      "threads": 2
    })";
    fs::path cfg = dir / "grid.json";
    ato::write_text_file(cfg.string(), text);
    fs::path out = dir / "out";
    RunResult r = run_cli("simulate --config " + cfg.string() + " --out " + out.string());
    REQUIRE(r.exit_code == 0);

    std::ifstream in((out / "profit_table.csv").string());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "years,gamma,FOSVA,TS,TS_noS,MP_2,MP_3,MP_4,MS3,MS3_3,MS3_4");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2); // one year setting x two gammas
}
