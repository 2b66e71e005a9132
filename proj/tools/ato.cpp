// Command-line driver for instance generation, demand histories, value
// function training, rolling-horizon simulation, and report generation.

#include "ato/demand.hpp"
#include "ato/experiment.hpp"
#include "ato/fosva_train.hpp"
#include "ato/instance.hpp"
#include "ato/scenario.hpp"
#include "ato/serialize.hpp"
#include "ato/simulate.hpp"
#include "ato/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

// Exit codes, sysexits-flavored so scripts can tell failures apart.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;      // unknown subcommand / bad flags
constexpr int kExitBadConfig = 65;  // malformed config or data file
constexpr int kExitNoSolver = 69;   // solver backend unavailable
constexpr int kExitRuntime = 70;    // internal failure

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::string out;
};

ato::ExperimentConfig load_config(const CommonArgs& args) {
    ato::ExperimentConfig cfg;
    if (!args.config_path.empty())
        cfg = ato::experiment_config_from_json(ato::read_text_file(args.config_path));
    if (args.seed_set) cfg.seed = args.seed;
    if (args.threads > 0) cfg.threads = args.threads;
    if (!args.out.empty()) cfg.output_dir = args.out;
    return cfg;
}

std::vector<int> config_family_sizes(const ato::ExperimentConfig& cfg) {
    std::vector<int> sizes = cfg.instance_config.family_sizes;
    for (int o = 0; o < cfg.instance_config.num_outcast_items; ++o) sizes.push_back(1);
    return sizes;
}

ato::DemandModel config_demand_model(const ato::ExperimentConfig& cfg) {
    return ato::canonical_demand_model(cfg.correlation == "independent"
                                           ? ato::CorrelationMode::independent
                                           : ato::CorrelationMode::family,
                                       config_family_sizes(cfg), cfg.seed);
}

/// Instance with capacities and default initial inventory filled in.
ato::Instance config_instance(const ato::ExperimentConfig& cfg, double gamma,
                              std::vector<double>* mean_out = nullptr) {
    ato::Instance inst;
    if (cfg.instance_path) {
        inst = ato::instance_from_json(ato::read_text_file(*cfg.instance_path));
        return inst;
    }
    inst = ato::generate_instance(cfg.instance_config, cfg.seed);
    ato::DemandModel model = config_demand_model(cfg);
    ato::RngStream rng = ato::RngStream::from_key(cfg.seed, {0x01});
    std::vector<double> mean =
        ato::estimate_mean_demand(model, cfg.instance_config.mean_demand_sample_size, rng);
    ato::compute_capacities(inst, gamma, mean);
    inst.initial_inventory = ato::default_initial_inventory(inst, mean);
    if (mean_out) *mean_out = mean;
    return inst;
}

void write_manifest(const std::string& dir, const ato::ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs) {
    nlohmann::json manifest;
    manifest["config_hash"] = ato::content_hash(ato::experiment_config_to_json(cfg));
    manifest["seed"] = cfg.seed;
    manifest["solver_backend"] = ato::solver_backend_description();
    manifest["outputs"] = outputs;
    std::filesystem::create_directories(dir);
    ato::write_text_file((std::filesystem::path(dir) / "manifest.json").string(),
                         manifest.dump(2));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Assemble-to-order planning: instances, scenario trees, stochastic MILP "
                 "policies, and rolling-horizon simulation"};
    app.require_subcommand(1);
    app.fallthrough(true); // global flags may follow the subcommand
    app.failure_message(CLI::FailureMessage::help);

    CommonArgs args;
    app.add_option("--config", args.config_path, "Experiment configuration (JSON)")
        ->envname("ATO_CONFIG");
    app.add_option("--seed", args.seed, "Master seed (overrides config)")
        ->each([&](const std::string&) { args.seed_set = true; });
    app.add_option("--threads", args.threads, "Worker thread cap");
    app.add_option("--out", args.out, "Output file or directory");

    double gen_gamma = 1.0;
    auto* gen_inst = app.add_subcommand("generate-instance",
                                        "Generate an instance and write it as JSON");
    gen_inst->add_option("--gamma", gen_gamma, "Tightness used for capacities");

    int hist_years = 10;
    auto* gen_hist = app.add_subcommand("generate-history",
                                        "Sample a demand history and write it as CSV");
    gen_hist->add_option("--years", hist_years, "Years of observations");

    auto* train = app.add_subcommand("train-fosva",
                                     "Train the terminal-inventory value approximation");

    auto* simulate = app.add_subcommand("simulate",
                                        "Run the rolling-horizon experiment grid");
    std::string fosva_path;
    simulate->add_option("--fosva", fosva_path, "Pre-trained value approximation (JSON)");
    std::string instance_path;
    simulate->add_option("--instance", instance_path, "Instance file instead of generation");

    std::string records_path = "records.csv";
    auto* report = app.add_subcommand("report", "Aggregate metrics from records.csv");
    report->add_option("--records", records_path, "records.csv produced by simulate");

    std::string tree_kind = "TS";
    int tree_month = 0;
    int tree_tail = 0;
    int tree_years = 10;
    auto* dump = app.add_subcommand("dump-tree", "Build a scenario tree and dump it as JSON");
    dump->add_option("--kind", tree_kind, "TS, TS_noS, MP_n, MS3, MS3_n, DET");
    dump->add_option("--month", tree_month, "Current calendar month (0-11)");
    dump->add_option("--tail", tree_tail, "Future periods for tailed kinds");
    dump->add_option("--years", tree_years, "Years of history behind the tree");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        ato::ExperimentConfig cfg = load_config(args);

        if (gen_inst->parsed()) {
            std::string out = args.out.empty() ? "instance.json" : args.out;
            ato::Instance inst = config_instance(cfg, gen_gamma);
            ato::write_text_file(out, ato::instance_to_json(inst));
            std::cout << "wrote " << out << " (" << inst.num_components() << " components, "
                      << inst.num_end_items() << " end items)\n";
        } else if (gen_hist->parsed()) {
            std::string out = args.out.empty() ? "history.csv" : args.out;
            ato::DemandModel model = config_demand_model(cfg);
            ato::RngStream rng = ato::RngStream::from_key(
                cfg.seed, {0x02, static_cast<std::uint64_t>(hist_years)});
            ato::History history = ato::generate_history(model, hist_years, rng);
            std::ostringstream csv;
            ato::write_history_csv(csv, history);
            ato::write_text_file(out, csv.str());
            std::cout << "wrote " << out << " (" << history.months() << " months x "
                      << history.num_items() << " items)\n";
        } else if (train->parsed()) {
            std::string out = args.out.empty() ? "fosva.json" : args.out;
            const int years = cfg.years_list.front();
            const double gamma = cfg.gammas.front();
            std::vector<double> mean;
            ato::Instance inst = config_instance(cfg, gamma, &mean);
            ato::DemandModel model = config_demand_model(cfg);
            ato::RngStream hist_rng = ato::RngStream::from_key(
                cfg.seed, {0x02, static_cast<std::uint64_t>(years)});
            ato::History history = ato::generate_history(model, years, hist_rng);
            ato::FosvaConfig fosva_cfg = cfg.fosva;
            if (fosva_cfg.inventory_cap.empty())
                fosva_cfg.inventory_cap = ato::default_inventory_cap(inst, mean);
            fosva_cfg.seed = ato::derive_seed(cfg.seed, {0x04, static_cast<std::uint64_t>(years), 0});
            ato::TrainStats stats;
            ato::SeasonalValueApprox value = ato::train_fosva(
                inst, history, fosva_cfg, cfg.solver,
                cfg.threads > 0 ? cfg.threads : 1, &stats);
            ato::write_text_file(out, ato::value_approx_to_json(value));
            std::cout << "wrote " << out << " (" << stats.ts_solves << " two-stage solves)\n";
        } else if (simulate->parsed()) {
            if (!fosva_path.empty()) cfg.fosva_path = fosva_path;
            if (!instance_path.empty()) cfg.instance_path = instance_path;
            ato::ExperimentResult result = ato::run_experiment(cfg);
            std::cout << "wrote " << cfg.output_dir << "/{periods,records,metrics}.csv ("
                      << result.records.size() << " records)\n";
        } else if (report->parsed()) {
            std::string out = args.out.empty() ? "." : args.out;
            ato::MetricsReport metrics = ato::run_report(records_path, out);
            write_manifest(out, cfg, {"metrics.csv", "profit_table.csv", "inventory_table.csv",
                                      "lost_sales_table.csv"});
            std::cout << "wrote " << out << "/metrics.csv (" << metrics.cells.size()
                      << " cells)\n";
        } else if (dump->parsed()) {
            std::string out = args.out.empty() ? "tree.json" : args.out;
            ato::TreeKind kind;
            if (tree_kind == "TS") kind = ato::TreeKind::TS;
            else if (tree_kind == "TS_noS") kind = ato::TreeKind::TS_NOS;
            else if (tree_kind == "MP_n") kind = ato::TreeKind::MP_N;
            else if (tree_kind == "MS3") kind = ato::TreeKind::MS3;
            else if (tree_kind == "MS3_n") kind = ato::TreeKind::MS3_N;
            else if (tree_kind == "DET") kind = ato::TreeKind::DET;
            else throw ato::Error("unknown tree kind '" + tree_kind + "'");
            ato::DemandModel model = config_demand_model(cfg);
            ato::RngStream hist_rng = ato::RngStream::from_key(
                cfg.seed, {0x02, static_cast<std::uint64_t>(tree_years)});
            ato::History history = ato::generate_history(model, tree_years, hist_rng);
            std::vector<double> mean = ato::empirical_month_mean(history, tree_month);
            std::vector<int> root(mean.size());
            for (std::size_t j = 0; j < mean.size(); ++j) root[j] = ato::to_piece_count(mean[j]);
            ato::ScenarioTree tree = ato::build_tree(kind, history, tree_month, root, tree_tail);
            ato::write_text_file(out, ato::tree_to_json(tree));
            std::cout << "wrote " << out << " (" << tree.num_nodes() << " nodes, "
                      << tree.leaves().size() << " scenarios)\n";
        }
        return kExitOk;
    } catch (const ato::SolverUnavailable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoSolver;
    } catch (const ato::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
