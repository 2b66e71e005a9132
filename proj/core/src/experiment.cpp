#include "ato/experiment.hpp"

#include "ato/fosva_train.hpp"
#include "ato/parallel.hpp"
#include "ato/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace ato {

using nlohmann::json;

namespace {

// Stream keys for seed derivation; values are arbitrary but fixed so that
// adding consumers never shifts existing draws.
constexpr std::uint64_t kKeyMeanDemand = 0x01;
constexpr std::uint64_t kKeyHistory = 0x02;
constexpr std::uint64_t kKeyPath = 0x03;
constexpr std::uint64_t kKeyFosva = 0x04;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    if (!instance_path) instance_config.validate();
    require(correlation == "independent" || correlation == "family",
            "config: correlation must be 'independent' or 'family'");
    require(!years_list.empty(), "config: years list is empty");
    for (int y : years_list) require(y >= 1, "config: years must be >= 1");
    require(!gammas.empty(), "config: gamma list is empty");
    for (double g : gammas) require(g >= 0.0, "config: negative gamma");
    require(!policies.empty(), "config: no policies requested");
    for (const PolicySpec& p : policies) policy_from_spec(p).validate();
    solver.validate();
    simulation.validate();
    require(threads >= 0, "config: negative thread count");
}

Policy policy_from_spec(const PolicySpec& spec) {
    Policy p;
    if (spec.kind == "FOSVA") {
        p.kind = PolicyKind::FOSVA;
        // validate() runs after training attaches the value approximation;
        // here a placeholder keeps spec checking usable.
        p.value = std::make_shared<SeasonalValueApprox>();
    } else if (spec.kind == "TS") {
        p.kind = PolicyKind::TS;
    } else if (spec.kind == "TS_noS") {
        p.kind = PolicyKind::TS_NOS;
    } else if (spec.kind == "MP_n") {
        p.kind = PolicyKind::MP_N;
        p.tail = spec.tail;
    } else if (spec.kind == "MS3") {
        p.kind = PolicyKind::MS3;
    } else if (spec.kind == "MS3_n") {
        p.kind = PolicyKind::MS3_N;
        p.tail = spec.tail;
    } else if (spec.kind == "SS") {
        p.kind = PolicyKind::SS;
        p.alpha = spec.alpha;
    } else if (spec.kind == "DET") {
        p.kind = PolicyKind::DET;
    } else {
        throw Error("config: unknown policy kind '" + spec.kind + "'");
    }
    return p;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error("config: malformed JSON");

    ExperimentConfig cfg;
    if (j.contains("instance_path")) cfg.instance_path = j["instance_path"].get<std::string>();
    if (j.contains("instance")) {
        const json& ji = j["instance"];
        InstanceConfig& ic = cfg.instance_config;
        if (ji.contains("num_components")) ic.num_components = ji["num_components"].get<int>();
        if (ji.contains("num_end_items")) ic.num_end_items = ji["num_end_items"].get<int>();
        if (ji.contains("num_machines")) ic.num_machines = ji["num_machines"].get<int>();
        if (ji.contains("family_sizes")) ic.family_sizes = ji["family_sizes"].get<std::vector<int>>();
        if (ji.contains("family_component_counts"))
            ic.family_component_counts = ji["family_component_counts"].get<std::vector<int>>();
        if (ji.contains("family_common_components"))
            ic.family_common_components = ji["family_common_components"].get<int>();
        if (ji.contains("num_outcast_items")) ic.num_outcast_items = ji["num_outcast_items"].get<int>();
        if (ji.contains("outcast_inclusion_prob"))
            ic.outcast_inclusion_prob = ji["outcast_inclusion_prob"].get<double>();
        if (ji.contains("mean_demand_sample_size"))
            ic.mean_demand_sample_size = ji["mean_demand_sample_size"].get<int>();
    }
    if (j.contains("correlation")) cfg.correlation = j["correlation"].get<std::string>();
    if (j.contains("years")) {
        if (j["years"].is_array())
            cfg.years_list = j["years"].get<std::vector<int>>();
        else
            cfg.years_list = {j["years"].get<int>()};
    }
    if (j.contains("gammas")) cfg.gammas = j["gammas"].get<std::vector<double>>();
    if (j.contains("policies")) {
        cfg.policies.clear();
        for (const json& jp : j["policies"]) {
            PolicySpec spec;
            spec.kind = jp.at("kind").get<std::string>();
            if (jp.contains("tail")) spec.tail = jp["tail"].get<int>();
            if (jp.contains("alpha")) spec.alpha = jp["alpha"].get<double>();
            cfg.policies.push_back(std::move(spec));
        }
    }
    if (j.contains("fosva_path")) cfg.fosva_path = j["fosva_path"].get<std::string>();
    if (j.contains("fosva")) {
        const json& jf = j["fosva"];
        if (jf.contains("iterations")) cfg.fosva.iterations = jf["iterations"].get<int>();
        if (jf.contains("epsilon")) cfg.fosva.epsilon = jf["epsilon"].get<double>();
        if (jf.contains("smoothing")) cfg.fosva.smoothing = jf["smoothing"].get<double>();
        if (jf.contains("monthly")) cfg.fosva.monthly = jf["monthly"].get<bool>();
        if (jf.contains("training_gap")) cfg.fosva.training_gap = jf["training_gap"].get<double>();
        if (jf.contains("train_on_relaxation"))
            cfg.fosva.train_on_relaxation = jf["train_on_relaxation"].get<bool>();
        if (jf.contains("inventory_cap"))
            cfg.fosva.inventory_cap = jf["inventory_cap"].get<std::vector<double>>();
    }
    if (j.contains("solver")) {
        const json& js = j["solver"];
        if (js.contains("time_limit_s")) cfg.solver.time_limit_s = js["time_limit_s"].get<double>();
        if (js.contains("relative_gap")) cfg.solver.relative_gap = js["relative_gap"].get<double>();
        if (js.contains("threads")) cfg.solver.threads = js["threads"].get<int>();
        if (js.contains("backend")) cfg.solver.backend = js["backend"].get<std::string>();
    }
    if (j.contains("simulation")) {
        const json& js = j["simulation"];
        if (js.contains("horizon_months"))
            cfg.simulation.horizon_months = js["horizon_months"].get<int>();
        if (js.contains("replications"))
            cfg.simulation.replications = js["replications"].get<int>();
        if (js.contains("start_month")) cfg.simulation.start_month = js["start_month"].get<int>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.instance_path) j["instance_path"] = *cfg.instance_path;
    j["instance"] = {{"num_components", cfg.instance_config.num_components},
                     {"num_end_items", cfg.instance_config.num_end_items},
                     {"num_machines", cfg.instance_config.num_machines},
                     {"family_sizes", cfg.instance_config.family_sizes},
                     {"family_component_counts", cfg.instance_config.family_component_counts},
                     {"family_common_components", cfg.instance_config.family_common_components},
                     {"num_outcast_items", cfg.instance_config.num_outcast_items},
                     {"mean_demand_sample_size", cfg.instance_config.mean_demand_sample_size}};
    j["correlation"] = cfg.correlation;
    j["years"] = cfg.years_list;
    j["gammas"] = cfg.gammas;
    json policies = json::array();
    for (const PolicySpec& p : cfg.policies) {
        json jp = {{"kind", p.kind}};
        if (p.tail != 0) jp["tail"] = p.tail;
        if (p.alpha != 0.0) jp["alpha"] = p.alpha;
        policies.push_back(std::move(jp));
    }
    j["policies"] = std::move(policies);
    j["fosva"] = {{"iterations", cfg.fosva.iterations},
                  {"epsilon", cfg.fosva.epsilon},
                  {"smoothing", cfg.fosva.smoothing},
                  {"monthly", cfg.fosva.monthly},
                  {"training_gap", cfg.fosva.training_gap}};
    j["solver"] = {{"time_limit_s", cfg.solver.time_limit_s},
                   {"relative_gap", cfg.solver.relative_gap},
                   {"threads", cfg.solver.threads},
                   {"backend", cfg.solver.backend}};
    j["simulation"] = {{"horizon_months", cfg.simulation.horizon_months},
                       {"replications", cfg.simulation.replications},
                       {"start_month", cfg.simulation.start_month}};
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

std::string records_to_csv(const std::vector<RecordSummary>& records) {
    std::ostringstream os;
    os << "policy,years,gamma,replication,profit,avg_inventory,lost_sales,pi_profit,"
          "pi_avg_inventory\n";
    for (const RecordSummary& r : records)
        os << r.policy << ',' << r.years << ',' << fmt(r.gamma) << ',' << r.replication << ','
           << fmt(r.profit) << ',' << fmt(r.avg_inventory) << ',' << fmt(r.lost_sales) << ','
           << fmt(r.pi_profit) << ',' << fmt(r.pi_avg_inventory) << '\n';
    return os.str();
}

std::vector<RecordSummary> records_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "records: empty CSV");
    std::vector<RecordSummary> records;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        RecordSummary r;
        auto next = [&]() {
            require(static_cast<bool>(std::getline(ls, cell, ',')), "records: short CSV row");
            return cell;
        };
        r.policy = next();
        r.years = std::stoi(next());
        r.gamma = std::stod(next());
        r.replication = std::stoi(next());
        r.profit = std::stod(next());
        r.avg_inventory = std::stod(next());
        r.lost_sales = std::stod(next());
        r.pi_profit = std::stod(next());
        r.pi_avg_inventory = std::stod(next());
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

std::string metrics_to_csv(const MetricsReport& report) {
    std::ostringstream os;
    os << "policy,years,gamma,replications,profit_pct_mean,profit_pct_ci95,"
          "inventory_pct_mean,inventory_pct_ci95,lost_sales_dev_pct\n";
    for (const PolicyCellMetrics& c : report.cells)
        os << c.policy << ',' << c.years << ',' << fmt(c.gamma) << ',' << c.replications << ','
           << fmt(c.profit_pct_mean) << ',' << fmt(c.profit_pct_halfwidth) << ','
           << fmt(c.inventory_pct_mean) << ',' << fmt(c.inventory_pct_halfwidth) << ','
           << fmt(c.lost_sales_dev_pct) << '\n';
    return os.str();
}

/// Wide table (rows = years x gamma, columns = policies) for one metric.
std::string wide_table(const MetricsReport& report, double PolicyCellMetrics::* metric) {
    std::vector<std::string> policies;
    std::set<std::pair<int, double>> rows;
    for (const PolicyCellMetrics& c : report.cells) {
        if (std::find(policies.begin(), policies.end(), c.policy) == policies.end())
            policies.push_back(c.policy);
        rows.insert({c.years, c.gamma});
    }
    std::map<std::tuple<int, double, std::string>, double> lookup;
    for (const PolicyCellMetrics& c : report.cells)
        lookup[{c.years, c.gamma, c.policy}] = c.*metric;

    std::ostringstream os;
    os << "years,gamma";
    for (const std::string& p : policies) os << ',' << p;
    os << '\n';
    for (const auto& [years, gamma] : rows) {
        os << years << ',' << fmt(gamma);
        for (const std::string& p : policies) {
            os << ',';
            auto it = lookup.find({years, gamma, p});
            if (it != lookup.end()) os << fmt(it->second);
        }
        os << '\n';
    }
    return os.str();
}

void write_metric_tables(const MetricsReport& report, const std::filesystem::path& dir) {
    write_text_file((dir / "metrics.csv").string(), metrics_to_csv(report));
    write_text_file((dir / "profit_table.csv").string(),
                    wide_table(report, &PolicyCellMetrics::profit_pct_mean));
    write_text_file((dir / "inventory_table.csv").string(),
                    wide_table(report, &PolicyCellMetrics::inventory_pct_mean));
    write_text_file((dir / "lost_sales_table.csv").string(),
                    wide_table(report, &PolicyCellMetrics::lost_sales_dev_pct));
}

std::string periods_header() {
    return "policy,years,gamma,replication,period,month,demand_total,assembly_total,"
           "lost_total,production_total,inventory_total,revenue,penalty,holding_cost,"
           "production_cost,profit\n";
}

void append_periods(std::ostringstream& os, const std::string& policy, int years, double gamma,
                    int replication, const SimulationRecord& record) {
    for (std::size_t t = 0; t < record.periods.size(); ++t) {
        const PeriodRecord& r = record.periods[t];
        long demand = 0, assembly = 0, lost = 0, production = 0, inventory = 0;
        for (int d : r.demand) demand += d;
        for (int a : r.assembly) assembly += a;
        for (int l : r.lost_sales) lost += l;
        for (int x : r.production) production += x;
        for (int i : r.inventory) inventory += i;
        os << policy << ',' << years << ',' << fmt(gamma) << ',' << replication << ',' << t << ','
           << r.month << ',' << demand << ',' << assembly << ',' << lost << ',' << production
           << ',' << inventory << ',' << fmt(r.revenue) << ',' << fmt(r.penalty) << ','
           << fmt(r.holding) << ',' << fmt(r.production_cost) << ',' << fmt(r.profit()) << '\n';
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int threads =
        cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path out_dir(cfg.output_dir);

    // Base instance: generated once (or loaded); capacities vary per gamma.
    Instance base_instance;
    std::vector<int> family_sizes;
    if (cfg.instance_path) {
        base_instance = instance_from_json(read_text_file(*cfg.instance_path));
        int max_family = *std::max_element(base_instance.family_of_item.begin(),
                                           base_instance.family_of_item.end());
        family_sizes.assign(max_family + 1, 0);
        for (int f : base_instance.family_of_item) family_sizes[f] += 1;
    } else {
        base_instance = generate_instance(cfg.instance_config, cfg.seed);
        for (int s : cfg.instance_config.family_sizes) family_sizes.push_back(s);
        for (int o = 0; o < cfg.instance_config.num_outcast_items; ++o) family_sizes.push_back(1);
    }

    DemandModel demand = canonical_demand_model(cfg.correlation == "independent"
                                                    ? CorrelationMode::independent
                                                    : CorrelationMode::family,
                                                family_sizes, cfg.seed);

    RngStream mean_rng = RngStream::from_key(cfg.seed, {kKeyMeanDemand});
    std::vector<double> mean_demand =
        estimate_mean_demand(demand, cfg.instance_config.mean_demand_sample_size, mean_rng);

    ExperimentResult result;
    std::ostringstream periods_csv;
    periods_csv << periods_header();

    for (int years : cfg.years_list) {
        RngStream history_rng =
            RngStream::from_key(cfg.seed, {kKeyHistory, static_cast<std::uint64_t>(years)});
        History history = generate_history(demand, years, history_rng);

        // Out-of-sample paths are fixed per (years, replication): every
        // policy and every gamma sees the same realizations.
        std::vector<std::vector<std::vector<int>>> paths(cfg.simulation.replications);
        for (int r = 0; r < cfg.simulation.replications; ++r) {
            RngStream path_rng = RngStream::from_key(
                cfg.seed,
                {kKeyPath, static_cast<std::uint64_t>(years), static_cast<std::uint64_t>(r)});
            paths[r] = sample_demand_path(demand, cfg.simulation.start_month,
                                          cfg.simulation.horizon_months, path_rng);
        }

        for (std::size_t gi = 0; gi < cfg.gammas.size(); ++gi) {
            const double gamma = cfg.gammas[gi];
            Instance inst = base_instance;
            compute_capacities(inst, gamma, mean_demand);
            const std::vector<int> initial_inventory =
                default_initial_inventory(inst, mean_demand);

            // Policies with artifacts: FOSVA trains on this (years, gamma)
            // history; SS quantiles come from the history alone.
            bool needs_fosva = std::any_of(cfg.policies.begin(), cfg.policies.end(),
                                           [](const PolicySpec& p) { return p.kind == "FOSVA"; });
            std::shared_ptr<const SeasonalValueApprox> value;
            if (needs_fosva) {
                if (cfg.fosva_path) {
                    value = std::make_shared<SeasonalValueApprox>(
                        value_approx_from_json(read_text_file(*cfg.fosva_path)));
                } else {
                    FosvaConfig fosva_cfg = cfg.fosva;
                    if (fosva_cfg.inventory_cap.empty())
                        fosva_cfg.inventory_cap = default_inventory_cap(inst, mean_demand);
                    fosva_cfg.seed = derive_seed(cfg.seed,
                                                 {kKeyFosva, static_cast<std::uint64_t>(years),
                                                  static_cast<std::uint64_t>(gi)});
                    value = std::make_shared<SeasonalValueApprox>(
                        train_fosva(inst, history, fosva_cfg, cfg.solver, threads));
                }
            }

            std::vector<Policy> policies;
            for (const PolicySpec& spec : cfg.policies) {
                Policy p = policy_from_spec(spec);
                if (p.kind == PolicyKind::FOSVA) p.value = value;
                p.prepare(inst, history);
                policies.push_back(std::move(p));
            }

            // Replications are independent; run them in parallel.
            std::vector<std::vector<RecordSummary>> rep_records(cfg.simulation.replications);
            std::vector<std::string> rep_periods(cfg.simulation.replications);
            parallel_for(
                cfg.simulation.replications, threads,
                [&](int r) {
                    std::ostringstream local_periods;
                    SimulationRecord pi = perfect_information(
                        inst, paths[r], initial_inventory, cfg.simulation.start_month, cfg.solver);
                    append_periods(local_periods, "PI", years, gamma, r, pi);
                    for (const Policy& policy : policies) {
                        SimulationRecord rec =
                            run_rolling_horizon(inst, policy, history, paths[r],
                                                initial_inventory, cfg.simulation.start_month,
                                                cfg.solver);
                        RecordSummary summary;
                        summary.policy = policy.name();
                        summary.years = years;
                        summary.gamma = gamma;
                        summary.replication = r;
                        summary.profit = rec.total_profit();
                        summary.avg_inventory = rec.average_inventory();
                        summary.lost_sales = static_cast<double>(rec.total_lost_sales());
                        summary.pi_profit = pi.total_profit();
                        summary.pi_avg_inventory = pi.average_inventory();
                        rep_records[r].push_back(std::move(summary));
                        append_periods(local_periods, policy.name(), years, gamma, r, rec);
                    }
                    rep_periods[r] = local_periods.str();
                },
                solver_release_thread_state);

            for (int r = 0; r < cfg.simulation.replications; ++r) {
                for (RecordSummary& s : rep_records[r]) result.records.push_back(std::move(s));
                periods_csv << rep_periods[r];
            }
        }
    }

    result.metrics = compute_metrics(result.records);

    write_text_file((out_dir / "periods.csv").string(), periods_csv.str());
    write_text_file((out_dir / "records.csv").string(), records_to_csv(result.records));
    write_metric_tables(result.metrics, out_dir);

    const std::string config_json = experiment_config_to_json(cfg);
    json manifest;
    manifest["config_hash"] = content_hash(config_json);
    manifest["seed"] = cfg.seed;
    manifest["solver_backend"] = solver_backend_description();
    manifest["outputs"] = {"periods.csv", "records.csv", "metrics.csv", "profit_table.csv",
                           "inventory_table.csv", "lost_sales_table.csv"};
    write_text_file((out_dir / "manifest.json").string(), manifest.dump(2));

    return result;
}

MetricsReport run_report(const std::string& records_csv_path, const std::string& output_dir) {
    std::vector<RecordSummary> records = records_from_csv(read_text_file(records_csv_path));
    MetricsReport report = compute_metrics(records);
    std::filesystem::create_directories(output_dir);
    write_metric_tables(report, output_dir);
    return report;
}

} // namespace ato
