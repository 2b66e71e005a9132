#include "ato/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ato {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(std::string("malformed JSON for ") + what);
    return j;
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
    if (!j.contains(key))
        throw Error(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(std::string(what) + ": bad field '" + key + "': " + e.what());
    }
}

} // namespace

std::string instance_to_json(const Instance& inst) {
    json j;
    j["component_cost"] = inst.component_cost;
    j["price"] = inst.price;
    j["lost_sale_penalty"] = inst.lost_sale_penalty;
    j["holding_cost"] = inst.holding_cost;
    j["machine_time"] = inst.machine_time;
    j["capacity"] = inst.capacity;
    j["gozinto"] = inst.gozinto;
    j["initial_inventory"] = inst.initial_inventory;
    j["family_of_item"] = inst.family_of_item;
    return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
    json j = parse(text, "instance");
    Instance inst;
    inst.component_cost = field<std::vector<double>>(j, "component_cost", "instance");
    inst.price = field<std::vector<double>>(j, "price", "instance");
    inst.lost_sale_penalty = field<std::vector<double>>(j, "lost_sale_penalty", "instance");
    inst.holding_cost = field<std::vector<double>>(j, "holding_cost", "instance");
    inst.machine_time = field<std::vector<std::vector<double>>>(j, "machine_time", "instance");
    inst.capacity = field<std::vector<double>>(j, "capacity", "instance");
    inst.gozinto = field<std::vector<std::vector<int>>>(j, "gozinto", "instance");
    inst.initial_inventory = field<std::vector<int>>(j, "initial_inventory", "instance");
    inst.family_of_item = field<std::vector<int>>(j, "family_of_item", "instance");
    inst.validate();
    return inst;
}

std::string demand_model_to_json(const DemandModel& model) {
    json j;
    j["mu1"] = model.base.mu1;
    j["mu2"] = model.base.mu2;
    j["sigma1"] = model.base.sigma1;
    j["sigma2"] = model.base.sigma2;
    j["p"] = model.base.p;
    j["season"] = model.season.factors;
    j["correlation_mode"] =
        model.correlation_mode == CorrelationMode::independent ? "independent" : "family";
    j["family_sizes"] = model.family_sizes;
    if (!model.weights.empty()) j["weights"] = model.weights;
    if (!model.dirichlet_params.empty()) j["dirichlet_params"] = model.dirichlet_params;
    return j.dump(2);
}

DemandModel demand_model_from_json(const std::string& text) {
    json j = parse(text, "demand model");
    DemandModel model;
    model.base.mu1 = field<double>(j, "mu1", "demand model");
    model.base.mu2 = field<double>(j, "mu2", "demand model");
    model.base.sigma1 = field<double>(j, "sigma1", "demand model");
    model.base.sigma2 = field<double>(j, "sigma2", "demand model");
    model.base.p = field<double>(j, "p", "demand model");
    auto season = field<std::vector<double>>(j, "season", "demand model");
    if (season.size() != 12) throw Error("demand model: season must have 12 factors");
    std::copy(season.begin(), season.end(), model.season.factors.begin());
    std::string mode = field<std::string>(j, "correlation_mode", "demand model");
    if (mode == "independent")
        model.correlation_mode = CorrelationMode::independent;
    else if (mode == "family")
        model.correlation_mode = CorrelationMode::family;
    else
        throw Error("demand model: unknown correlation_mode '" + mode + "'");
    model.family_sizes = field<std::vector<int>>(j, "family_sizes", "demand model");
    if (j.contains("weights"))
        model.weights = field<std::vector<std::vector<double>>>(j, "weights", "demand model");
    if (j.contains("dirichlet_params"))
        model.dirichlet_params =
            field<std::vector<std::vector<double>>>(j, "dirichlet_params", "demand model");
    model.validate();
    return model;
}

std::string history_to_json(const History& history) {
    json j;
    j["start_month"] = history.start_month;
    j["observations"] = history.observations;
    return j.dump();
}

History history_from_json(const std::string& text) {
    json j = parse(text, "history");
    History h;
    h.start_month = field<int>(j, "start_month", "history");
    h.observations = field<std::vector<std::vector<int>>>(j, "observations", "history");
    h.validate();
    return h;
}

std::string value_approx_to_json(const SeasonalValueApprox& value) {
    value.validate();
    json j;
    j["monthly"] = value.monthly;
    json entries = json::array();
    for (const ValueApprox& va : value.approx) {
        json comps = json::array();
        for (const PiecewiseValue& pv : va.components)
            comps.push_back({{"breakpoints", pv.breakpoints}, {"slopes", pv.slopes}});
        entries.push_back(std::move(comps));
    }
    j["approximations"] = std::move(entries);
    return j.dump();
}

SeasonalValueApprox value_approx_from_json(const std::string& text) {
    json j = parse(text, "value approximation");
    SeasonalValueApprox out;
    out.monthly = field<bool>(j, "monthly", "value approximation");
    if (!j.contains("approximations") || !j["approximations"].is_array())
        throw Error("value approximation: missing approximations array");
    for (const json& entry : j["approximations"]) {
        ValueApprox va;
        for (const json& comp : entry) {
            PiecewiseValue pv;
            pv.breakpoints = field<std::vector<double>>(comp, "breakpoints", "value approximation");
            pv.slopes = field<std::vector<double>>(comp, "slopes", "value approximation");
            va.components.push_back(std::move(pv));
        }
        out.approx.push_back(std::move(va));
    }
    out.validate();
    return out;
}

std::string tree_to_json(const ScenarioTree& tree) {
    json j;
    j["kind"] = tree_kind_name(tree.kind);
    j["tail_length"] = tree.tail_length;
    json nodes = json::array();
    for (const TreeNode& n : tree.nodes)
        nodes.push_back({{"id", n.id},
                         {"parent", n.parent},
                         {"prob", n.prob},
                         {"stage", n.stage},
                         {"demand", n.demand}});
    j["nodes"] = std::move(nodes);
    return j.dump(2);
}

void write_history_csv(std::ostream& os, const History& history) {
    os << "month";
    for (int j = 0; j < history.num_items(); ++j) os << ",item_" << j;
    os << '\n';
    for (int t = 0; t < history.months(); ++t) {
        os << history.month_of_row(t);
        for (int d : history.observations[t]) os << ',' << d;
        os << '\n';
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace ato
