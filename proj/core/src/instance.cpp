#include "ato/instance.hpp"

#include "ato/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ato {

void InstanceConfig::validate() const {
    require(num_components >= 1, "config: need at least one component");
    require(num_end_items >= 1, "config: need at least one end item");
    require(num_machines >= 1, "config: need at least one machine");

    double share_sum = margin_class_shares[0] + margin_class_shares[1] + margin_class_shares[2];
    require(std::abs(share_sum - 1.0) <= 1e-9, "config: margin class shares must sum to 1");
    for (const auto& r : margin_ranges)
        require(r.valid() && r.lo >= 0.0, "config: margin ranges must be non-negative intervals");
    require(component_cost_range.valid() && component_cost_range.lo > 0.0,
            "config: component costs must be strictly positive");
    require(machine_time_range.valid() && machine_time_range.lo > 0.0,
            "config: machine times must be strictly positive");

    require(family_sizes.size() == family_component_counts.size(),
            "config: family_sizes and family_component_counts must have equal length");
    int family_items = std::accumulate(family_sizes.begin(), family_sizes.end(), 0);
    require(family_items + num_outcast_items == num_end_items,
            "config: sum(family_sizes) + num_outcast_items must equal num_end_items (got " +
                std::to_string(family_items + num_outcast_items) + " vs " +
                std::to_string(num_end_items) + ")");
    require(family_common_components >= 0, "config: negative common component count");
    for (std::size_t r = 0; r < family_sizes.size(); ++r) {
        require(family_sizes[r] >= 1, "config: empty family " + std::to_string(r));
        require(family_component_counts[r] >= 1 &&
                    family_component_counts[r] >= family_common_components,
                "config: family " + std::to_string(r) +
                    " has fewer components than its common count");
    }
    int family_components =
        std::accumulate(family_component_counts.begin(), family_component_counts.end(), 0);
    require(family_components <= num_components,
            "config: family component counts exceed num_components (" +
                std::to_string(family_components) + " > " + std::to_string(num_components) + ")");
    require(num_outcast_items >= 0, "config: negative outcast count");
    require(outcast_inclusion_prob >= 0.0 && outcast_inclusion_prob <= 1.0,
            "config: outcast inclusion probability outside [0,1]");
    require(gozinto_min >= 1 && gozinto_max >= gozinto_min, "config: bad gozinto quantity range");
    require(lost_sale_factor > 0.0 && holding_factor > 0.0,
            "config: lost-sale and holding factors must be positive");
    require(mean_demand_sample_size >= 1, "config: mean demand sample size must be >= 1");
}

void Instance::validate() const {
    const int I = num_components();
    const int J = num_end_items();
    require(I >= 1 && J >= 1, "instance: empty dimensions");
    require(static_cast<int>(lost_sale_penalty.size()) == J &&
                static_cast<int>(holding_cost.size()) == I &&
                static_cast<int>(machine_time.size()) == I &&
                static_cast<int>(gozinto.size()) == I &&
                static_cast<int>(initial_inventory.size()) == I &&
                static_cast<int>(family_of_item.size()) == J,
            "instance: inconsistent field dimensions");
    for (double c : component_cost) require(c > 0.0, "instance: non-positive component cost");
    for (double p : price) require(p > 0.0, "instance: non-positive price");
    for (const auto& row : machine_time)
        for (double t : row) require(t > 0.0, "instance: non-positive machine time");
    for (double l : capacity) require(l >= 0.0, "instance: negative capacity");
    for (const auto& row : gozinto) {
        require(static_cast<int>(row.size()) == J, "instance: ragged gozinto matrix");
        for (int g : row) require(g >= 0, "instance: negative gozinto entry");
    }
    for (int v : initial_inventory) require(v >= 0, "instance: negative initial inventory");
}

Instance generate_instance(const InstanceConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    RngStream rng = RngStream::from_key(seed, {0x1157u});

    const int I = cfg.num_components;
    const int J = cfg.num_end_items;
    const int M = cfg.num_machines;
    const int R = cfg.num_families();

    Instance inst;
    inst.component_cost.resize(I);
    for (int i = 0; i < I; ++i) inst.component_cost[i] = rng.uniform(cfg.component_cost_range);

    inst.gozinto.assign(I, std::vector<int>(J, 0));
    inst.family_of_item.assign(J, -1);

    auto quantity = [&]() {
        return static_cast<int>(rng.uniform_int(cfg.gozinto_min, cfg.gozinto_max));
    };

    // Standard families occupy consecutive component and item blocks. The
    // first `family_common_components` components of each block are used by
    // every member; the rest are specific, dealt to members round-robin.
    int comp_base = 0;
    int item_base = 0;
    for (int r = 0; r < R; ++r) {
        const int n_items = cfg.family_sizes[r];
        const int n_comps = cfg.family_component_counts[r];
        const int n_common = cfg.family_common_components;

        for (int j = 0; j < n_items; ++j) inst.family_of_item[item_base + j] = r;

        for (int c = 0; c < n_common; ++c)
            for (int j = 0; j < n_items; ++j)
                inst.gozinto[comp_base + c][item_base + j] = quantity();

        for (int c = n_common; c < n_comps; ++c) {
            int owner = (c - n_common) % n_items;
            inst.gozinto[comp_base + c][item_base + owner] = quantity();
        }

        comp_base += n_comps;
        item_base += n_items;
    }

    // Outcast items: independent component inclusion across the whole
    // component set. An empty row would leave the item unassemblable, so a
    // single uniformly chosen component backstops it.
    for (int o = 0; o < cfg.num_outcast_items; ++o) {
        const int j = item_base + o;
        inst.family_of_item[j] = R + o; // singleton family
        bool any = false;
        for (int i = 0; i < I; ++i) {
            if (rng.bernoulli(cfg.outcast_inclusion_prob)) {
                inst.gozinto[i][j] = quantity();
                any = true;
            }
        }
        if (!any) {
            int i = static_cast<int>(rng.uniform_int(0, I - 1));
            inst.gozinto[i][j] = quantity();
        }
    }

    // Item cost from the bill of materials; price adds a class margin.
    std::vector<double> item_cost(J, 0.0);
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) item_cost[j] += inst.gozinto[i][j] * inst.component_cost[i];

    // Margin class assignment: shuffle items, split by shares.
    std::vector<int> order(J);
    std::iota(order.begin(), order.end(), 0);
    for (int j = J - 1; j > 0; --j)
        std::swap(order[j], order[rng.uniform_int(0, j)]);
    std::vector<int> margin_class(J, 2);
    const int n_low = static_cast<int>(std::lround(cfg.margin_class_shares[0] * J));
    const int n_med = static_cast<int>(std::lround(cfg.margin_class_shares[1] * J));
    for (int k = 0; k < J; ++k)
        margin_class[order[k]] = k < n_low ? 0 : (k < n_low + n_med ? 1 : 2);

    inst.price.resize(J);
    inst.lost_sale_penalty.resize(J);
    for (int j = 0; j < J; ++j) {
        double margin = rng.uniform(cfg.margin_ranges[margin_class[j]]);
        inst.price[j] = item_cost[j] * (1.0 + margin);
        inst.lost_sale_penalty[j] = cfg.lost_sale_factor * inst.price[j];
    }

    inst.holding_cost.resize(I);
    for (int i = 0; i < I; ++i) inst.holding_cost[i] = cfg.holding_factor * inst.component_cost[i];

    inst.machine_time.assign(I, std::vector<double>(M));
    for (int i = 0; i < I; ++i)
        for (int m = 0; m < M; ++m) inst.machine_time[i][m] = rng.uniform(cfg.machine_time_range);

    inst.initial_inventory.assign(I, 0);
    inst.validate();
    return inst;
}

std::vector<double> average_component_requirement(const Instance& inst,
                                                  const std::vector<double>& mean_demand) {
    require(static_cast<int>(mean_demand.size()) == inst.num_end_items(),
            "mean demand dimension does not match instance");
    std::vector<double> req(inst.num_components(), 0.0);
    for (int i = 0; i < inst.num_components(); ++i)
        for (int j = 0; j < inst.num_end_items(); ++j)
            req[i] += inst.gozinto[i][j] * mean_demand[j];
    return req;
}

std::vector<double> compute_capacities(Instance& inst, double gamma,
                                       const std::vector<double>& mean_demand) {
    require(gamma >= 0.0, "compute_capacities: negative tightness");
    for (double d : mean_demand) require(d >= 0.0, "compute_capacities: negative mean demand");
    require(!inst.machine_time.empty(), "compute_capacities: machine times not populated");

    std::vector<double> req = average_component_requirement(inst, mean_demand);
    inst.capacity.assign(inst.num_machines(), 0.0);
    for (int m = 0; m < inst.num_machines(); ++m) {
        double load = 0.0;
        for (int i = 0; i < inst.num_components(); ++i) load += inst.machine_time[i][m] * req[i];
        inst.capacity[m] = gamma * load;
    }
    return inst.capacity;
}

} // namespace ato
