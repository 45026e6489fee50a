#pragma once

#include <cstdint>
#include <vector>

#include "shortcut/domain.hpp"
#include "shortcut/optimizer.hpp"

namespace shortcut {

template <class T>
struct Range {
    T min{};
    T max{};

    friend bool operator==(const Range&, const Range&) = default;
};

struct GeneratorConfig {
    std::uint64_t seed = 42;

    std::size_t n_nodes = 120;
    double store_fraction = 0.95;
    std::size_t n_items = 300;
    double sfs_eligible_fraction = 0.58;
    Range<double> item_weight_range{0.2, 6.0};
    Range<double> item_price_range{5.0, 120.0};

    std::size_t n_orders = 10000;
    double items_per_order_mean = 3.1;
    double single_item_order_fraction = 0.301;
    // Mass for quantity 1, 2, 3, ...
    std::vector<double> quantity_distribution{0.75, 0.17, 0.08};

    double inventory_density = 0.5;
    double fc_inventory_density = 0.95;
    Range<std::int64_t> inventory_level_range{1, 12};
    double clearance_probability = 0.03;
    Range<double> clearance_saving_range{0.5, 8.0};

    Range<double> fixed_cost_range{7.0, 12.0};
    Range<double> unit_rate_range{0.002, 0.006};
    double plane_size = 1000.0;

    // Lines per order are capped here.
    std::size_t max_lines = 8;

    void validate() const;
    friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

FulfillmentNetwork generate_network(const GeneratorConfig& config);

// Each order is redrawn (up to 100 attempts) until its lines can be covered
// within the optimizer's candidate set; GenerationError otherwise.
std::vector<Order> generate_orders(const GeneratorConfig& config, const NetworkIndex& network,
                                   const OptimizerConfig& optimizer = {});

// Success probability of the shifted geometric (1 + Geometric) line count,
// truncated at max_lines, whose mean equals `target_mean`.
double line_count_parameter(double target_mean, std::size_t max_lines);

} // namespace shortcut
