#include "shortcut/formats.hpp"

#include <limits>
#include <set>

#include "json.hpp"
#include "shortcut/io.hpp"

namespace shortcut {

using nlohmann::ordered_json;

namespace {

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct Table {
    io::FileHeader header;
    std::vector<Row> rows;
};

std::string table_head(const io::FileHeader& header, const std::vector<std::string>& columns) {
    return io::header_line(header) + "\n" + io::csv_row(columns);
}

Table read_table(std::string_view text, const std::string& source, std::string_view format, int version,
                 const std::vector<std::string>& columns) {
    const auto lines = io::split_lines(text);
    if (lines.empty()) throw ParseError(source, 1, "empty file");
    Table table;
    table.header = io::expect_header(lines[0], source, format, version);
    if (lines.size() < 2) throw ParseError(source, 2, "missing column header row");
    if (io::split_csv_line(lines[1], source, 2) != columns)
        throw ParseError(source, 2, "unexpected columns; expected '" + io::csv_row(columns).substr(0, io::csv_row(columns).size() - 1) + "'");
    for (std::size_t k = 2; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        auto fields = io::split_csv_line(lines[k], source, k + 1);
        if (fields.size() != columns.size())
            throw ParseError(source, k + 1, "expected " + std::to_string(columns.size()) + " fields, found " +
                                                std::to_string(fields.size()));
        table.rows.push_back({k + 1, std::move(fields)});
    }
    return table;
}

std::string opt_double(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

std::optional<double> parse_opt_double(const std::string& s, const std::string& source, std::size_t line) {
    if (s.empty()) return std::nullopt;
    return io::parse_double(s, source, line);
}

int parse_small_int(const std::string& s, const std::string& source, std::size_t line) {
    const auto v = io::parse_int(s, source, line);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ParseError(source, line, "integer out of range: " + s);
    return static_cast<int>(v);
}

bool parse_bool(const std::string& s, const std::string& source, std::size_t line) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw ParseError(source, line, "expected 0 or 1, found '" + s + "'");
}

std::string json_document(const io::FileHeader& header, const ordered_json& body) {
    return io::header_line(header) + "\n" + body.dump(1) + "\n";
}

ordered_json parse_json_document(std::string_view text, const std::string& source, std::string_view format,
                                 int version, io::FileHeader* header_out = nullptr) {
    const auto newline = text.find('\n');
    if (newline == std::string_view::npos) throw ParseError(source, 1, "truncated file");
    auto header = io::expect_header(text.substr(0, newline), source, format, version);
    if (header_out) *header_out = header;
    try {
        return ordered_json::parse(text.substr(newline + 1));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 2, std::string("malformed JSON body: ") + e.what());
    }
}

const std::vector<std::string> kNetworkColumns{"record", "item_id", "node_id", "kind",   "x",
                                               "y",      "fixed_cost", "unit_rate", "weight", "price",
                                               "sfs_eligible", "quantity", "clearance_saving"};

} // namespace

// --- network ------------------------------------------------------------------------

std::string network_to_text(const FulfillmentNetwork& net) {
    std::string out = table_head({"network", 1, {}}, kNetworkColumns);
    for (const auto& item : net.catalog)
        out += io::csv_row({"item", item.item_id, "", "", "", "", "", "", io::format_double(item.weight),
                            io::format_double(item.price), item.sfs_eligible ? "1" : "0", "", ""});
    for (const auto& node : net.nodes)
        out += io::csv_row({"node", "", node.node_id, std::string(to_string(node.kind)),
                            io::format_double(node.location.x), io::format_double(node.location.y),
                            io::format_double(node.fixed_shipment_cost), io::format_double(node.unit_rate), "", "",
                            "", "", ""});
    std::set<StockKey> keys;
    for (const auto& [key, _] : net.inventory) keys.insert(key);
    for (const auto& [key, _] : net.clearance_saving) keys.insert(key);
    for (const auto& key : keys) {
        const auto inv = net.inventory.find(key);
        const auto sav = net.clearance_saving.find(key);
        out += io::csv_row({"stock", key.first, key.second, "", "", "", "", "", "", "", "",
                            inv == net.inventory.end() ? "" : std::to_string(inv->second),
                            sav == net.clearance_saving.end() ? "" : io::format_double(sav->second)});
    }
    return out;
}

FulfillmentNetwork network_from_text(std::string_view text, const std::string& source) {
    const auto table = read_table(text, source, "network", 1, kNetworkColumns);
    FulfillmentNetwork net;
    for (const auto& [line, f] : table.rows) {
        if (f[0] == "item") {
            net.catalog.push_back({f[1], io::parse_double(f[8], source, line), io::parse_double(f[9], source, line),
                                   parse_bool(f[10], source, line)});
        } else if (f[0] == "node") {
            Node node;
            node.node_id = f[2];
            try {
                node.kind = node_kind_from_string(f[3]);
            } catch (const Error& e) {
                throw ParseError(source, line, e.what());
            }
            node.location = {io::parse_double(f[4], source, line), io::parse_double(f[5], source, line)};
            node.fixed_shipment_cost = io::parse_double(f[6], source, line);
            node.unit_rate = io::parse_double(f[7], source, line);
            net.nodes.push_back(std::move(node));
        } else if (f[0] == "stock") {
            const StockKey key{f[1], f[2]};
            if (f[11].empty() && f[12].empty()) throw ParseError(source, line, "stock row has neither quantity nor saving");
            if (!f[11].empty() && !net.inventory.emplace(key, io::parse_int(f[11], source, line)).second)
                throw ParseError(source, line, "duplicate stock row for " + key.first + "@" + key.second);
            if (!f[12].empty() && !net.clearance_saving.emplace(key, io::parse_double(f[12], source, line)).second)
                throw ParseError(source, line, "duplicate saving for " + key.first + "@" + key.second);
        } else {
            throw ParseError(source, line, "unknown record type '" + f[0] + "'");
        }
    }
    return net;
}

// --- orders ---------------------------------------------------------------------------

std::string orders_to_text(const std::vector<Order>& orders) {
    std::string out = table_head({"orders", 1, {}}, {"order_id", "dest_x", "dest_y", "lines"});
    for (const auto& order : orders) {
        std::string lines;
        for (std::size_t k = 0; k < order.lines.size(); ++k) {
            if (k) lines += ';';
            lines += order.lines[k].item_id + ":" + std::to_string(order.lines[k].quantity);
        }
        // The line list is always quoted so it reads as one field.
        std::string quoted = "\"";
        for (char c : lines) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
        quoted += '"';
        auto row = io::csv_row({order.order_id, io::format_double(order.destination.x),
                                io::format_double(order.destination.y)});
        row.pop_back();
        out += row + "," + quoted + "\n";
    }
    return out;
}

std::vector<Order> orders_from_text(std::string_view text, const std::string& source) {
    const auto table = read_table(text, source, "orders", 1, {"order_id", "dest_x", "dest_y", "lines"});
    std::vector<Order> orders;
    for (const auto& [line, f] : table.rows) {
        Order order;
        order.order_id = f[0];
        order.destination = {io::parse_double(f[1], source, line), io::parse_double(f[2], source, line)};
        std::string_view rest = f[3];
        while (!rest.empty()) {
            const auto semi = rest.find(';');
            const auto entry = rest.substr(0, semi);
            rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            const auto colon = entry.rfind(':');
            if (colon == std::string_view::npos || colon == 0)
                throw ParseError(source, line, "malformed order line '" + std::string(entry) + "'");
            order.lines.push_back({std::string(entry.substr(0, colon)),
                                   parse_small_int(std::string(entry.substr(colon + 1)), source, line)});
        }
        orders.push_back(std::move(order));
    }
    return orders;
}

// --- labels -----------------------------------------------------------------------------

std::string labels_to_text(const std::vector<SplitLabel>& labels) {
    std::string out = table_head({"labels", 1, {}}, {"order_id", "y", "nodes_used", "objective"});
    for (const auto& l : labels)
        out += io::csv_row({l.order_id, std::to_string(l.y), std::to_string(l.nodes_used), io::format_double(l.objective)});
    return out;
}

std::vector<SplitLabel> labels_from_text(std::string_view text, const std::string& source) {
    const auto table = read_table(text, source, "labels", 1, {"order_id", "y", "nodes_used", "objective"});
    std::vector<SplitLabel> labels;
    for (const auto& [line, f] : table.rows) {
        SplitLabel l{f[0], parse_small_int(f[1], source, line), parse_small_int(f[2], source, line),
                     io::parse_double(f[3], source, line)};
        if (l.y != 0 && l.y != 1) throw ParseError(source, line, "label must be 0 or 1");
        labels.push_back(std::move(l));
    }
    return labels;
}

// --- features -----------------------------------------------------------------------------

std::string features_to_text(const std::vector<FeatureVector>& features, const FeatureCatalog& catalog) {
    std::vector<std::string> columns{"order_id"};
    for (const auto& name : catalog.names()) columns.push_back(name);
    std::string out = table_head({"features", 1, {{"catalog", catalog.version}}}, columns);
    std::vector<std::string> row;
    for (const auto& fv : features) {
        if (fv.values.size() != catalog.size()) throw ShapeError("feature vector " + fv.order_id + " has the wrong length");
        row.assign(1, fv.order_id);
        for (double v : fv.values) row.push_back(io::format_double(v));
        out += io::csv_row(row);
    }
    return out;
}

std::vector<FeatureVector> features_from_text(std::string_view text, const std::string& source,
                                              const FeatureCatalog& catalog) {
    std::vector<std::string> columns{"order_id"};
    for (const auto& name : catalog.names()) columns.push_back(name);
    const auto table = read_table(text, source, "features", 1, columns);
    const auto it = table.header.attributes.find("catalog");
    if (it == table.header.attributes.end() || it->second != catalog.version)
        throw VersionError(source + ": feature catalog '" +
                           (it == table.header.attributes.end() ? std::string("?") : it->second) +
                           "' does not match '" + catalog.version + "'");
    std::vector<FeatureVector> out;
    for (const auto& [line, f] : table.rows) {
        FeatureVector fv{f[0], {}};
        for (std::size_t j = 1; j < f.size(); ++j) fv.values.push_back(io::parse_double(f[j], source, line));
        out.push_back(std::move(fv));
    }
    return out;
}

// --- routing outcomes ------------------------------------------------------------------------

namespace {
const std::vector<std::string> kOutcomeColumns{
    "order_id", "route",      "p_split", "decide_cost_units", "nodes_used", "objective", "shipping_cost",
    "clearance_savings", "regret", "true_split", "allocations"};
}

std::string outcomes_to_text(const std::vector<RoutingOutcome>& outcomes) {
    std::string out = table_head({"outcomes", 1, {}}, kOutcomeColumns);
    for (const auto& o : outcomes) {
        std::string alloc;
        for (std::size_t k = 0; k < o.assignment.allocations.size(); ++k) {
            const auto& a = o.assignment.allocations[k];
            if (k) alloc += ';';
            alloc += a.item_id + "@" + a.node_id + ":" + std::to_string(a.quantity);
        }
        out += io::csv_row({o.order_id, std::string(to_string(o.route)), opt_double(o.predicted_p_split),
                            std::to_string(o.decide_cost_units), std::to_string(o.assignment.nodes_used),
                            io::format_double(o.assignment.objective), io::format_double(o.assignment.shipping_cost),
                            io::format_double(o.assignment.clearance_savings_total), opt_double(o.regret),
                            o.true_split ? (*o.true_split ? "1" : "0") : "", alloc});
    }
    return out;
}

std::vector<RoutingOutcome> outcomes_from_text(std::string_view text, const std::string& source) {
    const auto table = read_table(text, source, "outcomes", 1, kOutcomeColumns);
    std::vector<RoutingOutcome> out;
    for (const auto& [line, f] : table.rows) {
        RoutingOutcome o;
        o.order_id = f[0];
        try {
            o.route = route_from_string(f[1]);
        } catch (const Error& e) {
            throw ParseError(source, line, e.what());
        }
        o.predicted_p_split = parse_opt_double(f[2], source, line);
        o.decide_cost_units = static_cast<std::uint64_t>(io::parse_int(f[3], source, line));
        o.assignment.nodes_used = parse_small_int(f[4], source, line);
        o.assignment.objective = io::parse_double(f[5], source, line);
        o.assignment.shipping_cost = io::parse_double(f[6], source, line);
        o.assignment.clearance_savings_total = io::parse_double(f[7], source, line);
        o.regret = parse_opt_double(f[8], source, line);
        if (!f[9].empty()) o.true_split = parse_bool(f[9], source, line);
        std::string_view rest = f[10];
        while (!rest.empty()) {
            const auto semi = rest.find(';');
            const auto entry = rest.substr(0, semi);
            rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            const auto at = entry.find('@');
            const auto colon = entry.rfind(':');
            if (at == std::string_view::npos || colon == std::string_view::npos || colon < at)
                throw ParseError(source, line, "malformed allocation '" + std::string(entry) + "'");
            o.assignment.allocations.push_back({std::string(entry.substr(0, at)),
                                                std::string(entry.substr(at + 1, colon - at - 1)),
                                                parse_small_int(std::string(entry.substr(colon + 1)), source, line)});
        }
        out.push_back(std::move(o));
    }
    return out;
}

// --- stream summary --------------------------------------------------------------------------

std::string summary_to_text(const StreamSummary& s) {
    ordered_json j;
    j["n_orders"] = s.n_orders;
    j["n_routed"] = s.n_routed;
    j["route_counts"] = s.route_counts;
    j["route_fractions"] = s.route_fractions;
    j["optimizer_invocations"] = s.optimizer_invocations;
    j["optimizer_invocations_avoided"] = s.optimizer_invocations_avoided;
    j["decide_cost_units"] = s.decide_cost_units;
    j["counterfactual_cost_units"] =
        s.counterfactual_cost_units ? ordered_json(*s.counterfactual_cost_units) : ordered_json(nullptr);
    j["non_trivial_orders"] = s.non_trivial_orders;
    j["shortcut_coverage"] = s.shortcut_coverage;
    j["shortcut_errors"] = s.shortcut_errors ? ordered_json(*s.shortcut_errors) : ordered_json(nullptr);
    j["shortcut_error_rate"] = s.shortcut_error_rate ? ordered_json(*s.shortcut_error_rate) : ordered_json(nullptr);
    j["total_regret"] = s.total_regret ? ordered_json(*s.total_regret) : ordered_json(nullptr);
    j["mean_regret"] = s.mean_regret ? ordered_json(*s.mean_regret) : ordered_json(nullptr);
    j["errors"] = ordered_json::array();
    for (const auto& e : s.errors)
        j["errors"].push_back({{"order_id", e.order_id}, {"code", e.code}, {"message", e.message}});
    return json_document({"stream-summary", 1, {}}, j);
}

StreamSummary summary_from_text(std::string_view text, const std::string& source) {
    const auto j = parse_json_document(text, source, "stream-summary", 1);
    try {
        StreamSummary s;
        s.n_orders = j.at("n_orders").get<std::size_t>();
        s.n_routed = j.at("n_routed").get<std::size_t>();
        s.route_counts = j.at("route_counts").get<std::map<std::string, std::size_t>>();
        s.route_fractions = j.at("route_fractions").get<std::map<std::string, double>>();
        s.optimizer_invocations = j.at("optimizer_invocations").get<std::size_t>();
        s.optimizer_invocations_avoided = j.at("optimizer_invocations_avoided").get<std::size_t>();
        s.decide_cost_units = j.at("decide_cost_units").get<std::uint64_t>();
        if (!j.at("counterfactual_cost_units").is_null())
            s.counterfactual_cost_units = j.at("counterfactual_cost_units").get<std::uint64_t>();
        s.non_trivial_orders = j.at("non_trivial_orders").get<std::size_t>();
        s.shortcut_coverage = j.at("shortcut_coverage").get<double>();
        if (!j.at("shortcut_errors").is_null()) s.shortcut_errors = j.at("shortcut_errors").get<std::size_t>();
        if (!j.at("shortcut_error_rate").is_null()) s.shortcut_error_rate = j.at("shortcut_error_rate").get<double>();
        if (!j.at("total_regret").is_null()) s.total_regret = j.at("total_regret").get<double>();
        if (!j.at("mean_regret").is_null()) s.mean_regret = j.at("mean_regret").get<double>();
        for (const auto& e : j.at("errors"))
            s.errors.push_back({e.at("order_id").get<std::string>(), e.at("code").get<std::string>(),
                                e.at("message").get<std::string>()});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 2, std::string("malformed stream summary: ") + e.what());
    }
}

// --- evaluation tables -----------------------------------------------------------------------

std::string bins_to_text(std::string_view feature, const std::vector<BinRate>& bins) {
    std::string out = table_head({"binned-rates", 1, {{"feature", std::string(feature)}}},
                                 {"lower", "upper", "count", "split_fraction"});
    for (const auto& b : bins)
        out += io::csv_row({io::format_double(b.lower), io::format_double(b.upper), std::to_string(b.count),
                            opt_double(b.split_fraction)});
    return out;
}

std::vector<BinRate> bins_from_text(std::string_view text, const std::string& source) {
    const auto table = read_table(text, source, "binned-rates", 1, {"lower", "upper", "count", "split_fraction"});
    std::vector<BinRate> out;
    for (const auto& [line, f] : table.rows)
        out.push_back({io::parse_double(f[0], source, line), io::parse_double(f[1], source, line),
                       static_cast<std::size_t>(io::parse_int(f[2], source, line)),
                       parse_opt_double(f[3], source, line)});
    return out;
}

std::string curves_to_text(const EvalReport& report) {
    std::string out =
        table_head({"curves", 1, {}}, {"model", "threshold", "coverage", "covered", "accuracy_on_covered"});
    for (const auto& m : report.models)
        for (const auto& p : m.curve)
            out += io::csv_row({m.name, io::format_double(p.threshold), io::format_double(p.coverage),
                                std::to_string(p.covered), opt_double(p.accuracy)});
    return out;
}

std::string importance_to_text(const EvalReport& report) {
    std::string out = table_head({"importance", 1, {}}, {"model", "rank", "feature", "importance"});
    for (const auto& m : report.models)
        for (std::size_t k = 0; k < m.importance.size(); ++k)
            out += io::csv_row({m.name, std::to_string(k + 1), m.importance[k].first,
                                io::format_double(m.importance[k].second)});
    return out;
}

std::string partition_to_text(const PartitionSummary& s, SingleItemCriterion criterion) {
    ordered_json j;
    j["criterion"] = std::string(to_string(criterion));
    j["total"] = s.total;
    j["single_item"] = s.single_item;
    j["multi_item"] = s.multi_item;
    j["multi_item_split"] = s.multi_item_split;
    j["single_item_share"] = s.single_item_share;
    j["multi_item_split_share"] = s.multi_item_split_share;
    j["multi_item_not_split_share"] = s.multi_item_not_split_share;
    j["evaluation_possible"] = s.evaluation_possible;
    return json_document({"partition", 1, {}}, j);
}

PartitionSummary partition_from_text(std::string_view text, const std::string& source) {
    const auto j = parse_json_document(text, source, "partition", 1);
    try {
        PartitionSummary s;
        s.total = j.at("total").get<std::size_t>();
        s.single_item = j.at("single_item").get<std::size_t>();
        s.multi_item = j.at("multi_item").get<std::size_t>();
        s.multi_item_split = j.at("multi_item_split").get<std::size_t>();
        s.single_item_share = j.at("single_item_share").get<double>();
        s.multi_item_split_share = j.at("multi_item_split_share").get<double>();
        s.multi_item_not_split_share = j.at("multi_item_not_split_share").get<double>();
        s.evaluation_possible = j.at("evaluation_possible").get<bool>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 2, std::string("malformed partition summary: ") + e.what());
    }
}

// --- path helpers ------------------------------------------------------------------------------

FulfillmentNetwork read_network(const std::filesystem::path& path) {
    return network_from_text(io::read_file(path), path.string());
}

std::vector<Order> read_orders(const std::filesystem::path& path) {
    return orders_from_text(io::read_file(path), path.string());
}

std::vector<SplitLabel> read_labels(const std::filesystem::path& path) {
    return labels_from_text(io::read_file(path), path.string());
}

std::vector<FeatureVector> read_features(const std::filesystem::path& path) {
    return features_from_text(io::read_file(path), path.string());
}

} // namespace shortcut
