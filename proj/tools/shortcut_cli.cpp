#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shortcut/commands.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::size_t threads = 1;
    bool quiet = false;
    std::string network, orders, labels, features, model;
};

void error_line(const std::string& code, const std::string& message) {
    std::string flat = message;
    for (auto& c : flat)
        if (c == '\n' || c == '\r') c = ' ';
    std::cerr << "error: code=" << code << " message=" << flat << std::endl;
}

shortcut::CommandContext make_context(const Flags& f) {
    shortcut::CommandContext ctx;
    if (!f.config.empty()) ctx.config = shortcut::load_config(f.config);
    if (f.seed) ctx.config.set_seed(*f.seed);
    ctx.config.validate();
    ctx.out_dir = f.out;
    if (f.threads < 1) throw shortcut::ConfigError("--threads must be >= 1");
    ctx.threads = f.threads;
    ctx.log = f.quiet ? nullptr : &std::cout;
    if (!f.network.empty()) ctx.network = f.network;
    if (!f.orders.empty()) ctx.orders = f.orders;
    if (!f.labels.empty()) ctx.labels = f.labels;
    if (!f.features.empty()) ctx.features = f.features;
    if (!f.model.empty()) ctx.model = f.model;
    return ctx;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order split prediction and fulfillment shortcut toolkit"};
    app.require_subcommand(1);
    Flags flags;

    using Action = std::function<void(const shortcut::CommandContext&)>;
    const std::vector<std::tuple<std::string, std::string, Action>> commands{
        {"generate", "Generate a synthetic network and order stream", shortcut::cmd_generate},
        {"label", "Solve every order exactly and write split labels",
         [](const auto& c) { shortcut::cmd_label(c); }},
        {"featurize", "Extract pre-decision order features", shortcut::cmd_featurize},
        {"train", "Train every configured model kind on multi-item orders",
         [](const auto& c) { shortcut::cmd_train(c); }},
        {"evaluate", "Repeated nested cross-validation with curves and tables",
         [](const auto& c) { shortcut::cmd_evaluate(c); }},
        {"route", "Route the order stream through the shortcut policy",
         [](const auto& c) { shortcut::cmd_route(c); }},
        {"report", "Write a human-readable report for a run directory",
         [](const auto& c) { shortcut::cmd_report(c); }},
        {"pipeline", "Run every step in order", shortcut::cmd_pipeline},
    };

    Action selected;
    std::string selected_name;
    for (const auto& [name, help, action] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "Run configuration (JSON)");
        sub->add_option("--seed", flags.seed, "Override the configured seed");
        sub->add_option("--out", flags.out, "Run directory")->capture_default_str();
        sub->add_option("--threads", flags.threads, "Worker threads")->capture_default_str();
        sub->add_flag("--quiet", flags.quiet, "Suppress progress output");
        sub->add_option("--network", flags.network, "Network file (default: <out>/network.csv)");
        sub->add_option("--orders", flags.orders, "Orders file (default: <out>/orders.csv)");
        sub->add_option("--labels", flags.labels, "Labels file (default: <out>/labels.csv)");
        sub->add_option("--features", flags.features, "Features file (default: <out>/features.csv)");
        sub->add_option("--model", flags.model, "Model file used by route");
        sub->callback([&, name = name, action = action] {
            selected = action;
            selected_name = name;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_line("USAGE", e.what());
        return 2;
    }

    try {
        const auto ctx = make_context(flags);
        const auto start = std::chrono::steady_clock::now();
        selected(ctx);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!flags.quiet) {
            char buffer[64];
            std::snprintf(buffer, sizeof buffer, "%.2f", seconds);
            std::cout << selected_name << ": done in " << buffer << " s\n";
        }
    } catch (const shortcut::Error& e) {
        error_line(e.code(), e.what());
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        error_line("IO", e.what());
        return 1;
    } catch (const std::exception& e) {
        error_line("INTERNAL", e.what());
        return 1;
    }
    return 0;
}
