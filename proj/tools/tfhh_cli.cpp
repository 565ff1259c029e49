// tfhh: experiment driver for gossip-based time-faded heavy hitters.
//
//   tfhh run  [--config FILE] [--profile desk|full] [--<field> VALUE ...] [--set k=v ...]
//   tfhh plan --phi 0.02 --eps 0.01 --delta-g 0.01 --delta 0.02 --p-star 5000
//   tfhh gen  [config flags] [--stream-out FILE] [--topology-out FILE] [--rep N]
//
// Exit codes: 0 success, 2 configuration error, 1 runtime error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfhh/experiment.hpp"
#include "tfhh/planner.hpp"
#include "tfhh/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutputDirEnv = "TFHH_OUTPUT_DIR";

struct ConfigFlags {
    std::string config_file;
    std::string profile = "desk";
    std::vector<std::string> sets;
    std::string sweep;
    std::map<std::string, std::string> fields;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& flags) {
    cmd.add_option("--config", flags.config_file, "JSON experiment config");
    cmd.add_option("--profile", flags.profile, "Base profile: desk or full")
        ->check(CLI::IsMember({"desk", "full"}));
    cmd.add_option("--set", flags.sets, "Override a config field, key=value (repeatable)");
    cmd.add_option("--sweep", flags.sweep, "Sweep one field: key=v1,v2,...");
    const json fields = tfhh::to_json(tfhh::ExperimentConfig{});
    for (const auto& [key, value] : fields.items()) {
        std::string flag = "--" + key;
        for (char& c : flag) {
            if (c == '_') c = '-';
        }
        cmd.add_option(flag, flags.fields[key], "Config field '" + key + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tfhh::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<tfhh::ExperimentConfig> resolve_configs(const ConfigFlags& flags) {
    const tfhh::ExperimentConfig base =
        flags.profile == "full" ? tfhh::ExperimentConfig::full() : tfhh::ExperimentConfig::desk();
    json doc = json::object();
    if (!flags.config_file.empty()) {
        doc = json::parse(read_file(flags.config_file), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw tfhh::ConfigError("config file '" + flags.config_file + "' is not a JSON object");
        }
    }
    for (const auto& [key, value] : flags.fields) {
        if (!value.empty()) tfhh::apply_override(doc, key + "=" + value);
    }
    for (const auto& s : flags.sets) tfhh::apply_override(doc, s);
    if (!flags.sweep.empty()) {
        const auto eq = flags.sweep.find('=');
        if (eq == std::string::npos) throw tfhh::ConfigError("--sweep expects key=v1,v2,...");
        json values = json::array();
        std::stringstream ss(flags.sweep.substr(eq + 1));
        for (std::string item; std::getline(ss, item, ',');) {
            json v = json::parse(item, nullptr, false);
            values.push_back(v.is_discarded() ? json(item) : v);
        }
        doc["sweep"] = {{"field", flags.sweep.substr(0, eq)}, {"values", values}};
    }
    return tfhh::expand_sweep(doc, base);
}

fs::path output_path(const std::string& configured) {
    fs::path p(configured);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) p = fs::path(dir) / p;
    }
    return p;
}

int cmd_run(const ConfigFlags& flags, unsigned threads, bool print_config) {
    const auto configs = resolve_configs(flags);
    if (print_config) {
        for (const auto& c : configs) std::cout << tfhh::render(c);
        return 0;
    }
    const fs::path out_path = output_path(configs.front().output);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    fs::path summary_path = out_path;
    summary_path.replace_extension(".summary.csv");

    std::ofstream rows(out_path, std::ios::binary);
    std::ofstream summary(summary_path, std::ios::binary);
    if (!rows || !summary) throw std::runtime_error("cannot write to '" + out_path.string() + "'");
    rows << tfhh::csv_header();
    summary << tfhh::summary_header();

    for (const auto& cfg : configs) {
        const tfhh::ExperimentResult result = tfhh::run_experiment(cfg, threads);
        tfhh::write_csv_rows(rows, result);
        tfhh::write_summary_rows(summary, result);
        std::cout << "config " << result.hash << ": " << result.records.size() << " rows";
        if (result.has_summary()) {
            const auto agg = result.summary();
            std::printf(", recall %.4f +- %.4f, precision %.4f +- %.4f, ARE %.3g +- %.3g (95%% CI)",
                        agg.recall.mean, agg.recall.ci95_half_width, agg.precision.mean,
                        agg.precision.ci95_half_width, agg.are.mean, agg.are.ci95_half_width);
        }
        std::cout << ", invalid reps " << result.invalid_repetitions << ", unconverged peers "
                  << result.unconverged << ", gossip bytes " << result.bytes << "\n";
    }
    std::cout << "wrote " << out_path.string() << " and " << summary_path.string() << "\n";
    return 0;
}

int cmd_plan(const tfhh::planner::PlanInput& in, const std::string& strategy_name,
             const std::string& format) {
    using namespace tfhh::planner;
    const Strategy strategy = strategy_from_string(strategy_name);
    try {
        in.validate();
    } catch (const std::invalid_argument& e) {
        throw tfhh::ConfigError(e.what());
    }
    const Plan p = plan(in, strategy);
    if (format == "json") {
        json j = {{"strategy", to_string(strategy)}, {"d", p.depth},        {"w", p.width},
                  {"R", p.rounds},                   {"eps_star", p.eps_star},
                  {"predicted_eps", p.predicted_tolerance}};
        std::cout << j.dump() << "\n";
    } else {
        std::printf("strategy,d,w,R,eps_star,predicted_eps\n%s,%lld,%lld,%lld,%.10g,%.10g\n",
                    to_string(strategy).c_str(), static_cast<long long>(p.depth),
                    static_cast<long long>(p.width), static_cast<long long>(p.rounds), p.eps_star,
                    p.predicted_tolerance);
    }
    return 0;
}

int cmd_gen(const ConfigFlags& flags, const std::string& stream_file, const std::string& topo_file,
            int rep) {
    const auto configs = resolve_configs(flags);
    const auto& cfg = configs.front();
    if (stream_file.empty() && topo_file.empty()) {
        throw tfhh::ConfigError("gen needs --stream-out and/or --topology-out");
    }
    if (!stream_file.empty()) {
        const fs::path p = output_path(stream_file);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        const auto stream = tfhh::repetition_stream(cfg, rep);
        tfhh::write_stream(stream, out);
        std::cout << "wrote " << stream.size() << " arrivals to " << p.string() << "\n";
    }
    if (!topo_file.empty()) {
        const fs::path p = output_path(topo_file);
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        const auto topo = tfhh::repetition_topology(cfg, rep);
        tfhh::write_edge_list(topo, out);
        std::cout << "wrote " << topo.edge_count() << " edges to " << p.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gossip-based mining of time-faded heavy hitters: simulator and planner"};
    app.require_subcommand(1);

    ConfigFlags run_flags;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool print_config = false;
    auto* run = app.add_subcommand("run", "Run an experiment and write per-peer metrics CSV");
    add_config_flags(*run, run_flags);
    run->add_option("--threads", threads, "Worker threads across repetitions");
    run->add_flag("--print-config", print_config, "Print the resolved config(s) and exit");

    tfhh::planner::PlanInput plan_in;
    std::string strategy = "time_dominant";
    std::string format = "csv";
    auto* plan = app.add_subcommand("plan", "Choose sketch depth/width and rounds");
    plan->add_option("--phi", plan_in.phi, "Support threshold")->capture_default_str();
    plan->add_option("--eps", plan_in.eps, "False-positive tolerance")->capture_default_str();
    plan->add_option("--delta-g", plan_in.delta_g, "Gossip failure probability")->capture_default_str();
    plan->add_option("--delta", plan_in.delta, "Overall failure probability")->capture_default_str();
    plan->add_option("--p-star", plan_in.p_star, "Upper estimate of the peer count")->capture_default_str();
    plan->add_option("--strategy", strategy, "time_dominant or space_dominant")->capture_default_str();
    plan->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    ConfigFlags gen_flags;
    std::string stream_file, topo_file;
    int rep = 0;
    auto* gen = app.add_subcommand("gen", "Dump a repetition's stream and/or topology");
    add_config_flags(*gen, gen_flags);
    gen->add_option("--stream-out", stream_file, "Binary stream output (12-byte records)");
    gen->add_option("--topology-out", topo_file, "Edge-list output");
    gen->add_option("--rep", rep, "Repetition index")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run) return cmd_run(run_flags, threads, print_config);
        if (*plan) return cmd_plan(plan_in, strategy, format);
        if (*gen) return cmd_gen(gen_flags, stream_file, topo_file, rep);
    } catch (const tfhh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
