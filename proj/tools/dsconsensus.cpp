// Command-line front end: run, sweep, verify, gen-graph, assets list.
//
// Exit codes: 0 success, 1 usage or validation failure, 2 runtime error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "dsc/emit.hpp"
#include "dsc/json_io.hpp"
#include "dsc/scenario.hpp"
#include "dsc/simulation.hpp"

namespace fs = std::filesystem;
using namespace dsc;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_trace(const std::string& path, const SimulationResult& r) {
    const Frame frame = r.network->frame();
    const auto order = frame.canonical_order();
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "step,agent_id";
    for (auto a : order)
        if (!a.is_empty()) out << ",\"m(" << frame.to_string(a) << ")\"";
    out << '\n';
    char buf[32];
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
        const auto& m = r.trajectory[k];
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            out << r.trace_steps[k] << ',' << i + 1;
            for (auto a : order) {
                if (a.is_empty()) continue;
                std::snprintf(buf, sizeof buf, "%.12f", m(i, a.bits));
                out << ',' << buf;
            }
            out << '\n';
        }
    }
}

int cmd_run(const std::string& scenario, std::optional<double> eps, std::optional<std::uint64_t> seed,
            const std::string& out_dir, bool trace) {
    const auto cfg = load_scenario(scenario, seed);
    SimulationOptions opt;
    opt.epsilon = eps;
    opt.record_trajectory = trace;
    opt.record_pruned = trace;
    const auto r = run_simulation(cfg, opt);
    auto report = report_json(cfg, r);
    if (trace) {
        auto pruned = nlohmann::json::array();
        for (const auto& step : r.pruned) {
            auto edges = nlohmann::json::array();
            for (auto [i, j] : step) edges.push_back({i + 1, j + 1});
            pruned.push_back(edges);
        }
        report["pruned_edges_per_step"] = pruned;
    }
    const std::string text = report.dump(2);
    std::cout << text << '\n';
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / (cfg.name + "-report.json")).string(), text);
        write_text_file((fs::path(out_dir) / (cfg.name + "-scenario.json")).string(), cfg.to_json().dump(2));
        if (trace) write_trace((fs::path(out_dir) / (cfg.name + "-trace.csv")).string(), r);
    }
    return 0;
}

int cmd_sweep(const std::string& scenario, double lo, double hi, double step, const std::string& prop,
              int parallel, std::optional<std::uint64_t> seed, const std::string& out_dir) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw UsageError("need 0 <= --eps-min <= --eps-max <= 1");
    if (!(step > 0.0)) throw UsageError("--eps-step must be positive");
    const auto cfg = load_scenario(scenario, seed);
    SweepOptions opt;
    opt.eps_min = lo;
    opt.eps_max = hi;
    opt.eps_step = step;
    opt.workers = parallel;
    try {
        opt.proposition = cfg.frame().parse(prop);
    } catch (const ParseError& e) {
        throw UsageError(std::string("--prop: ") + e.what());
    }
    const auto result = run_sweep(cfg, opt);
    fs::create_directories(out_dir);
    const auto csv = (fs::path(out_dir) / (cfg.name + ".csv")).string();
    const auto svg = (fs::path(out_dir) / (cfg.name + ".svg")).string();
    emit_csv(result, csv);
    emit_bifurcation_svg(result, svg);
    const auto first = result.first_consensus();
    const auto onset = result.consensus_onset();
    nlohmann::json summary = {{"scenario", cfg.name},
                              {"points", result.points.size()},
                              {"first_consensus_epsilon", first ? nlohmann::json(*first) : nlohmann::json()},
                              {"consensus_onset_epsilon", onset ? nlohmann::json(*onset) : nlohmann::json()},
                              {"min_cluster_count", result.min_cluster_count()},
                              {"csv", csv},
                              {"svg", svg}};
    if (!cfg.leaders.empty()) {
        auto leaders = nlohmann::json::array();
        for (int l : cfg.leaders) leaders.push_back(l + 1);
        summary["leaders"] = leaders;
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_verify(const std::string& scenario, std::optional<double> eps, std::optional<std::uint64_t> seed) {
    const auto cfg = load_scenario(scenario, seed);
    const auto v = verify_scenario(cfg, eps);
    std::cout << v.report.dump(2) << '\n';
    return v.match ? 0 : 1;
}

int cmd_gen_graph(const std::vector<std::string>& er, const std::string& out) {
    if (er.size() != 3) throw UsageError("--er takes <n> <p> <seed>");
    int n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    try {
        n = std::stoi(er[0]);
        p = std::stod(er[1]);
        seed = std::stoull(er[2]);
    } catch (const std::exception&) {
        throw UsageError("--er expects an integer, a probability and a seed");
    }
    if (n < 1 || !(p >= 0.0 && p <= 1.0)) throw UsageError("--er needs n >= 1 and 0 <= p <= 1");
    const auto g = erdos_renyi_connected(n, p, seed);
    auto j = graph_to_json(g.graph);
    j["seed_used"] = g.seed_used;
    if (out.empty()) std::cout << j.dump() << '\n';
    else write_text_file(out, j.dump());
    return 0;
}

int cmd_assets_list() {
    std::cout << "# " << asset_dir().string() << '\n';
    for (const auto& name : list_assets()) {
        std::string desc;
        try {
            const auto j = read_json_file((asset_dir() / (name + ".json")).string());
            desc = j.value("description", "");
        } catch (const Error&) {
        }
        std::cout << name << (desc.empty() ? "" : "  " + desc) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Opinion dynamics with Dempster-Shafer agents under bounded confidence"};
    app.require_subcommand(1);

    std::string scenario;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool trace = false;

    auto* run = app.add_subcommand("run", "simulate one scenario to convergence");
    run->add_option("--scenario", scenario, "scenario file or built-in name")->required();
    run->add_option("--epsilon", eps, "bound of confidence for every agent")->check(CLI::Range(0.0, 1.0));
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "directory for report/scenario/trace files");
    run->add_flag("--trace", trace, "record per-step opinions and pruned edges");

    double lo = 0.0, hi = 1.0, step = 0.01;
    std::string prop = "1";
    int parallel = 1;
    auto* sweep = app.add_subcommand("sweep", "bifurcation sweep over epsilon");
    sweep->add_option("--scenario", scenario, "scenario file or built-in name")->required();
    sweep->add_option("--eps-min", lo, "first grid point");
    sweep->add_option("--eps-max", hi, "last grid point");
    sweep->add_option("--eps-step", step, "grid spacing");
    sweep->add_option("--prop", prop, "proposition to record, e.g. 1 or 2,3 or *");
    sweep->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "override the scenario seed");
    sweep->add_option("--out", out_dir, "output directory")->required();

    auto* verify = app.add_subcommand("verify", "check the leader/follower consensus theorems on a run");
    verify->add_option("--scenario", scenario, "scenario file or built-in name")->required();
    verify->add_option("--epsilon", eps, "bound of confidence for every agent")->check(CLI::Range(0.0, 1.0));
    verify->add_option("--seed", seed, "override the scenario seed");

    std::vector<std::string> er;
    std::string graph_out;
    auto* gen = app.add_subcommand("gen-graph", "connected Erdos-Renyi graph as JSON");
    gen->add_option("--er", er, "<n> <p> <seed>")->expected(3)->required();
    gen->add_option("--out", graph_out, "output file (stdout if omitted)");

    auto* assets = app.add_subcommand("assets", "built-in scenarios");
    assets->require_subcommand(1);
    auto* list = assets->add_subcommand("list", "print built-in scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(scenario, eps, seed, out_dir, trace);
        if (sweep->parsed()) return cmd_sweep(scenario, lo, hi, step, prop, parallel, seed, out_dir);
        if (verify->parsed()) return cmd_verify(scenario, eps, seed);
        if (gen->parsed()) return cmd_gen_graph(er, graph_out);
        if (list->parsed()) return cmd_assets_list();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const InvalidScenario& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
