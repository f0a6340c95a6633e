#include "dsc/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "dsc/json_io.hpp"
#include "dsc/sampling.hpp"

#ifndef DSC_ASSET_DIR
#define DSC_ASSET_DIR "assets"
#endif

namespace dsc {

namespace fs = std::filesystem;
using nlohmann::json;

Engine ScenarioConfig::resolved_engine() const {
    std::vector<BodyOfEvidence> ops;
    for (const auto& a : agents) ops.push_back(a.initial);
    if (engine == Engine::Auto) return select_engine(ops);
    check_engine(engine, ops);
    return engine;
}

std::shared_ptr<const Network> ScenarioConfig::network(std::optional<double> epsilon) const {
    Network net(graph, agents);
    if (epsilon) return std::make_shared<const Network>(net.with_epsilon(*epsilon));
    return std::make_shared<const Network>(std::move(net));
}

json ScenarioConfig::to_json() const {
    json agents_json = json::array();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        agents_json.push_back({{"label", labels[i]},
                               {"strategy", to_string(agents[i].strategy)},
                               {"alpha", agents[i].alpha},
                               {"epsilon", agents[i].epsilon},
                               {"initial", boe_to_json(agents[i].initial)}});
    }
    json leaders_json = json::array();
    for (int l : leaders) leaders_json.push_back(l + 1);
    json j = {{"name", name},
              {"frame_size", frame_size},
              {"engine", to_string(engine)},
              {"seed", seed},
              {"graph", graph_to_json(graph)},
              {"agents", agents_json},
              {"leaders", leaders_json},
              {"limits",
               {{"max_iterations", max_iterations},
                {"step_tol", step_tol},
                {"window", window},
                {"cluster_tol", cluster_tol}}}};
    // How the sampled parts were drawn; ignored when loaded back.
    j["provenance"] = {{"leaders_random", leaders_random}};
    if (er) {
        j["provenance"]["er"] = {{"n", er->n}, {"p", er->p}, {"seed", er->seed}, {"seed_used", er->seed_used},
                                 {"attempts", er->attempts}};
    }
    return j;
}

fs::path asset_dir() {
    if (const char* env = std::getenv("DS_CONSENSUS_ASSETS"); env && *env) return fs::path(env);
    return fs::path(DSC_ASSET_DIR);
}

std::vector<std::string> list_assets() {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(asset_dir(), ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& field) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidScenario(field + "." + key, "wrong type");
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& field) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw InvalidScenario(field.empty() ? key : field + "." + key, "unknown key");
    }
}

SamplingSpec parse_sampling(const json& j, const Frame& frame, const std::string& field) {
    reject_unknown(j, {"dirichlet", "targets"}, field);
    if (!j.contains("dirichlet") || !j["dirichlet"].is_array()) {
        throw InvalidScenario(field + ".dirichlet", "expected an array of concentration parameters");
    }
    SamplingSpec spec;
    for (const auto& a : j["dirichlet"]) {
        if (!a.is_number()) throw InvalidScenario(field + ".dirichlet", "non-numeric parameter");
        spec.concentration.push_back(a.get<double>());
    }
    if (j.contains("targets")) {
        for (const auto& t : j["targets"]) {
            if (!t.is_string()) throw InvalidScenario(field + ".targets", "expected proposition strings");
            try {
                spec.targets.push_back(frame.parse(t.get<std::string>()));
            } catch (const ParseError& e) {
                throw InvalidScenario(field + ".targets", e.what());
            }
        }
    } else {
        // Default: the singletons in order.
        for (int p = 0; p < frame.size(); ++p) spec.targets.push_back(Proposition::singleton(p));
    }
    try {
        spec.check(frame);
    } catch (const std::invalid_argument& e) {
        throw InvalidScenario(field, e.what());
    }
    return spec;
}

}  // namespace

ScenarioConfig parse_scenario(const json& j, std::optional<std::uint64_t> seed_override, const fs::path& base) {
    if (!j.is_object()) throw InvalidScenario("(root)", "scenario must be a JSON object");
    reject_unknown(j,
                   {"name", "description", "notes", "provenance", "frame_size", "graph", "defaults", "agents",
                    "leaders", "central_groups", "engine", "seed", "limits"},
                   "");
    ScenarioConfig cfg;
    cfg.name = get_or<std::string>(j, "name", "scenario", "");
    cfg.description = get_or<std::string>(j, "description", "", "");
    cfg.frame_size = get_or<int>(j, "frame_size", 3, "");
    if (cfg.frame_size < 1 || cfg.frame_size > kMaxFrameSize) throw InvalidScenario("frame_size", "must lie in [1, 16]");
    const Frame frame = cfg.frame();
    cfg.seed = seed_override ? *seed_override : get_or<std::uint64_t>(j, "seed", 0, "");
    try {
        cfg.engine = parse_engine(get_or<std::string>(j, "engine", "auto", ""));
    } catch (const ParseError& e) {
        throw InvalidScenario("engine", e.what());
    }

    if (j.contains("limits")) {
        const auto& l = j["limits"];
        reject_unknown(l, {"max_iterations", "step_tol", "window", "cluster_tol"}, "limits");
        cfg.max_iterations = get_or<long>(l, "max_iterations", cfg.max_iterations, "limits");
        cfg.step_tol = get_or<double>(l, "step_tol", cfg.step_tol, "limits");
        cfg.window = get_or<int>(l, "window", cfg.window, "limits");
        cfg.cluster_tol = get_or<double>(l, "cluster_tol", cfg.cluster_tol, "limits");
        if (cfg.max_iterations < 1) throw InvalidScenario("limits.max_iterations", "must be positive");
        if (cfg.window < 1) throw InvalidScenario("limits.window", "must be positive");
        if (!(cfg.step_tol > 0.0)) throw InvalidScenario("limits.step_tol", "must be positive");
        if (!(cfg.cluster_tol >= 0.0)) throw InvalidScenario("limits.cluster_tol", "must be non-negative");
    }

    // Graph: inline, file reference or Erdos-Renyi.
    if (!j.contains("graph") || !j["graph"].is_object()) throw InvalidScenario("graph", "missing graph object");
    const auto& g = j["graph"];
    if (g.contains("er")) {
        const auto& e = g["er"];
        reject_unknown(e, {"n", "p", "seed"}, "graph.er");
        ErSpec er;
        er.n = get_or<int>(e, "n", 0, "graph.er");
        er.p = get_or<double>(e, "p", -1.0, "graph.er");
        if (er.n < 1) throw InvalidScenario("graph.er.n", "must be a positive integer");
        if (!(er.p >= 0.0 && er.p <= 1.0)) throw InvalidScenario("graph.er.p", "must lie in [0, 1]");
        er.seed = seed_override ? *seed_override : get_or<std::uint64_t>(e, "seed", cfg.seed, "graph.er");
        try {
            auto connected = erdos_renyi_connected(er.n, er.p, er.seed);
            cfg.graph = std::move(connected.graph);
            er.seed_used = connected.seed_used;
            er.attempts = connected.attempts;
        } catch (const Error& ex) {
            throw InvalidScenario("graph.er", ex.what());
        }
        cfg.er = er;
    } else if (g.contains("file")) {
        fs::path file = g["file"].get<std::string>();
        if (file.is_relative() && !base.empty()) file = base / file;
        cfg.graph = graph_from_json(read_json_file(file.string()), "graph.file");
    } else {
        cfg.graph = graph_from_json(g, "graph");
    }
    const int n = cfg.graph.size();

    AgentSpec defaults{Strategy::Receptive, 0.5, 0.0, BodyOfEvidence::vacuous(frame)};
    if (j.contains("defaults")) {
        const auto& d = j["defaults"];
        reject_unknown(d, {"alpha", "epsilon", "strategy"}, "defaults");
        defaults.alpha = get_or<double>(d, "alpha", defaults.alpha, "defaults");
        defaults.epsilon = get_or<double>(d, "epsilon", defaults.epsilon, "defaults");
        if (d.contains("strategy")) {
            try {
                defaults.strategy = parse_strategy(d["strategy"].get<std::string>());
            } catch (const std::exception& e) {
                throw InvalidScenario("defaults.strategy", e.what());
            }
        }
    }

    Rng rng(cfg.seed);
    if (!j.contains("agents")) throw InvalidScenario("agents", "missing");
    const auto& agents = j["agents"];
    if (agents.is_array()) {
        std::size_t k = 0;
        for (const auto& a : agents) {
            const std::string field = "agents[" + std::to_string(k++) + "]";
            if (!a.is_object()) throw InvalidScenario(field, "expected an object");
            reject_unknown(a, {"label", "strategy", "alpha", "epsilon", "initial", "sample"}, field);
            AgentSpec spec = defaults;
            spec.alpha = get_or<double>(a, "alpha", defaults.alpha, field);
            spec.epsilon = get_or<double>(a, "epsilon", defaults.epsilon, field);
            if (a.contains("strategy")) {
                try {
                    spec.strategy = parse_strategy(a["strategy"].get<std::string>());
                } catch (const std::exception& e) {
                    throw InvalidScenario(field + ".strategy", e.what());
                }
            }
            if (a.contains("initial") == a.contains("sample")) {
                throw InvalidScenario(field, "exactly one of 'initial' or 'sample' required");
            }
            spec.initial = a.contains("initial") ? boe_from_json(a["initial"], frame, field + ".initial")
                                                 : sample_boe(parse_sampling(a["sample"], frame, field + ".sample"),
                                                              frame, rng);
            cfg.agents.push_back(std::move(spec));
            cfg.labels.push_back(get_or<std::string>(a, "label", "", field));
        }
    } else if (agents.is_object()) {
        reject_unknown(agents, {"sample"}, "agents");
        if (!agents.contains("sample")) throw InvalidScenario("agents.sample", "missing");
        const auto spec = parse_sampling(agents["sample"], frame, "agents.sample");
        for (int i = 0; i < n; ++i) {
            AgentSpec a = defaults;
            a.initial = sample_boe(spec, frame, rng);
            cfg.agents.push_back(std::move(a));
            cfg.labels.emplace_back();
        }
    } else {
        throw InvalidScenario("agents", "expected an array or a sampling object");
    }
    if (static_cast<int>(cfg.agents.size()) != n) {
        throw InvalidScenario("agents", std::to_string(cfg.agents.size()) + " agents for a graph of " +
                                            std::to_string(n) + " nodes");
    }

    if (j.contains("leaders")) {
        const auto& l = j["leaders"];
        std::vector<int> chosen;
        if (l.is_array()) {
            for (const auto& id : l) {
                if (!id.is_number_integer() || id.get<int>() < 1 || id.get<int>() > n) {
                    throw InvalidScenario("leaders", "leader ids must lie in 1.." + std::to_string(n));
                }
                chosen.push_back(id.get<int>() - 1);
            }
        } else if (l.is_object() && l.contains("random")) {
            const int k = get_or<int>(l, "random", 0, "leaders");
            if (k < 0 || k > n) throw InvalidScenario("leaders.random", "leader count outside 0.." + std::to_string(n));
            std::vector<int> pool(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
            for (int i = 0; i < k; ++i) {
                std::uniform_int_distribution<int> pick(i, n - 1);
                std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
                chosen.push_back(pool[static_cast<std::size_t>(i)]);
            }
            cfg.leaders_random = true;
        } else {
            throw InvalidScenario("leaders", "expected an id array or {\"random\": k}");
        }
        std::sort(chosen.begin(), chosen.end());
        if (std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end()) {
            throw InvalidScenario("leaders", "duplicate leader");
        }
        for (int i : chosen) cfg.agents[static_cast<std::size_t>(i)].strategy = Strategy::Cautious;
    }
    for (int i = 0; i < n; ++i)
        if (cfg.agents[static_cast<std::size_t>(i)].strategy == Strategy::Cautious) cfg.leaders.push_back(i);
    for (int i = 0; i < n; ++i) {
        auto& label = cfg.labels[static_cast<std::size_t>(i)];
        if (label.empty()) {
            label = (cfg.agents[static_cast<std::size_t>(i)].strategy == Strategy::Cautious ? "C" : "R") +
                    std::to_string(i + 1);
        }
    }

    if (j.contains("central_groups")) {
        std::size_t k = 0;
        for (const auto& group : j["central_groups"]) {
            std::vector<int> members;
            for (const auto& id : group) {
                if (!id.is_number_integer() || id.get<int>() < 1 || id.get<int>() > n) {
                    throw InvalidScenario("central_groups[" + std::to_string(k) + "]", "bad node id");
                }
                members.push_back(id.get<int>() - 1);
            }
            cfg.central_groups.push_back(std::move(members));
            ++k;
        }
    } else {
        for (int l : cfg.leaders) cfg.central_groups.push_back({l});
    }

    // Validates alpha/epsilon ranges and the common frame.
    Network check(cfg.graph, cfg.agents);
    if (cfg.engine != Engine::Auto) {
        try {
            (void)cfg.resolved_engine();
        } catch (const EngineMismatch& e) {
            throw InvalidScenario("engine", e.what());
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path_or_asset, std::optional<std::uint64_t> seed_override) {
    fs::path path = path_or_asset;
    if (!fs::exists(path)) {
        const fs::path asset = asset_dir() / (path_or_asset + ".json");
        if (!fs::exists(asset)) {
            throw ParseError("no scenario file or built-in scenario named '" + path_or_asset + "'");
        }
        path = asset;
    }
    auto j = read_json_file(path.string());
    auto cfg = parse_scenario(j, seed_override, path.parent_path());
    if (!j.contains("name")) cfg.name = path.stem().string();
    return cfg;
}

}  // namespace dsc
