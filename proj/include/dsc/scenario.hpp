#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsc/analysis.hpp"
#include "dsc/dynamics.hpp"
#include "dsc/graph.hpp"

namespace dsc {

struct ErSpec {
    int n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;       // requested
    std::uint64_t seed_used = 0;  // first connected draw
    int attempts = 0;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    int frame_size = 3;
    DirectedGraph graph;
    std::optional<ErSpec> er;
    std::vector<AgentSpec> agents;
    std::vector<std::string> labels;  // display names, e.g. "C1", "R2"
    std::vector<int> leaders;         // cautious agents, 0-based
    bool leaders_random = false;      // chosen by the seeded RNG
    Engine engine = Engine::Auto;
    std::uint64_t seed = 0;
    long max_iterations = kDefaultMaxIterations;
    double step_tol = kDefaultStepTol;
    int window = kDefaultWindow;
    double cluster_tol = kDefaultClusterTol;
    /// Central groups for the verifiers; defaults to one group per leader.
    std::vector<std::vector<int>> central_groups;

    Frame frame() const { return Frame(frame_size); }
    /// Engine after resolving "auto". Throws EngineMismatch for an explicit engine the opinions do not fit.
    Engine resolved_engine() const;
    std::shared_ptr<const Network> network(std::optional<double> epsilon = {}) const;

    /// Materialized form: explicit graph, opinions and leaders.
    nlohmann::json to_json() const;
};

/// Directory holding the built-in scenarios: $DS_CONSENSUS_ASSETS if set, else the install default.
std::filesystem::path asset_dir();
/// Names of the built-in scenarios, sorted.
std::vector<std::string> list_assets();

/// Accepts a file path or the name of a built-in scenario. Throws ParseError / InvalidScenario.
ScenarioConfig load_scenario(const std::string& path_or_asset, std::optional<std::uint64_t> seed_override = {});
/// `base` resolves relative graph file references.
ScenarioConfig parse_scenario(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = {},
                              const std::filesystem::path& base = {});

}  // namespace dsc
