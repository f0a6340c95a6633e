#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "dsc/analysis.hpp"
#include "dsc/scenario.hpp"

namespace dsc {

struct SimulationOptions {
    std::optional<double> epsilon;  // replaces every agent's bound
    bool record_trajectory = false;
    int trace_stride = 1;           // keep every n-th state (the last one is always kept)
    bool record_pruned = false;
    bool record_matrices = false;   // pmf / dirichlet engines only
};

struct SimulationResult {
    Engine engine = Engine::Auto;
    std::shared_ptr<const Network> network;
    MassMatrix initial;
    MassMatrix final_masses;
    long iterations = 0;
    bool converged = false;
    ClusterReport clusters;

    std::vector<long> trace_steps;
    std::vector<MassMatrix> trajectory;
    std::vector<std::vector<Edge>> pruned;  // removed edges per step
    std::vector<Eigen::MatrixXd> matrices;  // W_k per step

    NetworkState final_state() const { return {network, iterations, final_masses}; }
    /// N x M table of singleton masses.
    Eigen::MatrixXd singleton_profiles(bool final = true) const;
};

/// Iterates until the step change stays below the tolerance for the configured window, or the
/// iteration cap. Throws EngineMismatch.
SimulationResult run_simulation(const ScenarioConfig& cfg, const SimulationOptions& options = {});

/// {"engine", "epsilon", "iterations", "converged", "cluster_count", "consensus", "clusters": [...]}
nlohmann::json report_json(const ScenarioConfig& cfg, const SimulationResult& r);

struct SweepOptions {
    double eps_min = 0.0;
    double eps_max = 1.0;
    double eps_step = 0.01;
    Proposition proposition = Proposition::singleton(0);
    int workers = 1;
};

struct SweepPoint {
    double epsilon = 0.0;
    std::vector<double> limit;  // designated proposition, per agent
    std::vector<int> cluster_of;
    int cluster_count = 0;
    bool consensus = false;
    bool converged = false;
    bool near_pair = false;
    long iterations = 0;
};

struct BifurcationResult {
    std::string scenario;
    Proposition proposition;
    int frame_size = 3;
    std::vector<std::string> labels;
    std::vector<SweepPoint> points;

    std::optional<double> first_consensus() const;
    /// Smallest epsilon from which every later grid point is a consensus.
    std::optional<double> consensus_onset() const;
    int min_cluster_count() const;
};

struct VerificationResult {
    nlohmann::json report;
    bool match = false;
};

/// Runs the scenario with recorded confidence matrices and checks the leader/follower consensus
/// theorems against the run: one central group -> Theorem 1 report, two -> Theorem 2 report.
/// Throws EngineMismatch for the general engine and InvalidScenario without central groups.
VerificationResult verify_scenario(const ScenarioConfig& cfg, std::optional<double> epsilon);

/// Evenly spaced grid from eps_min to eps_max; a step larger than the range gives one point.
std::vector<double> epsilon_grid(double eps_min, double eps_max, double eps_step);

/// Throws std::invalid_argument on a bad range.
BifurcationResult run_sweep(const ScenarioConfig& cfg, const SweepOptions& options);

}  // namespace dsc
