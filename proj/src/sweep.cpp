#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dsc/simulation.hpp"

namespace dsc {

std::vector<double> epsilon_grid(double eps_min, double eps_max, double eps_step) {
    if (!(eps_min >= 0.0 && eps_max <= 1.0 && eps_min <= eps_max)) {
        throw std::invalid_argument("epsilon range must satisfy 0 <= min <= max <= 1");
    }
    if (!(eps_step > 0.0)) throw std::invalid_argument("epsilon step must be positive");
    const auto count = static_cast<long>(std::floor((eps_max - eps_min) / eps_step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    // Round to 1e-9 so that grid points equal their decimal literals (0.46, not 0.46000000000000002).
    for (long i = 0; i < count; ++i) {
        grid.push_back(std::round((eps_min + static_cast<double>(i) * eps_step) * 1e9) / 1e9);
    }
    return grid;
}

std::optional<double> BifurcationResult::first_consensus() const {
    for (const auto& p : points)
        if (p.consensus) return p.epsilon;
    return std::nullopt;
}

std::optional<double> BifurcationResult::consensus_onset() const {
    std::optional<double> onset;
    for (const auto& p : points) {
        if (!p.consensus) onset.reset();
        else if (!onset) onset = p.epsilon;
    }
    return onset;
}

int BifurcationResult::min_cluster_count() const {
    int best = 0;
    for (const auto& p : points)
        if (best == 0 || p.cluster_count < best) best = p.cluster_count;
    return best;
}

BifurcationResult run_sweep(const ScenarioConfig& cfg, const SweepOptions& options) {
    const auto grid = epsilon_grid(options.eps_min, options.eps_max, options.eps_step);
    if (!cfg.frame().contains(options.proposition) || options.proposition.is_empty()) {
        throw std::invalid_argument("designated proposition outside the frame");
    }
    BifurcationResult result;
    result.scenario = cfg.name;
    result.proposition = options.proposition;
    result.frame_size = cfg.frame_size;
    result.labels = cfg.labels;
    result.points.resize(grid.size());
    (void)cfg.resolved_engine();  // fail before spawning workers

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            try {
                SimulationOptions sim;
                sim.epsilon = grid[k];
                const auto r = run_simulation(cfg, sim);
                SweepPoint& p = result.points[k];
                p.epsilon = grid[k];
                p.limit.resize(static_cast<std::size_t>(r.final_masses.rows()));
                for (Eigen::Index i = 0; i < r.final_masses.rows(); ++i)
                    p.limit[static_cast<std::size_t>(i)] = r.final_masses(i, options.proposition.bits);
                p.cluster_of = r.clusters.cluster_of;
                p.cluster_count = static_cast<int>(r.clusters.count());
                p.consensus = r.clusters.consensus;
                p.converged = r.converged;
                p.near_pair = r.clusters.near_pair;
                p.iterations = r.iterations;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = grid.size();
            }
        }
    };
    const int workers = std::clamp(options.workers, 1, static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

}  // namespace dsc
