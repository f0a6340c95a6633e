#include "dsc/simulation.hpp"

#include "dsc/json_io.hpp"

namespace dsc {

Eigen::MatrixXd SimulationResult::singleton_profiles(bool final) const {
    const MassMatrix& m = final ? final_masses : initial;
    const int frame = network->frame().size();
    Eigen::MatrixXd out(m.rows(), frame);
    for (int p = 0; p < frame; ++p) out.col(p) = m.col(Eigen::Index{1} << p);
    return out;
}

SimulationResult run_simulation(const ScenarioConfig& cfg, const SimulationOptions& options) {
    SimulationResult r;
    r.engine = cfg.resolved_engine();
    r.network = cfg.network(options.epsilon);
    NetworkState state(r.network);
    r.initial = state.masses();
    const int stride = std::max(options.trace_stride, 1);
    if (options.record_trajectory) {
        r.trace_steps.push_back(0);
        r.trajectory.push_back(state.masses());
    }

    ConvergenceMonitor monitor(cfg.step_tol, cfg.window);
    while (state.step() < cfg.max_iterations) {
        const PrunedView pruned = prune(state);
        if (options.record_pruned) r.pruned.push_back(pruned.removed_edges());
        std::optional<NetworkState> next;
        switch (r.engine) {
            case Engine::Pmf:
            case Engine::Dirichlet: {
                const auto w = r.engine == Engine::Pmf ? build_W_pmf(state, pruned) : build_W_dirichlet(state, pruned);
                if (options.record_matrices) r.matrices.push_back(w.dense());
                next = r.engine == Engine::Pmf ? apply_pmf(state, w) : apply_dirichlet(state, w);
                break;
            }
            default:
                next = cue_step_general(state, pruned);
                break;
        }
        const double change = max_step_change(next->masses(), state.masses());
        state = std::move(*next);
        const bool done = monitor.observe(change);
        if (options.record_trajectory && (state.step() % stride == 0 || done)) {
            r.trace_steps.push_back(state.step());
            r.trajectory.push_back(state.masses());
        }
        if (done) {
            r.converged = true;
            break;
        }
    }
    if (options.record_trajectory && r.trace_steps.back() != state.step()) {
        r.trace_steps.push_back(state.step());
        r.trajectory.push_back(state.masses());
    }
    r.iterations = state.step();
    r.final_masses = state.masses();
    r.clusters = detect_clusters(state, cfg.cluster_tol);
    r.clusters.converged = r.converged;
    r.clusters.iterations = r.iterations;
    return r;
}

nlohmann::json report_json(const ScenarioConfig& cfg, const SimulationResult& r) {
    using nlohmann::json;
    json clusters = json::array();
    for (std::size_t c = 0; c < r.clusters.clusters.size(); ++c) {
        json members = json::array();
        json labels = json::array();
        for (int i : r.clusters.clusters[c]) {
            members.push_back(i + 1);
            labels.push_back(cfg.labels[static_cast<std::size_t>(i)]);
        }
        clusters.push_back({{"members", members}, {"labels", labels}, {"opinion", boe_to_json(r.clusters.representatives[c])}});
    }
    json j = {{"scenario", cfg.name},
              {"engine", to_string(r.engine)},
              {"epsilon", r.network->agent(0).epsilon},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"cluster_count", r.clusters.count()},
              {"consensus", r.clusters.consensus},
              {"near_clusters", r.clusters.near_pair},
              {"clusters", clusters}};
    if (cfg.er) j["graph_seed_used"] = cfg.er->seed_used;
    if (!cfg.leaders.empty()) {
        json leaders = json::array();
        for (int l : cfg.leaders) leaders.push_back(l + 1);
        j["leaders"] = leaders;
    }
    return j;
}

VerificationResult verify_scenario(const ScenarioConfig& cfg, std::optional<double> epsilon) {
    if (cfg.central_groups.empty() || cfg.central_groups.size() > 2) {
        throw InvalidScenario("leaders", "verification needs one or two leader groups");
    }
    SimulationOptions opt;
    opt.epsilon = epsilon;
    opt.record_matrices = true;
    const auto run = run_simulation(cfg, opt);
    if (run.engine == Engine::General) {
        throw EngineMismatch("verification needs the pmf or dirichlet engine");
    }
    VerificationInput in;
    in.matrices = run.matrices;
    in.initial = run.singleton_profiles(false);
    in.observed = run.singleton_profiles(true);
    in.central = cfg.central_groups;

    VerificationResult out;
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : cfg.central_groups) {
        nlohmann::json ids = nlohmann::json::array();
        for (int i : g) ids.push_back(i + 1);
        groups.push_back(ids);
    }
    if (cfg.central_groups.size() == 1) {
        const auto r = verify_theorem1(in);
        out.report = r.to_json();
        out.report["theorem"] = "one central group: followers converge to the central consensus";
        out.match = r.match;
    } else {
        const auto r = verify_theorem2(in, cfg.cluster_tol);
        out.report = r.to_json();
        out.report["theorem"] = "two central groups: consensus iff the groups agree; follower cluster under the lambda condition";
        out.match = out.report["match"].get<bool>();
    }
    out.report["scenario"] = cfg.name;
    out.report["engine"] = to_string(run.engine);
    out.report["epsilon"] = run.network->agent(0).epsilon;
    out.report["central_groups"] = groups;
    out.report["iterations"] = run.iterations;
    out.report["converged"] = run.converged;
    out.report["cluster_count"] = run.clusters.count();
    return out;
}

}  // namespace dsc
