#include "dsc/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace dsc {

std::string to_string(Strategy s) { return s == Strategy::Cautious ? "cautious" : "receptive"; }

Strategy parse_strategy(std::string_view text) {
    if (text == "receptive" || text == "follower") return Strategy::Receptive;
    if (text == "cautious" || text == "leader") return Strategy::Cautious;
    throw ParseError("unknown strategy '" + std::string(text) + "'");
}

std::string to_string(Engine e) {
    switch (e) {
        case Engine::Auto: return "auto";
        case Engine::General: return "general";
        case Engine::Pmf: return "pmf";
        case Engine::Dirichlet: return "dirichlet";
    }
    return "auto";
}

Engine parse_engine(std::string_view text) {
    if (text == "auto") return Engine::Auto;
    if (text == "general") return Engine::General;
    if (text == "pmf") return Engine::Pmf;
    if (text == "dirichlet") return Engine::Dirichlet;
    throw ParseError("unknown engine '" + std::string(text) + "'");
}

Network::Network(DirectedGraph graph, std::vector<AgentSpec> agents, AlphaSchedule schedule)
    : graph_(std::move(graph)), agents_(std::move(agents)), schedule_(std::move(schedule)) {
    if (agents_.empty()) throw InvalidScenario("agents", "at least one agent required");
    if (static_cast<int>(agents_.size()) != graph_.size()) {
        throw InvalidScenario("agents", std::to_string(agents_.size()) + " agents for a graph of " +
                                            std::to_string(graph_.size()) + " nodes");
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const auto& a = agents_[i];
        const std::string where = "agents[" + std::to_string(i) + "]";
        if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) throw InvalidScenario(where + ".alpha", "must lie in [0, 1]");
        if (!(a.epsilon >= 0.0 && a.epsilon <= 1.0)) throw InvalidScenario(where + ".epsilon", "must lie in [0, 1]");
        if (!(a.initial.frame() == agents_.front().initial.frame())) {
            throw InvalidScenario(where + ".initial", "frame differs from agent 1");
        }
        if (!validate(a.initial).valid()) throw InvalidScenario(where + ".initial", "not a valid mass function");
        epsilons_.push_back(a.epsilon);
    }
}

double Network::alpha(int i, long step) const {
    const double base = agent(i).alpha;
    return schedule_ ? schedule_(i, step, base) : base;
}

std::vector<int> Network::cautious_agents() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (agent(i).strategy == Strategy::Cautious) out.push_back(i);
    return out;
}

Network Network::with_epsilon(double eps) const {
    auto agents = agents_;
    for (auto& a : agents) a.epsilon = eps;
    return {graph_, std::move(agents), schedule_};
}

NetworkState::NetworkState(std::shared_ptr<const Network> network) : network_(std::move(network)) {
    const auto& net = *network_;
    masses_.resize(net.size(), static_cast<Eigen::Index>(net.frame().power_set_size()));
    for (int i = 0; i < net.size(); ++i) {
        const auto m = net.agent(i).initial.masses();
        for (std::size_t a = 0; a < m.size(); ++a) masses_(i, static_cast<Eigen::Index>(a)) = m[a];
    }
}

NetworkState::NetworkState(std::shared_ptr<const Network> network, long step, MassMatrix masses)
    : network_(std::move(network)), step_(step), masses_(std::move(masses)) {
    if (masses_.rows() != network_->size() ||
        masses_.cols() != static_cast<Eigen::Index>(network_->frame().power_set_size())) {
        throw SizeMismatch("mass table shape does not match network");
    }
}

BodyOfEvidence NetworkState::opinion(int i) const {
    const auto m = masses(i);
    return {network_->frame(), std::vector<double>(m.begin(), m.end())};
}

std::vector<BodyOfEvidence> NetworkState::opinions() const {
    std::vector<BodyOfEvidence> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int i = 0; i < size(); ++i) out.push_back(opinion(i));
    return out;
}

double NetworkState::distance(int i, int j) const {
    return jousselme_distance(network_->frame(), masses(i), masses(j));
}

PrunedView prune(const NetworkState& state) {
    // The distance is symmetric, so a mutual pair is evaluated once. Nodes are visited in increasing
    // order; cursor[j] walks neighbors(j) to find the mirror entry (j, i) already computed for j < i.
    const auto& g = state.network().graph();
    const auto eps = state.network().epsilons();
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<std::vector<double>> dist(n);
    std::vector<std::size_t> cursor(n, 0);
    std::vector<std::vector<int>> kept(n);
    std::vector<Edge> removed;
    for (int i = 0; i < g.size(); ++i) {
        const auto& nbrs = g.neighbors(i);
        auto& row = dist[static_cast<std::size_t>(i)];
        row.resize(nbrs.size());
        kept[static_cast<std::size_t>(i)].reserve(nbrs.size());
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const int j = nbrs[k];
            bool reused = false;
            if (j < i) {
                const auto& back = g.neighbors(j);
                auto& c = cursor[static_cast<std::size_t>(j)];
                while (c < back.size() && back[c] < i) ++c;
                if (c < back.size() && back[c] == i) {
                    row[k] = dist[static_cast<std::size_t>(j)][c];
                    reused = true;
                }
            }
            if (!reused) row[k] = state.distance(i, j);
            if (row[k] <= eps[static_cast<std::size_t>(i)])
                kept[static_cast<std::size_t>(i)].push_back(j);
            else
                removed.emplace_back(i, j);
        }
    }
    return {std::move(kept), std::move(removed)};
}

double CueWeights::total() const {
    double sum = alpha;
    for (const auto& t : terms) sum += t.beta;
    return sum;
}

CueWeights cue_weights(int i, const NetworkState& state, const PrunedView& pruned) {
    const auto& net = state.network();
    net.graph().check_node(i);
    const auto& nbrs = pruned.neighbors(i);
    CueWeights w;
    if (nbrs.empty()) return w;
    const double alpha = net.alpha(i, state.step());
    const auto own = state.masses(i);
    const auto subsets = static_cast<std::uint32_t>(own.size());

    if (net.agent(i).strategy == Strategy::Receptive) {
        const double c = (1.0 - alpha) / static_cast<double>(nbrs.size());
        for (int j : nbrs) {
            const auto mj = state.masses(j);
            for (std::uint32_t a = 1; a < subsets; ++a)
                if (mj[a] > 0.0) w.terms.push_back({j, {a}, c * mj[a]});
        }
        w.alpha = alpha;
        return w;
    }

    // Cautious: beta_ij(A) = mu * m_i(A) over A with Bl_j(A) > 0, one mu shared by all neighbours.
    double coverage = 0.0;
    std::vector<std::vector<double>> bl(nbrs.size());
    for (std::size_t n = 0; n < nbrs.size(); ++n) {
        const auto mj = state.masses(nbrs[n]);
        bl[n].assign(mj.begin(), mj.end());
        BeliefFunction f(BodyOfEvidence(net.frame(), bl[n]));
        bl[n].assign(f.values().begin(), f.values().end());
        for (std::uint32_t a = 1; a < subsets; ++a)
            if (bl[n][a] > 0.0) coverage += own[a];
    }
    if (!(coverage > 0.0)) return w;
    const double mu = (1.0 - alpha) / coverage;
    for (std::size_t n = 0; n < nbrs.size(); ++n)
        for (std::uint32_t a = 1; a < subsets; ++a)
            if (bl[n][a] > 0.0 && own[a] > 0.0) w.terms.push_back({nbrs[n], {a}, mu * own[a]});
    w.alpha = alpha;
    return w;
}

NetworkState cue_step_general(const NetworkState& state) { return cue_step_general(state, prune(state)); }

NetworkState cue_step_general(const NetworkState& state, const PrunedView& pruned) {
    const auto& net = state.network();
    const Frame& frame = net.frame();
    const auto subsets = static_cast<std::uint32_t>(frame.power_set_size());

    std::vector<BeliefFunction> bl;
    bl.reserve(static_cast<std::size_t>(state.size()));
    for (int i = 0; i < state.size(); ++i) bl.emplace_back(state.opinion(i));

    MassMatrix next = state.masses();
    std::vector<double> updated(subsets);
    for (int i = 0; i < state.size(); ++i) {
        const auto w = cue_weights(i, state, pruned);
        if (w.terms.empty()) continue;
        const auto own = bl[static_cast<std::size_t>(i)].values();
        for (std::uint32_t b = 0; b < subsets; ++b) updated[b] = w.alpha * own[b];
        for (const auto& t : w.terms) {
            const auto& f = bl[static_cast<std::size_t>(t.neighbor)];
            for (std::uint32_t b = 1; b < subsets; ++b)
                updated[b] += t.beta * fh_conditional_belief(f, {b}, t.condition);
        }
        const auto m = masses_from_beliefs(frame, updated);
        for (std::uint32_t a = 0; a < subsets; ++a) next(i, a) = m.masses()[a];
    }
    return {state.network_ptr(), state.step() + 1, std::move(next)};
}

namespace {

bool row_is_bayesian(std::span<const double> m) {
    for (std::uint32_t a = 0; a < m.size(); ++a)
        if ((a & (a - 1)) != 0 && std::abs(m[a]) > kAlgebraicTol) return false;
    return true;
}

bool row_is_dirichlet(std::span<const double> m) {
    const auto theta = static_cast<std::uint32_t>(m.size() - 1);
    for (std::uint32_t a = 0; a < m.size(); ++a)
        if ((a & (a - 1)) != 0 && a != theta && std::abs(m[a]) > kAlgebraicTol) return false;
    return true;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

ConfidenceMatrix finish(int n, const Triplets& t, bool stochastic) {
    ConfidenceMatrix w;
    w.weights.resize(n, n);
    w.weights.setFromTriplets(t.begin(), t.end());
    w.stochastic_expected = stochastic;
    return w;
}

}  // namespace

ConfidenceMatrix build_W_pmf(const NetworkState& state, const PrunedView& pruned) {
    const auto& net = state.network();
    Triplets t;
    for (int i = 0; i < state.size(); ++i) {
        if (!row_is_bayesian(state.masses(i))) throw NotBayesian("agent " + std::to_string(i + 1) + " is not Bayesian");
        const auto& nbrs = pruned.neighbors(i);
        if (net.agent(i).strategy == Strategy::Cautious || nbrs.empty()) {
            t.emplace_back(i, i, 1.0);
            continue;
        }
        const double alpha = net.alpha(i, state.step());
        const double c = (1.0 - alpha) / static_cast<double>(nbrs.size());
        t.emplace_back(i, i, alpha);
        for (int j : nbrs) t.emplace_back(i, j, c);
    }
    return finish(state.size(), t, true);
}

ConfidenceMatrix build_W_dirichlet(const NetworkState& state, const PrunedView& pruned) {
    const auto& net = state.network();
    const Eigen::Index theta = state.masses().cols() - 1;
    Triplets t;
    for (int i = 0; i < state.size(); ++i) {
        if (!row_is_dirichlet(state.masses(i))) {
            throw NotDirichlet("agent " + std::to_string(i + 1) + " is not Dirichlet");
        }
        const auto& nbrs = pruned.neighbors(i);
        if (nbrs.empty()) {
            t.emplace_back(i, i, 1.0);
            continue;
        }
        const double alpha = net.alpha(i, state.step());
        const double c = (1.0 - alpha) / static_cast<double>(nbrs.size());
        if (net.agent(i).strategy == Strategy::Receptive) {
            t.emplace_back(i, i, alpha);
            for (int j : nbrs) t.emplace_back(i, j, c * (1.0 + state.masses()(j, theta)));
        } else {
            t.emplace_back(i, i, 1.0);
            const double own_theta = state.masses()(i, theta);
            for (int j : nbrs) t.emplace_back(i, j, c * own_theta);
        }
    }
    return finish(state.size(), t, false);
}

NetworkState apply_pmf(const NetworkState& state, const ConfidenceMatrix& w) {
    if (w.size() != state.size()) throw SizeMismatch("confidence matrix size != agent count");
    const int m = state.network().frame().size();
    MassMatrix next = MassMatrix::Zero(state.masses().rows(), state.masses().cols());
    for (int p = 0; p < m; ++p) {
        const Eigen::Index col = Eigen::Index{1} << p;
        next.col(col) = w.weights * state.masses().col(col);
    }
    return {state.network_ptr(), state.step() + 1, std::move(next)};
}

NetworkState apply_dirichlet(const NetworkState& state, const ConfidenceMatrix& w) {
    if (w.size() != state.size()) throw SizeMismatch("confidence matrix size != agent count");
    const int m = state.network().frame().size();
    const Eigen::Index theta = state.masses().cols() - 1;
    MassMatrix next = MassMatrix::Zero(state.masses().rows(), state.masses().cols());
    Eigen::VectorXd singleton_total = Eigen::VectorXd::Zero(state.size());
    for (int p = 0; p < m; ++p) {
        const Eigen::Index col = Eigen::Index{1} << p;
        if (col == theta) continue;
        next.col(col) = w.weights * state.masses().col(col);
        singleton_total += next.col(col);
    }
    // M = 1: the only singleton is Theta itself and nothing moves.
    if (m == 1) return {state.network_ptr(), state.step() + 1, state.masses()};
    next.col(theta) = Eigen::VectorXd::Ones(state.size()) - singleton_total;
    for (Eigen::Index i = 0; i < next.rows(); ++i) {
        if (next(i, theta) < 0.0) {
            if (next(i, theta) < -1e-10) {
                throw NotABeliefFunction("Dirichlet step left negative Theta mass for agent " + std::to_string(i + 1));
            }
            next(i, theta) = 0.0;
        }
    }
    return {state.network_ptr(), state.step() + 1, std::move(next)};
}

NetworkState step_pmf(const NetworkState& state) { return apply_pmf(state, build_W_pmf(state, prune(state))); }

NetworkState step_dirichlet(const NetworkState& state) {
    return apply_dirichlet(state, build_W_dirichlet(state, prune(state)));
}

Engine select_engine(std::span<const BodyOfEvidence> opinions) {
    bool bayes = true;
    bool dir = true;
    for (const auto& e : opinions) {
        const auto r = validate(e);
        bayes = bayes && r.bayesian;
        dir = dir && r.dirichlet;
    }
    if (bayes) return Engine::Pmf;
    if (dir) return Engine::Dirichlet;
    return Engine::General;
}

void check_engine(Engine engine, std::span<const BodyOfEvidence> opinions) {
    for (std::size_t i = 0; i < opinions.size(); ++i) {
        const auto r = validate(opinions[i]);
        if (engine == Engine::Pmf && !r.bayesian) {
            throw EngineMismatch("pmf engine needs Bayesian opinions; agent " + std::to_string(i + 1) + " is " +
                                 to_string(r.kind));
        }
        if (engine == Engine::Dirichlet && !r.dirichlet) {
            throw EngineMismatch("dirichlet engine needs Dirichlet opinions; agent " + std::to_string(i + 1) +
                                 " is " + to_string(r.kind));
        }
    }
}

}  // namespace dsc
