#pragma once

// Conditional update equation (CUE) under bounded confidence.
//
// Three engines share one state type:
//   general   - belief-form CUE with FH conditionals, any BoE
//   pmf       - confidence-matrix iteration on Bayesian BoEs
//   dirichlet - confidence-matrix iteration on singleton masses, Theta mass as the remainder

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dsc/dst.hpp"
#include "dsc/graph.hpp"

namespace dsc {

/// Cautious agents act as opinion leaders, receptive agents as followers.
enum class Strategy { Receptive, Cautious };

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct AgentSpec {
    Strategy strategy = Strategy::Receptive;
    double alpha = 0.5;
    double epsilon = 0.0;
    BodyOfEvidence initial;
};

/// Optional per-step self-weight override: (agent, step, configured alpha) -> alpha.
using AlphaSchedule = std::function<double(int, long, double)>;

/// The static part of a run: topology, agents, frame.
class Network {
public:
    Network(DirectedGraph graph, std::vector<AgentSpec> agents, AlphaSchedule schedule = {});

    const DirectedGraph& graph() const { return graph_; }
    const std::vector<AgentSpec>& agents() const { return agents_; }
    const AgentSpec& agent(int i) const { return agents_.at(static_cast<std::size_t>(i)); }
    const Frame& frame() const { return agents_.front().initial.frame(); }
    int size() const { return static_cast<int>(agents_.size()); }

    double alpha(int i, long step) const;
    std::span<const double> epsilons() const { return epsilons_; }
    std::vector<int> cautious_agents() const;

    /// Copy with every agent's bound replaced by `eps`.
    Network with_epsilon(double eps) const;

private:
    DirectedGraph graph_;
    std::vector<AgentSpec> agents_;
    std::vector<double> epsilons_;
    AlphaSchedule schedule_;
};

/// Agent-by-subset mass table; row i is agent i's mass vector in bitmask order.
using MassMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class NetworkState {
public:
    /// Step 0 with every agent at its initial opinion.
    explicit NetworkState(std::shared_ptr<const Network> network);
    NetworkState(std::shared_ptr<const Network> network, long step, MassMatrix masses);

    const Network& network() const { return *network_; }
    const std::shared_ptr<const Network>& network_ptr() const { return network_; }
    long step() const { return step_; }
    int size() const { return static_cast<int>(masses_.rows()); }

    const MassMatrix& masses() const { return masses_; }
    std::span<const double> masses(int i) const {
        return {masses_.row(i).data(), static_cast<std::size_t>(masses_.cols())};
    }
    BodyOfEvidence opinion(int i) const;
    std::vector<BodyOfEvidence> opinions() const;

    /// Opinion profile of `b`: every agent's mass on b.
    Eigen::VectorXd profile(Proposition b) const { return masses_.col(b.bits); }

    double distance(int i, int j) const;

private:
    std::shared_ptr<const Network> network_;
    long step_ = 0;
    MassMatrix masses_;
};

/// Bounded-confidence view of the base graph for the current opinions.
PrunedView prune(const NetworkState& state);

/// Per-step weight matrix W_k (pmf) or its Dirichlet counterpart (rows need not sum to 1).
struct ConfidenceMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> weights;
    bool stochastic_expected = true;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(weights); }
    int size() const { return static_cast<int>(weights.rows()); }
};

struct CueWeights {
    double alpha = 1.0;
    struct Term {
        int neighbor;
        Proposition condition;
        double beta;
    };
    std::vector<Term> terms;

    double total() const;
};

/// alpha_i and beta_ij(A) for agent i; an empty neighbourhood gives alpha = 1 and no terms.
CueWeights cue_weights(int i, const NetworkState& state, const PrunedView& pruned);

NetworkState cue_step_general(const NetworkState& state);
NetworkState cue_step_general(const NetworkState& state, const PrunedView& pruned);

/// Throws NotBayesian.
ConfidenceMatrix build_W_pmf(const NetworkState& state, const PrunedView& pruned);
/// Throws NotDirichlet.
ConfidenceMatrix build_W_dirichlet(const NetworkState& state, const PrunedView& pruned);

NetworkState step_pmf(const NetworkState& state);
NetworkState step_dirichlet(const NetworkState& state);

/// Applies a precomputed matrix: singleton profiles are multiplied by W; for dirichlet the Theta mass
/// becomes the remainder.
NetworkState apply_pmf(const NetworkState& state, const ConfidenceMatrix& w);
NetworkState apply_dirichlet(const NetworkState& state, const ConfidenceMatrix& w);

enum class Engine { Auto, General, Pmf, Dirichlet };

std::string to_string(Engine e);
Engine parse_engine(std::string_view text);

/// Tightest engine every opinion supports.
Engine select_engine(std::span<const BodyOfEvidence> opinions);
/// Throws EngineMismatch if an opinion does not fit `engine`.
void check_engine(Engine engine, std::span<const BodyOfEvidence> opinions);

}  // namespace dsc
