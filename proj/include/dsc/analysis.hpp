#pragma once

// Limits, clusters and the structural consensus checks for leader/follower chains.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "dsc/dst.hpp"
#include "dsc/dynamics.hpp"

namespace dsc {

double infinity_norm(const Eigen::MatrixXd& x);

/// Accumulates W_k W_{k-1} ... W_0; starts at the identity.
class LeftProduct {
public:
    explicit LeftProduct(int n) : acc_(Eigen::MatrixXd::Identity(n, n)) {}

    /// acc <- w * acc. Throws SizeMismatch.
    void accumulate(const Eigen::MatrixXd& w);

    const Eigen::MatrixXd& matrix() const { return acc_; }
    long steps() const { return steps_; }

private:
    Eigen::MatrixXd acc_;
    long steps_ = 0;
};

struct ClusterReport {
    std::vector<std::vector<int>> clusters;  // sorted members, clusters ordered by first member
    std::vector<int> cluster_of;             // agent -> cluster index
    std::vector<BodyOfEvidence> representatives;
    bool consensus = false;
    bool converged = false;
    long iterations = 0;
    /// Two clusters closer than twice the tolerance: the split may be a finite-run artefact.
    bool near_pair = false;

    std::size_t count() const { return clusters.size(); }
};

inline constexpr double kDefaultClusterTol = 1e-3;
inline constexpr double kDefaultStepTol = 1e-10;
inline constexpr int kDefaultWindow = 10;
inline constexpr long kDefaultMaxIterations = 10000;

/// Transitive closure of distance <= tol. Representative = member-wise mean.
ClusterReport detect_clusters(std::span<const BodyOfEvidence> opinions, double tol = kDefaultClusterTol);
ClusterReport detect_clusters(const NetworkState& state, double tol = kDefaultClusterTol);

/// Largest absolute mass change between two states.
double max_step_change(const MassMatrix& a, const MassMatrix& b);

/// Streaming form of detect_convergence.
class ConvergenceMonitor {
public:
    explicit ConvergenceMonitor(double tol = kDefaultStepTol, int window = kDefaultWindow)
        : tol_(tol), window_(window) {}

    /// Feed the change of one step; returns true once `window` consecutive changes were below tol.
    bool observe(double change) {
        streak_ = change < tol_ ? streak_ + 1 : 0;
        return converged();
    }
    bool converged() const { return streak_ >= window_; }

private:
    double tol_;
    int window_;
    int streak_ = 0;
};

/// True when the last `window` step changes of the trajectory are all below tol. A trajectory shorter
/// than window + 1 states qualifies if every available change is below tol.
bool detect_convergence(std::span<const MassMatrix> trajectory, double tol = kDefaultStepTol,
                        int window = kDefaultWindow);

struct RankOneConsensus {
    Eigen::VectorXd v;  // common row of the limit matrix
    double eta = 0.0;   // v^T pi0
    double row_deviation = 0.0;
    std::optional<double> observed_deviation;  // max |observed_i - eta| when an observed profile is given
    bool matches = true;
};

/// Requires identical rows within 1e-8; throws NotRankOne otherwise.
RankOneConsensus check_consensus_rank_one(const Eigen::MatrixXd& w_inf, const Eigen::VectorXd& pi0,
                                          const Eigen::VectorXd* observed = nullptr, double tol = 1e-6);

enum class OdcKind { OneODC, TwoODC };

struct OdcPartition {
    OdcKind kind = OdcKind::OneODC;
    std::vector<std::vector<int>> central;  // one or two groups
    std::vector<int> outer;
    /// Central-first ordering: central[0], central[1], outer.
    std::vector<int> order;

    std::vector<Eigen::MatrixXd> a;  // central diagonal blocks
    std::vector<Eigen::MatrixXd> c;  // outer rows, central-group columns
    Eigen::MatrixXd d;               // outer diagonal block

    int central_size() const;
};

/// Checks the block structure of w for the proposed central groups. Throws NotODC.
OdcPartition classify_odc(const Eigen::MatrixXd& w, const std::vector<std::vector<int>>& central,
                          double zero_tol = 1e-14);

struct VerificationInput {
    std::vector<Eigen::MatrixXd> matrices;  // W_0, W_1, ...
    Eigen::MatrixXd initial;                // N x M singleton profiles at step 0
    Eigen::MatrixXd observed;               // N x M singleton profiles at the end of the run
    std::vector<std::vector<int>> central;
};

struct Theorem1Report {
    bool odc = false;
    std::string odc_error;
    bool central_rank_one = false;
    double central_row_deviation = 0.0;
    double max_d_norm = 0.0;         // max_k ||D_k||
    bool d_bound_strict = false;     // max_k ||D_k|| < 1
    int d_window = 0;                // smallest T with every T-step product of D blocks below 1
    double d_window_norm = 0.0;      // max norm of those products
    bool hypotheses = false;
    Eigen::VectorXd predicted;       // per-singleton consensus value
    Eigen::MatrixXd observed;
    double max_error = 0.0;
    bool match = false;

    nlohmann::json to_json() const;
};

/// Windows up to `max_window` steps are tried for the contraction of the follower block.
Theorem1Report verify_theorem1(const VerificationInput& in, int max_window = 0);

struct Theorem2Report {
    bool odc = false;
    std::string odc_error;
    std::vector<bool> central_rank_one;  // per group
    std::vector<Eigen::VectorXd> central_consensus;  // per group, per singleton
    bool leaders_agree = false;
    // Part (i): consensus iff the central consensus opinions agree.
    bool predicts_consensus = false;
    bool observed_consensus = false;
    bool part_i_match = false;
    // Part (ii): follower cluster from the lambda condition.
    std::vector<std::optional<double>> lambda1;  // per step, empty when the condition fails
    std::vector<double> lambda_residual;
    bool lambda_every_step = false;
    bool lambda_constant = false;
    std::optional<Eigen::VectorXd> follower_prediction;
    std::vector<int> follower_agents;  // outer agents reached by the leaders in the limit
    double follower_error = 0.0;
    bool follower_match = false;

    nlohmann::json to_json() const;
};

Theorem2Report verify_theorem2(const VerificationInput& in, double cluster_tol = 1e-3);

}  // namespace dsc
