#include "dsc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsc {

double infinity_norm(const Eigen::MatrixXd& x) {
    if (x.size() == 0) return 0.0;
    return x.cwiseAbs().rowwise().sum().maxCoeff();
}

void LeftProduct::accumulate(const Eigen::MatrixXd& w) {
    if (w.rows() != acc_.rows() || w.cols() != acc_.cols()) {
        throw SizeMismatch("left product of " + std::to_string(acc_.rows()) + "x" + std::to_string(acc_.cols()) +
                           " with " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
    }
    acc_ = w * acc_;
    ++steps_;
}

namespace {

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

ClusterReport detect_clusters(std::span<const BodyOfEvidence> opinions, double tol) {
    ClusterReport r;
    const int n = static_cast<int>(opinions.size());
    if (n == 0) return r;
    const Frame& frame = opinions.front().frame();
    DisjointSets sets(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (jousselme_distance(opinions[static_cast<std::size_t>(i)], opinions[static_cast<std::size_t>(j)]) <= tol)
                sets.unite(i, j);

    r.cluster_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> root_to_cluster(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        const int root = sets.find(i);
        auto& c = root_to_cluster[static_cast<std::size_t>(root)];
        if (c < 0) {
            c = static_cast<int>(r.clusters.size());
            r.clusters.emplace_back();
        }
        r.clusters[static_cast<std::size_t>(c)].push_back(i);
        r.cluster_of[static_cast<std::size_t>(i)] = c;
    }
    for (const auto& members : r.clusters) {
        std::vector<double> mean(frame.power_set_size(), 0.0);
        for (int i : members) {
            const auto m = opinions[static_cast<std::size_t>(i)].masses();
            for (std::size_t a = 0; a < mean.size(); ++a) mean[a] += m[a];
        }
        for (auto& v : mean) v /= static_cast<double>(members.size());
        r.representatives.emplace_back(frame, std::move(mean));
    }
    for (std::size_t a = 0; a < r.representatives.size(); ++a)
        for (std::size_t b = a + 1; b < r.representatives.size(); ++b)
            if (jousselme_distance(r.representatives[a], r.representatives[b]) <= 2.0 * tol) r.near_pair = true;
    r.consensus = r.clusters.size() == 1;
    return r;
}

ClusterReport detect_clusters(const NetworkState& state, double tol) {
    const auto ops = state.opinions();
    return detect_clusters(ops, tol);
}

double max_step_change(const MassMatrix& a, const MassMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw SizeMismatch("states of different shape");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

bool detect_convergence(std::span<const MassMatrix> trajectory, double tol, int window) {
    if (trajectory.size() < 2) return false;
    const std::size_t changes = trajectory.size() - 1;
    const std::size_t check = std::min<std::size_t>(changes, static_cast<std::size_t>(window));
    for (std::size_t k = trajectory.size() - check; k < trajectory.size(); ++k)
        if (!(max_step_change(trajectory[k], trajectory[k - 1]) < tol)) return false;
    return true;
}

RankOneConsensus check_consensus_rank_one(const Eigen::MatrixXd& w_inf, const Eigen::VectorXd& pi0,
                                          const Eigen::VectorXd* observed, double tol) {
    if (w_inf.rows() == 0 || w_inf.cols() != pi0.size()) throw SizeMismatch("limit matrix and profile disagree");
    RankOneConsensus r;
    r.v = w_inf.row(0).transpose();
    for (Eigen::Index i = 1; i < w_inf.rows(); ++i)
        r.row_deviation = std::max(r.row_deviation, (w_inf.row(i).transpose() - r.v).cwiseAbs().maxCoeff());
    if (!(r.row_deviation < 1e-8)) {
        throw NotRankOne("limit matrix rows differ by " + std::to_string(r.row_deviation));
    }
    r.eta = r.v.dot(pi0);
    if (observed) {
        r.observed_deviation = (observed->array() - r.eta).abs().maxCoeff();
        r.matches = *r.observed_deviation <= tol;
    }
    return r;
}

int OdcPartition::central_size() const {
    int n = 0;
    for (const auto& g : central) n += static_cast<int>(g.size());
    return n;
}

namespace {

Eigen::MatrixXd block(const Eigen::MatrixXd& w, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            w(rows[r], cols[c]);
    return out;
}

void require_zero(const Eigen::MatrixXd& w, const std::vector<int>& rows, const std::vector<int>& cols,
                  double tol, const char* what) {
    for (int r : rows)
        for (int c : cols)
            if (std::abs(w(r, c)) > tol) {
                throw NotODC(std::string(what) + ": weight " + std::to_string(w(r, c)) + " at (" +
                             std::to_string(r + 1) + ", " + std::to_string(c + 1) + ")");
            }
}

}  // namespace

OdcPartition classify_odc(const Eigen::MatrixXd& w, const std::vector<std::vector<int>>& central, double zero_tol) {
    const int n = static_cast<int>(w.rows());
    if (w.cols() != n) throw SizeMismatch("confidence matrix is not square");
    if (central.empty() || central.size() > 2) throw NotODC("one or two central groups required");
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    OdcPartition p;
    p.kind = central.size() == 1 ? OdcKind::OneODC : OdcKind::TwoODC;
    for (const auto& group : central) {
        if (group.empty()) throw NotODC("empty central group");
        auto sorted = group;
        std::sort(sorted.begin(), sorted.end());
        for (int i : sorted) {
            if (i < 0 || i >= n) throw NodeOutOfRange("central node " + std::to_string(i + 1) + " out of range");
            if (taken[static_cast<std::size_t>(i)]) throw NotODC("central groups overlap at node " + std::to_string(i + 1));
            taken[static_cast<std::size_t>(i)] = 1;
        }
        p.central.push_back(std::move(sorted));
    }
    for (int i = 0; i < n; ++i)
        if (!taken[static_cast<std::size_t>(i)]) p.outer.push_back(i);

    for (const auto& g : p.central) require_zero(w, g, p.outer, zero_tol, "central group listens to outer agents");
    if (p.kind == OdcKind::TwoODC) {
        require_zero(w, p.central[0], p.central[1], zero_tol, "central groups are coupled");
        require_zero(w, p.central[1], p.central[0], zero_tol, "central groups are coupled");
    }
    for (const auto& g : p.central) {
        p.order.insert(p.order.end(), g.begin(), g.end());
        p.a.push_back(block(w, g, g));
        p.c.push_back(block(w, p.outer, g));
    }
    p.order.insert(p.order.end(), p.outer.begin(), p.outer.end());
    p.d = block(w, p.outer, p.outer);
    return p;
}

namespace {

nlohmann::json to_json(const Eigen::VectorXd& v) {
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
    return out;
}

nlohmann::json ids(const std::vector<int>& nodes) {
    auto out = nlohmann::json::array();
    for (int i : nodes) out.push_back(i + 1);
    return out;
}

struct CentralLimit {
    bool rank_one = false;
    double deviation = 0.0;
    Eigen::VectorXd consensus;  // per singleton
};

// Left product of one central block across the run and the consensus it drives.
CentralLimit central_limit(const std::vector<OdcPartition>& parts, std::size_t group, const Eigen::MatrixXd& initial) {
    const auto& members = parts.front().central[group];
    LeftProduct prod(static_cast<int>(members.size()));
    for (const auto& p : parts) prod.accumulate(p.a[group]);
    CentralLimit out;
    Eigen::MatrixXd pi0(members.size(), initial.cols());
    for (std::size_t r = 0; r < members.size(); ++r) pi0.row(static_cast<Eigen::Index>(r)) = initial.row(members[r]);
    const auto& acc = prod.matrix();
    Eigen::VectorXd v = acc.row(0).transpose();
    for (Eigen::Index i = 1; i < acc.rows(); ++i)
        out.deviation = std::max(out.deviation, (acc.row(i).transpose() - v).cwiseAbs().maxCoeff());
    out.rank_one = out.deviation < 1e-8;
    out.consensus = pi0.transpose() * v;
    return out;
}

std::vector<OdcPartition> classify_all(const VerificationInput& in, std::string& error) {
    std::vector<OdcPartition> parts;
    try {
        for (const auto& w : in.matrices) parts.push_back(classify_odc(w, in.central));
    } catch (const Error& e) {
        error = "step " + std::to_string(parts.size()) + ": " + e.what();
        parts.clear();
    }
    return parts;
}

}  // namespace

Theorem1Report verify_theorem1(const VerificationInput& in, int max_window) {
    Theorem1Report r;
    r.observed = in.observed;
    if (in.central.size() != 1) {
        r.odc_error = "Theorem 1 needs exactly one central group";
        return r;
    }
    if (in.matrices.empty()) {
        r.odc_error = "no confidence matrices recorded";
        return r;
    }
    const auto parts = classify_all(in, r.odc_error);
    r.odc = !parts.empty();
    if (!r.odc) return r;

    const auto central = central_limit(parts, 0, in.initial);
    r.central_rank_one = central.rank_one;
    r.central_row_deviation = central.deviation;
    r.predicted = central.consensus;

    for (const auto& p : parts) r.max_d_norm = std::max(r.max_d_norm, infinity_norm(p.d));
    r.d_bound_strict = r.max_d_norm < 1.0;

    // The run ends at a fixed point, so the last matrix repeats forever after it.
    const int outer = static_cast<int>(parts.front().outer.size());
    if (max_window <= 0) max_window = 2 * std::max(outer, 1);
    const std::size_t len = parts.size();
    for (int t = 1; t <= max_window && r.d_window == 0; ++t) {
        double worst = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(outer, outer);
            for (int s = 0; s < t; ++s) prod = parts[std::min(k + static_cast<std::size_t>(s), len - 1)].d * prod;
            worst = std::max(worst, infinity_norm(prod));
        }
        if (outer == 0 || worst < 1.0) {
            r.d_window = t;
            r.d_window_norm = worst;
        }
    }
    r.hypotheses = r.central_rank_one && r.d_window > 0;

    r.max_error = 0.0;
    for (Eigen::Index i = 0; i < in.observed.rows(); ++i)
        for (Eigen::Index p = 0; p < in.observed.cols(); ++p)
            r.max_error = std::max(r.max_error, std::abs(in.observed(i, p) - r.predicted(p)));
    r.match = r.hypotheses && r.max_error <= 1e-6;
    return r;
}

nlohmann::json Theorem1Report::to_json() const {
    nlohmann::json j;
    j["hypotheses"] = {
        {"one_odc", odc},
        {"central_rank_one", central_rank_one},
        {"central_row_deviation", central_row_deviation},
        {"max_follower_block_norm", max_d_norm},
        {"follower_block_norm_below_one_every_step", d_bound_strict},
        {"contraction_window", d_window},
        {"contraction_window_norm", d_window_norm},
        {"satisfied", hypotheses},
    };
    if (!odc_error.empty()) j["hypotheses"]["error"] = odc_error;
    j["prediction"] = {{"consensus", odc ? dsc::to_json(predicted) : nlohmann::json()}};
    j["observed"] = {{"profiles", dsc::to_json(observed)}, {"max_error", max_error}};
    j["match"] = match;
    return j;
}

Theorem2Report verify_theorem2(const VerificationInput& in, double cluster_tol) {
    Theorem2Report r;
    const Eigen::MatrixXd& obs = in.observed;
    double spread = 0.0;
    for (Eigen::Index p = 0; p < obs.cols(); ++p) spread = std::max(spread, obs.col(p).maxCoeff() - obs.col(p).minCoeff());
    r.observed_consensus = spread <= cluster_tol;

    if (in.central.size() != 2) {
        r.odc_error = "Theorem 2 needs two central groups";
        return r;
    }
    if (in.matrices.empty()) {
        r.odc_error = "no confidence matrices recorded";
        return r;
    }
    const auto parts = classify_all(in, r.odc_error);
    r.odc = !parts.empty();
    if (!r.odc) return r;

    for (std::size_t g = 0; g < 2; ++g) {
        const auto lim = central_limit(parts, g, in.initial);
        r.central_rank_one.push_back(lim.rank_one);
        r.central_consensus.push_back(lim.consensus);
    }
    r.leaders_agree = (r.central_consensus[0] - r.central_consensus[1]).cwiseAbs().maxCoeff() <= 1e-6;
    r.predicts_consensus = r.leaders_agree;
    r.part_i_match = r.central_rank_one[0] && r.central_rank_one[1] && r.predicts_consensus == r.observed_consensus;

    // Per outer row, lambda1 = c2 / (c1 + c2) where c_g is the row sum of C^(g).
    r.lambda_every_step = true;
    std::optional<double> last;
    std::optional<double> first;
    r.lambda_constant = true;
    for (const auto& p : parts) {
        const Eigen::VectorXd c1 = p.c[0].rowwise().sum();
        const Eigen::VectorXd c2 = p.c[1].rowwise().sum();
        std::optional<double> lambda;
        bool ok = true;
        double lo = 1.0;
        double hi = 0.0;
        for (Eigen::Index row = 0; row < c1.size(); ++row) {
            const bool z1 = c1(row) == 0.0;
            const bool z2 = c2(row) == 0.0;
            if (z1 && z2) continue;
            if (z1 || z2) {
                ok = false;
                continue;
            }
            const double l = c2(row) / (c1(row) + c2(row));
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        if (ok && hi >= lo) {
            if (hi - lo > 1e-10) ok = false;
            else lambda = 0.5 * (lo + hi);
        }
        double residual = 0.0;
        if (lambda) {
            residual = (*lambda * c1 - (1.0 - *lambda) * c2).cwiseAbs().maxCoeff();
        } else if (!ok) {
            residual = std::numeric_limits<double>::infinity();
        }
        if (!ok) r.lambda_every_step = false;
        if (lambda) {
            if (!first) first = lambda;
            if (std::abs(*lambda - *first) > 1e-10) r.lambda_constant = false;
            last = lambda;
        }
        r.lambda1.push_back(lambda);
        r.lambda_residual.push_back(residual);
    }

    if (r.lambda_every_step && last) {
        const double l1 = *last;
        r.follower_prediction = (1.0 - l1) * r.central_consensus[0] + l1 * r.central_consensus[1];

        // Followers: outer agents that the leaders reach through the final weights.
        const Eigen::MatrixXd& w = in.matrices.back();
        const int n = static_cast<int>(w.rows());
        std::vector<char> reached(static_cast<std::size_t>(n), 0);
        std::vector<int> queue;
        for (const auto& g : in.central)
            for (int i : g) {
                reached[static_cast<std::size_t>(i)] = 1;
                queue.push_back(i);
            }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int j = queue[head];
            for (int i = 0; i < n; ++i)
                if (!reached[static_cast<std::size_t>(i)] && i != j && w(i, j) != 0.0) {
                    reached[static_cast<std::size_t>(i)] = 1;
                    queue.push_back(i);
                }
        }
        for (int i : parts.front().outer)
            if (reached[static_cast<std::size_t>(i)]) r.follower_agents.push_back(i);
        for (int i : r.follower_agents)
            for (Eigen::Index p = 0; p < obs.cols(); ++p)
                r.follower_error = std::max(r.follower_error, std::abs(obs(i, p) - (*r.follower_prediction)(p)));
        r.follower_match = !r.follower_agents.empty() && r.follower_error <= cluster_tol;
    }
    return r;
}

nlohmann::json Theorem2Report::to_json() const {
    nlohmann::json j;
    auto lambdas = nlohmann::json::array();
    for (const auto& l : lambda1) lambdas.push_back(l ? nlohmann::json(*l) : nlohmann::json());
    nlohmann::json rank = nlohmann::json::array();
    for (bool b : central_rank_one) rank.push_back(b);
    j["hypotheses"] = {
        {"two_odc", odc},
        {"central_rank_one", rank},
        {"lambda_condition_every_step", lambda_every_step},
        {"lambda_constant_across_steps", lambda_constant},
        {"lambda1_per_step", lambdas},
    };
    if (!odc_error.empty()) j["hypotheses"]["error"] = odc_error;
    auto consensus = nlohmann::json::array();
    for (const auto& c : central_consensus) consensus.push_back(dsc::to_json(c));
    j["prediction"] = {
        {"leader_consensus", consensus},
        {"leaders_agree", leaders_agree},
        {"network_consensus", predicts_consensus},
        {"follower_cluster", follower_prediction ? dsc::to_json(*follower_prediction) : nlohmann::json()},
    };
    j["observed"] = {
        {"network_consensus", observed_consensus},
        {"followers", ids(follower_agents)},
        {"follower_max_error", follower_error},
    };
    j["match"] = odc && part_i_match && (!follower_prediction || follower_match);
    j["part_i_match"] = part_i_match;
    j["follower_match"] = follower_prediction ? nlohmann::json(follower_match) : nlohmann::json();
    return j;
}

}  // namespace dsc
