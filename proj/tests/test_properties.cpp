// Randomized invariants: each suite draws at least 100 instances with M <= 4 and N <= 8.

#include <doctest.h>

#include "dsc/analysis.hpp"
#include "oracles.hpp"

using namespace dsc;

namespace {

constexpr int kCases = 120;

struct Instance {
    std::shared_ptr<const Network> net;
    std::vector<Strategy> strategies;
};

enum class Kind { Pmf, Dirichlet, General };

Instance draw(oracle::Rng& rng, Kind kind, double eps = -1.0, bool cautious = true) {
    std::uniform_int_distribution<int> frame_size(kind == Kind::Pmf ? 2 : 1, 4);
    std::uniform_int_distribution<int> agents(2, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Frame f(frame_size(rng));
    const int n = agents(rng);
    std::vector<BodyOfEvidence> ops;
    Instance out;
    for (int i = 0; i < n; ++i) {
        ops.push_back(kind == Kind::Pmf         ? oracle::random_pmf(f, rng)
                      : kind == Kind::Dirichlet ? oracle::random_dirichlet(f, rng)
                                                : oracle::random_general(f, rng));
        out.strategies.push_back(cautious && unit(rng) < 0.25 ? Strategy::Cautious : Strategy::Receptive);
    }
    const double alpha = 0.1 + 0.8 * unit(rng);
    out.net = oracle::make_network(oracle::random_connected_graph(n, rng), ops, out.strategies, alpha,
                                   eps < 0.0 ? unit(rng) : eps);
    return out;
}

}  // namespace

TEST_CASE("(a) CUE output is a valid mass function") {
    oracle::Rng rng(101);
    for (int t = 0; t < kCases; ++t) {
        auto inst = draw(rng, Kind::General);
        NetworkState s(inst.net);
        for (int k = 0; k < 5; ++k) {
            s = cue_step_general(s);
            for (int i = 0; i < s.size(); ++i) {
                const auto m = s.masses(i);
                double sum = 0.0;
                for (double x : m) {
                    CHECK(x >= -1e-9);
                    sum += x;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-10);
                CHECK(m[0] == 0.0);
            }
        }
    }
}

TEST_CASE("(b) cautious p.m.f. agents never move") {
    oracle::Rng rng(102);
    int cautious_seen = 0;
    for (int t = 0; t < kCases; ++t) {
        auto inst = draw(rng, Kind::Pmf);
        const NetworkState s0(inst.net);
        NetworkState s = s0;
        for (int k = 0; k < 100; ++k) s = step_pmf(s);
        for (int i = 0; i < s.size(); ++i) {
            if (inst.strategies[static_cast<std::size_t>(i)] != Strategy::Cautious) continue;
            ++cautious_seen;
            CHECK((s.masses().row(i) - s0.masses().row(i)).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    CHECK(cautious_seen >= 100);
}

TEST_CASE("(c) general engine agrees with the matrix engines") {
    oracle::Rng rng(103);
    for (Kind kind : {Kind::Pmf, Kind::Dirichlet}) {
        for (int t = 0; t < kCases; ++t) {
            auto inst = draw(rng, kind);
            NetworkState s(inst.net);
            for (int k = 0; k < 5; ++k) {
                const auto general = cue_step_general(s);
                const auto matrix = kind == Kind::Pmf ? step_pmf(s) : step_dirichlet(s);
                CHECK((general.masses() - matrix.masses()).cwiseAbs().maxCoeff() < 1e-10);
                s = matrix;
            }
        }
    }
}

TEST_CASE("(d) Dirichlet opinions stay Dirichlet") {
    oracle::Rng rng(104);
    for (int t = 0; t < kCases; ++t) {
        auto inst = draw(rng, Kind::Dirichlet);
        NetworkState s(inst.net);
        NetworkState g(inst.net);
        for (int k = 0; k < 30; ++k) {
            s = step_dirichlet(s);
            if (k < 5) g = cue_step_general(g);
        }
        for (int i = 0; i < s.size(); ++i) {
            for (const auto& state : {s, g}) {
                const auto r = validate(state.opinion(i));
                CHECK(r.valid());
                CHECK(r.dirichlet);
            }
        }
    }
}

TEST_CASE("(e) Theta mass decays geometrically under the rho bound") {
    oracle::Rng rng(105);
    int checked = 0;
    for (int t = 0; t < 3 * kCases && checked < kCases; ++t) {
        auto inst = draw(rng, Kind::Dirichlet, 1.0);
        if (inst.net->frame().size() < 2) continue;
        const Proposition theta = inst.net->frame().full();
        NetworkState s(inst.net);
        const double max0 = s.profile(theta).maxCoeff();
        double rho = 0.0;
        bool bound_holds = true;
        for (int n = 1; n <= 40 && bound_holds; ++n) {
            const auto pruned = prune(s);
            for (int i = 0; i < s.size(); ++i) {
                const auto w = cue_weights(i, s, pruned);
                double r = w.alpha;
                for (const auto& term : w.terms)
                    if (term.condition == theta) r += term.beta;
                rho = std::max(rho, r);
            }
            if (!(rho < 1.0)) {
                bound_holds = false;
                break;
            }
            s = step_dirichlet(s);
            CHECK(s.profile(theta).maxCoeff() <= std::pow(rho, n) * max0 + 1e-15);
        }
        if (bound_holds) ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("(f) Jousselme distance is a metric on [0, 1]") {
    oracle::Rng rng(106);
    std::uniform_int_distribution<int> frame_size(1, 4);
    for (int t = 0; t < kCases; ++t) {
        const Frame f(frame_size(rng));
        const auto a = oracle::random_general(f, rng);
        const auto b = oracle::random_general(f, rng);
        const auto c = oracle::random_general(f, rng);
        const double ab = jousselme_distance(a, b);
        const double bc = jousselme_distance(b, c);
        const double ac = jousselme_distance(a, c);
        CHECK(jousselme_distance(a, a) == 0.0);
        CHECK(ab == doctest::Approx(jousselme_distance(b, a)).epsilon(1e-14));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ac <= ab + bc + 1e-12);
        CHECK(ab == doctest::Approx(oracle::jousselme(oracle::to_vec(a), oracle::to_vec(b))).epsilon(1e-12));
        bool same = true;
        for (std::size_t k = 0; k < a.size(); ++k) same = same && a.masses()[k] == b.masses()[k];
        if (!same) CHECK(ab > 0.0);
    }
}

TEST_CASE("(g) Moebius inversion recovers the masses") {
    oracle::Rng rng(107);
    std::uniform_int_distribution<int> frame_size(1, 4);
    for (int t = 0; t < kCases; ++t) {
        const Frame f(frame_size(rng));
        const auto e = oracle::random_general(f, rng);
        const auto back = masses_from_beliefs(f, beliefs(e));
        double err = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k) err = std::max(err, std::abs(back.masses()[k] - e.masses()[k]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("(h) accumulated product follows the block recursion") {
    oracle::Rng rng(108);
    std::uniform_int_distribution<int> sizes(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < kCases; ++t) {
        const int nc = sizes(rng);
        const int no = sizes(rng);
        const int n = nc + no;
        std::vector<Eigen::MatrixXd> ws;
        for (int k = 0; k < 12; ++k) {
            Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                const int width = i < nc ? nc : n;  // central rows ignore outer columns
                double sum = 0.0;
                for (int j = 0; j < width; ++j) sum += (w(i, j) = unit(rng) < 0.3 ? 0.0 : unit(rng));
                if (sum == 0.0) sum = (w(i, i) = 1.0);
                w.row(i) /= sum;
            }
            ws.push_back(w);
        }
        LeftProduct acc(n);
        Eigen::MatrixXd a_prod = Eigen::MatrixXd::Identity(nc, nc);  // A_{k-1:0}
        Eigen::MatrixXd p;                                            // P_{k-1}
        for (std::size_t k = 0; k < ws.size(); ++k) {
            const auto part = classify_odc(ws[k], {[&] {
                                               std::vector<int> c(static_cast<std::size_t>(nc));
                                               for (int i = 0; i < nc; ++i) c[static_cast<std::size_t>(i)] = i;
                                               return c;
                                           }()});
            const Eigen::MatrixXd& a = part.a[0];
            const Eigen::MatrixXd& c = part.c[0];
            const Eigen::MatrixXd& d = part.d;
            // P_0 = C_0; P_k = C_k A_{k-1:0} + D_k P_{k-1}
            p = k == 0 ? c : Eigen::MatrixXd(c * a_prod + d * p);
            a_prod = a * a_prod;
            acc.accumulate(ws[k]);
            const Eigen::MatrixXd& full = acc.matrix();
            CHECK((full.topLeftCorner(nc, nc) - a_prod).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(full.topRightCorner(nc, no).cwiseAbs().maxCoeff() == 0.0);
            CHECK((full.bottomLeftCorner(no, nc) - p).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("(i) rank-one accumulated product predicts the limit") {
    oracle::Rng rng(109);
    int rank_one_cases = 0;
    for (int t = 0; t < 3 * kCases && rank_one_cases < kCases; ++t) {
        auto inst = draw(rng, Kind::Pmf, 1.0, t % 2 == 0);
        NetworkState s(inst.net);
        const NetworkState s0 = s;
        LeftProduct acc(s.size());
        ConvergenceMonitor monitor;
        for (int k = 0; k < 20000; ++k) {
            const auto w = build_W_pmf(s, prune(s));
            acc.accumulate(w.dense());
            auto next = apply_pmf(s, w);
            const bool done = monitor.observe(max_step_change(next.masses(), s.masses()));
            s = std::move(next);
            if (done) break;
        }
        const Eigen::MatrixXd& prod = acc.matrix();
        double dev = 0.0;
        for (Eigen::Index i = 1; i < prod.rows(); ++i) dev = std::max(dev, (prod.row(i) - prod.row(0)).cwiseAbs().maxCoeff());
        if (dev >= 1e-8) continue;
        ++rank_one_cases;
        for (int p = 0; p < inst.net->frame().size(); ++p) {
            const Proposition b = Proposition::singleton(p);
            const Eigen::VectorXd pi0 = s0.profile(b);
            const Eigen::VectorXd observed = s.profile(b);
            const double eta = prod.row(0).dot(pi0);
            const auto r = check_consensus_rank_one(prod, pi0, &observed);
            CHECK(r.eta == doctest::Approx(eta).epsilon(1e-12));
            CHECK(r.matches);
            CHECK((observed.array() - eta).abs().maxCoeff() <= 1e-6);
        }
    }
    CHECK(rank_one_cases >= 100);
}
