#include <doctest.h>

#include <sstream>

#include "dsc/emit.hpp"
#include "dsc/json_io.hpp"
#include "dsc/sampling.hpp"
#include "dsc/scenario.hpp"
#include "dsc/simulation.hpp"
#include "oracles.hpp"

using namespace dsc;
using nlohmann::json;

namespace {

json small_scenario() {
    return json::parse(R"({
      "name": "pair",
      "frame_size": 2,
      "graph": {"n": 2, "edges": [[1, 2]]},
      "defaults": {"alpha": 0.5, "epsilon": 1.0},
      "agents": [
        {"initial": {"masses": {"1": 1.0}}},
        {"initial": {"2": 1.0}}
      ]
    })");
}

std::vector<std::string> cluster_labels(const ScenarioConfig& cfg, const ClusterReport& r, std::size_t c) {
    std::vector<std::string> out;
    for (int i : r.clusters[c]) out.push_back(cfg.labels[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

TEST_CASE("built-in seven-agent opinions") {
    const double theta1[] = {0.80, 0.78, 0.76, 0.40, 0.80, 0.10, 0.20};
    const auto pmf = load_scenario("fig3a-pmf");
    REQUIRE(pmf.agents.size() == 7);
    const Frame f = pmf.frame();
    for (std::size_t i = 0; i < 7; ++i) {
        const auto& e = pmf.agents[i].initial;
        CHECK(pmf.agents[i].strategy == Strategy::Receptive);
        CHECK(pmf.agents[i].alpha == 0.5);
        CHECK(e.mass(f.parse("1")) == doctest::Approx(theta1[i]));
        CHECK(e.mass(f.parse("2")) == doctest::Approx((1 - theta1[i]) / 2));
        CHECK(e.mass(f.parse("3")) == doctest::Approx((1 - theta1[i]) / 2));
    }
    CHECK(pmf.resolved_engine() == Engine::Pmf);

    const auto dir = load_scenario("dirichlet-7");
    for (std::size_t i = 0; i < 7; ++i) {
        const auto& e = dir.agents[i].initial;
        CHECK(e.mass(f.full()) == doctest::Approx(0.1));
        CHECK(e.mass(f.parse("2")) == doctest::Approx((1 - theta1[i]) / 2));
        CHECK(e.mass(f.parse("1")) == doctest::Approx(theta1[i] - 0.1));
    }
    CHECK(dir.resolved_engine() == Engine::Dirichlet);

    const auto two = load_scenario("fig5a-pmf");
    CHECK(two.leaders == std::vector<int>{0, 6});
    CHECK(two.labels.front() == "C1");
    CHECK(two.labels.back() == "C7");
    CHECK(two.central_groups == std::vector<std::vector<int>>{{0}, {6}});
    CHECK(two.network()->cautious_agents() == std::vector<int>{0, 6});
}

TEST_CASE("every built-in scenario loads") {
    const auto names = list_assets();
    CHECK(names.size() >= 10);
    for (const auto& n : names) {
        CAPTURE(n);
        CHECK_NOTHROW(load_scenario(n));
    }
}

TEST_CASE("scenario validation") {
    CHECK_NOTHROW(parse_scenario(small_scenario()));

    auto j = small_scenario();
    j["graph"]["n"] = 3;
    try {
        parse_scenario(j);
        FAIL("expected InvalidScenario");
    } catch (const InvalidScenario& e) {
        CHECK(e.field() == "agents");
    }

    j = small_scenario();
    j["colour"] = "blue";
    CHECK_THROWS_AS(parse_scenario(j), InvalidScenario);

    j = small_scenario();
    j["agents"][0]["initial"] = {{"masses", {{"1", 0.7}}}};
    CHECK_THROWS_AS(parse_scenario(j), InvalidScenario);

    j = small_scenario();
    j["leaders"] = {3};
    CHECK_THROWS_AS(parse_scenario(j), InvalidScenario);

    j = small_scenario();
    j["engine"] = "pmf";
    j["agents"][0]["initial"] = {{"*", 1.0}};
    CHECK_THROWS_AS(parse_scenario(j), InvalidScenario);
    j["engine"] = "auto";
    auto cfg = parse_scenario(j);
    cfg.engine = Engine::Pmf;
    CHECK_THROWS_AS(cfg.resolved_engine(), EngineMismatch);

    j = small_scenario();
    j["graph"]["edges"] = {{1, 1}};
    CHECK_THROWS_AS(parse_scenario(j), InvalidScenario);

    CHECK_THROWS_AS(load_scenario("no-such-scenario"), Error);
}

TEST_CASE("sampled scenarios are reproducible") {
    const auto a = load_scenario("er100-pmf-leader");
    const auto b = load_scenario("er100-pmf-leader");
    const auto c = load_scenario("er100-pmf-leader", 5);
    REQUIRE(a.er.has_value());
    CHECK(a.graph.edges() == b.graph.edges());
    CHECK(a.leaders == b.leaders);
    CHECK(a.leaders.size() == 1);
    CHECK(a.agents[3].initial.masses()[1] == b.agents[3].initial.masses()[1]);
    CHECK(c.seed == 5);
    CHECK(c.er->seed == 5);
    CHECK(c.graph.edges() != a.graph.edges());
    CHECK(is_connected(a.graph));
    CHECK(a.labels[static_cast<std::size_t>(a.leaders[0])].front() == 'C');
    // materialized form loads back to the same run
    const auto again = parse_scenario(a.to_json());
    CHECK(again.graph.edges() == a.graph.edges());
    CHECK(again.leaders == a.leaders);
    CHECK(again.agents[7].initial.masses()[2] == doctest::Approx(a.agents[7].initial.masses()[2]).epsilon(1e-15));
}

TEST_CASE("Dirichlet sampling") {
    const Frame f(3);
    Rng rng(41);
    SamplingSpec flat{{1, 1, 1}, {f.parse("1"), f.parse("2"), f.parse("3")}};
    double mean[3] = {0, 0, 0};
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const auto e = sample_boe(flat, f, rng);
        CHECK(validate(e).kind == BoeClass::Bayesian);
        for (int p = 0; p < 3; ++p) mean[p] += e.mass(Proposition::singleton(p)) / draws;
    }
    for (double m : mean) CHECK(m == doctest::Approx(1.0 / 3).epsilon(0.03));

    SamplingSpec rich{{4, 4, 4, 2, 2, 2, 1},
                      {f.parse("1"), f.parse("2"), f.parse("3"), f.parse("1,2"), f.parse("1,3"), f.parse("2,3"),
                       f.full()}};
    for (int t = 0; t < 100; ++t) {
        const auto e = sample_boe(rich, f, rng);
        const auto r = validate(e);
        CHECK(r.valid());
        CHECK(r.kind == BoeClass::General);
    }

    SamplingSpec one{{1}, {f.parse("2")}};
    CHECK(sample_boe(one, f, rng).mass(f.parse("2")) == 1.0);

    SamplingSpec bad{{1, 0}, {f.parse("1"), f.parse("2")}};
    CHECK_THROWS_AS(bad.check(f), std::invalid_argument);
    SamplingSpec uneven{{1, 1}, {f.parse("1")}};
    CHECK_THROWS_AS(uneven.check(f), std::invalid_argument);
}

TEST_CASE("JSON round trips") {
    const Frame f(3);
    const auto e = BodyOfEvidence::from_focal(f, {{f.parse("1"), 0.25}, {f.parse("2,3"), 0.5}, {f.full(), 0.25}});
    const auto back = boe_from_json(boe_to_json(e));
    for (std::uint32_t a = 0; a < 8; ++a) CHECK(back.mass({a}) == e.mass({a}));
    CHECK_THROWS_AS(boe_from_json(json{{"masses", {{"4", 1.0}}}}, f), InvalidScenario);

    const auto g = DirectedGraph::from_mutual_pairs(4, std::vector<Edge>{{0, 1}, {2, 3}});
    CHECK(graph_from_json(graph_to_json(g)).edges() == g.edges());
    CHECK(graph_to_json(g)["edges"][0] == json::array({1, 2}));
    CHECK_THROWS_AS(graph_from_json(json{{"n", 2}, {"edges", {{0, 1}}}}), InvalidScenario);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ParseError);
}

TEST_CASE("seven-agent runs") {
    SUBCASE("no leader, epsilon 0.5") {
        const auto r = run_simulation(load_scenario("fig3a-pmf"), {.epsilon = 0.5});
        CHECK(r.converged);
        CHECK(r.clusters.consensus);
    }
    SUBCASE("one leader, epsilon 0.5") {
        const auto r = run_simulation(load_scenario("fig4a-pmf"), {.epsilon = 0.5});
        CHECK(r.clusters.consensus);
        for (int i = 0; i < 7; ++i) CHECK(r.final_masses(i, 1) == doctest::Approx(0.8).epsilon(1e-6));
    }
    SUBCASE("two leaders, epsilon 0.35") {
        const auto cfg = load_scenario("fig5a-pmf");
        const auto r = run_simulation(cfg, {.epsilon = 0.35});
        REQUIRE(r.clusters.count() == 2);
        CHECK(cluster_labels(cfg, r.clusters, 0) == std::vector<std::string>{"C1", "R2", "R3", "R4", "R5"});
        CHECK(cluster_labels(cfg, r.clusters, 1) == std::vector<std::string>{"R6", "C7"});
    }
    SUBCASE("pruning at the first steps") {
        SimulationOptions opt;
        opt.epsilon = 0.5;
        opt.record_pruned = true;
        const auto r = run_simulation(load_scenario("fig3a-pmf"), opt);
        std::vector<Edge> first;
        for (auto [i, j] : r.pruned.at(0))
            if (i < j) first.emplace_back(i + 1, j + 1);
        CHECK(first == std::vector<Edge>{{3, 6}, {5, 7}});
        CHECK(r.pruned.at(1).empty());
    }
    SUBCASE("trajectory recording") {
        SimulationOptions opt;
        opt.epsilon = 0.5;
        opt.record_trajectory = true;
        opt.trace_stride = 10;
        const auto r = run_simulation(load_scenario("fig3a-pmf"), opt);
        CHECK(r.trace_steps.front() == 0);
        CHECK(r.trace_steps.back() == r.iterations);
        CHECK(r.trajectory.size() == r.trace_steps.size());
        CHECK(r.trajectory.back().isApprox(r.final_masses));
    }
    SUBCASE("report") {
        const auto cfg = load_scenario("fig3a-pmf");
        const auto j = report_json(cfg, run_simulation(cfg, {.epsilon = 0.5}));
        CHECK(j["consensus"] == true);
        CHECK(j["cluster_count"] == 1);
        CHECK(j["clusters"][0]["members"].size() == 7);
    }
}

TEST_CASE("general-engine run with fixed opinions") {
    const auto cfg = load_scenario("table1-general");
    CHECK(cfg.resolved_engine() == Engine::General);
    const auto r = run_simulation(cfg);
    CHECK(r.converged);
    REQUIRE(r.clusters.count() == 2);
    CHECK(r.clusters.clusters[1] == std::vector<int>{5, 6});
    const Frame f = cfg.frame();
    const auto& b = r.clusters.representatives[1];
    CHECK(b.mass(f.parse("1")) == doctest::Approx(0.15).epsilon(0.07));
    CHECK(b.mass(f.parse("2,3")) == doctest::Approx(0.85).epsilon(0.02));
}

TEST_CASE("epsilon grid and sweeps") {
    const auto grid = epsilon_grid(0.0, 1.0, 0.01);
    CHECK(grid.size() == 101);
    CHECK(grid[46] == 0.46);
    CHECK(grid.back() == 1.0);
    CHECK(epsilon_grid(0.2, 0.3, 0.5) == std::vector<double>{0.2});
    CHECK_THROWS_AS(epsilon_grid(0.5, 0.4, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_grid(0.0, 1.0, 0.0), std::invalid_argument);

    const auto cfg = load_scenario("fig4a-pmf");
    SweepOptions opt;
    opt.eps_min = 0.40;
    opt.eps_max = 0.60;
    opt.eps_step = 0.05;
    const auto one = run_sweep(cfg, opt);
    opt.workers = 3;
    const auto three = run_sweep(cfg, opt);
    REQUIRE(one.points.size() == 5);
    for (std::size_t k = 0; k < one.points.size(); ++k) {
        CHECK(one.points[k].epsilon == three.points[k].epsilon);
        CHECK(one.points[k].limit == three.points[k].limit);
        CHECK(one.points[k].cluster_count == three.points[k].cluster_count);
    }
    CHECK(one.first_consensus() == 0.5);
    CHECK(one.consensus_onset() == 0.5);
    CHECK(one.min_cluster_count() == 1);
    for (const auto& p : one.points) CHECK(p.consensus == (p.cluster_count == 1));
}

TEST_CASE("CSV and SVG output") {
    BifurcationResult empty;
    empty.scenario = "none";
    std::ostringstream csv;
    write_csv(empty, csv);
    CHECK(csv.str() == "epsilon,agent_id,proposition,limit_mass,cluster_id,cluster_count,consensus,iterations\n");

    const auto cfg = load_scenario("fig4a-pmf");
    SweepOptions opt;
    opt.eps_min = 0.5;
    opt.eps_max = 0.5;
    const auto r = run_sweep(cfg, opt);
    std::ostringstream out;
    write_csv(r, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.rfind("0.5,", 0) == 0);
        CHECK(line.find(",1,1,true,") != std::string::npos);
        // epsilon,agent,proposition,limit,...
        std::istringstream fields(line);
        std::string field;
        for (int k = 0; k < 4; ++k) std::getline(fields, field, ',');
        CHECK(std::stod(field) == doctest::Approx(0.8).epsilon(1e-6));
    }
    CHECK(rows == 7);

    std::ostringstream svg;
    write_bifurcation_svg(r, svg);
    CHECK(svg.str().rfind("<svg", 0) == 0);
    CHECK(svg.str().find("<circle") != std::string::npos);
}

TEST_CASE("verification entry point") {
    const auto one = verify_scenario(load_scenario("fig4a-pmf"), 0.5);
    CHECK(one.match);
    CHECK(one.report["hypotheses"]["satisfied"] == true);

    const auto two = verify_scenario(load_scenario("fig6a-pmf"), 0.5);
    CHECK(two.match);
    CHECK(two.report["hypotheses"]["lambda_condition_every_step"] == true);

    CHECK_THROWS_AS(verify_scenario(load_scenario("fig3a-pmf"), 0.5), InvalidScenario);
    CHECK_THROWS_AS(verify_scenario(load_scenario("general-dst-7-leader"), 0.5), EngineMismatch);
}
