#include "dsc/json_io.hpp"

#include <fstream>
#include <sstream>

namespace dsc {

nlohmann::json boe_to_json(const BodyOfEvidence& boe) {
    nlohmann::json masses = nlohmann::json::object();
    for (auto a : boe.frame().canonical_order()) {
        const double v = boe.mass(a);
        if (v != 0.0 && !a.is_empty()) masses[boe.frame().to_string(a)] = v;
    }
    return {{"frame_size", boe.frame().size()}, {"masses", masses}};
}

BodyOfEvidence boe_from_json(const nlohmann::json& j, const Frame& frame, const std::string& field) {
    if (j.contains("frame_size") && j["frame_size"] != frame.size()) {
        throw InvalidScenario(field + ".frame_size", "does not match the scenario frame");
    }
    const auto& masses = j.contains("masses") ? j["masses"] : j;
    if (!masses.is_object()) throw InvalidScenario(field + ".masses", "expected an object");
    std::vector<double> m(frame.power_set_size(), 0.0);
    for (const auto& [key, value] : masses.items()) {
        Proposition a;
        try {
            a = frame.parse(key);
        } catch (const ParseError& e) {
            throw InvalidScenario(field + ".masses." + key, e.what());
        }
        if (!value.is_number()) throw InvalidScenario(field + ".masses." + key, "mass must be a number");
        m[a.bits] += value.get<double>();
    }
    BodyOfEvidence boe(frame, std::move(m));
    const auto report = validate(boe);
    if (!report.valid()) {
        throw InvalidScenario(field + ".masses", "not a valid mass function (sum " + std::to_string(report.mass_sum) + ")");
    }
    return boe;
}

BodyOfEvidence boe_from_json(const nlohmann::json& j) {
    if (!j.contains("frame_size") || !j["frame_size"].is_number_integer()) {
        throw InvalidScenario("frame_size", "missing or not an integer");
    }
    int size = j["frame_size"].get<int>();
    if (size < 1 || size > kMaxFrameSize) throw InvalidScenario("frame_size", "must lie in [1, 16]");
    return boe_from_json(j, Frame(size));
}

nlohmann::json graph_to_json(const DirectedGraph& g) {
    auto edges = nlohmann::json::array();
    for (auto [i, j] : g.undirected_pairs()) edges.push_back({i + 1, j + 1});
    return {{"n", g.size()}, {"edges", edges}};
}

DirectedGraph graph_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1) {
        throw InvalidScenario(field + ".n", "missing or not a positive integer");
    }
    const int n = j["n"].get<int>();
    DirectedGraph g(n);
    if (!j.contains("edges")) return g;
    if (!j["edges"].is_array()) throw InvalidScenario(field + ".edges", "expected an array of pairs");
    std::size_t k = 0;
    for (const auto& e : j["edges"]) {
        const std::string where = field + ".edges[" + std::to_string(k++) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw InvalidScenario(where, "expected [i, j]");
        }
        const int a = e[0].get<int>();
        const int b = e[1].get<int>();
        if (a < 1 || a > n || b < 1 || b > n) throw InvalidScenario(where, "node id outside 1.." + std::to_string(n));
        if (a == b) throw InvalidScenario(where, "self-loop");
        g.add_mutual(a - 1, b - 1);
    }
    return g;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out) throw Error("write failed: " + path);
}

}  // namespace dsc
