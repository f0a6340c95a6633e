#pragma once

// JSON forms:
//   BoE   {"frame_size": M, "masses": {"1,3": 0.2, "*": 0.8}}   omitted subsets have mass 0
//   graph {"n": N, "edges": [[1, 2], ...]}                      1-based mutual pairs

#include <string>

#include <json.hpp>

#include "dsc/dst.hpp"
#include "dsc/graph.hpp"

namespace dsc {

nlohmann::json boe_to_json(const BodyOfEvidence& boe);
/// `field` prefixes error messages. Throws InvalidScenario.
BodyOfEvidence boe_from_json(const nlohmann::json& j, const Frame& frame, const std::string& field = "boe");
BodyOfEvidence boe_from_json(const nlohmann::json& j);

nlohmann::json graph_to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const nlohmann::json& j, const std::string& field = "graph");

/// Reads a file as JSON. Throws ParseError.
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dsc
