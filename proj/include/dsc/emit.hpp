#pragma once

#include <ostream>
#include <string>

#include "dsc/simulation.hpp"

namespace dsc {

/// Columns: epsilon, agent_id, proposition, limit_mass, cluster_id, cluster_count, consensus, iterations.
void write_csv(const BifurcationResult& result, std::ostream& out);
void emit_csv(const BifurcationResult& result, const std::string& path);

/// Scatter of limit mass against epsilon, one mark per agent per grid point.
void write_bifurcation_svg(const BifurcationResult& result, std::ostream& out);
void emit_bifurcation_svg(const BifurcationResult& result, const std::string& path);

}  // namespace dsc
