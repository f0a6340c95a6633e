#pragma once

#include <random>
#include <vector>

#include "dsc/dst.hpp"

namespace dsc {

/// Dirichlet draw whose coordinates become the masses of `targets`, in order.
struct SamplingSpec {
    std::vector<double> concentration;
    std::vector<Proposition> targets;

    /// Throws std::invalid_argument.
    void check(const Frame& frame) const;
};

using Rng = std::mt19937_64;

BodyOfEvidence sample_boe(const SamplingSpec& spec, const Frame& frame, Rng& rng);

}  // namespace dsc
