#include "dsc/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsc {

void SamplingSpec::check(const Frame& frame) const {
    if (concentration.empty()) throw std::invalid_argument("Dirichlet needs at least one concentration parameter");
    if (concentration.size() != targets.size()) {
        throw std::invalid_argument(std::to_string(concentration.size()) + " concentration parameters for " +
                                    std::to_string(targets.size()) + " target propositions");
    }
    for (double a : concentration)
        if (!(a > 0.0)) throw std::invalid_argument("concentration parameters must be positive");
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (targets[t].is_empty() || !frame.contains(targets[t]))
            throw std::invalid_argument("target proposition outside frame or empty");
        for (std::size_t u = 0; u < t; ++u)
            if (targets[u] == targets[t]) throw std::invalid_argument("duplicate target proposition");
    }
}

BodyOfEvidence sample_boe(const SamplingSpec& spec, const Frame& frame, Rng& rng) {
    spec.check(frame);
    std::vector<double> draws(spec.concentration.size());
    double total = 0.0;
    // A zero total is possible only through underflow with tiny concentrations; redraw.
    while (!(total > 0.0)) {
        total = 0.0;
        for (std::size_t t = 0; t < draws.size(); ++t) {
            std::gamma_distribution<double> gamma(spec.concentration[t], 1.0);
            draws[t] = gamma(rng);
            total += draws[t];
        }
    }
    std::vector<double> m(frame.power_set_size(), 0.0);
    for (std::size_t t = 0; t < draws.size(); ++t) m[spec.targets[t].bits] = draws[t] / total;
    return {frame, std::move(m)};
}

}  // namespace dsc
