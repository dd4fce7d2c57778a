#pragma once

#include <cstdint>
#include <span>

#include "srn/network.hpp"

namespace srn {

// Largest tau-leap step with one-step exit probability below delta (Chernoff bound,
// split evenly across species). May be +inf. `a` must hold the propensities at x.
double chernoff_tau(const ReactionNetwork& net, std::span<const std::int64_t> x, std::span<const double> a,
                    double delta);

double chernoff_tau(const ReactionNetwork& net, std::span<const std::int64_t> x, double delta);

// Per-species bound tau_i(s) = (log delta_i + s x_i) / D_i(s); exposed for testing.
double chernoff_tau_at(const ReactionNetwork& net, std::size_t species, std::span<const std::int64_t> x,
                       std::span<const double> a, double delta_i, double s);

}  // namespace srn
