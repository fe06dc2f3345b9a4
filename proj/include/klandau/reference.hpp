#pragma once

// Serial reference implementations of the parallel pair kernels. Kept for
// testing and benchmarking; they share no code with the production kernels.

#include <span>
#include <vector>

#include "klandau/diffusion.hpp"
#include "klandau/interaction.hpp"
#include "klandau/state.hpp"

namespace klandau::reference {

double quadratic_form(const SystemState& state, const InteractionConfig& cfg, std::span<const double> xi);

std::vector<Vec3> drift(const SystemState& state, const InteractionConfig& cfg);

std::vector<Vec3> noise_from_draws(const SystemState& state, const InteractionConfig& cfg, double dt,
                                   const NoiseDraws& draws);

}  // namespace klandau::reference
