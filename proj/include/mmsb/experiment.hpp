#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "mmsb/pipeline.hpp"

namespace mmsb {

using Json = nlohmann::json;

// Names accepted by run_experiment.
std::vector<std::string> experiment_presets();

// Generates the preset's model, samples a graph per seed, fits, evaluates,
// and returns a self-contained report (schemaVersion field included).
// `overrides` may replace preset parameters (n, k, p, q, alpha0, s,
// seedCount, grid, plus any fit knobs: tau, xi, N, L, cTau, c2, cXi).
// Unknown preset names raise UnknownPreset.
Json run_experiment(const std::string& preset, const Json& overrides,
                    std::uint64_t seed);

}  // namespace mmsb
