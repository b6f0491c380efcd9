#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "patchdroso/image.hpp"

namespace droso {

enum class CorruptMode : uint8_t { blackout = 0, noise_burst = 1, brightness_shift = 2 };

// One grid cell to corrupt, addressed under its own grid shape so the
// corruption can be aligned with (or offset from) the matcher's grid.
struct CorruptRegion {
    GridShape grid;
    int cell = 0;  // row-major cell index
    CorruptMode mode = CorruptMode::blackout;
};

struct SynthSpec {
    int n_places = 50;
    int image_rows = 96;
    int image_cols = 192;
    uint64_t base_seed = 0;
    double noise_sigma = 0.0;  // global additive gaussian on queries, < 0.5
    std::optional<CorruptRegion> corrupt_region;
    int shift_cols = 0;  // lateral shift of queries, edge-replicated
};

struct SynthDataset {
    std::vector<ImageTensor> references;
    std::vector<ImageTensor> queries;
    std::vector<int> ground_truth;  // identity mapping: query n -> reference n
};

// Reference n is a seeded procedural texture (smooth gradients plus a block
// pattern, unique per place); query n is reference n with the spec's
// perturbations applied (shift, then noise, then region corruption). Fully
// deterministic given the spec.
SynthDataset generate(const SynthSpec& spec);

}  // namespace droso
