#pragma once

#include <cstdint>
#include <vector>

#include "patchdroso/drosonet.hpp"
#include "patchdroso/image.hpp"

namespace droso {

enum class VotingMode : uint8_t { soft = 0, hard = 1 };

struct EnsembleConfig {
    GridShape grid;
    int units_per_patch = 4;  // z
    UnitConfig unit_config;
    VotingMode voting_mode = VotingMode::soft;
    uint64_t master_seed = 0;

    bool operator==(const EnsembleConfig&) const = default;
};

struct EnsembleSize {
    uint64_t total_units = 0;      // T = r*c*z
    uint64_t calls_per_query = 0;  // C = T*r*c
};

EnsembleSize ensemble_size(const GridShape& grid, int units_per_patch);

// r*c groups of z trained units; group g holds the units trained on grid
// cell g (row-major) of every reference image.
struct PatchEnsemble {
    EnsembleConfig config;
    int n_places = 0;
    std::vector<std::vector<DrosoNet>> groups;

    bool operator==(const PatchEnsemble&) const = default;
};

struct MatchResult {
    std::vector<double> final_scores;  // merged vote, length n_places
    int predicted_place = 0;
    double confidence = 0.0;  // max final score / C, in [0,1]
    uint64_t calls_made = 0;  // actual unit forward invocations, == C
};

// Splits every reference with the configured grid and trains group g's z
// units on the samples {(patch g of image n, label n)}. Unit seeds derive
// from (master_seed, group index, unit index), so results are independent
// of the thread count. Throws std::invalid_argument for fewer than 2
// references.
PatchEnsemble build_and_train(const EnsembleConfig& config,
                              const std::vector<ImageTensor>& references,
                              int threads = 1);

// Exhaustive matching: every unit scores every patch of the query, giving
// exactly C = T*r*c score vectors (collected in group, unit, patch order),
// merged by vote(). Prediction tie-breaks: highest merged score, then (hard
// mode only) highest summed soft score, then lowest place index.
MatchResult match_query(const PatchEnsemble& ensemble, const ImageTensor& query);

// Merges score vectors. Soft: each vector is min-max normalized to [0,1]
// (constant vectors abstain as all-zeros) and the normalized vectors are
// summed. Hard: one count to each vector's argmax place (internal ties to
// the lowest index); the count histogram is returned — summed soft scores
// act as the secondary tie-break key downstream.
std::vector<double> vote(const std::vector<ScoreVector>& vectors, VotingMode mode);

// lowest index among maximal entries
int argmax_index(const std::vector<double>& v);

}  // namespace droso
