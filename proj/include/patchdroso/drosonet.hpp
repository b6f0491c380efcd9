#pragma once

#include <cstdint>
#include <vector>

#include "patchdroso/image.hpp"

namespace droso {

// Hyperparameters of a single unit. All sizes are configurable; the seed
// pins every random draw (projection layout and output-layer init).
struct UnitConfig {
    int hidden_units = 64;
    double projection_density = 0.1;   // fraction of active inputs per hidden row, (0,1]
    double wta_keep_fraction = 0.5;    // fraction of hidden activations kept, (0,1]
    double learning_rate = 0.01;
    int epochs = 100;
    uint64_t seed = 0;

    bool operator==(const UnitConfig&) const = default;
};

// One compact classifier unit over n_places classes.
//
// Pipeline: flatten 32x64 patch -> 2048 vector, multiply by a fixed random
// binary projection (stored as sorted active-input indices per hidden row),
// winner-take-all keeps the strongest activations, then a trainable dense
// softmax layer produces the place scores. Only out_weights/out_bias train;
// the projection never changes after construction.
struct DrosoNet {
    int n_places = 0;
    UnitConfig config;
    std::vector<std::vector<uint16_t>> projection;  // hidden_units rows, each >= 1 index
    std::vector<double> out_weights;                // n_places x hidden_units, row-major
    std::vector<double> out_bias;                   // n_places

    bool operator==(const DrosoNet&) const = default;
};

// softmax output over places: nonnegative, sums to 1
using ScoreVector = std::vector<double>;

struct TrainSample {
    ImageTensor patch;  // 32x64
    int label = 0;      // in [0, n_places)
};

// Hidden activation after winner-take-all, sparse form. Indices ascend so
// downstream accumulation order is canonical.
struct SparseHidden {
    std::vector<int> idx;
    std::vector<double> val;
};

// Builds a unit with the seeded random projection (empty rows repaired with
// one seeded entry) and output weights uniform in [-0.05, 0.05], bias zero.
// Throws std::invalid_argument for n_places < 1 or out-of-range config.
DrosoNet make_unit(int n_places, const UnitConfig& config);

// Full forward pass on a 32x64 patch. Deterministic; increments the
// process-wide forward call counter.
ScoreVector forward(const DrosoNet& model, const ImageTensor& patch);

// Per-sample SGD on softmax cross-entropy, config.epochs passes with a
// seeded shuffle per epoch (seed derived from config.seed and the epoch
// index). Mutates only out_weights/out_bias. Bit-deterministic.
void train(DrosoNet& model, const std::vector<TrainSample>& samples);

// Mean cross-entropy of the current model over a sample set.
double cross_entropy(const DrosoNet& model, const std::vector<TrainSample>& samples);

struct OutputGradients {
    std::vector<double> d_weights;  // n_places x hidden_units
    std::vector<double> d_bias;     // n_places
};

// Analytic gradient of the mean cross-entropy w.r.t. the output layer.
// This is the same gradient the SGD steps use.
OutputGradients loss_gradients(const DrosoNet& model, const std::vector<TrainSample>& samples);

// projection + winner-take-all only (no output layer, no counter)
SparseHidden project_wta(const DrosoNet& model, const ImageTensor& patch);

// output layer + softmax on a precomputed sparse hidden activation
ScoreVector output_scores(const DrosoNet& model, const SparseHidden& hidden);

// instrumentation: unit forward invocations since start / last reset
uint64_t forward_calls();
void reset_forward_calls();

}  // namespace droso
