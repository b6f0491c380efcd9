#include "patchdroso/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

#include "patchdroso/parallel.hpp"
#include "patchdroso/rng.hpp"

namespace droso {

namespace {

void soft_accumulate(const ScoreVector& v, std::vector<double>& acc) {
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it;
    const double range = *mx_it - mn;
    if (range <= 0.0)
        return;  // constant vector carries no ranking information
    for (size_t i = 0; i < v.size(); ++i)
        acc[i] += (v[i] - mn) / range;
}

}  // namespace

int argmax_index(const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

EnsembleSize ensemble_size(const GridShape& grid, int units_per_patch) {
    validate_grid(grid);
    if (units_per_patch < 1)
        throw std::invalid_argument("units_per_patch must be >= 1");
    const uint64_t cells = static_cast<uint64_t>(grid.rows) * grid.cols;
    EnsembleSize s;
    s.total_units = cells * static_cast<uint64_t>(units_per_patch);
    s.calls_per_query = s.total_units * cells;
    return s;
}

PatchEnsemble build_and_train(const EnsembleConfig& config,
                              const std::vector<ImageTensor>& references,
                              int threads) {
    validate_grid(config.grid);
    if (config.units_per_patch < 1)
        throw std::invalid_argument("units_per_patch must be >= 1");
    if (references.size() < 2)
        throw std::invalid_argument("need at least 2 reference images");

    const int n_places = static_cast<int>(references.size());
    const int cells = config.grid.cells();
    const int z = config.units_per_patch;

    std::vector<PatchGrid> splits(references.size());
    parallel_for(references.size(), threads,
                 [&](size_t n) { splits[n] = split_grid(references[n], config.grid); });

    // group g's sample set: patch g of every reference, labelled by place
    std::vector<std::vector<TrainSample>> group_samples(static_cast<size_t>(cells));
    for (int g = 0; g < cells; ++g) {
        auto& samples = group_samples[static_cast<size_t>(g)];
        samples.reserve(references.size());
        for (int n = 0; n < n_places; ++n)
            samples.push_back({splits[static_cast<size_t>(n)].patches[static_cast<size_t>(g)], n});
    }

    PatchEnsemble ensemble;
    ensemble.config = config;
    ensemble.n_places = n_places;
    ensemble.groups.resize(static_cast<size_t>(cells));
    for (auto& group : ensemble.groups)
        group.resize(static_cast<size_t>(z));

    parallel_for(static_cast<size_t>(cells) * z, threads, [&](size_t i) {
        const int g = static_cast<int>(i) / z;
        const int u = static_cast<int>(i) % z;
        UnitConfig cfg = config.unit_config;
        cfg.seed = derive_seed(config.master_seed, static_cast<uint64_t>(g),
                               static_cast<uint64_t>(u));
        DrosoNet unit = make_unit(n_places, cfg);
        train(unit, group_samples[static_cast<size_t>(g)]);
        ensemble.groups[static_cast<size_t>(g)][static_cast<size_t>(u)] = std::move(unit);
    });
    return ensemble;
}

std::vector<double> vote(const std::vector<ScoreVector>& vectors, VotingMode mode) {
    if (vectors.empty())
        throw std::invalid_argument("vote needs at least one score vector");
    const size_t n = vectors.front().size();
    for (const ScoreVector& v : vectors)
        if (v.size() != n)
            throw std::invalid_argument("vote: score vectors differ in length");

    std::vector<double> merged(n, 0.0);
    if (mode == VotingMode::soft) {
        for (const ScoreVector& v : vectors)
            soft_accumulate(v, merged);
    } else {
        for (const ScoreVector& v : vectors)
            merged[static_cast<size_t>(argmax_index(v))] += 1.0;
    }
    return merged;
}

MatchResult match_query(const PatchEnsemble& ensemble, const ImageTensor& query) {
    if (ensemble.groups.empty() || ensemble.groups.front().empty())
        throw std::invalid_argument("match_query: ensemble has no trained units");
    const PatchGrid grid = split_grid(query, ensemble.config.grid);
    const size_t n_patches = grid.patches.size();

    std::vector<ScoreVector> vectors;
    vectors.reserve(ensemble.groups.size() * ensemble.groups.front().size() * n_patches);
    uint64_t calls = 0;
    for (const auto& group : ensemble.groups) {
        for (const DrosoNet& unit : group) {
            for (const ImageTensor& patch : grid.patches) {
                vectors.push_back(forward(unit, patch));
                ++calls;
            }
        }
    }

    MatchResult result;
    result.final_scores = vote(vectors, ensemble.config.voting_mode);
    result.calls_made = calls;

    int best = argmax_index(result.final_scores);
    if (ensemble.config.voting_mode == VotingMode::hard) {
        // equal counts are routine in hard mode; break them on soft sums
        const double top = result.final_scores[static_cast<size_t>(best)];
        const std::vector<double> soft = vote(vectors, VotingMode::soft);
        for (size_t i = 0; i < result.final_scores.size(); ++i) {
            if (result.final_scores[i] == top &&
                soft[i] > soft[static_cast<size_t>(best)])
                best = static_cast<int>(i);
        }
    }
    result.predicted_place = best;
    result.confidence = result.final_scores[static_cast<size_t>(best)] /
                        static_cast<double>(calls);
    return result;
}

}  // namespace droso
