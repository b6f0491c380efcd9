#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "patchdroso/ensemble.hpp"
#include "patchdroso/rng.hpp"
#include "patchdroso/synth.hpp"
#include "test_util.hpp"

using namespace droso;

namespace {

// small fast configuration for training-heavy tests
EnsembleConfig small_config(GridShape grid, int z, uint64_t seed, int epochs = 40) {
    EnsembleConfig cfg;
    cfg.grid = grid;
    cfg.units_per_patch = z;
    cfg.master_seed = seed;
    cfg.unit_config.epochs = epochs;
    return cfg;
}

std::vector<ImageTensor> synth_references(int n_places, uint64_t seed,
                                          int rows = 64, int cols = 128) {
    SynthSpec spec;
    spec.n_places = n_places;
    spec.image_rows = rows;
    spec.image_cols = cols;
    spec.base_seed = seed;
    return generate(spec).references;
}

}  // namespace

TEST_CASE("ensemble_size implements T = rcz and C = Trc") {
    EnsembleSize s = ensemble_size({3, 1}, 16);
    CHECK(s.total_units == 48);
    CHECK(s.calls_per_query == 144);

    s = ensemble_size({4, 2}, 8);
    CHECK(s.total_units == 64);
    CHECK(s.calls_per_query == 512);

    s = ensemble_size({1, 1}, 1);
    CHECK(s.total_units == 1);
    CHECK(s.calls_per_query == 1);

    CHECK_THROWS_AS(ensemble_size({2, 2}, 0), std::invalid_argument);
}

TEST_CASE("vote: soft mode min-max normalizes then sums") {
    const std::vector<ScoreVector> one = {{0.2, 0.5, 0.3}};
    const std::vector<double> merged = vote(one, VotingMode::soft);
    REQUIRE(merged.size() == 3);
    CHECK(merged[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(merged[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(merged[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("vote: unanimous vectors keep their argmax") {
    const ScoreVector v = {0.1, 0.2, 0.6, 0.1};
    const std::vector<ScoreVector> many(7, v);
    for (VotingMode mode : {VotingMode::soft, VotingMode::hard}) {
        const std::vector<double> merged = vote(many, mode);
        CHECK(argmax_index(merged) == 2);
    }
}

TEST_CASE("vote: hard mode counts argmax votes") {
    const std::vector<ScoreVector> vectors = {{0.1, 0.2, 0.7}, {0.0, 0.3, 0.7}};
    const std::vector<double> merged = vote(vectors, VotingMode::hard);
    CHECK(merged == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("vote: constant vectors abstain in soft mode") {
    const std::vector<ScoreVector> vectors = {{0.25, 0.25, 0.25, 0.25},
                                              {0.1, 0.1, 0.7, 0.1}};
    const std::vector<double> merged = vote(vectors, VotingMode::soft);
    CHECK(merged[0] == 0.0);
    CHECK(merged[2] == 1.0);
}

TEST_CASE("vote: rejects empty and ragged input") {
    CHECK_THROWS_AS(vote({}, VotingMode::soft), std::invalid_argument);
    CHECK_THROWS_AS(vote({{0.5, 0.5}, {0.2, 0.3, 0.5}}, VotingMode::soft),
                    std::invalid_argument);
}

TEST_CASE("vote: permuting places permutes the merge bit-exactly") {
    Rng rng(8181);
    std::vector<ScoreVector> vectors;
    for (int i = 0; i < 12; ++i) {
        ScoreVector v(6);
        for (double& x : v) x = rng.uniform();
        vectors.push_back(v);
    }
    const std::vector<int> perm = {3, 5, 0, 1, 4, 2};  // new index -> old index
    std::vector<ScoreVector> permuted = vectors;
    for (size_t i = 0; i < vectors.size(); ++i)
        for (int p = 0; p < 6; ++p)
            permuted[i][static_cast<size_t>(p)] = vectors[i][static_cast<size_t>(perm[p])];

    for (VotingMode mode : {VotingMode::soft, VotingMode::hard}) {
        const std::vector<double> base = vote(vectors, mode);
        const std::vector<double> moved = vote(permuted, mode);
        for (int p = 0; p < 6; ++p)
            CHECK(moved[static_cast<size_t>(p)] == base[static_cast<size_t>(perm[p])]);
    }
}

TEST_CASE("build_and_train: groups never observe foreign patches") {
    // grid 2x1 on 64x64 images: patch 0 is the top half, patch 1 the bottom.
    // Editing only the bottom half of every reference must leave group 0
    // bit-identical.
    std::vector<ImageTensor> refs_a, refs_b;
    for (int n = 0; n < 4; ++n) {
        ImageTensor img = testutil::random_image(64, 64, 500 + n);
        refs_a.push_back(img);
        for (int r = 32; r < 64; ++r)
            for (int c = 0; c < 64; ++c)
                img.at(r, c) = 1.0 - img.at(r, c);
        refs_b.push_back(img);
    }
    const EnsembleConfig cfg = small_config({2, 1}, 1, 7, 25);
    const PatchEnsemble a = build_and_train(cfg, refs_a);
    const PatchEnsemble b = build_and_train(cfg, refs_b);
    CHECK(a.groups[0][0] == b.groups[0][0]);
    CHECK(a.groups[1][0] != b.groups[1][0]);
}

TEST_CASE("build_and_train: bit-deterministic and thread-count independent") {
    const std::vector<ImageTensor> refs = synth_references(5, 321);
    const EnsembleConfig cfg = small_config({2, 2}, 2, 99, 15);
    const PatchEnsemble a = build_and_train(cfg, refs, 1);
    const PatchEnsemble b = build_and_train(cfg, refs, 4);
    CHECK(a == b);
}

TEST_CASE("build_and_train: rejects fewer than two references") {
    const EnsembleConfig cfg = small_config({1, 1}, 1, 0);
    CHECK_THROWS_AS(build_and_train(cfg, {}), std::invalid_argument);
    CHECK_THROWS_AS(build_and_train(cfg, {testutil::random_image(32, 64, 1)}),
                    std::invalid_argument);
}

TEST_CASE("match_query: every unit scores all 8 patches of a 2x4 grid") {
    const std::vector<ImageTensor> refs = synth_references(3, 11);
    const PatchEnsemble ens = build_and_train(small_config({2, 4}, 1, 5, 5), refs);
    reset_forward_calls();
    const MatchResult m = match_query(ens, refs[0]);
    const uint64_t total_units = ensemble_size({2, 4}, 1).total_units;
    CHECK(m.calls_made / total_units == 8);  // 8 score vectors per unit
    CHECK(m.calls_made == 64);               // C = T*r*c
    CHECK(forward_calls() == 64);

    // a single unit really does produce one vector per patch
    const PatchGrid grid = split_grid(refs[0], {2, 4});
    reset_forward_calls();
    for (const ImageTensor& patch : grid.patches)
        forward(ens.groups[0][0], patch);
    CHECK(forward_calls() == 8);
}

TEST_CASE("match_query: call accounting follows C = Trc") {
    const std::vector<ImageTensor> refs = synth_references(3, 13);
    struct Case { GridShape grid; int z; uint64_t expect; };
    for (const Case& tc : {Case{{2, 2}, 3, 48}, Case{{1, 3}, 2, 18}, Case{{1, 1}, 4, 4}}) {
        const PatchEnsemble ens =
            build_and_train(small_config(tc.grid, tc.z, 31, 5), refs);
        reset_forward_calls();
        const MatchResult m = match_query(ens, refs[1]);
        CHECK(m.calls_made == tc.expect);
        CHECK(forward_calls() == tc.expect);
        CHECK(m.calls_made == ensemble_size(tc.grid, tc.z).calls_per_query);
        CHECK(m.confidence >= 0.0);
        CHECK(m.confidence <= 1.0);
    }
}

TEST_CASE("match_query: 1x1 grid reduces to whole-image voting with T calls") {
    const std::vector<ImageTensor> refs = synth_references(4, 17);
    const int z = 5;
    const PatchEnsemble ens = build_and_train(small_config({1, 1}, z, 23, 10), refs);
    reset_forward_calls();
    const MatchResult m = match_query(ens, refs[2]);
    CHECK(m.calls_made == static_cast<uint64_t>(z));

    // identical to merging the units' whole-image score vectors directly
    const ImageTensor whole = split_grid(refs[2], {1, 1}).patches[0];
    std::vector<ScoreVector> vectors;
    for (const DrosoNet& unit : ens.groups[0])
        vectors.push_back(forward(unit, whole));
    CHECK(m.final_scores == vote(vectors, ens.config.voting_mode));
}

TEST_CASE("vote: a place that wins every vector wins the merge") {
    Rng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5;
        const int winner = static_cast<int>(rng.below(n));
        std::vector<ScoreVector> vectors;
        for (int i = 0; i < 9; ++i) {
            ScoreVector v(n);
            for (double& x : v) x = rng.uniform(0.0, 0.6);
            v[static_cast<size_t>(winner)] = rng.uniform(0.7, 1.0);
            vectors.push_back(v);
        }
        CHECK(argmax_index(vote(vectors, VotingMode::soft)) == winner);
    }
}

TEST_CASE("match_query: permuting the reference order permutes predictions") {
    const std::vector<ImageTensor> refs = synth_references(6, 909);
    const std::vector<int> perm = {4, 0, 5, 2, 1, 3};  // new index -> old index
    std::vector<ImageTensor> permuted;
    for (int p : perm)
        permuted.push_back(refs[static_cast<size_t>(p)]);

    const EnsembleConfig cfg = small_config({2, 1}, 3, 55, 100);
    const PatchEnsemble base = build_and_train(cfg, refs);
    const PatchEnsemble moved = build_and_train(cfg, permuted);

    // both ensembles memorize their own references...
    for (size_t q = 0; q < refs.size(); ++q) {
        REQUIRE(match_query(base, refs[q]).predicted_place == static_cast<int>(q));
        REQUIRE(match_query(moved, permuted[q]).predicted_place == static_cast<int>(q));
    }

    // ...so predictions on the shared queries map through the permutation
    std::vector<int> inverse(perm.size());
    for (size_t m = 0; m < perm.size(); ++m)
        inverse[static_cast<size_t>(perm[m])] = static_cast<int>(m);
    for (size_t q = 0; q < refs.size(); ++q) {
        const int base_pred = match_query(base, refs[q]).predicted_place;
        const int moved_pred = match_query(moved, refs[q]).predicted_place;
        CHECK(moved_pred == inverse[static_cast<size_t>(base_pred)]);
    }
}

TEST_CASE("match_query: hard-vote count ties break on summed soft scores") {
    // Zeroed weights make a unit's scores depend only on its bias, so the
    // two units' votes are fully controlled: counts tie 1-1 between places
    // 0 and 2 while the soft sums favor place 2.
    UnitConfig ucfg;
    ucfg.seed = 1;
    DrosoNet a = make_unit(3, ucfg);
    std::fill(a.out_weights.begin(), a.out_weights.end(), 0.0);
    a.out_bias = {4.0, 0.0, 3.9};  // argmax place 0, near-max score at place 2
    DrosoNet b = a;
    b.out_bias = {0.0, 0.0, 4.0};  // argmax place 2

    PatchEnsemble ens;
    ens.config.grid = {1, 1};
    ens.config.units_per_patch = 2;
    ens.config.unit_config = ucfg;
    ens.config.voting_mode = VotingMode::hard;
    ens.n_places = 3;
    ens.groups = {{a, b}};

    const MatchResult m = match_query(ens, testutil::random_image(40, 80, 3));
    CHECK(m.final_scores == std::vector<double>{1.0, 0.0, 1.0});
    CHECK(m.predicted_place == 2);
    CHECK(m.confidence == 0.5);  // top count / C
}

TEST_CASE("match_query: hard voting produces a count histogram") {
    const std::vector<ImageTensor> refs = synth_references(4, 77);
    EnsembleConfig cfg = small_config({2, 1}, 2, 13, 30);
    cfg.voting_mode = VotingMode::hard;
    const PatchEnsemble ens = build_and_train(cfg, refs);
    const MatchResult m = match_query(ens, refs[1]);
    double total = 0.0;
    for (double v : m.final_scores) {
        CHECK(v == std::floor(v));
        total += v;
    }
    CHECK(total == static_cast<double>(m.calls_made));
}
