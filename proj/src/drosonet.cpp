#include "patchdroso/drosonet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "patchdroso/rng.hpp"

namespace droso {

namespace {

std::atomic<uint64_t> g_forward_calls{0};

constexpr uint64_t kShuffleTag = 0x5E0C'55AF'F1E5'0001ull;

void validate_config(const UnitConfig& cfg) {
    if (cfg.hidden_units < 1)
        throw std::invalid_argument("hidden_units must be >= 1");
    if (!(cfg.projection_density > 0.0) || cfg.projection_density > 1.0)
        throw std::invalid_argument("projection_density must be in (0, 1]");
    if (!(cfg.wta_keep_fraction > 0.0) || cfg.wta_keep_fraction > 1.0)
        throw std::invalid_argument("wta_keep_fraction must be in (0, 1]");
    if (!(cfg.learning_rate > 0.0))
        throw std::invalid_argument("learning_rate must be > 0");
    if (cfg.epochs < 0)
        throw std::invalid_argument("epochs must be >= 0");
}

int wta_keep_count(const UnitConfig& cfg) {
    const int k = static_cast<int>(std::ceil(cfg.wta_keep_fraction * cfg.hidden_units));
    return std::max(1, std::min(k, cfg.hidden_units));
}

void check_patch(const ImageTensor& patch) {
    if (patch.rows != kPatchRows || patch.cols != kPatchCols)
        throw std::invalid_argument("unit input must be a 32x64 patch");
}

// scores and per-sample loss from logits; the softmax denominator sums the
// exponentials in descending value order so that class-permuted models
// produce exactly permuted outputs
void softmax_into(const std::vector<double>& logits, std::vector<double>& scores,
                  double* loss_for_label, int label) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    scores.resize(logits.size());
    for (size_t i = 0; i < logits.size(); ++i)
        scores[i] = std::exp(logits[i] - mx);
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double den = 0.0;
    for (double e : sorted) den += e;
    for (double& s : scores) s /= den;
    if (loss_for_label)
        *loss_for_label = std::log(den) - (logits[static_cast<size_t>(label)] - mx);
}

std::vector<double> logits_of(const DrosoNet& m, const SparseHidden& h) {
    const int hid = m.config.hidden_units;
    std::vector<double> logits(static_cast<size_t>(m.n_places));
    for (int k = 0; k < m.n_places; ++k) {
        const double* wrow = m.out_weights.data() + static_cast<size_t>(k) * hid;
        double acc = 0.0;
        for (size_t j = 0; j < h.idx.size(); ++j)
            acc += wrow[h.idx[j]] * h.val[j];
        logits[static_cast<size_t>(k)] = acc + m.out_bias[static_cast<size_t>(k)];
    }
    return logits;
}

// one SGD step on a cached activation; returns nothing, updates in place
void sgd_step(DrosoNet& m, const SparseHidden& h, int label, std::vector<double>& scratch) {
    softmax_into(logits_of(m, h), scratch, nullptr, 0);
    const int hid = m.config.hidden_units;
    const double lr = m.config.learning_rate;
    for (int k = 0; k < m.n_places; ++k) {
        const double d = scratch[static_cast<size_t>(k)] - (k == label ? 1.0 : 0.0);
        const double coef = lr * d;
        double* wrow = m.out_weights.data() + static_cast<size_t>(k) * hid;
        for (size_t j = 0; j < h.idx.size(); ++j)
            wrow[h.idx[j]] -= coef * h.val[j];
        m.out_bias[static_cast<size_t>(k)] -= coef;
    }
}

std::vector<SparseHidden> cache_activations(const DrosoNet& m,
                                            const std::vector<TrainSample>& samples) {
    std::vector<SparseHidden> cached;
    cached.reserve(samples.size());
    for (const TrainSample& s : samples) {
        check_patch(s.patch);
        if (s.label < 0 || s.label >= m.n_places)
            throw std::invalid_argument("training label out of range");
        cached.push_back(project_wta(m, s.patch));
    }
    return cached;
}

}  // namespace

DrosoNet make_unit(int n_places, const UnitConfig& config) {
    if (n_places < 1)
        throw std::invalid_argument("n_places must be >= 1");
    validate_config(config);

    DrosoNet m;
    m.n_places = n_places;
    m.config = config;

    Rng rng(config.seed);
    m.projection.resize(static_cast<size_t>(config.hidden_units));
    for (auto& row : m.projection) {
        for (int i = 0; i < kPatchPixels; ++i)
            if (rng.uniform() < config.projection_density)
                row.push_back(static_cast<uint16_t>(i));
        if (row.empty())
            row.push_back(static_cast<uint16_t>(rng.below(kPatchPixels)));
    }

    m.out_weights.resize(static_cast<size_t>(n_places) * config.hidden_units);
    for (double& w : m.out_weights)
        w = rng.uniform(-0.05, 0.05);
    m.out_bias.assign(static_cast<size_t>(n_places), 0.0);
    return m;
}

SparseHidden project_wta(const DrosoNet& m, const ImageTensor& patch) {
    check_patch(patch);
    const int hid = m.config.hidden_units;
    std::vector<double> h(static_cast<size_t>(hid), 0.0);
    const double* px = patch.pixels.data();
    for (int r = 0; r < hid; ++r) {
        double acc = 0.0;
        for (uint16_t i : m.projection[static_cast<size_t>(r)])
            acc += px[i];
        h[static_cast<size_t>(r)] = acc;
    }

    // top-k by value, ties at the cutoff go to the lower index
    const int keep = wta_keep_count(m.config);
    std::vector<int> order(static_cast<size_t>(hid));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&h](int a, int b) {
                          if (h[static_cast<size_t>(a)] != h[static_cast<size_t>(b)])
                              return h[static_cast<size_t>(a)] > h[static_cast<size_t>(b)];
                          return a < b;
                      });
    order.resize(static_cast<size_t>(keep));
    std::sort(order.begin(), order.end());

    SparseHidden out;
    out.idx = std::move(order);
    out.val.reserve(out.idx.size());
    for (int i : out.idx)
        out.val.push_back(h[static_cast<size_t>(i)]);
    return out;
}

ScoreVector output_scores(const DrosoNet& m, const SparseHidden& hidden) {
    ScoreVector scores;
    softmax_into(logits_of(m, hidden), scores, nullptr, 0);
    return scores;
}

ScoreVector forward(const DrosoNet& model, const ImageTensor& patch) {
    g_forward_calls.fetch_add(1, std::memory_order_relaxed);
    return output_scores(model, project_wta(model, patch));
}

void train(DrosoNet& model, const std::vector<TrainSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("training requires at least one sample");
    const std::vector<SparseHidden> cached = cache_activations(model, samples);

    std::vector<size_t> order(samples.size());
    std::vector<double> scratch;
    for (int epoch = 0; epoch < model.config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), size_t{0});
        Rng rng(derive_seed(model.config.seed, kShuffleTag, static_cast<uint64_t>(epoch)));
        rng.shuffle(order);
        for (size_t i : order)
            sgd_step(model, cached[i], samples[i].label, scratch);
    }
}

double cross_entropy(const DrosoNet& model, const std::vector<TrainSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("cross_entropy requires at least one sample");
    const std::vector<SparseHidden> cached = cache_activations(model, samples);
    std::vector<double> scores;
    double total = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double loss = 0.0;
        softmax_into(logits_of(model, cached[i]), scores, &loss, samples[i].label);
        total += loss;
    }
    return total / static_cast<double>(samples.size());
}

OutputGradients loss_gradients(const DrosoNet& model, const std::vector<TrainSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("loss_gradients requires at least one sample");
    const std::vector<SparseHidden> cached = cache_activations(model, samples);

    const int hid = model.config.hidden_units;
    OutputGradients g;
    g.d_weights.assign(static_cast<size_t>(model.n_places) * hid, 0.0);
    g.d_bias.assign(static_cast<size_t>(model.n_places), 0.0);

    std::vector<double> scores;
    for (size_t i = 0; i < samples.size(); ++i) {
        const SparseHidden& h = cached[i];
        softmax_into(logits_of(model, h), scores, nullptr, 0);
        for (int k = 0; k < model.n_places; ++k) {
            const double d = scores[static_cast<size_t>(k)] -
                             (k == samples[i].label ? 1.0 : 0.0);
            double* grow = g.d_weights.data() + static_cast<size_t>(k) * hid;
            for (size_t j = 0; j < h.idx.size(); ++j)
                grow[h.idx[j]] += d * h.val[j];
            g.d_bias[static_cast<size_t>(k)] += d;
        }
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (double& w : g.d_weights) w *= inv;
    for (double& b : g.d_bias) b *= inv;
    return g;
}

uint64_t forward_calls() { return g_forward_calls.load(std::memory_order_relaxed); }

void reset_forward_calls() { g_forward_calls.store(0, std::memory_order_relaxed); }

}  // namespace droso
