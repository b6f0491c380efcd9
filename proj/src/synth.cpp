#include "patchdroso/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchdroso/rng.hpp"

namespace droso {

namespace {

constexpr uint64_t kRefTag = 0x11;
constexpr uint64_t kQueryTag = 0x22;
constexpr uint64_t kCorruptTag = 0x33;

// block pattern resolution; blocks stay visible after the 32x64 downsize
constexpr int kBlockRows = 6;
constexpr int kBlockCols = 12;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void validate(const SynthSpec& spec) {
    if (spec.n_places < 2)
        throw std::invalid_argument("n_places must be >= 2");
    if (spec.image_rows < 1 || spec.image_cols < 1)
        throw std::invalid_argument("image dimensions must be >= 1");
    if (spec.noise_sigma < 0.0 || spec.noise_sigma >= 0.5)
        throw std::invalid_argument("noise_sigma must be in [0, 0.5)");
    if (spec.corrupt_region) {
        const CorruptRegion& cr = *spec.corrupt_region;
        validate_grid(cr.grid);
        if (cr.cell < 0 || cr.cell >= cr.grid.cells())
            throw std::invalid_argument("corrupt cell outside its grid");
    }
}

ImageTensor make_reference(const SynthSpec& spec, int place) {
    Rng rng(derive_seed(spec.base_seed, kRefTag, static_cast<uint64_t>(place)));

    // two low-frequency sinusoids plus a ramp for smooth structure
    const double f1r = 1.0 + rng.below(3);
    const double f1c = 1.0 + rng.below(3);
    const double ph1 = rng.uniform(0.0, 6.283185307179586);
    const double f2r = 1.0 + rng.below(4);
    const double f2c = 1.0 + rng.below(4);
    const double ph2 = rng.uniform(0.0, 6.283185307179586);
    const double ramp = rng.uniform(-0.15, 0.15);

    std::vector<double> blocks(static_cast<size_t>(kBlockRows) * kBlockCols);
    for (double& b : blocks)
        b = rng.uniform();

    ImageTensor img(spec.image_rows, spec.image_cols);
    for (int r = 0; r < spec.image_rows; ++r) {
        const double y = (r + 0.5) / spec.image_rows;
        const int br = std::min(kBlockRows - 1, r * kBlockRows / spec.image_rows);
        for (int c = 0; c < spec.image_cols; ++c) {
            const double x = (c + 0.5) / spec.image_cols;
            const int bc = std::min(kBlockCols - 1, c * kBlockCols / spec.image_cols);
            const double g1 = std::sin(6.283185307179586 * (f1r * y + f1c * x) + ph1);
            const double g2 = std::sin(6.283185307179586 * (f2r * y + f2c * x) + ph2);
            const double smooth = 0.5 + 0.20 * g1 + 0.16 * g2 + ramp * (x - 0.5);
            const double block = blocks[static_cast<size_t>(br) * kBlockCols + bc];
            img.at(r, c) = clamp01(0.55 * block + 0.45 * smooth);
        }
    }
    return img;
}

ImageTensor shift_columns(const ImageTensor& img, int shift) {
    if (shift == 0)
        return img;
    ImageTensor out(img.rows, img.cols);
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c) {
            const int src = std::clamp(c - shift, 0, img.cols - 1);
            out.at(r, c) = img.at(r, src);
        }
    return out;
}

void corrupt(ImageTensor& img, const CorruptRegion& cr, Rng& rng) {
    const int gr = cr.cell / cr.grid.cols;
    const int gc = cr.cell % cr.grid.cols;
    const int r0 = gr * img.rows / cr.grid.rows;
    const int r1 = (gr + 1) * img.rows / cr.grid.rows;
    const int c0 = gc * img.cols / cr.grid.cols;
    const int c1 = (gc + 1) * img.cols / cr.grid.cols;
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            switch (cr.mode) {
                case CorruptMode::blackout:
                    img.at(r, c) = 0.0;
                    break;
                case CorruptMode::noise_burst:
                    img.at(r, c) = rng.uniform();
                    break;
                case CorruptMode::brightness_shift:
                    img.at(r, c) = clamp01(img.at(r, c) + 0.35);
                    break;
            }
        }
    }
}

ImageTensor make_query(const SynthSpec& spec, const ImageTensor& ref, int place) {
    ImageTensor q = shift_columns(ref, spec.shift_cols);
    if (spec.noise_sigma > 0.0) {
        Rng rng(derive_seed(spec.base_seed, kQueryTag, static_cast<uint64_t>(place)));
        for (double& p : q.pixels)
            p = clamp01(p + spec.noise_sigma * rng.gaussian());
    }
    if (spec.corrupt_region) {
        Rng rng(derive_seed(spec.base_seed, kCorruptTag, static_cast<uint64_t>(place)));
        corrupt(q, *spec.corrupt_region, rng);
    }
    return q;
}

}  // namespace

SynthDataset generate(const SynthSpec& spec) {
    validate(spec);
    SynthDataset data;
    data.references.reserve(static_cast<size_t>(spec.n_places));
    data.queries.reserve(static_cast<size_t>(spec.n_places));
    data.ground_truth.reserve(static_cast<size_t>(spec.n_places));
    for (int n = 0; n < spec.n_places; ++n) {
        data.references.push_back(make_reference(spec, n));
        data.queries.push_back(make_query(spec, data.references.back(), n));
        data.ground_truth.push_back(n);
    }
    return data;
}

}  // namespace droso
