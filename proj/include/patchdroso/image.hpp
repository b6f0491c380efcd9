#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace droso {

// Grayscale intensity grid, values in [0,1], row-major.
struct ImageTensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> pixels;

    ImageTensor() = default;
    ImageTensor(int r, int c, double fill = 0.0)
        : rows(r), cols(c), pixels(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return pixels[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return pixels[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const ImageTensor&) const = default;
};

// r x c split layout; at most 64 cells
struct GridShape {
    int rows = 1;
    int cols = 1;

    int cells() const { return rows * cols; }
    bool operator==(const GridShape&) const = default;
};

// patch dimensions every unit operates on
inline constexpr int kPatchRows = 32;
inline constexpr int kPatchCols = 64;
inline constexpr int kPatchPixels = kPatchRows * kPatchCols;

// Result of cutting a resized image into grid cells, row-major by cell.
struct PatchGrid {
    GridShape shape;
    std::vector<ImageTensor> patches;  // shape.cells() entries, each 32x64
};

// Decodes a PNG or JPEG into a grayscale tensor. Color inputs are converted
// with BT.601 luma (0.299 R + 0.587 G + 0.114 B) on [0,1] channels.
// Throws IoError if the file cannot be read, FormatError for anything that
// is not a decodable PNG/JPEG.
ImageTensor load_image(const std::string& path);

// Writes an 8-bit grayscale PNG (values quantized with round(p * 255)).
void save_image_png(const ImageTensor& img, const std::string& path);

// Bilinear resize (half-pixel-center convention); output stays in [0,1].
// An identity resize returns the input bit-exactly.
ImageTensor resize(const ImageTensor& img, int target_rows, int target_cols);

// Resizes to 32*rows x 64*cols and cuts into non-overlapping 32x64 patches,
// ordered row-major by grid cell. Stitching the patches back reproduces the
// resized image exactly.
PatchGrid split_grid(const ImageTensor& img, const GridShape& shape);

void validate_grid(const GridShape& shape);

}  // namespace droso
