#include "patchdroso/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "patchdroso/errors.hpp"

namespace droso {

namespace {

std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

ImageTensor load_image(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec)
        throw IoError("cannot read image file: " + path);
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe.good())
            throw IoError("cannot read image file: " + path);
    }
    const std::string ext = lower_extension(path);
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg")
        throw FormatError("unsupported image format (want PNG or JPEG): " + path);

    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty())
        throw FormatError("failed to decode image: " + path);

    ImageTensor out(bgr.rows, bgr.cols);
    for (int r = 0; r < bgr.rows; ++r) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < bgr.cols; ++c) {
            const double b = row[c][0] / 255.0;
            const double g = row[c][1] / 255.0;
            const double rr = row[c][2] / 255.0;
            out.at(r, c) = clamp01(0.299 * rr + 0.587 * g + 0.114 * b);
        }
    }
    return out;
}

void save_image_png(const ImageTensor& img, const std::string& path) {
    cv::Mat gray(img.rows, img.cols, CV_8UC1);
    for (int r = 0; r < img.rows; ++r) {
        uchar* row = gray.ptr<uchar>(r);
        for (int c = 0; c < img.cols; ++c)
            row[c] = static_cast<uchar>(std::lround(clamp01(img.at(r, c)) * 255.0));
    }
    if (!cv::imwrite(path, gray))
        throw IoError("cannot write PNG: " + path);
}

ImageTensor resize(const ImageTensor& img, int target_rows, int target_cols) {
    if (img.rows < 1 || img.cols < 1)
        throw std::invalid_argument("resize: empty source image");
    if (target_rows < 1 || target_cols < 1)
        throw std::invalid_argument("resize: target dimensions must be >= 1");
    if (target_rows == img.rows && target_cols == img.cols)
        return img;

    ImageTensor out(target_rows, target_cols);
    const double row_scale = static_cast<double>(img.rows) / target_rows;
    const double col_scale = static_cast<double>(img.cols) / target_cols;
    for (int r = 0; r < target_rows; ++r) {
        const double sy = (r + 0.5) * row_scale - 0.5;
        int y0 = static_cast<int>(std::floor(sy));
        double ty = sy - y0;
        if (y0 < 0) { y0 = 0; ty = 0.0; }
        if (y0 >= img.rows - 1) { y0 = img.rows - 1; ty = 0.0; }
        const int y1 = std::min(y0 + 1, img.rows - 1);
        for (int c = 0; c < target_cols; ++c) {
            const double sx = (c + 0.5) * col_scale - 0.5;
            int x0 = static_cast<int>(std::floor(sx));
            double tx = sx - x0;
            if (x0 < 0) { x0 = 0; tx = 0.0; }
            if (x0 >= img.cols - 1) { x0 = img.cols - 1; tx = 0.0; }
            const int x1 = std::min(x0 + 1, img.cols - 1);
            const double top = (1.0 - tx) * img.at(y0, x0) + tx * img.at(y0, x1);
            const double bot = (1.0 - tx) * img.at(y1, x0) + tx * img.at(y1, x1);
            out.at(r, c) = clamp01((1.0 - ty) * top + ty * bot);
        }
    }
    return out;
}

void validate_grid(const GridShape& shape) {
    if (shape.rows < 1 || shape.cols < 1)
        throw std::invalid_argument("grid shape must have rows >= 1 and cols >= 1");
    if (shape.rows * shape.cols > 64)
        throw std::invalid_argument("grid shape exceeds 64 cells");
}

PatchGrid split_grid(const ImageTensor& img, const GridShape& shape) {
    validate_grid(shape);
    const ImageTensor whole = resize(img, kPatchRows * shape.rows, kPatchCols * shape.cols);

    PatchGrid grid;
    grid.shape = shape;
    grid.patches.reserve(static_cast<size_t>(shape.cells()));
    for (int gr = 0; gr < shape.rows; ++gr) {
        for (int gc = 0; gc < shape.cols; ++gc) {
            ImageTensor patch(kPatchRows, kPatchCols);
            const int r0 = gr * kPatchRows;
            const int c0 = gc * kPatchCols;
            for (int r = 0; r < kPatchRows; ++r)
                for (int c = 0; c < kPatchCols; ++c)
                    patch.at(r, c) = whole.at(r0 + r, c0 + c);
            grid.patches.push_back(std::move(patch));
        }
    }
    return grid;
}

}  // namespace droso
