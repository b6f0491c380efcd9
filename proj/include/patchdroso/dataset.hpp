#pragma once

#include <string>
#include <vector>

#include "patchdroso/eval.hpp"
#include "patchdroso/image.hpp"
#include "patchdroso/synth.hpp"

namespace droso {

// PNG/JPEG files in a directory, sorted lexicographically by filename.
// The sort order defines the frame index. Throws IoError for a missing
// directory.
std::vector<std::string> list_image_files(const std::string& dir);

// list_image_files + load_image on every entry
std::vector<ImageTensor> load_image_dir(const std::string& dir);

// Two-column text file (query index, reference index), '#' header lines;
// the header names the tolerance: "# tolerance N".
GroundTruth load_ground_truth(const std::string& path);
void save_ground_truth(const std::vector<int>& mapping, int tolerance,
                       const std::string& path);

// Standard dataset layout under dir: references/ and queries/ full of
// zero-padded PNGs plus ground_truth.txt.
void write_dataset(const SynthDataset& data, const std::string& dir, int tolerance);

}  // namespace droso
