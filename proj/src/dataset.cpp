#include "patchdroso/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "patchdroso/errors.hpp"

namespace fs = std::filesystem;

namespace droso {

namespace {

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "place_%05d.png", index);
    return buf;
}

}  // namespace

std::vector<std::string> list_image_files(const std::string& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec) || ec)
        throw IoError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<ImageTensor> load_image_dir(const std::string& dir) {
    std::vector<ImageTensor> images;
    for (const std::string& f : list_image_files(dir))
        images.push_back(load_image(f));
    return images;
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read ground truth file: " + path);
    GroundTruth gt;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream hdr(line.substr(1));
            std::string key;
            int value = 0;
            if (hdr >> key >> value && key == "tolerance")
                gt.tolerance = value;
            continue;
        }
        std::istringstream row(line);
        int q = 0, r = 0;
        if (!(row >> q >> r))
            throw FormatError("bad ground truth row: " + line);
        if (q != static_cast<int>(gt.reference_of_query.size()))
            throw FormatError("ground truth rows must be in query order");
        gt.reference_of_query.push_back(r);
    }
    if (gt.reference_of_query.empty())
        throw FormatError("ground truth file has no rows: " + path);
    return gt;
}

void save_ground_truth(const std::vector<int>& mapping, int tolerance,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write ground truth file: " + path);
    out << "# tolerance " << tolerance << "\n";
    for (size_t q = 0; q < mapping.size(); ++q)
        out << q << ' ' << mapping[q] << '\n';
}

void write_dataset(const SynthDataset& data, const std::string& dir, int tolerance) {
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "references", ec);
    fs::create_directories(fs::path(dir) / "queries", ec);
    if (ec)
        throw IoError("cannot create dataset directories under: " + dir);
    for (size_t n = 0; n < data.references.size(); ++n) {
        const std::string name = frame_name(static_cast<int>(n));
        save_image_png(data.references[n], (fs::path(dir) / "references" / name).string());
        save_image_png(data.queries[n], (fs::path(dir) / "queries" / name).string());
    }
    save_ground_truth(data.ground_truth, tolerance,
                      (fs::path(dir) / "ground_truth.txt").string());
}

}  // namespace droso
