#pragma once

// Writes a small synthetic dataset (manifest plus keypoint files) to a temp dir.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpcov/keypoint_io.hpp"
#include "kpcov/synth.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline fs::path fresh_dir(const std::string& tag) {
    std::random_device rd;
    const auto dir = fs::temp_directory_path() / ("kpcov-" + tag + "-" + std::to_string(rd()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

struct SyntheticDataset {
    fs::path dir;
    fs::path manifest;
    std::vector<std::string> images;
    std::vector<std::string> detectors;

    SyntheticDataset(const SyntheticDataset&) = delete;
    SyntheticDataset& operator=(const SyntheticDataset&) = delete;
    SyntheticDataset() = default;
    ~SyntheticDataset() {
        std::error_code ec;
        if (!dir.empty()) fs::remove_all(dir, ec);
    }
};

/// "uniform" and "clustered" keypoints on `n_images` 1440x956 images, 200 points each.
/// With `extra_detectors`, a third "grid" detector is added on every image.
inline void build(SyntheticDataset& ds, int n_images, bool extra_detectors = false) {
    const kpcov::ImageDims dims(1440, 956);
    ds.dir = fresh_dir("ds");
    ds.detectors = {"uniform", "clustered"};
    if (extra_detectors) ds.detectors.push_back("grid");
    nlohmann::json m;
    m["version"] = 1;
    m["dims"] = {{"width", 1440}, {"height", 956}};
    m["images"] = nlohmann::json::array();
    for (int i = 0; i < n_images; ++i) {
        const std::string id = "img" + std::to_string(i);
        ds.images.push_back(id);
        m["images"].push_back(id);
        const auto seed = static_cast<std::uint64_t>(i);
        write_text(ds.dir / "uniform" / (id + ".csv"), kpcov::to_csv(kpcov::synth::gen_uniform(200, dims, seed)));
        write_text(ds.dir / "clustered" / (id + ".csv"),
                   kpcov::to_csv(kpcov::synth::gen_clustered(200, dims, 3, 20.0, seed)));
        if (extra_detectors) {
            write_text(ds.dir / "grid" / (id + ".csv"), kpcov::to_csv(kpcov::synth::gen_grid(10 + i % 5, 15, dims)));
        }
    }
    m["detectors"] = nlohmann::json::array();
    for (const auto& d : ds.detectors) m["detectors"].push_back({{"name", d}, {"directory", d}, {"format", "csv"}});
    ds.manifest = ds.dir / "manifest.json";
    write_text(ds.manifest, m.dump(2));
}

}  // namespace fixture
