#pragma once

// Dataset manifests.
//
// A manifest is a JSON document:
//
//   {
//     "version": 1,
//     "root": "relative/or/absolute/dir",          optional, default: manifest's directory
//     "dims": {"width": 1440, "height": 956},      optional global image size
//     "images": [ {"id": "img01", "width": 1440, "height": 956}, ... ],
//     "detectors": [
//       {"name": "SFOP", "directory": "sfop", "format": "csv", "pattern": "{image}.csv"}, ...
//     ],
//     "pairs": [ {"id": "p1", "images": ["img01", "img02"]}, ... ]   optional
//   }
//
// Every image needs dimensions, either its own or the global ones. The keypoint
// file for (image, detector) is root/directory/pattern with {image} replaced by
// the image id. Default patterns: "{image}.csv" for csv, "{image}.ell" for ellipse.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpcov/errors.hpp"
#include "kpcov/keypoint_io.hpp"
#include "kpcov/types.hpp"

namespace kpcov {

struct ManifestImage {
    std::string id;
    ImageDims dims;
};

struct ManifestDetector {
    std::string name;
    std::string directory;
    KeypointFormat format = KeypointFormat::csv;
    std::string pattern;
};

struct ImagePair {
    std::string id;
    std::vector<std::string> images;
};

struct Manifest {
    std::filesystem::path root;
    std::vector<ManifestImage> images;
    std::vector<ManifestDetector> detectors;
    std::vector<ImagePair> pairs;

    const ManifestImage* find_image(const std::string& id) const {
        for (const auto& im : images)
            if (im.id == id) return &im;
        return nullptr;
    }
};

inline constexpr int kManifestVersion = 1;

namespace detail {

inline long dim_field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ManifestError(where + ": missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long>() < 1) {
        throw ManifestError(where + ": '" + key + "' must be a positive integer");
    }
    return v.get<long>();
}

inline std::string string_field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) throw ManifestError(where + ": missing string '" + key + "'");
    return j.at(key).get<std::string>();
}

}  // namespace detail

/// Parses and validates a manifest. Relative roots resolve against `base_dir`.
inline Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ManifestError("manifest must be a JSON object");
    if (j.contains("version") && j.at("version") != kManifestVersion) {
        throw ManifestError("unsupported manifest version " + j.at("version").dump());
    }

    Manifest m;
    m.root = base_dir;
    if (j.contains("root")) {
        if (!j.at("root").is_string()) throw ManifestError("'root' must be a string");
        std::filesystem::path r = j.at("root").get<std::string>();
        m.root = r.is_absolute() ? r : base_dir / r;
    }

    std::optional<ImageDims> global;
    if (j.contains("dims")) {
        const auto& d = j.at("dims");
        global.emplace(detail::dim_field(d, "width", "dims"), detail::dim_field(d, "height", "dims"));
    }

    if (!j.contains("images") || !j.at("images").is_array() || j.at("images").empty()) {
        throw ManifestError("manifest needs a non-empty 'images' array");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.at("images").size(); ++i) {
        const auto& im = j.at("images")[i];
        const std::string where = "images[" + std::to_string(i) + "]";
        std::string id = im.is_string() ? im.get<std::string>() : detail::string_field(im, "id", where);
        if (!ids.insert(id).second) throw ManifestError(where + ": duplicate image id '" + id + "'");
        const bool own = im.is_object() && (im.contains("width") || im.contains("height"));
        if (own) {
            m.images.push_back({id, ImageDims(detail::dim_field(im, "width", where), detail::dim_field(im, "height", where))});
        } else if (global) {
            m.images.push_back({id, *global});
        } else {
            throw ManifestError(where + ": image '" + id + "' has no dimensions and no global 'dims' is given");
        }
    }

    if (!j.contains("detectors") || !j.at("detectors").is_array() || j.at("detectors").empty()) {
        throw ManifestError("manifest needs a non-empty 'detectors' array");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < j.at("detectors").size(); ++i) {
        const auto& d = j.at("detectors")[i];
        const std::string where = "detectors[" + std::to_string(i) + "]";
        if (!d.is_object()) throw ManifestError(where + ": must be an object");
        ManifestDetector det;
        det.name = detail::string_field(d, "name", where);
        if (!names.insert(det.name).second) throw ManifestError(where + ": duplicate detector '" + det.name + "'");
        det.directory = d.contains("directory") ? detail::string_field(d, "directory", where) : det.name;
        try {
            det.format = parse_format_name(d.contains("format") ? detail::string_field(d, "format", where) : "csv");
        } catch (const std::invalid_argument& e) {
            throw ManifestError(where + ": " + e.what());
        }
        det.pattern = d.contains("pattern") ? detail::string_field(d, "pattern", where)
                                            : (det.format == KeypointFormat::csv ? "{image}.csv" : "{image}.ell");
        if (det.pattern.find("{image}") == std::string::npos) {
            throw ManifestError(where + ": pattern must contain {image}");
        }
        m.detectors.push_back(std::move(det));
    }

    if (j.contains("pairs")) {
        if (!j.at("pairs").is_array()) throw ManifestError("'pairs' must be an array");
        std::set<std::string> pair_ids;
        for (std::size_t i = 0; i < j.at("pairs").size(); ++i) {
            const auto& p = j.at("pairs")[i];
            const std::string where = "pairs[" + std::to_string(i) + "]";
            ImagePair pair;
            pair.id = detail::string_field(p, "id", where);
            if (!pair_ids.insert(pair.id).second) throw ManifestError(where + ": duplicate pair id '" + pair.id + "'");
            if (!p.contains("images") || !p.at("images").is_array() || p.at("images").empty()) {
                throw ManifestError(where + ": needs a non-empty 'images' array");
            }
            for (const auto& im : p.at("images")) {
                if (!im.is_string() || !ids.contains(im.get<std::string>())) {
                    throw ManifestError(where + ": unknown image " + im.dump());
                }
                pair.images.push_back(im.get<std::string>());
            }
            m.pairs.push_back(std::move(pair));
        }
    }
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path.string());
    } catch (const Error& e) {
        throw ManifestError(e.what());
    }
    return parse_manifest(text, path.parent_path());
}

struct DatasetEntry {
    std::string image_id;
    std::string detector;
    std::filesystem::path path;
    KeypointFormat format = KeypointFormat::csv;
    ImageDims dims;

    KeyPointSet load() const { return load_keypoints(path.string(), format, detector, image_id); }
};

struct Absence {
    std::string image_id;
    std::string detector;
    std::filesystem::path expected_path;
};

/// Keypoint files found for a manifest, image-major in manifest order.
struct DatasetIndex {
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;
    std::vector<Absence> absences;

    const DatasetEntry* find(const std::string& image_id, const std::string& detector) const {
        for (const auto& e : entries)
            if (e.image_id == image_id && e.detector == detector) return &e;
        return nullptr;
    }
};

inline std::filesystem::path keypoint_path(const Manifest& m, const ManifestDetector& d, const std::string& image_id) {
    std::string file = d.pattern;
    for (auto pos = file.find("{image}"); pos != std::string::npos; pos = file.find("{image}", pos + image_id.size())) {
        file.replace(pos, 7, image_id);
    }
    return m.root / d.directory / file;
}

/// Missing files are recorded as absences, not errors.
inline DatasetIndex scan_dataset(const Manifest& m) {
    DatasetIndex idx{m.root, {}, {}};
    for (const auto& im : m.images) {
        for (const auto& d : m.detectors) {
            auto p = keypoint_path(m, d, im.id);
            std::error_code ec;
            if (std::filesystem::is_regular_file(p, ec)) {
                idx.entries.push_back({im.id, d.name, std::move(p), d.format, im.dims});
            } else {
                idx.absences.push_back({im.id, d.name, std::move(p)});
            }
        }
    }
    return idx;
}

/// Scans with keypoint directories resolved under `root` instead of the manifest's own root.
inline DatasetIndex scan_dataset(const std::filesystem::path& root, Manifest m) {
    m.root = root;
    return scan_dataset(m);
}

}  // namespace kpcov
