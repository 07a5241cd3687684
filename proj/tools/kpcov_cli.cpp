// kpcov: keypoint coverage, detector comparison and detector combination from the command line.
//
// Exit codes: 0 success, 1 partial failure (some inputs could not be processed),
// 2 usage error (bad flags, unreadable manifest or knowledge base).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kpcov/kpcov.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;
constexpr int kReportSchemaVersion = 1;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputStyle { table, csv, json };

struct CommonOptions {
    std::string dims;
    std::string format = "csv";
    std::string out;
    bool json = false;
    bool csv = false;
    bool full_precision = false;
    bool no_timing = false;
    double epsilon = 0.0;
    unsigned workers = kpcov::default_workers();
    std::uint64_t seed = 0;

    OutputStyle style() const {
        if (json) return OutputStyle::json;
        return csv ? OutputStyle::csv : OutputStyle::table;
    }
};

kpcov::ImageDims parse_dims(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw UsageError("--dims must look like WxH, got '" + text + "'");
    try {
        std::size_t used_w = 0, used_h = 0;
        const long w = std::stol(text.substr(0, x), &used_w);
        const long h = std::stol(text.substr(x + 1), &used_h);
        if (used_w != x || used_h != text.size() - x - 1) throw std::invalid_argument("trailing characters");
        return kpcov::ImageDims(w, h);
    } catch (const std::exception&) {
        throw UsageError("--dims must be two positive integers WxH, got '" + text + "'");
    }
}

std::optional<kpcov::ImageDims> optional_dims(const CommonOptions& o) {
    if (o.dims.empty()) return std::nullopt;
    return parse_dims(o.dims);
}

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + out_path + "'");
    f << text;
}

/// Rows of string cells rendered as an aligned table or as csv.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render(OutputStyle style) const {
        std::ostringstream os;
        if (style == OutputStyle::csv) {
            auto line = [&](const std::vector<std::string>& cells) {
                for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << kpcov::csv_field(cells[i]);
                os << '\n';
            };
            line(header);
            for (const auto& r : rows) line(r);
            return os.str();
        }
        std::vector<std::size_t> width(header.size(), 0);
        for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
        for (const auto& r : rows)
            for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
        auto line = [&](const std::vector<std::string>& cells) {
            std::string l;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) l += "  ";
                l += cells[i];
                if (i + 1 < cells.size()) l.append(width[i] - cells[i].size(), ' ');
            }
            os << l << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return os.str();
    }
};

json report_envelope(const std::string& command, json config) {
    return json{{"schema_version", kReportSchemaVersion},
                {"tool", "kpcov"},
                {"version", kpcov::kVersion},
                {"command", command},
                {"config", std::move(config)}};
}

json common_config(const CommonOptions& o) {
    json c{{"format", o.format}, {"epsilon", o.epsilon}};
    if (!o.dims.empty()) c["dims"] = o.dims;
    return c;
}

void warn(const std::string& msg) { std::cerr << "kpcov: " << msg << '\n'; }

// ---------------------------------------------------------------------------
// coverage / mutual / hull

int cmd_coverage(const CommonOptions& o, const std::vector<std::string>& files, bool with_hull) {
    const auto dims = optional_dims(o);
    if (with_hull && !dims) throw UsageError("--hull needs --dims");
    const auto format = kpcov::parse_format_name(o.format);
    const bool full = o.full_precision;

    Table table;
    table.header = {"file", "points", "distinct", "coverage", "threshold", "result"};
    if (with_hull) table.header.push_back("hull_ratio");
    if (!o.no_timing) table.header.push_back("time_ms");

    json results = json::array();
    std::size_t failures = 0;
    double total_ms = 0.0;
    for (const auto& file : files) {
        const auto t0 = Clock::now();
        std::vector<std::string> row{file};
        json r{{"file", file}};
        try {
            const auto set = kpcov::load_keypoints(file, format, {}, file);
            const auto distinct = kpcov::canonicalize(set, o.epsilon).size();
            row.push_back(std::to_string(set.size()));
            row.push_back(std::to_string(distinct));
            r["points"] = set.size();
            r["distinct"] = distinct;
            const double c = kpcov::coverage(set, o.epsilon);
            const double ms = elapsed_ms(t0);
            total_ms += ms;
            row.push_back(kpcov::format_number(c, full));
            r["coverage"] = c;
            if (dims) {
                const double t = kpcov::area_perimeter_threshold(*dims);
                const bool pass = kpcov::evaluate_criterion(c, t);
                row.push_back(kpcov::format_number(t, full));
                row.push_back(pass ? "PASS" : "FAIL");
                r["threshold"] = t;
                r["passed"] = pass;
            } else {
                row.push_back("");
                row.push_back("");
            }
            if (with_hull) {
                const double h = kpcov::convex_hull_ratio(kpcov::canonicalize(set, o.epsilon), *dims);
                row.push_back(kpcov::format_number(h, full));
                r["hull_ratio"] = h;
            }
            if (!o.no_timing) {
                row.push_back(kpcov::format_number(ms, false));
                r["time_ms"] = ms;
            }
        } catch (const kpcov::Error& e) {
            ++failures;
            warn(e.what());
            row.resize(table.header.size(), "");
            row[5] = "ERROR";
            r["error"] = e.what();
        }
        table.rows.push_back(std::move(row));
        results.push_back(std::move(r));
    }

    if (o.style() == OutputStyle::json) {
        auto rep = report_envelope(with_hull ? "hull" : "coverage", common_config(o));
        rep["inputs"] = files;
        rep["results"] = std::move(results);
        if (!o.no_timing) rep["timings_ms"] = {{"total", total_ms}};
        emit(rep.dump(2) + "\n", o.out);
    } else {
        emit(table.render(o.style()), o.out);
    }
    return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_mutual(const CommonOptions& o, const std::vector<std::string>& files) {
    const auto dims = optional_dims(o);
    const auto format = kpcov::parse_format_name(o.format);
    const bool full = o.full_precision;

    std::vector<kpcov::KeyPointSet> sets;
    for (const auto& f : files) {
        try {
            sets.push_back(kpcov::load_keypoints(f, format, f, "image"));
        } catch (const kpcov::Error& e) {
            warn(e.what());
            return kExitPartial;
        }
    }
    const auto t0 = Clock::now();
    double value = 0.0;
    try {
        value = kpcov::mutual_coverage(sets, o.epsilon);
    } catch (const kpcov::Error& e) {
        warn(e.what());
        return kExitPartial;
    }
    const double ms = elapsed_ms(t0);
    std::size_t points = 0;
    for (const auto& s : sets) points += s.size();

    Table table;
    table.header = {"detectors", "points", "mutual_coverage", "threshold", "result"};
    std::vector<std::string> row{kpcov::join(files, "+"), std::to_string(points), kpcov::format_number(value, full)};
    json r{{"files", files}, {"points", points}, {"mutual_coverage", value}};
    if (dims) {
        const double t = kpcov::area_perimeter_threshold(*dims);
        row.push_back(kpcov::format_number(t, full));
        row.push_back(kpcov::evaluate_criterion(value, t) ? "PASS" : "FAIL");
        r["threshold"] = t;
        r["passed"] = kpcov::evaluate_criterion(value, t);
    } else {
        row.insert(row.end(), {"", ""});
    }
    if (!o.no_timing) {
        table.header.push_back("time_ms");
        row.push_back(kpcov::format_number(ms, false));
    }
    table.rows.push_back(row);

    if (o.style() == OutputStyle::json) {
        auto rep = report_envelope("mutual", common_config(o));
        rep["inputs"] = files;
        rep["results"] = json::array({r});
        if (!o.no_timing) rep["timings_ms"] = {{"total", ms}};
        emit(rep.dump(2) + "\n", o.out);
    } else {
        emit(table.render(o.style()), o.out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const CommonOptions& o, const std::string& manifest_path, const std::vector<std::string>& detectors,
                 const std::string& csv_dir) {
    kpcov::Manifest manifest;
    try {
        manifest = kpcov::load_manifest(manifest_path);
    } catch (const kpcov::ManifestError& e) {
        throw UsageError(e.what());
    }
    for (const auto& d : detectors) {
        const bool known = std::any_of(manifest.detectors.begin(), manifest.detectors.end(),
                                       [&](const auto& md) { return md.name == d; });
        if (!known) throw UsageError("detector '" + d + "' is not in the manifest");
    }
    const auto t0 = Clock::now();
    const auto index = kpcov::scan_dataset(manifest);
    const auto rep = kpcov::evaluate_dataset(index, detectors, o.epsilon, o.workers);
    const double total_ms = elapsed_ms(t0);
    const bool full = o.full_precision;

    for (const auto& a : rep.absences) warn("missing " + a.detector + " keypoints for " + a.image_id + ": " + a.expected_path.string());
    for (const auto& f : rep.failures) warn(f.detector + " on " + f.image_id + ": " + f.message);

    if (!csv_dir.empty()) {
        std::filesystem::create_directories(csv_dir);
        const std::filesystem::path dir(csv_dir);
        emit(kpcov::records_csv(rep, full), (dir / "records.csv").string());
        emit(kpcov::summary_csv(rep, full), (dir / "summary.csv").string());
        emit(kpcov::comparisons_csv(rep, full), (dir / "mcnemar.csv").string());
        emit(kpcov::mcnemar_matrix_csv(rep, full), (dir / "mcnemar_matrix.csv").string());
    }

    if (o.style() == OutputStyle::json) {
        json config = common_config(o);
        config["manifest"] = manifest_path;
        config["detectors"] = rep.detectors;
        auto out = report_envelope("evaluate", std::move(config));
        json records = json::array();
        for (std::size_t i = 0; i < rep.records.size(); ++i) {
            const auto& r = rep.records[i];
            json jr{{"image_id", r.image_id}, {"detector", r.detector}, {"coverage", r.coverage},
                    {"threshold", r.threshold}, {"passed", r.passed}};
            if (!o.no_timing) jr["time_ms"] = rep.timings_ms[i];
            records.push_back(std::move(jr));
        }
        json summaries = json::array();
        for (const auto& s : rep.summaries) {
            json js{{"detector", s.detector}, {"images", s.images}, {"passed", s.passed}};
            if (s.coverage) {
                js["mean"] = s.coverage->mean;
                js["ci95"] = {s.coverage->low, s.coverage->high};
            }
            summaries.push_back(std::move(js));
        }
        json comps = json::array();
        for (const auto& pc : rep.comparisons) {
            json jc{{"left", pc.left},
                    {"right", pc.right},
                    {"counts", {{"ss", pc.counts.n_ss}, {"sf", pc.counts.n_sf}, {"fs", pc.counts.n_fs}, {"ff", pc.counts.n_ff}}}};
            if (pc.result) {
                jc["z"] = pc.result->z;
                jc["signed_z"] = pc.result->signed_z;
                jc["reliable"] = pc.result->reliable;
            }
            comps.push_back(std::move(jc));
        }
        json failures = json::array();
        for (const auto& f : rep.failures)
            failures.push_back({{"image_id", f.image_id}, {"detector", f.detector}, {"error", f.message}});
        json absences = json::array();
        for (const auto& a : rep.absences)
            absences.push_back({{"image_id", a.image_id}, {"detector", a.detector}, {"path", a.expected_path.string()}});
        out["results"] = {{"records", records},   {"summary", summaries}, {"mcnemar", comps},
                          {"failures", failures}, {"absences", absences}};
        if (!o.no_timing) out["timings_ms"] = {{"total", total_ms}};
        emit(out.dump(2) + "\n", o.out);
    } else {
        std::string text;
        const auto style = o.style();
        Table summary;
        summary.header = {"detector", "images", "passed", "mean", "ci95_low", "ci95_high"};
        for (const auto& s : rep.summaries) {
            std::vector<std::string> row{s.detector, std::to_string(s.images), std::to_string(s.passed)};
            if (s.coverage) {
                row.push_back(kpcov::format_number(s.coverage->mean, full));
                row.push_back(kpcov::format_number(s.coverage->low, full));
                row.push_back(kpcov::format_number(s.coverage->high, full));
            } else {
                row.insert(row.end(), {"", "", ""});
            }
            summary.rows.push_back(std::move(row));
        }
        Table comps;
        comps.header = {"left", "right", "n_ss", "n_sf", "n_fs", "n_ff", "signed_z", "note"};
        for (const auto& pc : rep.comparisons) {
            std::vector<std::string> row{pc.left, pc.right, std::to_string(pc.counts.n_ss),
                                         std::to_string(pc.counts.n_sf), std::to_string(pc.counts.n_fs),
                                         std::to_string(pc.counts.n_ff)};
            if (pc.result) {
                row.push_back(kpcov::format_number(pc.result->signed_z, full));
                row.push_back(pc.result->reliable ? "" : "unreliable");
            } else {
                row.push_back("n/a");
                row.push_back("no discordant images");
            }
            comps.rows.push_back(std::move(row));
        }
        text += "# summary\n" + summary.render(style);
        text += "\n# mcnemar\n" + comps.render(style);
        if (!o.no_timing) text += "\n# total_ms " + kpcov::format_number(total_ms, false) + "\n";
        emit(text, o.out);
    }
    return rep.records.empty() ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// mcnemar

int cmd_mcnemar(const CommonOptions& o, const kpcov::McNemarCounts& counts) {
    kpcov::McNemarResult r;
    try {
        r = kpcov::mcnemar(counts);
    } catch (const kpcov::DegenerateCounts& e) {
        warn(e.what());
        return kExitPartial;
    }
    const bool full = o.full_precision;
    if (o.style() == OutputStyle::json) {
        auto rep = report_envelope("mcnemar", json::object());
        rep["inputs"] = {{"ss", counts.n_ss}, {"sf", counts.n_sf}, {"fs", counts.n_fs}, {"ff", counts.n_ff}};
        rep["results"] = {{"z", r.z}, {"signed_z", r.signed_z}, {"reliable", r.reliable}};
        emit(rep.dump(2) + "\n", o.out);
    } else {
        Table t;
        t.header = {"n_sf", "n_fs", "z", "signed_z", "note"};
        t.rows.push_back({std::to_string(counts.n_sf), std::to_string(counts.n_fs), kpcov::format_number(r.z, full),
                          kpcov::format_number(r.signed_z, full), r.reliable ? "" : "unreliable"});
        emit(t.render(o.style()), o.out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// framework

int cmd_framework(const CommonOptions& o, const std::string& manifest_path, const std::string& start,
                  const std::string& kb_path, const std::vector<std::string>& prefer) {
    kpcov::Manifest manifest;
    try {
        manifest = kpcov::load_manifest(manifest_path);
    } catch (const kpcov::ManifestError& e) {
        throw UsageError(e.what());
    }
    kpcov::KnowledgeBase kb;
    try {
        kb = kb_path.empty() ? kpcov::default_knowledge_base() : kpcov::load_knowledge_base(kpcov::read_file(kb_path));
    } catch (const kpcov::Error& e) {
        throw UsageError(e.what());
    }

    kpcov::FrameworkOptions options;
    options.epsilon = o.epsilon;
    for (const auto& p : prefer) {
        const auto eq = p.find('=');
        const auto cat = eq == std::string::npos ? std::nullopt : kpcov::category_from_string(p.substr(0, eq));
        if (!cat) throw UsageError("--prefer expects CATEGORY=DETECTOR, got '" + p + "'");
        options.category_choice[*cat] = p.substr(eq + 1);
    }

    std::vector<std::string> order;
    for (const auto& d : manifest.detectors) order.push_back(d.name);
    if (std::find(order.begin(), order.end(), start) == order.end()) {
        throw UsageError("start detector '" + start + "' is not in the manifest");
    }

    std::vector<kpcov::ImagePair> pairs = manifest.pairs;
    if (pairs.empty()) {
        for (const auto& im : manifest.images) pairs.push_back({im.id, {im.id}});
    }
    std::map<std::string, kpcov::ImageDims> dims;
    for (const auto& im : manifest.images) dims.emplace(im.id, im.dims);

    const auto t0 = Clock::now();
    const auto index = kpcov::scan_dataset(manifest);
    const auto registry = kpcov::DetectorRegistry::from_index(index, order);
    const auto outcomes = kpcov::run_batch(pairs, start, registry, kb, dims, options, o.workers);
    const double total_ms = elapsed_ms(t0);

    std::size_t errors = 0;
    for (const auto& oc : outcomes) {
        if (oc.decision) continue;
        ++errors;
        warn("pair " + oc.pair_id + ": " + oc.error);
    }

    if (o.style() == OutputStyle::json) {
        json config = common_config(o);
        config["manifest"] = manifest_path;
        config["start"] = start;
        config["kb"] = kb_path.empty() ? "builtin:kb-default" : kb_path;
        auto rep = report_envelope("framework", std::move(config));
        json decisions = json::array();
        for (const auto& oc : outcomes) {
            if (!oc.decision) {
                decisions.push_back({{"pair_id", oc.pair_id}, {"error", oc.error}});
                continue;
            }
            const auto& d = *oc.decision;
            json steps = json::array();
            for (const auto& s : d.trace)
                steps.push_back({{"step", s.step}, {"detectors", s.detectors}, {"values", s.values}});
            decisions.push_back({{"pair_id", d.pair_id},
                                 {"images", d.image_ids},
                                 {"thresholds", d.thresholds},
                                 {"mode", static_cast<int>(d.mode)},
                                 {"fallback", d.fallback},
                                 {"detectors", d.detectors},
                                 {"final_values", d.final_values()},
                                 {"trace", steps}});
        }
        rep["results"] = std::move(decisions);
        if (!o.no_timing) rep["timings_ms"] = {{"total", total_ms}};
        emit(rep.dump(2) + "\n", o.out);
    } else {
        emit(kpcov::trace_csv(outcomes, o.full_precision), o.out);
    }
    return errors == 0 ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// synth / bench

int cmd_synth(const CommonOptions& o, const std::string& kind, std::size_t n, std::size_t rows, std::size_t cols,
              std::size_t k, double sigma) {
    if (o.dims.empty()) throw UsageError("synth needs --dims");
    const auto dims = parse_dims(o.dims);
    kpcov::KeyPointSet set;
    try {
        if (kind == "uniform") set = kpcov::synth::gen_uniform(n, dims, o.seed);
        else if (kind == "clustered") set = kpcov::synth::gen_clustered(n, dims, k, sigma, o.seed);
        else set = kpcov::synth::gen_grid(rows, cols, dims);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    emit(kpcov::to_csv(set), o.out);
    return kExitOk;
}

int cmd_bench(const CommonOptions& o, const std::vector<std::size_t>& sizes, std::size_t reps) {
    if (reps == 0) throw UsageError("--reps must be at least 1");
    for (auto n : sizes)
        if (n < 2) throw UsageError("bench sizes must be at least 2");
    const kpcov::ImageDims dims(1440, 956);

    Table table;
    table.header = {"n", "reps", "median_ms", "min_ms", "max_ms", "coverage"};
    json results = json::array();
    for (auto n : sizes) {
        const auto set = kpcov::synth::gen_uniform(n, dims, o.seed);
        std::vector<double> times;
        double c = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto t0 = Clock::now();
            c = kpcov::coverage(set);
            times.push_back(elapsed_ms(t0));
        }
        auto sorted = times;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        table.rows.push_back({std::to_string(n), std::to_string(reps), kpcov::format_number(median),
                              kpcov::format_number(sorted.front()), kpcov::format_number(sorted.back()),
                              kpcov::format_number(c, o.full_precision)});
        results.push_back({{"n", n}, {"reps", reps}, {"times_ms", times}, {"median_ms", median}, {"coverage", c}});
    }
    if (o.style() == OutputStyle::json) {
        auto rep = report_envelope("bench", {{"seed", o.seed}, {"dims", "1440x956"}});
        rep["results"] = std::move(results);
        emit(rep.dump(2) + "\n", o.out);
    } else {
        emit(table.render(o.style()), o.out);
    }
    return kExitOk;
}

void add_output_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--out", o.out, "Write the report to PATH instead of stdout");
    auto* j = cmd->add_flag("--json", o.json, "Emit a JSON report");
    cmd->add_flag("--csv", o.csv, "Emit csv instead of an aligned table")->excludes(j);
    cmd->add_flag("--full-precision", o.full_precision, "Print numbers with full round-trip precision");
}

void add_input_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--format", o.format, "Keypoint file format")->check(CLI::IsMember({"csv", "ellipse"}));
    cmd->add_option("--epsilon", o.epsilon, "Merge keypoints closer than this radius (pixels)")
        ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kpcov: spatial coverage of local feature detectors"};
    app.set_version_flag("--version", kpcov::kVersion);
    app.require_subcommand(1);

    CommonOptions o;
    std::vector<std::string> files;
    bool with_hull = false;

    auto* cov = app.add_subcommand("coverage", "Coverage of keypoint files");
    cov->add_option("files", files, "Keypoint files")->required();
    cov->add_option("--dims", o.dims, "Image size WxH, enables the pass/fail threshold");
    cov->add_flag("--hull", with_hull, "Also report the convex hull area ratio");
    cov->add_flag("--no-timing", o.no_timing, "Omit timings");
    add_input_flags(cov, o);
    add_output_flags(cov, o);

    auto* mut = app.add_subcommand("mutual", "Mutual coverage of several detectors on one image");
    mut->add_option("files", files, "Keypoint files, one per detector")->required();
    mut->add_option("--dims", o.dims, "Image size WxH");
    mut->add_flag("--no-timing", o.no_timing, "Omit timings");
    add_input_flags(mut, o);
    add_output_flags(mut, o);

    auto* hull = app.add_subcommand("hull", "Convex hull area ratio next to coverage");
    hull->add_option("files", files, "Keypoint files")->required();
    hull->add_option("--dims", o.dims, "Image size WxH")->required();
    hull->add_flag("--no-timing", o.no_timing, "Omit timings");
    add_input_flags(hull, o);
    add_output_flags(hull, o);

    std::string manifest;
    std::vector<std::string> detectors;
    std::string csv_dir;
    auto* ev = app.add_subcommand("evaluate", "Evaluate detectors over a dataset manifest");
    ev->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
    ev->add_option("--detectors", detectors, "Detectors to evaluate, in order")->delimiter(',');
    ev->add_option("--csv-dir", csv_dir, "Also write records, summary and McNemar csv files here");
    ev->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    ev->add_flag("--no-timing", o.no_timing, "Omit timings");
    ev->add_option("--epsilon", o.epsilon, "Merge keypoints closer than this radius (pixels)")
        ->check(CLI::NonNegativeNumber);
    add_output_flags(ev, o);

    kpcov::McNemarCounts counts;
    auto* mc = app.add_subcommand("mcnemar", "McNemar's test from paired outcome counts");
    mc->add_option("--sf", counts.n_sf, "Images where left passed and right failed")->required();
    mc->add_option("--fs", counts.n_fs, "Images where left failed and right passed")->required();
    mc->add_option("--ss", counts.n_ss, "Images where both passed");
    mc->add_option("--ff", counts.n_ff, "Images where both failed");
    mc->add_flag("--no-timing", o.no_timing, "Accepted for symmetry; this report has no timings");
    add_output_flags(mc, o);

    std::string start, kb_path;
    std::vector<std::string> prefer;
    auto* fw = app.add_subcommand("framework", "Choose single or combined detectors per image pair");
    fw->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
    fw->add_option("--start", start, "Detector run first")->required();
    fw->add_option("--kb", kb_path, "Knowledge base file (default: built-in)");
    fw->add_option("--prefer", prefer, "Use DETECTOR for CATEGORY (CATEGORY=DETECTOR, repeatable)");
    fw->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    fw->add_flag("--no-timing", o.no_timing, "Omit timings");
    fw->add_option("--epsilon", o.epsilon, "Merge keypoints closer than this radius (pixels)")
        ->check(CLI::NonNegativeNumber);
    add_output_flags(fw, o);

    std::string kind = "uniform";
    std::size_t n = 200, rows = 1, cols = 1, k = 3;
    double sigma = 20.0;
    auto* sy = app.add_subcommand("synth", "Generate a synthetic keypoint csv");
    sy->add_option("--kind", kind, "uniform, clustered or grid")->check(CLI::IsMember({"uniform", "clustered", "grid"}));
    sy->add_option("--n", n, "Number of points (uniform, clustered)");
    sy->add_option("--rows", rows, "Grid rows")->check(CLI::PositiveNumber);
    sy->add_option("--cols", cols, "Grid columns")->check(CLI::PositiveNumber);
    sy->add_option("--k", k, "Number of clusters")->check(CLI::PositiveNumber);
    sy->add_option("--sigma", sigma, "Cluster standard deviation (pixels)")->check(CLI::PositiveNumber);
    sy->add_option("--dims", o.dims, "Image size WxH")->required();
    sy->add_option("--seed", o.seed, "Random seed");
    sy->add_option("--out", o.out, "Write to PATH instead of stdout");

    std::vector<std::size_t> sizes{100, 1000, 10000};
    std::size_t reps = 5;
    auto* be = app.add_subcommand("bench", "Time coverage on synthetic sets");
    be->add_option("--n", sizes, "Set sizes")->delimiter(',');
    be->add_option("--reps", reps, "Repetitions per size");
    be->add_option("--seed", o.seed, "Random seed");
    add_output_flags(be, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cov) return cmd_coverage(o, files, with_hull);
        if (*hull) return cmd_coverage(o, files, true);
        if (*mut) return cmd_mutual(o, files);
        if (*ev) return cmd_evaluate(o, manifest, detectors, csv_dir);
        if (*mc) return cmd_mcnemar(o, counts);
        if (*fw) return cmd_framework(o, manifest, start, kb_path, prefer);
        if (*sy) return cmd_synth(o, kind, n, rows, cols, k, sigma);
        if (*be) return cmd_bench(o, sizes, reps);
    } catch (const UsageError& e) {
        warn(e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        warn(e.what());
        return kExitPartial;
    }
    return kExitUsage;
}
