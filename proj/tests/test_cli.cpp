#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli_runner.hpp"
#include "dataset_fixture.hpp"
#include "kpcov/evaluation.hpp"
#include "kpcov/kpcov.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override { dir_ = fixture::fresh_dir("cli"); }
    void TearDown() override { fs::remove_all(dir_); }
    std::string file(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        fixture::write_text(p, text);
        return cli::quote(p.string());
    }
    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST_F(Cli, CoverageTwoPoints) {
    const auto r = cli::run("coverage --dims 900x600 --no-timing --csv " + file("two.csv", "x,y\n0,0\n3,4\n"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "file,points,distinct,coverage,threshold,result\n" + (dir_ / "two.csv").string() +
                         ",2,2,5.0000,180.0000,FAIL\n");
}

TEST_F(Cli, CoverageJson) {
    const auto r = cli::run("coverage --dims 100x100 --hull --json --no-timing " +
                            file("g.csv", "25,25\n75,25\n25,75\n75,75\n"));
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["command"], "hull");
    EXPECT_FALSE(j.contains("timings_ms"));
    const auto& res = j["results"][0];
    EXPECT_NEAR(res["coverage"].get<double>(), 55.4097, 1e-4);
    EXPECT_EQ(res["threshold"].get<double>(), 25.0);
    EXPECT_TRUE(res["passed"].get<bool>());
    EXPECT_DOUBLE_EQ(res["hull_ratio"].get<double>(), 0.25);
}

TEST_F(Cli, ExitCodes) {
    const auto good = file("ok.csv", "0,0\n3,4\n");
    EXPECT_EQ(cli::run("coverage " + good).status, 0);
    EXPECT_EQ(cli::run("coverage " + good + " " + cli::quote((dir_ / "missing.csv").string())).status, 1);
    EXPECT_EQ(cli::run("coverage " + file("one.csv", "1,1\n")).status, 1);
    EXPECT_EQ(cli::run("coverage " + file("bad.csv", "1,1\n2,zz\n")).status, 1);
    EXPECT_EQ(cli::run("coverage --dims 0x5 " + good).status, 2);
    EXPECT_EQ(cli::run("coverage --json --csv " + good).status, 2);
    EXPECT_EQ(cli::run("nonsense").status, 2);
    EXPECT_EQ(cli::run("bench --reps 0").status, 2);
    EXPECT_EQ(cli::run("mcnemar --sf 0 --fs 0").status, 1);
}

TEST_F(Cli, ParseErrorNamesLine) {
    const auto p = file("bad.csv", "x,y\n1,1\n\n2,zz\n");
    const std::string cmd = std::string("'") + KPCOV_CLI + "' coverage " + p + " 2>&1 >/dev/null";
    FILE* f = ::popen(cmd.c_str(), "r");
    ASSERT_TRUE(f);
    char buf[512] = {};
    const auto n = std::fread(buf, 1, sizeof buf - 1, f);
    ::pclose(f);
    EXPECT_NE(std::string(buf, n).find("bad.csv:4:"), std::string::npos) << buf;
}

TEST_F(Cli, McNemar) {
    const auto r = cli::run("mcnemar --sf 10 --fs 56 --json --no-timing");
    ASSERT_EQ(r.status, 0);
    const auto res = json::parse(r.out)["results"];
    EXPECT_NEAR(res["z"].get<double>(), 5.5391, 1e-4);
    EXPECT_LT(res["signed_z"].get<double>(), 0.0);
}

TEST_F(Cli, SynthMatchesLibrary) {
    const kpcov::ImageDims d(640, 480);
    EXPECT_EQ(cli::run("synth --kind uniform --n 50 --dims 640x480 --seed 9").out,
              kpcov::to_csv(kpcov::synth::gen_uniform(50, d, 9)));
    EXPECT_EQ(cli::run("synth --kind clustered --n 50 --k 2 --sigma 15 --dims 640x480 --seed 9").out,
              kpcov::to_csv(kpcov::synth::gen_clustered(50, d, 2, 15.0, 9)));
    EXPECT_EQ(cli::run("synth --kind grid --rows 3 --cols 4 --dims 640x480").out,
              kpcov::to_csv(kpcov::synth::gen_grid(3, 4, d)));
}

TEST_F(Cli, EvaluateIsReproducible) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 10, true);
    const std::string args = "evaluate --json --no-timing --manifest " + cli::quote(ds.manifest.string());
    const auto a = cli::run(args);
    const auto b = cli::run(args + " --workers 3");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);

    const auto out = dir_ / "csv";
    ASSERT_EQ(cli::run(args + " --full-precision --csv-dir " + cli::quote(out.string())).status, 0);
    const auto rep = kpcov::evaluate_dataset(kpcov::scan_dataset(kpcov::load_manifest(ds.manifest)));
    EXPECT_EQ(slurp(out / "records.csv"), kpcov::records_csv(rep, true));
    EXPECT_EQ(slurp(out / "mcnemar_matrix.csv"), kpcov::mcnemar_matrix_csv(rep, true));
    EXPECT_EQ(slurp(out / "summary.csv"), kpcov::summary_csv(rep, true));
}

TEST_F(Cli, EvaluateExitCodes) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 3);
    fixture::write_text(ds.dir / "uniform" / "img0.csv", "garbage\n");
    EXPECT_EQ(cli::run("evaluate --manifest " + cli::quote(ds.manifest.string())).status, 0);
    for (const auto& d : ds.detectors)
        for (const auto& im : ds.images) fixture::write_text(ds.dir / d / (im + ".csv"), "1,1\n");
    EXPECT_EQ(cli::run("evaluate --manifest " + cli::quote(ds.manifest.string())).status, 1);
    EXPECT_EQ(cli::run("evaluate --manifest " + cli::quote((dir_ / "nope.json").string())).status, 2);
}

TEST_F(Cli, FrameworkTraceReplaysWithMutual) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 4);
    const auto kb = file("kb.json", R"({"categories": ["corner", "spiral"],
        "detectors": [{"name": "clustered", "category": "corner"}, {"name": "uniform", "category": "spiral"}],
        "preferences": {"corner": ["spiral"]}})");
    const auto r = cli::run("framework --full-precision --manifest " + cli::quote(ds.manifest.string()) +
                            " --start clustered --kb " + kb);
    ASSERT_EQ(r.status, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kpcov::kTraceHeader);
    int finals = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
        ASSERT_EQ(f.size(), 8u) << line;
        if (f[2] != "final") continue;
        ++finals;
        std::string files;
        std::stringstream dets(f[3]);
        for (std::string d; std::getline(dets, d, '+');)
            files += " " + cli::quote((ds.dir / d / (f[1] + ".csv")).string());
        const auto m = cli::run("mutual --json --no-timing" + files);
        ASSERT_EQ(m.status, 0);
        EXPECT_EQ(json::parse(m.out)["results"][0]["mutual_coverage"].get<double>(), std::stod(f[4]));
    }
    EXPECT_EQ(finals, 4);
}

TEST_F(Cli, FrameworkBuiltInKbAndBadStart) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 2);
    EXPECT_EQ(cli::run("framework --manifest " + cli::quote(ds.manifest.string()) + " --start nope").status, 2);
    // Uniform passes alone, so the knowledge base is never consulted.
    EXPECT_EQ(cli::run("framework --manifest " + cli::quote(ds.manifest.string()) + " --start uniform").status, 0);
    // Clustered fails and has no category in the built-in knowledge base.
    EXPECT_EQ(cli::run("framework --manifest " + cli::quote(ds.manifest.string()) + " --start clustered").status, 1);
}

TEST_F(Cli, Bench) {
    const auto r = cli::run("bench --n 50,100 --reps 2 --json");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(json::parse(r.out)["results"].size(), 2u);
}

}  // namespace
