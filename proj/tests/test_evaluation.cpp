#include <gtest/gtest.h>

#include "dataset_fixture.hpp"
#include "kpcov/evaluation.hpp"
#include "oracles.hpp"

namespace {

TEST(Evaluate, TwoDetectorsFortyImages) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 40);
    const auto idx = kpcov::scan_dataset(kpcov::load_manifest(ds.manifest));
    const auto rep = kpcov::evaluate_dataset(idx, {}, 0.0, 4);
    EXPECT_EQ(rep.records.size(), 80u);
    EXPECT_TRUE(rep.failures.empty());
    EXPECT_TRUE(rep.absences.empty());
    ASSERT_EQ(rep.comparisons.size(), 1u);

    // Recompute pass/fail and the paired counts independently.
    const double t = 1440.0 * 956.0 / (2.0 * (1440 + 956));
    kpcov::McNemarCounts expect{};
    for (int i = 0; i < 40; ++i) {
        const auto seed = static_cast<std::uint64_t>(i);
        const kpcov::ImageDims dims(1440, 956);
        const bool u = oracle::pair_harmonic(kpcov::locations(kpcov::synth::gen_uniform(200, dims, seed))) >= t;
        const bool c =
            oracle::pair_harmonic(kpcov::locations(kpcov::synth::gen_clustered(200, dims, 3, 20.0, seed))) >= t;
        if (u && c) ++expect.n_ss;
        else if (u) ++expect.n_sf;
        else if (c) ++expect.n_fs;
        else ++expect.n_ff;
    }
    const auto& pc = rep.comparisons[0];
    EXPECT_EQ(pc.left, "uniform");
    EXPECT_EQ(pc.right, "clustered");
    EXPECT_EQ(pc.counts, expect);
    ASSERT_TRUE(pc.result);
    const double sf = static_cast<double>(expect.n_sf), fs = static_cast<double>(expect.n_fs);
    EXPECT_NEAR(pc.result->signed_z, std::copysign(std::max(0.0, (std::abs(sf - fs) - 1) / std::sqrt(sf + fs)), sf - fs),
                1e-12);
    EXPECT_GT(pc.result->signed_z, 0.0);

    ASSERT_EQ(rep.summaries.size(), 2u);
    EXPECT_EQ(rep.summaries[0].images, 40u);
    ASSERT_TRUE(rep.summaries[0].coverage);
    EXPECT_LT(rep.summaries[0].coverage->low, rep.summaries[0].coverage->high);

    const auto matrix = kpcov::mcnemar_matrix_csv(rep);
    EXPECT_EQ(matrix.substr(0, matrix.find('\n')), "detector,uniform,clustered");
    EXPECT_NE(matrix.find("uniform,-," + kpcov::format_number(pc.result->signed_z, false)), std::string::npos);
}

TEST(Evaluate, WorkerCountDoesNotChangeResults) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 12, true);
    const auto idx = kpcov::scan_dataset(kpcov::load_manifest(ds.manifest));
    const auto a = kpcov::evaluate_dataset(idx, {}, 0.0, 1);
    const auto b = kpcov::evaluate_dataset(idx, {}, 0.0, 6);
    EXPECT_EQ(kpcov::records_csv(a, true), kpcov::records_csv(b, true));
    EXPECT_EQ(kpcov::comparisons_csv(a, true), kpcov::comparisons_csv(b, true));
    EXPECT_EQ(a.comparisons.size(), 3u);
}

TEST(Evaluate, SingleDetectorHasNoComparisons) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 5);
    const auto idx = kpcov::scan_dataset(kpcov::load_manifest(ds.manifest));
    const auto rep = kpcov::evaluate_dataset(idx, {"clustered"});
    EXPECT_EQ(rep.records.size(), 5u);
    EXPECT_TRUE(rep.comparisons.empty());
    EXPECT_EQ(kpcov::mcnemar_matrix_csv(rep), "detector,clustered\nclustered,-\n");
}

TEST(Evaluate, FailuresAndAbsencesAreReported) {
    fixture::SyntheticDataset ds;
    fixture::build(ds, 6);
    fixture::fs::remove(ds.dir / "uniform" / "img2.csv");
    fixture::write_text(ds.dir / "clustered" / "img3.csv", "x,y\n1,1\n");
    fixture::write_text(ds.dir / "clustered" / "img4.csv", "x,y\n1,oops\n");
    const auto rep = kpcov::evaluate_dataset(kpcov::scan_dataset(kpcov::load_manifest(ds.manifest)));
    ASSERT_EQ(rep.absences.size(), 1u);
    EXPECT_EQ(rep.absences[0].image_id, "img2");
    ASSERT_EQ(rep.failures.size(), 2u);
    EXPECT_EQ(rep.failures[0].image_id, "img3");
    EXPECT_EQ(rep.failures[1].image_id, "img4");
    EXPECT_NE(rep.failures[1].message.find(":2:"), std::string::npos);
    // Only images where both detectors have records are paired: 0, 1, 5.
    EXPECT_EQ(rep.comparisons[0].counts.total(), 3u);
}

TEST(Evaluate, UnreliableMarker) {
    kpcov::EvaluationReport rep;
    rep.detectors = {"a", "b"};
    for (int i = 0; i < 12; ++i) {
        const std::string id = "i" + std::to_string(i);
        rep.records.push_back({id, "a", 1.0, 0.5, true});
        rep.records.push_back({id, "b", 0.0, 0.5, i < 2});
    }
    rep.comparisons.push_back(kpcov::compare_detectors(rep.records, "a", "b"));
    EXPECT_EQ(rep.comparisons[0].counts, (kpcov::McNemarCounts{2, 10, 0, 0}));
    const auto m = kpcov::mcnemar_matrix_csv(rep);
    EXPECT_EQ(m, "detector,a,b\na,-,2.8460*\nb,-,-\n");

    rep.records.clear();
    for (int i = 0; i < 4; ++i) {
        rep.records.push_back({"i" + std::to_string(i), "a", 1.0, 0.5, true});
        rep.records.push_back({"i" + std::to_string(i), "b", 1.0, 0.5, true});
    }
    rep.comparisons = {kpcov::compare_detectors(rep.records, "a", "b")};
    EXPECT_FALSE(rep.comparisons[0].result);
    EXPECT_EQ(kpcov::mcnemar_matrix_csv(rep), "detector,a,b\na,-,n/a\nb,-,-\n");
}

}  // namespace
