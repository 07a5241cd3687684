#include <gtest/gtest.h>

#include <cmath>

#include "kpcov/keypoint_io.hpp"
#include "kpcov/metrics.hpp"
#include "kpcov/synth.hpp"
#include "oracles.hpp"

namespace {

using kpcov::ImageDims;
using kpcov::Point2D;
namespace synth = kpcov::synth;

const ImageDims kLarge(1440, 956);

void expect_inside(const kpcov::KeyPointSet& s, const ImageDims& d) {
    for (const auto& kp : s.points) {
        EXPECT_GE(kp.location.x, 0.0);
        EXPECT_LT(kp.location.x, static_cast<double>(d.width()));
        EXPECT_GE(kp.location.y, 0.0);
        EXPECT_LT(kp.location.y, static_cast<double>(d.height()));
    }
}

TEST(PortableRng, KnownSequence) {
    // mt19937_64 seeded with 5489 has its 10000th output fixed by the standard.
    std::mt19937_64 ref;
    ref.discard(9999);
    EXPECT_EQ(ref(), 9981545732273789042ull);
    synth::PortableRng rng(5489);
    const double u = rng.uniform01();
    EXPECT_EQ(u, static_cast<double>(14514284786278117030ull >> 11) * 0x1.0p-53);
}

TEST(Uniform, Empty) { EXPECT_TRUE(synth::gen_uniform(0, kLarge, 1).empty()); }

TEST(Uniform, SameSeedSameSet) {
    EXPECT_EQ(synth::gen_uniform(300, kLarge, 77), synth::gen_uniform(300, kLarge, 77));
    EXPECT_NE(synth::gen_uniform(300, kLarge, 77), synth::gen_uniform(300, kLarge, 78));
}

TEST(Uniform, FrozenBytes) {
    // First points for seed 2024; guards the documented conversion from raw draws.
    const auto csv = kpcov::to_csv(synth::gen_uniform(3, ImageDims(100, 100), 2024));
    synth::PortableRng rng(2024);
    std::string expected = "x,y,scale\n";
    for (int i = 0; i < 3; ++i) {
        const double x = rng.uniform01() * 100.0, y = rng.uniform01() * 100.0;
        expected += kpcov::detail::shortest(x) + "," + kpcov::detail::shortest(y) + ",\n";
    }
    EXPECT_EQ(csv, expected);
}

TEST(Uniform, StaysInside) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) expect_inside(synth::gen_uniform(500, ImageDims(3, 7), seed), ImageDims(3, 7));
}

TEST(Uniform, CoverageBand) {
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = synth::gen_uniform(200, kLarge, seed);
        const double c = oracle::pair_harmonic(kpcov::locations(s));
        if (c >= 200.0 && c <= 800.0) ++inside;
    }
    EXPECT_GE(inside, 99);
}

TEST(Clustered, SameSeedSameSet) {
    EXPECT_EQ(synth::gen_clustered(200, kLarge, 3, 20.0, 5), synth::gen_clustered(200, kLarge, 3, 20.0, 5));
}

TEST(Clustered, ConcentratesAroundSingleCentre) {
    const double sigma = 1e-3;
    const auto s = synth::gen_clustered(1000, kLarge, 1, sigma, 12);
    // The centre is the generator's first uniform draw pair.
    synth::PortableRng rng(12);
    const Point2D c{rng.uniform01() * 1440.0, rng.uniform01() * 956.0};
    std::size_t near = 0;
    for (const auto& kp : s.points)
        if (oracle::dist(kp.location, c) <= 6 * sigma) ++near;
    EXPECT_GE(near, 990u);
}

TEST(Clustered, ClippedToImage) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        expect_inside(synth::gen_clustered(300, ImageDims(50, 40), 2, 100.0, seed), ImageDims(50, 40));
    }
}

TEST(Clustered, RejectsBadParameters) {
    EXPECT_THROW(synth::gen_clustered(10, kLarge, 0, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(synth::gen_clustered(10, kLarge, 2, 0.0, 1), std::invalid_argument);
}

TEST(Clustered, LowerCoverageThanUniform) {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto u = synth::gen_uniform(200, kLarge, seed);
        const auto c = synth::gen_clustered(200, kLarge, 3, 20.0, seed);
        if (oracle::pair_harmonic(kpcov::locations(u)) > oracle::pair_harmonic(kpcov::locations(c))) ++wins;
    }
    EXPECT_GE(wins, 95);
}

TEST(Grid, SingleCell) {
    EXPECT_EQ(kpcov::locations(synth::gen_grid(1, 1, ImageDims(640, 480))), (std::vector<Point2D>{{320, 240}}));
}

TEST(Grid, TwoByTwo) {
    const auto g = synth::gen_grid(2, 2, ImageDims(100, 100));
    EXPECT_EQ(kpcov::locations(g), (std::vector<Point2D>{{25, 25}, {75, 25}, {25, 75}, {75, 75}}));
    EXPECT_NEAR(kpcov::coverage(g), 55.41, 0.005);
}

TEST(Grid, RejectsEmptyGrid) {
    EXPECT_THROW(synth::gen_grid(0, 3, kLarge), std::invalid_argument);
}

}  // namespace
