#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "channet/centerline.hpp"
#include "channet/errors.hpp"
#include "oracles.hpp"

using namespace channet;

namespace {

constexpr double kPi = std::numbers::pi;

// Parabolic ridge along x, peaked on row `crest`.
ScalarField ridge(int rows, int cols, double crest) {
    ScalarField f(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) f(r, c) = std::max(0.0, 10.0 - (r - crest) * (r - crest));
    }
    return f;
}

}  // namespace

TEST_SUITE("centerline") {

TEST_CASE("nms keeps the crest of a ridge and nothing beside it") {
    const ScalarField f = ridge(9, 12, 4.0);
    const ScalarField out = nms(f, ScalarField(9, 12, kPi / 2));
    for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 12; ++c) CHECK(out(r, c) == (r == 4 ? 10.0 : 0.0));
    }
    // Sampling along the ridge instead of across it suppresses everything.
    const ScalarField along = nms(f, ScalarField(9, 12, 0.0));
    for (const double v : along.values()) CHECK(v == 0.0);
}

TEST_CASE("nms keeps both pixels of a flat two-pixel crest; a flat field keeps none") {
    ScalarField f(5, 5, 0.0);
    for (int c = 0; c < 5; ++c) {
        f(1, c) = 1.0;
        f(2, c) = 3.0;
        f(3, c) = 3.0;
        f(4, c) = 1.0;
    }
    const ScalarField out = nms(f, ScalarField(5, 5, kPi / 2));
    for (int c = 0; c < 5; ++c) {
        CHECK(out(2, c) == 3.0);
        CHECK(out(3, c) == 3.0);
        CHECK(out(1, c) == 0.0);
    }
    const ScalarField flat = nms(ScalarField(4, 4, 2.0), ScalarField(4, 4, 0.3));
    for (const double v : flat.values()) CHECK(v == 0.0);
}

TEST_CASE("nms output is a pointwise subset of its input") {
    std::mt19937_64 rng(4);
    const ScalarField f = oracle::random_field(rng, 30, 30, 0.0, 1.0);
    const ScalarField th = oracle::random_field(rng, 30, 30, 0.0, kPi);
    const ScalarField out = nms(f, th);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK((out[i] == 0.0 || out[i] == f[i]));
}

TEST_CASE("otsu separates two clusters") {
    ScalarField f(1, 8, std::vector<double>{0.0, 1.0, 1.1, 1.2, 9.0, 9.1, 9.2, 0.0});
    const double t = otsu_threshold(f);
    CHECK(t > 1.2);
    CHECK(t <= 9.0);
}

TEST_CASE("otsu matches an exhaustive between-class-variance search") {
    std::mt19937_64 rng(55);
    int matched = 0;
    for (int trial = 0; trial < 200; ++trial) {
        // Mixtures with a spike of zeros that must be excluded.
        std::normal_distribution<double> a(2.0 + trial % 5, 0.7), b(8.0, 1.5);
        ScalarField f(16, 16);
        std::vector<double> nonzero;
        for (double& v : f.values()) {
            const int kind = static_cast<int>(rng() % 4);
            v = kind == 0 ? 0.0 : (kind == 1 ? std::abs(b(rng)) + 0.01 : std::abs(a(rng)) + 0.01);
            if (v != 0.0) nonzero.push_back(v);
        }
        const oracle::OtsuResult want = oracle::exhaustive_otsu(nonzero, 256);
        const double got = otsu_threshold(f, true, 256);
        const auto [lo, hi] = std::minmax_element(nonzero.begin(), nonzero.end());
        const int got_cut = static_cast<int>(std::lround((got - *lo) / ((*hi - *lo) / 256)));
        CHECK(got_cut == want.cut);
        if (got_cut == want.cut) ++matched;
    }
    CHECK(matched == 200);
}

TEST_CASE("otsu on degenerate input raises") {
    CHECK_THROWS_AS(otsu_threshold(ScalarField(4, 4, 0.0)), DegenerateInputError);
    ScalarField one(4, 4, 0.0);
    one(1, 1) = 5.0;
    one(2, 2) = 5.0;
    CHECK_THROWS_AS(otsu_threshold(one), DegenerateInputError);
    CHECK_THROWS_AS(otsu_threshold(ScalarField(2, 2, 1.0), true, 1), std::invalid_argument);
}

TEST_CASE("hysteresis keeps weak pixels only when linked to a strong one") {
    ScalarField f(3, 8, 0.0);
    // Row 0: strong seed with a weak tail. Row 2: weak-only run.
    f(0, 0) = 12.0;
    f(0, 1) = 2.0;
    f(0, 2) = 1.5;
    f(0, 3) = 0.5;  // below epsilon, breaks the chain
    f(0, 4) = 3.0;
    f(2, 5) = 5.0;
    f(2, 6) = 5.0;
    const BinaryMask m = hysteresis(f, 10.0, 0.1);
    CHECK(m(0, 0) == 1);
    CHECK(m(0, 1) == 1);
    CHECK(m(0, 2) == 1);
    CHECK(m(0, 3) == 0);
    CHECK(m(0, 4) == 0);
    CHECK(m(2, 5) == 0);
    CHECK(m(2, 6) == 0);

    // Diagonal links count under 8-connectivity only.
    ScalarField d(2, 2, 0.0);
    d(0, 0) = 20.0;
    d(1, 1) = 2.0;
    CHECK(hysteresis(d, 10.0, 0.1, 8)(1, 1) == 1);
    CHECK(hysteresis(d, 10.0, 0.1, 4)(1, 1) == 0);
    CHECK_THROWS_AS(hysteresis(d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hysteresis(d, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("hysteresis output shrinks as the threshold grows") {
    std::mt19937_64 rng(12);
    const ScalarField f = oracle::random_field(rng, 40, 40, 0.0, 10.0);
    const ScalarField sparse = nms(f, oracle::random_field(rng, 40, 40, 0.0, kPi));
    BinaryMask prev = hysteresis(sparse, 1.0);
    for (const double t : {2.0, 4.0, 6.0, 8.0, 9.5}) {
        const BinaryMask cur = hysteresis(sparse, t);
        for (std::size_t i = 0; i < cur.size(); ++i) CHECK((cur[i] == 0 || prev[i] == 1));
        prev = cur;
    }
}

TEST_CASE("connected components: examples and raster-order labels") {
    BinaryMask m(3, 4, std::vector<std::uint8_t>{1, 0, 0, 1,
                                                 0, 1, 0, 1,
                                                 0, 0, 0, 0});
    const LabelMap eight = connected_components(m, 8);
    CHECK(eight.count == 2);
    CHECK(eight.labels(0, 0) == 1);
    CHECK(eight.labels(1, 1) == 1);
    CHECK(eight.labels(0, 3) == 2);
    CHECK(eight.sizes == std::vector<std::int64_t>{2, 2});
    const LabelMap four = connected_components(m, 4);
    CHECK(four.count == 3);
    CHECK(four.labels(1, 1) == 3);
    CHECK(connected_components(BinaryMask(5, 5, 0)).count == 0);
    CHECK(connected_components(BinaryMask(5, 5, 1)).count == 1);
    CHECK_THROWS_AS(connected_components(m, 6), std::invalid_argument);
}

TEST_CASE("connected components match flood fill on random masks") {
    std::mt19937_64 rng(909);
    int agreed = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const double p = 0.2 + 0.5 * (trial % 7) / 6.0;
        const BinaryMask m = oracle::random_mask(rng, 24, 31, p);
        for (const int conn : {4, 8}) {
            const LabelMap got = connected_components(m, conn);
            const Grid<int> want = oracle::flood_fill_labels(m, conn);
            int want_count = 0;
            for (const int v : want.values()) want_count = std::max(want_count, v);
            const bool ok = oracle::same_partition(got.labels, want) && got.count == want_count;
            CHECK(ok);
            agreed += ok ? 1 : 0;
        }
    }
    CHECK(agreed == 300);
}

}  // TEST_SUITE
