#include <doctest.h>

#include <cmath>
#include <random>

#include "channet/filtering.hpp"
#include "oracles.hpp"

using namespace channet;

namespace {

Kernel1D kernel_from(std::vector<double> taps) {
    Kernel1D k;
    k.taps = std::move(taps);
    k.sigma = 1.0;
    return k;
}

ScalarField row_signal(int n, double (*f)(double)) {
    ScalarField s(1, n);
    for (int x = 0; x < n; ++x) s(0, x) = f(static_cast<double>(x));
    return s;
}

}  // namespace

TEST_SUITE("filtering") {

TEST_CASE("kernel length is 2 ceil(3 sigma) + 1 with an exact center tap") {
    for (const double sigma : {0.3, 1.0, 1.5, 2.1213, 4.0, 9.7}) {
        for (int order = 0; order <= 2; ++order) {
            const Kernel1D k = gaussian_kernel(sigma, order);
            CHECK(k.length() == 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1);
            CHECK(k.radius() == kernel_radius(sigma));
            CHECK(k.order == order);
        }
    }
}

TEST_CASE("kernel normalization and symmetry per order") {
    for (const double sigma : {0.7, 1.5, 3.0, 6.0}) {
        const Kernel1D g0 = gaussian_kernel(sigma, 0);
        const Kernel1D g1 = gaussian_kernel(sigma, 1);
        const Kernel1D g2 = gaussian_kernel(sigma, 2);
        double s0 = 0, s1 = 0, s2 = 0, m1 = 0, m2 = 0;
        for (int j = -g0.radius(); j <= g0.radius(); ++j) {
            s0 += g0.at(j);
            s1 += g1.at(j);
            s2 += g2.at(j);
            m1 += j * g1.at(j);
            m2 += 0.5 * j * j * g2.at(j);
            CHECK(g0.at(j) == g0.at(-j));
            CHECK(g1.at(j) == -g1.at(-j));
            CHECK(g2.at(j) == g2.at(-j));
        }
        CHECK(s0 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(s1) < 1e-12);
        CHECK(std::abs(s2) < 1e-12);
        CHECK(m1 == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("derivative kernels respond with 1 to their canonical polynomial") {
    const Kernel1D id = identity_kernel();
    for (const double sigma : {1.0, 1.5, 2.5}) {
        const Kernel1D g1 = gaussian_kernel(sigma, 1);
        const Kernel1D g2 = gaussian_kernel(sigma, 2);
        const ScalarField ramp = row_signal(64, [](double x) { return x; });
        const ScalarField quad = row_signal(64, [](double x) { return 0.5 * x * x; });
        const ScalarField flat = row_signal(64, [](double) { return 3.25; });
        // Dense oracle, checked away from the mirrored borders.
        const ScalarField d1 = oracle::dense_convolve(ramp, g1.taps, id.taps);
        const ScalarField d2 = oracle::dense_convolve(quad, g2.taps, id.taps);
        const ScalarField c1 = convolve_rows(flat, g1);
        const int r = g2.radius();
        for (int x = r; x < 64 - r; ++x) {
            CHECK(d1(0, x) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(std::abs(d2(0, x) - 1.0) < 1e-6);
        }
        for (int x = 0; x < 64; ++x) CHECK(std::abs(c1(0, x)) < 1e-12);
    }
}

TEST_CASE("gaussian_kernel rejects bad arguments and renormalizes truncated support") {
    CHECK_THROWS_AS(gaussian_kernel(0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(-1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(1.0, 3), std::invalid_argument);
    const Kernel1D t = gaussian_kernel(10.0, 0, 7);
    CHECK(t.radius() == 7);
    double s = 0;
    for (const double v : t.taps) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reflect_index mirrors without repeating the edge") {
    CHECK(reflect_index(-1, 5) == 1);
    CHECK(reflect_index(-4, 5) == 4);
    CHECK(reflect_index(5, 5) == 3);
    CHECK(reflect_index(8, 5) == 0);
    CHECK(reflect_index(2, 5) == 2);
    CHECK(reflect_index(-3, 1) == 0);
    for (int n = 2; n < 9; ++n) {
        for (int i = -(n - 1); i <= 2 * n - 2; ++i) CHECK(reflect_index(i, n) == oracle::mirror(i, n));
    }
}

TEST_CASE("identity and constant fields pass through separable filtering") {
    std::mt19937_64 rng(3);
    const ScalarField f = oracle::random_field(rng, 9, 13);
    CHECK(convolve_separable(f, identity_kernel(), identity_kernel()) == f);

    const ScalarField flat(12, 7, 2.5);
    const Kernel1D g = gaussian_kernel(1.5, 0);
    const ScalarField out = convolve_separable(flat, g, g);
    for (const double v : out.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("separable convolution equals dense 2D convolution on random 8x8 inputs") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> tap(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const ScalarField f = oracle::random_field(rng, 8, 8);
        std::vector<double> kx(5), ky(5);
        for (double& v : kx) v = tap(rng);
        for (double& v : ky) v = tap(rng);
        const ScalarField fast = convolve_separable(f, kernel_from(kx), kernel_from(ky));
        worst = std::max(worst, oracle::max_abs_diff(fast, oracle::dense_convolve(f, kx, ky)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("row and column passes commute") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField f = oracle::random_field(rng, 17, 23);
        const Kernel1D kx = gaussian_kernel(1.0 + trial * 0.1, trial % 3);
        const Kernel1D ky = gaussian_kernel(2.0 - trial * 0.05, (trial + 1) % 3);
        const ScalarField a = convolve_cols(convolve_rows(f, kx), ky);
        const ScalarField b = convolve_rows(convolve_cols(f, ky), kx);
        CHECK(oracle::max_abs_diff(a, b) <= 1e-10);
    }
}

TEST_CASE("order-0 filtering preserves the mean of a mirror-symmetric pattern") {
    // A field that is its own mirror image about both edges keeps its mean under reflection.
    ScalarField f(33, 33);
    for (int r = 0; r < 33; ++r) {
        for (int c = 0; c < 33; ++c) f(r, c) = std::cos(2.0 * M_PI * r / 32.0) + 0.5 * std::cos(2.0 * M_PI * c / 16.0) + 1.0;
    }
    const Kernel1D g = gaussian_kernel(2.0, 0);
    const ScalarField out = convolve_separable(f, g, g);
    auto mean = [](const ScalarField& x) {
        double s = 0;
        for (int r = 0; r < 32; ++r)
            for (int c = 0; c < 32; ++c) s += x(r, c);
        return s / (32.0 * 32.0);
    };
    CHECK(std::abs(mean(out) - mean(f)) < 1e-6);
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    std::mt19937_64 rng(17);
    const ScalarField f = oracle::random_field(rng, 61, 47);
    for (const double sigma : {0.8, 3.0, 7.5}) {
        for (int order = 0; order <= 2; ++order) {
            const Kernel1D k = gaussian_kernel(sigma, order);
            CHECK(convolve_rows(f, k) == reference::convolve_rows(f, k));
            CHECK(convolve_cols(f, k) == reference::convolve_cols(f, k));
            CHECK(convolve_separable(f, k, k) == reference::convolve_separable(f, k, k));
        }
    }
    CHECK(integral_image(f).sums == reference::integral_image(f).sums);
}

TEST_CASE("kernels must be shorter than twice the image dimension") {
    const ScalarField f(4, 40, 1.0);
    const Kernel1D k = gaussian_kernel(3.0, 0);  // 19 taps
    CHECK_NOTHROW(convolve_rows(f, k));
    CHECK_THROWS_AS(convolve_cols(f, k), std::invalid_argument);
}

TEST_CASE("integral image basics") {
    const IntegralField ones = integral_image(ScalarField(2, 2, 1.0));
    CHECK(ones.sums(1, 1) == 1.0);
    CHECK(ones.sums(1, 2) == 2.0);
    CHECK(ones.sums(2, 1) == 2.0);
    CHECK(ones.sums(2, 2) == 4.0);
    for (int i = 0; i <= 2; ++i) {
        CHECK(ones.sums(0, i) == 0.0);
        CHECK(ones.sums(i, 0) == 0.0);
    }
    const IntegralField zeros = integral_image(ScalarField(5, 3, 0.0));
    for (const double v : zeros.sums.values()) CHECK(v == 0.0);
}

TEST_CASE("integral image is monotone for nonnegative input") {
    std::mt19937_64 rng(8);
    const IntegralField s = integral_image(oracle::random_field(rng, 12, 9, 0.0, 1.0));
    for (int r = 0; r <= 12; ++r) {
        for (int c = 0; c <= 9; ++c) {
            if (r > 0) CHECK(s.sums(r, c) >= s.sums(r - 1, c));
            if (c > 0) CHECK(s.sums(r, c) >= s.sums(r, c - 1));
        }
    }
}

TEST_CASE("rectangle sums from the integral image match loop sums") {
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const ScalarField f = oracle::random_field(rng, 16, 16);
        const IntegralField s = integral_image(f);
        std::uniform_int_distribution<int> pick(0, 16);
        for (int q = 0; q < 20; ++q) {
            int r0 = pick(rng), r1 = pick(rng), c0 = pick(rng), c1 = pick(rng);
            if (r0 > r1) std::swap(r0, r1);
            if (c0 > c1) std::swap(c0, c1);
            worst = std::max(worst, std::abs(s.rect_sum(r0, c0, r1, c1) - oracle::rect_sum(f, r0, c0, r1, c1)));
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("box_mean clips the window to the image") {
    std::mt19937_64 rng(9);
    const ScalarField f = oracle::random_field(rng, 10, 11);
    const IntegralField s = integral_image(f);
    CHECK(box_mean(s, 4, 5, 0) == doctest::Approx(f(4, 5)).epsilon(1e-12));
    CHECK(box_mean(s, 0, 0, 2) == doctest::Approx(oracle::window_mean(f, 0, 0, 2)).epsilon(1e-12));
    CHECK(box_mean(s, 9, 10, 3) == doctest::Approx(oracle::window_mean(f, 9, 10, 3)).epsilon(1e-12));
    const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 11; ++c) {
            for (const int h : {0, 1, 4, 30}) {
                const double m = box_mean(s, r, c, h);
                CHECK(m >= *lo - 1e-12);
                CHECK(m <= *hi + 1e-12);
            }
        }
    }
    const IntegralField flat = integral_image(ScalarField(6, 6, -4.0));
    CHECK(box_mean(flat, 2, 3, 5) == doctest::Approx(-4.0));
}

}  // TEST_SUITE
