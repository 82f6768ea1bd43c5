// Times the OpenMP kernels against their serial reference versions and checks
// that both produce identical output.
//
//   channet_bench [size] [repeats]

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "channet/filtering.hpp"
#include "channet/pipeline.hpp"
#include "channet/singularity.hpp"
#include "channet/synthetic.hpp"

namespace {

using namespace channet;
using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& body, int repeats) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = Clock::now();
        body();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial, double parallel, bool identical) {
    std::cout << name << ": serial " << serial << " ms, parallel " << parallel << " ms, speedup "
              << serial / parallel << (identical ? ", identical" : ", MISMATCH") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    const int size = argc > 1 ? std::atoi(argv[1]) : 512;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
#ifdef _OPENMP
    std::cout << "threads: " << omp_get_max_threads() << '\n';
#endif

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField field(size, size);
    for (double& v : field.values()) v = dist(rng);

    int failures = 0;
    for (const double sigma : {1.5, 6.0, 24.0}) {
        const Kernel1D k = gaussian_kernel(sigma, 2, size - 1);
        ScalarField a, b;
        const double ts = time_ms([&] { a = reference::convolve_separable(field, k, k); }, repeats);
        const double tp = time_ms([&] { b = convolve_separable(field, k, k); }, repeats);
        report("convolve_separable sigma=" + std::to_string(sigma), ts, tp, a == b);
        failures += a == b ? 0 : 1;
    }
    {
        IntegralField a, b;
        const double ts = time_ms([&] { a = reference::integral_image(field); }, repeats);
        const double tp = time_ms([&] { b = integral_image(field); }, repeats);
        report("integral_image", ts, tp, a.sums == b.sums);
        failures += a.sums == b.sums ? 0 : 1;
    }
    {
        const SyntheticScene scene = make_synthetic_scene(delta_scene(size));
        ScaleSpaceParams params;
        params.num_scales = effective_scale_count(size, size, params);
        SingularityResponse a, b;
        const double ts = time_ms([&] { a = compute_singularity(scene.image, params, Execution::serial); }, 1);
        const double tp = time_ms([&] { b = compute_singularity(scene.image, params, Execution::parallel); }, 1);
        const bool same = a.psi_max == b.psi_max && a.theta == b.theta && a.scale_index == b.scale_index &&
                          a.width == b.width;
        report("compute_singularity N=" + std::to_string(params.num_scales), ts, tp, same);
        failures += same ? 0 : 1;

        const std::vector<double> ladder = scale_ladder(params);
        for (const SmoothMode mode : {SmoothMode::gather, SmoothMode::scatter}) {
            ScalarField sa, sb;
            const double ss = time_ms([&] { sa = adaptive_smooth(a.psi_max, a.scale_index, ladder, 3, mode, Execution::serial); }, repeats);
            const double sp = time_ms([&] { sb = adaptive_smooth(a.psi_max, a.scale_index, ladder, 3, mode, Execution::parallel); }, repeats);
            report(std::string("adaptive_smooth ") + (mode == SmoothMode::gather ? "gather" : "scatter"), ss, sp, sa == sb);
            failures += sa == sb ? 0 : 1;
        }
    }
    return failures == 0 ? 0 : 1;
}
