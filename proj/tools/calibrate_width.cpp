// Refits the width factor k: estimates crest widths of synthetic bars with
// k = 1 and solves min_k sum_W ((k * w_W - W) / W)^2.
//
//   channet_calibrate [size] [noise] [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "channet/pipeline.hpp"
#include "channet/synthetic.hpp"

int main(int argc, char** argv) {
    using namespace channet;
    const int size = argc > 1 ? std::atoi(argv[1]) : 256;
    const double noise = argc > 2 ? std::atof(argv[2]) : 0.1;
    const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 11;

    ScaleSpaceParams params;
    params.width_scale = 1.0;
    params.num_scales = effective_scale_count(size, size, params);

    double num = 0.0;
    double den = 0.0;
    std::cout << std::fixed << std::setprecision(4);
    for (const double w : {3.0, 5.0, 9.0, 17.0, 33.0}) {
        SceneSpec spec;
        spec.rows = size;
        spec.cols = size;
        spec.noise_sigma = noise;
        spec.seed = seed;
        spec.bars = {centered_bar(size, size, w, 0.0)};
        const SyntheticScene scene = make_synthetic_scene(spec);
        const SingularityResponse r = compute_singularity(scene.image, params);
        const double raw = mean_at(r.width, axis_pixels(spec.bars.front()));
        std::cout << "W = " << w << "  w/k = " << raw << '\n';
        num += raw / w;
        den += (raw / w) * (raw / w);
    }
    std::cout << "k = " << num / den << '\n';
    return 0;
}
