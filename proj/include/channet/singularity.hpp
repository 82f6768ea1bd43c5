#pragma once

#include <vector>

#include "channet/filtering.hpp"
#include "channet/grid.hpp"

namespace channet {

enum class DebiasMode {
    per_scale,      ///< subtract the Gaussian mean at each scale's own sigma
    single_global,  ///< subtract one smooth at the coarsest sigma for every scale (comparison only)
};

/// How adaptive_smooth distributes each pixel's box.
enum class SmoothMode {
    gather,   ///< each pixel becomes the mean of its own box
    scatter,  ///< each pixel spreads its value over its own box; outputs are the weighted mean of covering boxes
};

/// Which kernel set to run. Both produce bit-identical results.
enum class Execution { parallel, serial };

struct ScaleSpaceParams {
    double sigma1 = 1.5;
    int num_scales = 16;
    /// Scale multiplier of the first-derivative term in the denominator.
    double side_lobe = 1.7754;
    /// Scale-normalization exponent: f2 is multiplied by sigma^(2 gamma), f1 by (a sigma)^gamma.
    double gamma = 0.75;
    /// Width calibration factor k, fit on synthetic bars of widths {3,5,9,17,33}.
    double width_scale = 1.92;
    DebiasMode debias = DebiasMode::per_scale;
    int smooth_iterations = 3;
    SmoothMode smooth_mode = SmoothMode::scatter;

    /// Throws std::invalid_argument when any field is out of range.
    void validate() const;
};

struct SingularityResponse {
    ScalarField psi_max;     ///< winning clamped index, >= 0
    ScalarField theta;       ///< cross-channel direction in [0, pi); x = column, y = row
    IndexField scale_index;  ///< winning scale, 1-based
    ScalarField width;       ///< pixels; 0 where psi_max == 0
};

struct Hessian {
    ScalarField xx, xy, yy;
};

struct SteeredSecondDerivative {
    ScalarField theta;  ///< in [0, pi)
    ScalarField f2;     ///< second derivative along theta
};

struct ScaleIndex {
    ScalarField psi_signed;
    ScalarField theta;
};

/// Largest scale count whose smallest filter window fits in an image with
/// minimum dimension `min_dim`: ceil(2 log(M / (6 sigma1)) / log 2 + 1).
/// Throws std::invalid_argument if min_dim < ceil(6 sigma1).
int num_scales(int min_dim, double sigma1);

/// sigma_n = sigma1 * sqrt(2)^(n-1), n = 1..N.
std::vector<double> scale_ladder(const ScaleSpaceParams& params);

/// I - G_sigma * I.
ScalarField debias(const ScalarField& input, double sigma, Execution exec = Execution::parallel);

Hessian hessian(const ScalarField& debiased, double sigma, Execution exec = Execution::parallel);

/// theta extremizes the directional second derivative; of the two roots the
/// one with larger |f2| wins, ties going to the smaller angle.
SteeredSecondDerivative orientation_from_hessian(const Hessian& h);

SteeredSecondDerivative hessian_orientation(const ScalarField& debiased, double sigma,
                                            Execution exec = Execution::parallel);

/// Signed single-scale index: positive on bright ridges (f0 > 0, f2 < 0),
/// negative on dark ridges (f0 < 0, f2 > 0), zero elsewhere.
ScaleIndex index_at_scale(const ScalarField& debiased, double sigma, double side_lobe, double gamma,
                          Execution exec = Execution::parallel);

/// Clamps each scale's index at zero and keeps the per-pixel maximum; ties go
/// to the finer scale. The width field of the result is left empty.
/// `clamped_stack`, if non-null, receives the clamped per-scale responses.
SingularityResponse max_over_scales(const std::vector<ScaleIndex>& per_scale, const std::vector<double>& ladder,
                                    std::vector<ScalarField>* clamped_stack = nullptr);

/// Interpolated width from the winning scale and its in-range neighbours.
ScalarField estimate_width(const std::vector<ScalarField>& clamped_stack, const std::vector<double>& ladder,
                           const IndexField& scale_index, double width_scale);

/// Iterated box smoothing with per-pixel half-width round(sigma_m / 2).
/// In scatter mode a pixel only influences pixels inside its own box, so a
/// weak response at a coarse scale cannot pull in a nearby narrow crest.
ScalarField adaptive_smooth(const ScalarField& psi, const IndexField& scale_index, const std::vector<double>& ladder,
                            int iterations, SmoothMode mode = SmoothMode::scatter,
                            Execution exec = Execution::parallel);

/// Runs all scales, the cross-scale maximum and width estimation.
/// `params.num_scales` is used as given; callers cap it with num_scales().
SingularityResponse compute_singularity(const ScalarField& input, const ScaleSpaceParams& params,
                                        Execution exec = Execution::parallel);

}  // namespace channet
