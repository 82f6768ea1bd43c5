#include "channet/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace channet {

namespace {

constexpr double kPi = std::numbers::pi;

struct AxisKernels {
    Kernel1D x;
    Kernel1D y;
};

// Kernels are truncated to the image so the mirror border stays single-fold;
// this only bites for the a*sigma first-derivative filters near the top of the ladder.
AxisKernels axis_kernels(double sigma, int order, int rows, int cols) {
    return {gaussian_kernel(sigma, order, cols - 1), gaussian_kernel(sigma, order, rows - 1)};
}

ScalarField rows_pass(const ScalarField& f, const Kernel1D& k, Execution exec) {
    return exec == Execution::parallel ? convolve_rows(f, k) : reference::convolve_rows(f, k);
}

ScalarField cols_pass(const ScalarField& f, const Kernel1D& k, Execution exec) {
    return exec == Execution::parallel ? convolve_cols(f, k) : reference::convolve_cols(f, k);
}

double wrap_half_turn(double t) {
    if (t < 0.0) t += kPi;
    if (t >= kPi) t -= kPi;
    return t;
}

double steer2(double t, double xx, double xy, double yy) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    return c * c * xx + 2.0 * s * c * xy + s * s * yy;
}

struct Steered {
    double theta;
    double f2;
};

Steered steer_pixel(double xx, double xy, double yy) {
    const double base = 0.5 * std::atan2(2.0 * xy, xx - yy);
    const double ta = wrap_half_turn(base);
    const double tb = wrap_half_turn(base + 0.5 * kPi);
    const double fa = steer2(ta, xx, xy, yy);
    const double fb = steer2(tb, xx, xy, yy);
    const double ma = std::abs(fa);
    const double mb = std::abs(fb);
    const double tol = 1e-12 * std::max(ma, mb);
    if (std::abs(ma - mb) <= tol) return ta <= tb ? Steered{ta, fa} : Steered{tb, fb};
    return mb > ma ? Steered{tb, fb} : Steered{ta, fa};
}

}  // namespace

void ScaleSpaceParams::validate() const {
    if (!(sigma1 > 0.0)) throw std::invalid_argument("sigma1 must be > 0");
    if (num_scales < 1) throw std::invalid_argument("number of scales must be >= 1");
    if (!(side_lobe > 0.0)) throw std::invalid_argument("side-lobe constant a must be > 0");
    if (!(width_scale > 0.0)) throw std::invalid_argument("width scale k must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    if (smooth_iterations < 0) throw std::invalid_argument("smooth iterations must be >= 0");
}

int num_scales(int min_dim, double sigma1) {
    if (!(sigma1 > 0.0)) throw std::invalid_argument("num_scales: sigma1 must be > 0");
    const int smallest_window = static_cast<int>(std::ceil(6.0 * sigma1));
    if (min_dim < smallest_window) {
        throw std::invalid_argument("num_scales: image dimension " + std::to_string(min_dim) +
                                    " is smaller than the smallest filter window " + std::to_string(smallest_window));
    }
    const double n = 2.0 * std::log(min_dim / (6.0 * sigma1)) / std::log(2.0) + 1.0;
    return std::max(1, static_cast<int>(std::ceil(n)));
}

std::vector<double> scale_ladder(const ScaleSpaceParams& params) {
    params.validate();
    std::vector<double> ladder(static_cast<std::size_t>(params.num_scales));
    for (int n = 0; n < params.num_scales; ++n) ladder[static_cast<std::size_t>(n)] = params.sigma1 * std::pow(std::numbers::sqrt2, n);
    return ladder;
}

ScalarField debias(const ScalarField& input, double sigma, Execution exec) {
    const AxisKernels g = axis_kernels(sigma, 0, input.rows(), input.cols());
    ScalarField smooth = cols_pass(rows_pass(input, g.x, exec), g.y, exec);
    ScalarField out(input.rows(), input.cols());
    const std::size_t n = input.size();
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
    for (std::size_t i = 0; i < n; ++i) out[i] = input[i] - smooth[i];
    return out;
}

Hessian hessian(const ScalarField& debiased, double sigma, Execution exec) {
    const int rows = debiased.rows();
    const int cols = debiased.cols();
    const AxisKernels g0 = axis_kernels(sigma, 0, rows, cols);
    const AxisKernels g1 = axis_kernels(sigma, 1, rows, cols);
    const AxisKernels g2 = axis_kernels(sigma, 2, rows, cols);
    const ScalarField r0 = rows_pass(debiased, g0.x, exec);
    const ScalarField r1 = rows_pass(debiased, g1.x, exec);
    const ScalarField r2 = rows_pass(debiased, g2.x, exec);
    return {cols_pass(r2, g0.y, exec), cols_pass(r1, g1.y, exec), cols_pass(r0, g2.y, exec)};
}

SteeredSecondDerivative orientation_from_hessian(const Hessian& h) {
    SteeredSecondDerivative out{ScalarField(h.xx.rows(), h.xx.cols()), ScalarField(h.xx.rows(), h.xx.cols())};
    const std::size_t n = h.xx.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const Steered s = steer_pixel(h.xx[i], h.xy[i], h.yy[i]);
        out.theta[i] = s.theta;
        out.f2[i] = s.f2;
    }
    return out;
}

SteeredSecondDerivative hessian_orientation(const ScalarField& debiased, double sigma, Execution exec) {
    return orientation_from_hessian(hessian(debiased, sigma, exec));
}

ScaleIndex index_at_scale(const ScalarField& debiased, double sigma, double side_lobe, double gamma,
                          Execution exec) {
    const int rows = debiased.rows();
    const int cols = debiased.cols();

    // Zeroth and second order at sigma share their row passes.
    const AxisKernels g0 = axis_kernels(sigma, 0, rows, cols);
    const AxisKernels g1 = axis_kernels(sigma, 1, rows, cols);
    const AxisKernels g2 = axis_kernels(sigma, 2, rows, cols);
    ScalarField f0;
    Hessian h;
    {
        const ScalarField r0 = rows_pass(debiased, g0.x, exec);
        const ScalarField r1 = rows_pass(debiased, g1.x, exec);
        const ScalarField r2 = rows_pass(debiased, g2.x, exec);
        f0 = cols_pass(r0, g0.y, exec);
        h = {cols_pass(r2, g0.y, exec), cols_pass(r1, g1.y, exec), cols_pass(r0, g2.y, exec)};
    }

    const double wide = side_lobe * sigma;
    const AxisKernels w0 = axis_kernels(wide, 0, rows, cols);
    const AxisKernels w1 = axis_kernels(wide, 1, rows, cols);
    const ScalarField ix = cols_pass(rows_pass(debiased, w1.x, exec), w0.y, exec);
    const ScalarField iy = cols_pass(rows_pass(debiased, w0.x, exec), w1.y, exec);

    // gamma-normalized derivatives (sigma^(n*gamma)) so crest responses of
    // channels of different width land on a comparable footing.
    const double norm2 = std::pow(sigma, 2.0 * gamma);
    const double norm1 = std::pow(wide, gamma);

    ScaleIndex out{ScalarField(rows, cols), ScalarField(rows, cols)};
    const std::size_t n = debiased.size();
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
    for (std::size_t i = 0; i < n; ++i) {
        const Steered s = steer_pixel(h.xx[i], h.xy[i], h.yy[i]);
        const double f2 = s.f2 * norm2;
        const double f1 = (std::cos(s.theta) * ix[i] + std::sin(s.theta) * iy[i]) * norm1;
        const double mag = std::abs(f0[i] * f2) / (1.0 + std::abs(f1));
        double signed_psi = 0.0;
        if (f0[i] > 0.0 && f2 < 0.0) {
            signed_psi = mag;
        } else if (f0[i] < 0.0 && f2 > 0.0) {
            signed_psi = -mag;
        }
        out.psi_signed[i] = signed_psi;
        out.theta[i] = s.theta;
    }
    return out;
}

SingularityResponse max_over_scales(const std::vector<ScaleIndex>& per_scale, const std::vector<double>& ladder,
                                    std::vector<ScalarField>* clamped_stack) {
    if (per_scale.empty()) throw std::invalid_argument("max_over_scales: empty response list");
    if (per_scale.size() != ladder.size()) throw std::invalid_argument("max_over_scales: ladder size mismatch");
    const int rows = per_scale.front().psi_signed.rows();
    const int cols = per_scale.front().psi_signed.cols();
    for (const ScaleIndex& s : per_scale) {
        require_same_shape(s.psi_signed, per_scale.front().psi_signed, "max_over_scales");
        require_same_shape(s.theta, per_scale.front().psi_signed, "max_over_scales");
    }

    SingularityResponse out{ScalarField(rows, cols), ScalarField(rows, cols), IndexField(rows, cols, 1), ScalarField()};
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    for (std::size_t i = 0; i < n; ++i) {
        out.psi_max[i] = std::max(per_scale.front().psi_signed[i], 0.0);
        out.theta[i] = per_scale.front().theta[i];
    }
    for (std::size_t s = 1; s < per_scale.size(); ++s) {
        const ScaleIndex& cur = per_scale[s];
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::max(cur.psi_signed[i], 0.0);
            if (v > out.psi_max[i]) {
                out.psi_max[i] = v;
                out.theta[i] = cur.theta[i];
                out.scale_index[i] = static_cast<int>(s) + 1;
            }
        }
    }

    if (clamped_stack != nullptr) {
        clamped_stack->clear();
        clamped_stack->reserve(per_scale.size());
        for (const ScaleIndex& s : per_scale) {
            ScalarField c(rows, cols);
            for (std::size_t i = 0; i < n; ++i) c[i] = std::max(s.psi_signed[i], 0.0);
            clamped_stack->push_back(std::move(c));
        }
    }
    return out;
}

ScalarField estimate_width(const std::vector<ScalarField>& clamped_stack, const std::vector<double>& ladder,
                           const IndexField& scale_index, double width_scale) {
    if (clamped_stack.empty() || clamped_stack.size() != ladder.size()) {
        throw std::invalid_argument("estimate_width: stack and ladder must be nonempty and the same size");
    }
    const int count = static_cast<int>(ladder.size());
    ScalarField width(scale_index.rows(), scale_index.cols());
    const std::size_t n = scale_index.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int m = scale_index[i] - 1;
        if (m < 0 || m >= count) throw std::invalid_argument("estimate_width: scale index out of range");
        double num = 0.0;
        double den = 0.0;
        for (int j = std::max(m - 1, 0); j <= std::min(m + 1, count - 1); ++j) {
            const double p = clamped_stack[static_cast<std::size_t>(j)][i];
            num += ladder[static_cast<std::size_t>(j)] * p;
            den += p;
        }
        width[i] = den > 0.0 ? width_scale * num / den : 0.0;
    }
    return width;
}

ScalarField adaptive_smooth(const ScalarField& psi, const IndexField& scale_index, const std::vector<double>& ladder,
                            int iterations, SmoothMode mode, Execution exec) {
    if (iterations < 0) throw std::invalid_argument("adaptive_smooth: iterations must be >= 0");
    require_same_shape(psi, scale_index, "adaptive_smooth");

    const int rows = psi.rows();
    const int cols = psi.cols();
    Grid<int> half(rows, cols);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const int m = scale_index[i];
        if (m < 1 || m > static_cast<int>(ladder.size())) {
            throw std::invalid_argument("adaptive_smooth: scale index out of range");
        }
        half[i] = std::max(0, static_cast<int>(std::lround(ladder[static_cast<std::size_t>(m - 1)] / 2.0)));
    }
    auto integrate = [exec](const ScalarField& f) {
        return exec == Execution::parallel ? integral_image(f) : reference::integral_image(f);
    };

    ScalarField cur = psi;
    for (int it = 0; it < iterations; ++it) {
        ScalarField next(rows, cols);
        if (mode == SmoothMode::gather) {
            const IntegralField integral = integrate(cur);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) next(r, c) = box_mean(integral, r, c, half(r, c));
            }
        } else {
            // Corner deltas of every clipped box, weighted 1/area; a 2D prefix
            // sum turns them into per-pixel coverage sums.
            ScalarField num(rows, cols, 0.0);
            ScalarField den(rows, cols, 0.0);
            auto splat = [&](int r, int c, double v, double w) {
                if (r >= rows || c >= cols) return;
                num(r, c) += v * w;
                den(r, c) += w;
            };
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    const int h = half(r, c);
                    const int r0 = std::max(r - h, 0);
                    const int c0 = std::max(c - h, 0);
                    const int r1 = std::min(r + h + 1, rows);
                    const int c1 = std::min(c + h + 1, cols);
                    const double w = 1.0 / (static_cast<double>(r1 - r0) * static_cast<double>(c1 - c0));
                    const double v = cur(r, c);
                    splat(r0, c0, v, w);
                    splat(r0, c1, v, -w);
                    splat(r1, c0, v, -w);
                    splat(r1, c1, v, w);
                }
            }
            const IntegralField n = integrate(num);
            const IntegralField d = integrate(den);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) next(r, c) = n.sums(r + 1, c + 1) / d.sums(r + 1, c + 1);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

SingularityResponse compute_singularity(const ScalarField& input, const ScaleSpaceParams& params, Execution exec) {
    const std::vector<double> ladder = scale_ladder(params);

    ScalarField global_debiased;
    if (params.debias == DebiasMode::single_global) global_debiased = debias(input, ladder.back(), exec);

    std::vector<ScaleIndex> per_scale;
    per_scale.reserve(ladder.size());
    for (const double sigma : ladder) {
        if (params.debias == DebiasMode::per_scale) {
            per_scale.push_back(index_at_scale(debias(input, sigma, exec), sigma, params.side_lobe, params.gamma, exec));
        } else {
            per_scale.push_back(index_at_scale(global_debiased, sigma, params.side_lobe, params.gamma, exec));
        }
    }

    std::vector<ScalarField> stack;
    SingularityResponse response = max_over_scales(per_scale, ladder, &stack);
    response.width = estimate_width(stack, ladder, response.scale_index, params.width_scale);
    return response;
}

}  // namespace channet
