#include "channet/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "channet/errors.hpp"

namespace channet {

namespace fs = std::filesystem;

namespace {

class ThreadScope {
public:
    explicit ThreadScope(int threads) {
#ifdef _OPENMP
        previous_ = omp_get_max_threads();
        if (threads > 0) omp_set_num_threads(threads);
#else
        (void)threads;
#endif
    }
    ~ThreadScope() {
#ifdef _OPENMP
        omp_set_num_threads(previous_);
#endif
    }
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;

private:
    int previous_ = 1;
};

template <typename F>
auto run_stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const IoError& e) {
        throw StageError(name, StageError::Kind::io, e.what());
    } catch (const DegenerateInputError& e) {
        throw StageError(name, StageError::Kind::degenerate, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw StageError(name, StageError::Kind::io, e.what());
    } catch (const std::exception& e) {
        throw StageError(name, StageError::Kind::usage, e.what());
    }
}

ScalarField to_scalar(const IndexField& f) {
    ScalarField out(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
    return out;
}

InputFormat infer_format(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm") return InputFormat::pgm;
    if (ext == ".tif" || ext == ".tiff") return InputFormat::geotiff;
    return InputFormat::f32raw;
}

class ArtifactWriter {
public:
    ArtifactWriter(const PipelineConfig& config, bool enabled, PipelineResult& result)
        : config_(config), enabled_(enabled), result_(result) {
        if (enabled_) fs::create_directories(config_.out_dir);
    }

    bool wants(Artifact a) const { return enabled_ && config_.emit.contains(a); }

    void field(Artifact a, const ScalarField& f) {
        if (!wants(a)) return;
        const fs::path p = config_.out_dir / (artifact_name(a) + ".f32");
        write_raster(f, p, OutputFormat::f32raw);
        result_.written.push_back(p);
        result_.written.push_back(sidecar_path(p));
    }

    void mask(Artifact a, const BinaryMask& m) {
        if (!wants(a)) return;
        for (const auto& [ext, fmt] : {std::pair{".pgm", OutputFormat::pgm}, std::pair{".png", OutputFormat::png8}}) {
            const fs::path p = config_.out_dir / (artifact_name(a) + ext);
            write_raster(m, p, fmt);
            result_.written.push_back(p);
        }
    }

    void text(Artifact a, const std::string& body) {
        if (!wants(a)) return;
        const fs::path p = config_.out_dir / (artifact_name(a) + ".json");
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << body << '\n';
        if (!out) throw IoError("error writing " + p.string());
        result_.written.push_back(p);
    }

private:
    const PipelineConfig& config_;
    bool enabled_;
    PipelineResult& result_;
};

}  // namespace

const std::vector<Artifact>& all_artifacts() {
    static const std::vector<Artifact> kAll = {Artifact::water_input, Artifact::psi_max,    Artifact::psi_smooth,
                                               Artifact::theta,       Artifact::scale_index, Artifact::width,
                                               Artifact::centerline,  Artifact::channel_map, Artifact::evaluation};
    return kAll;
}

std::string artifact_name(Artifact a) {
    switch (a) {
        case Artifact::water_input: return "water_input";
        case Artifact::psi_max: return "psi_max";
        case Artifact::psi_smooth: return "psi_smooth";
        case Artifact::theta: return "theta";
        case Artifact::scale_index: return "scale_index";
        case Artifact::width: return "width";
        case Artifact::centerline: return "centerline";
        case Artifact::channel_map: return "channel_map";
        case Artifact::evaluation: return "evaluation";
    }
    return "unknown";
}

std::set<Artifact> parse_emit_list(const std::string& list) {
    std::set<Artifact> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        if (item == "all") {
            out.insert(all_artifacts().begin(), all_artifacts().end());
            continue;
        }
        bool found = false;
        for (const Artifact a : all_artifacts()) {
            if (artifact_name(a) == item) {
                out.insert(a);
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("unknown artifact '" + item + "' in emit list");
    }
    return out;
}

void PipelineConfig::validate() const {
    scale.validate();
    if (!(epsilon_factor > 0.0 && epsilon_factor < 1.0)) throw std::invalid_argument("epsilon factor must lie in (0, 1)");
    if (!(min_fraction >= 0.0 && min_fraction < 1.0)) throw std::invalid_argument("min fraction must lie in [0, 1)");
    if (connectivity != 4 && connectivity != 8) throw std::invalid_argument("connectivity must be 4 or 8");
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

int effective_scale_count(int rows, int cols, const ScaleSpaceParams& params) {
    return std::min(params.num_scales, num_scales(std::min(rows, cols), params.sigma1));
}

PipelineResult run_pipeline_on(const ScalarField& water_input, const PipelineConfig& config,
                               const std::optional<BinaryMask>& truth, bool write_artifacts) {
    run_stage("config", [&] { config.validate(); });
    ThreadScope threads(config.threads);

    PipelineResult result;
    ArtifactWriter out = run_stage("write", [&] { return ArtifactWriter(config, write_artifacts, result); });
    result.water_input = water_input;
    run_stage("write", [&] { out.field(Artifact::water_input, water_input); });

    ScaleSpaceParams params = config.scale;
    params.num_scales = run_stage("singularity", [&] {
        return effective_scale_count(water_input.rows(), water_input.cols(), config.scale);
    });
    result.scales_used = params.num_scales;
    result.response = run_stage("singularity", [&] { return compute_singularity(water_input, params); });
    run_stage("write", [&] {
        out.field(Artifact::psi_max, result.response.psi_max);
        out.field(Artifact::theta, result.response.theta);
        out.field(Artifact::scale_index, to_scalar(result.response.scale_index));
        out.field(Artifact::width, result.response.width);
    });

    result.psi_smooth = run_stage("smoothing", [&] {
        return adaptive_smooth(result.response.psi_max, result.response.scale_index, scale_ladder(params),
                               params.smooth_iterations, params.smooth_mode);
    });
    run_stage("write", [&] { out.field(Artifact::psi_smooth, result.psi_smooth); });

    run_stage("centerline", [&] {
        result.suppressed = nms(result.psi_smooth, result.response.theta);
        result.threshold = otsu_threshold(result.suppressed, true, 256);
        result.centerline = hysteresis(result.suppressed, result.threshold, config.epsilon_factor, config.connectivity);
    });
    run_stage("write", [&] { out.mask(Artifact::centerline, result.centerline); });

    result.channel_map = run_stage("channel_map", [&] {
        const BinaryMask grown = regrow(result.centerline, result.response.width, result.response.theta);
        return remove_small_components(grown, config.min_fraction, config.fraction_basis, config.connectivity);
    });
    run_stage("write", [&] { out.mask(Artifact::channel_map, result.channel_map); });

    if (truth.has_value()) {
        result.evaluation = run_stage("evaluate", [&] { return confusion(result.channel_map, *truth); });
        run_stage("write", [&] { out.text(Artifact::evaluation, to_json(*result.evaluation)); });
    }
    return result;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    run_stage("config", [&] { config.validate(); });

    const MultiBandRaster raster = run_stage("read_input", [&] {
        if (config.input.empty()) throw std::invalid_argument("no input path given");
        return read_raster(config.input, config.input_format);
    });

    const ScalarField water = run_stage("water_index", [&] {
        bool degenerate = false;
        ScalarField w = make_water_input(raster, config.water, &degenerate);
        if (degenerate) std::cerr << "warning: input band is constant; the channel map will be empty\n";
        return w;
    });

    std::optional<BinaryMask> truth;
    if (config.ground_truth.has_value()) {
        truth = run_stage("read_ground_truth", [&] {
            const MultiBandRaster gt =
                read_raster(*config.ground_truth, config.ground_truth_format.value_or(infer_format(*config.ground_truth)));
            require_same_shape(gt.bands.front(), water, "ground truth vs input");
            BinaryMask m(water.rows(), water.cols(), 0);
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = gt.bands.front()[i] != 0.0 ? 1 : 0;
            return m;
        });
    }
    return run_pipeline_on(water, config, truth, true);
}

}  // namespace channet
