#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "channet/centerline.hpp"
#include "channet/channelmap.hpp"
#include "channet/evaluate.hpp"
#include "channet/raster_io.hpp"
#include "channet/singularity.hpp"
#include "channet/water_index.hpp"

namespace channet {

/// Files the pipeline can write. The stem doubles as the --emit key.
enum class Artifact {
    water_input,  ///< f32raw
    psi_max,      ///< f32raw
    psi_smooth,   ///< f32raw
    theta,        ///< f32raw
    scale_index,  ///< f32raw
    width,        ///< f32raw
    centerline,   ///< pgm + png
    channel_map,  ///< pgm + png
    evaluation,   ///< json
};

const std::vector<Artifact>& all_artifacts();
std::string artifact_name(Artifact a);
/// Parses a comma list of artifact names; "all" selects everything.
std::set<Artifact> parse_emit_list(const std::string& list);

struct PipelineConfig {
    std::filesystem::path input;
    InputFormat input_format = InputFormat::geotiff;
    WaterInputSpec water;

    ScaleSpaceParams scale;  ///< scale.num_scales is the cap; the run uses min(cap, num_scales(M, sigma1))

    double epsilon_factor = 0.1;
    double min_fraction = 0.001;
    FractionBasis fraction_basis = FractionBasis::image;
    int connectivity = 8;

    std::filesystem::path out_dir = ".";
    std::optional<std::filesystem::path> ground_truth;
    std::optional<InputFormat> ground_truth_format;  ///< inferred from the extension when unset

    std::set<Artifact> emit{all_artifacts().begin(), all_artifacts().end()};
    int threads = 0;  ///< 0 leaves the OpenMP default

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

struct PipelineResult {
    ScalarField water_input;
    SingularityResponse response;
    ScalarField psi_smooth;
    ScalarField suppressed;
    double threshold = 0.0;
    BinaryMask centerline;
    BinaryMask channel_map;
    std::optional<ConfusionMatrix> evaluation;
    int scales_used = 0;
    std::vector<std::filesystem::path> written;
};

/// Reads the input, runs every stage and writes the selected artifacts to
/// config.out_dir as each stage finishes. Failures are rethrown as StageError
/// tagged with the stage name; files from completed stages stay on disk.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Same stages starting from an in-memory water-positive image. Artifacts are
/// written only when `write_artifacts` is set.
PipelineResult run_pipeline_on(const ScalarField& water_input, const PipelineConfig& config,
                               const std::optional<BinaryMask>& truth = std::nullopt, bool write_artifacts = false);

/// Scale count used for an image: min(cap, num_scales(min_dim, sigma1)).
int effective_scale_count(int rows, int cols, const ScaleSpaceParams& params);

}  // namespace channet
