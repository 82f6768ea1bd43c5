// channet: extract channel networks from water-contrast imagery.
//
//   channet run   --input scene.tif --format geotiff --out-dir out [--gt truth.pgm] ...
//   channet synth --scene delta --out-dir fixtures
//
// `run --config FILE` reads flat "key = value" lines whose keys are the long
// flag names; flags given on the command line take precedence.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "channet/errors.hpp"
#include "channet/pipeline.hpp"
#include "channet/synthetic.hpp"

namespace {

using namespace channet;

constexpr int kUsageError = 1;
constexpr int kIoError = 2;

// Turns "key = value" lines into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) != 0) key = "--" + key;
        tokens.push_back(key);
        tokens.push_back(value);
    }
    return tokens;
}

// Pulls `--config FILE` / `--config=FILE` out of the argument list.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::vector<std::string> rest;
    std::vector<std::string> from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            from_file = config_tokens(args[++i]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            from_file = config_tokens(args[i].substr(9));
        } else {
            rest.push_back(args[i]);
        }
    }
    if (from_file.empty()) return rest;
    // Keep the subcommand name first, then file values, then explicit flags.
    std::vector<std::string> out;
    if (!rest.empty()) out.push_back(rest.front());
    out.insert(out.end(), from_file.begin(), from_file.end());
    if (rest.size() > 1) out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

struct RunOptions {
    PipelineConfig config;
    std::string format = "geotiff";
    std::string water_mode = "mndwi";
    std::string debias_mode = "per_scale";
    std::string smooth_mode = "scatter";
    std::string emit = "all";
    std::string gt;
    std::string gt_format;
    std::string fraction_basis = "image";
};

struct SynthOptions {
    std::string scene = "delta";
    std::string out_dir = ".";
    int size = 512;
    double width = 9.0;
    double angle = 0.0;
    double noise = 0.1;
    std::uint64_t seed = 7;
};

void add_run_options(CLI::App& run, RunOptions& o) {
    PipelineConfig& c = o.config;
    run.add_option("--input", c.input, "Input raster")->required();
    run.add_option("--format", o.format, "Input format: geotiff, pgm or f32raw")->capture_default_str();
    run.add_option("--water-mode", o.water_mode, "mndwi, single_band or single_band_inverted")->capture_default_str();
    run.add_option("--green-band", c.water.green_band, "Green band (1-based) for mndwi")->capture_default_str();
    run.add_option("--swir-band", c.water.swir_band, "SWIR band (1-based) for mndwi")->capture_default_str();
    run.add_option("--band", c.water.band, "Band (1-based) for single-band modes")->capture_default_str();
    run.add_option("--sigma1", c.scale.sigma1, "Finest scale in pixels")->capture_default_str();
    run.add_option("--max-scales", c.scale.num_scales, "Cap on the number of scales")->capture_default_str();
    run.add_option("--side-lobe", c.scale.side_lobe, "Scale factor a of the first-derivative term")->capture_default_str();
    run.add_option("--gamma", c.scale.gamma, "Scale-normalization exponent of the derivatives")->capture_default_str();
    run.add_option("--k", c.scale.width_scale, "Width scale factor")->capture_default_str();
    run.add_option("--smooth-iters", c.scale.smooth_iterations, "Adaptive smoothing passes")->capture_default_str();
    run.add_option("--smooth-mode", o.smooth_mode, "scatter or gather")->capture_default_str();
    run.add_option("--debias-mode", o.debias_mode, "per_scale or single_global")->capture_default_str();
    run.add_option("--epsilon-factor", c.epsilon_factor, "Hysteresis low threshold as a fraction of T")->capture_default_str();
    run.add_option("--min-fraction", c.min_fraction, "Drop components smaller than this fraction")->capture_default_str();
    run.add_option("--min-fraction-basis", o.fraction_basis, "image or mapped")->capture_default_str();
    run.add_option("--connectivity", c.connectivity, "4 or 8")->capture_default_str();
    run.add_option("--gt", o.gt, "Ground-truth mask (co-registered)");
    run.add_option("--gt-format", o.gt_format, "Ground-truth format (default: from extension)");
    run.add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
    run.add_option("--emit", o.emit, "Comma list of artifacts or 'all'")->capture_default_str();
    run.add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

PipelineConfig finish_run_config(RunOptions& o) {
    PipelineConfig c = o.config;
    c.input_format = parse_input_format(o.format);
    c.water.mode = parse_water_mode(o.water_mode);
    if (o.debias_mode == "per_scale") {
        c.scale.debias = DebiasMode::per_scale;
    } else if (o.debias_mode == "single_global") {
        c.scale.debias = DebiasMode::single_global;
    } else {
        throw std::invalid_argument("unknown debias mode '" + o.debias_mode + "'");
    }
    if (o.smooth_mode == "scatter") {
        c.scale.smooth_mode = SmoothMode::scatter;
    } else if (o.smooth_mode == "gather") {
        c.scale.smooth_mode = SmoothMode::gather;
    } else {
        throw std::invalid_argument("unknown smooth mode '" + o.smooth_mode + "'");
    }
    if (o.fraction_basis == "image") {
        c.fraction_basis = FractionBasis::image;
    } else if (o.fraction_basis == "mapped") {
        c.fraction_basis = FractionBasis::mapped;
    } else {
        throw std::invalid_argument("unknown fraction basis '" + o.fraction_basis + "'");
    }
    c.emit = parse_emit_list(o.emit);
    if (!o.gt.empty()) c.ground_truth = o.gt;
    if (!o.gt_format.empty()) c.ground_truth_format = parse_input_format(o.gt_format);
    c.validate();
    return c;
}

int do_run(RunOptions& o) {
    PipelineConfig config;
    try {
        config = finish_run_config(o);
    } catch (const std::exception& e) {
        std::cerr << "channet: " << e.what() << '\n';
        return kUsageError;
    }
    try {
        const PipelineResult r = run_pipeline(config);
        std::cerr << "scales: " << r.scales_used << ", threshold T = " << r.threshold << '\n';
        if (r.evaluation) std::cout << to_json(*r.evaluation) << '\n';
        for (const auto& p : r.written) std::cerr << "wrote " << p.string() << '\n';
        return 0;
    } catch (const StageError& e) {
        std::cerr << "channet: " << e.what() << '\n';
        return e.exit_code();
    }
}

int do_synth(const SynthOptions& o) {
    SceneSpec spec;
    if (o.scene == "delta") {
        spec = delta_scene(o.size, o.noise, o.seed);
    } else if (o.scene == "bar") {
        spec.rows = o.size;
        spec.cols = o.size;
        spec.noise_sigma = o.noise;
        spec.seed = o.seed;
        spec.bars = {centered_bar(o.size, o.size, o.width, o.angle)};
    } else {
        std::cerr << "channet: unknown scene '" << o.scene << "' (expected delta or bar)\n";
        return kUsageError;
    }
    try {
        const SyntheticScene scene = make_synthetic_scene(spec);
        std::filesystem::create_directories(o.out_dir);
        const std::filesystem::path dir(o.out_dir);
        write_raster(scene.image, dir / "image.f32", OutputFormat::f32raw);
        write_raster(scene.truth, dir / "truth.pgm", OutputFormat::pgm);
        std::cerr << "wrote " << (dir / "image.f32").string() << " and " << (dir / "truth.pgm").string() << '\n';
        return 0;
    } catch (const IoError& e) {
        std::cerr << "channet: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "channet: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel network extraction from water-contrast imagery"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    RunOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "Run the extraction pipeline");
    run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    run->add_option("--config", "Flat key = value file with default flag values");
    add_run_options(*run, run_opts);

    SynthOptions synth_opts;
    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic test scene (image.f32 + truth.pgm)");
    synth->add_option("--scene", synth_opts.scene, "delta or bar")->capture_default_str();
    synth->add_option("--out-dir", synth_opts.out_dir, "Output directory")->capture_default_str();
    synth->add_option("--size", synth_opts.size, "Image side in pixels")->capture_default_str();
    synth->add_option("--width", synth_opts.width, "Bar width (bar scene)")->capture_default_str();
    synth->add_option("--angle", synth_opts.angle, "Bar angle in degrees (bar scene)")->capture_default_str();
    synth->add_option("--noise", synth_opts.noise, "Noise sigma (unit contrast)")->capture_default_str();
    synth->add_option("--seed", synth_opts.seed, "Noise seed")->capture_default_str();

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(std::move(args));
    } catch (const IoError& e) {
        std::cerr << "channet: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "channet: " << e.what() << '\n';
        return kUsageError;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    if (*run) return do_run(run_opts);
    return do_synth(synth_opts);
}
