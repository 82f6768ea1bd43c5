#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "channet/errors.hpp"
#include "channet/pipeline.hpp"
#include "channet/synthetic.hpp"

using namespace channet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "channet_pipeline_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PipelineConfig single_band_config(const fs::path& input, const fs::path& out) {
    PipelineConfig cfg;
    cfg.input = input;
    cfg.input_format = InputFormat::f32raw;
    cfg.water.mode = WaterMode::single_band;
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("emit list parsing") {
    CHECK(parse_emit_list("all").size() == all_artifacts().size());
    CHECK(parse_emit_list("centerline, width") == std::set<Artifact>{Artifact::centerline, Artifact::width});
    CHECK(parse_emit_list("").empty());
    CHECK_THROWS_AS(parse_emit_list("centreline"), std::invalid_argument);
    for (const Artifact a : all_artifacts()) CHECK(parse_emit_list(artifact_name(a)) == std::set<Artifact>{a});
}

TEST_CASE("config validation") {
    PipelineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilon_factor = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.connectivity = 6;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.min_fraction = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("the scale count is capped by the image size") {
    ScaleSpaceParams p;
    CHECK(effective_scale_count(512, 600, p) == 13);
    CHECK(effective_scale_count(4096, 4096, p) == 16);
    p.num_scales = 4;
    CHECK(effective_scale_count(512, 512, p) == 4);
}

TEST_CASE("emitting only the centerline writes only its files") {
    const fs::path dir = fresh_dir("emit");
    const SyntheticScene scene = make_synthetic_scene(delta_scene(128));
    write_raster(scene.image, dir / "in.f32", OutputFormat::f32raw);
    PipelineConfig cfg = single_band_config(dir / "in.f32", dir / "out");
    cfg.emit = {Artifact::centerline};
    const PipelineResult r = run_pipeline(cfg);
    std::set<std::string> files;
    for (const auto& e : fs::directory_iterator(dir / "out")) files.insert(e.path().filename().string());
    CHECK(files == std::set<std::string>{"centerline.pgm", "centerline.png"});
    CHECK(r.written.size() == 2);
}

TEST_CASE("missing input is an io error tagged with the read stage") {
    PipelineConfig cfg = single_band_config(fresh_dir("missing") / "nope.f32", fresh_dir("missing_out"));
    try {
        run_pipeline(cfg);
        FAIL("expected a StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "read_input");
        CHECK(e.kind() == StageError::Kind::io);
        CHECK(e.exit_code() == 2);
        CHECK(std::string(e.what()).rfind("[read_input]", 0) == 0);
    }
}

TEST_CASE("a featureless image fails at the centerline stage and keeps earlier artifacts") {
    const fs::path dir = fresh_dir("flat");
    write_raster(ScalarField(64, 64, 3.0), dir / "flat.f32", OutputFormat::f32raw);
    const PipelineConfig cfg = single_band_config(dir / "flat.f32", dir / "out");
    try {
        run_pipeline(cfg);
        FAIL("expected a StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "centerline");
        CHECK(e.kind() == StageError::Kind::degenerate);
        CHECK(e.exit_code() == 3);
    }
    CHECK(fs::exists(dir / "out" / "psi_max.f32"));
    CHECK(fs::exists(dir / "out" / "psi_smooth.f32"));
    CHECK_FALSE(fs::exists(dir / "out" / "centerline.pgm"));
}

TEST_CASE("ground truth adds an evaluation report") {
    const fs::path dir = fresh_dir("truth");
    const SyntheticScene scene = make_synthetic_scene(delta_scene(128));
    write_raster(scene.image, dir / "in.f32", OutputFormat::f32raw);
    write_raster(scene.truth, dir / "truth.pgm", OutputFormat::pgm);
    PipelineConfig cfg = single_band_config(dir / "in.f32", dir / "out");
    cfg.ground_truth = dir / "truth.pgm";
    const PipelineResult r = run_pipeline(cfg);
    REQUIRE(r.evaluation.has_value());
    CHECK(r.evaluation->total() == 128 * 128);
    CHECK(slurp(dir / "out" / "evaluation.json") == to_json(*r.evaluation) + "\n");

    write_raster(ScalarField(10, 10, 1.0), dir / "small.f32", OutputFormat::f32raw);
    cfg.ground_truth = dir / "small.f32";
    CHECK_THROWS_AS(run_pipeline(cfg), StageError);
}

TEST_CASE("artifacts do not depend on the thread count") {
    const fs::path dir = fresh_dir("threads");
    const SyntheticScene scene = make_synthetic_scene(delta_scene(128));
    write_raster(scene.image, dir / "in.f32", OutputFormat::f32raw);
    PipelineConfig one = single_band_config(dir / "in.f32", dir / "t1");
    one.threads = 1;
    PipelineConfig many = single_band_config(dir / "in.f32", dir / "t8");
    many.threads = 8;
    const PipelineResult a = run_pipeline(one);
    run_pipeline(many);
    for (const fs::path& p : a.written) CHECK(slurp(p) == slurp(dir / "t8" / p.filename()));
}

}  // TEST_SUITE
