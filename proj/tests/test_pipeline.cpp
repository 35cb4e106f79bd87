#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "zvr/pipeline.hpp"
#include "zvr/quality.hpp"
#include "zvr/rng.hpp"

using namespace zvr;

namespace {

bool bit_equal(const VideoTensor& a, const VideoTensor& b) {
    return a.dims() == b.dims() && std::memcmp(a.data(), b.data(), a.size() * 4) == 0;
}

// small, fast configuration for pipeline tests
PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.ddim_steps = 10;
    cfg.search.every_k = 5;
    cfg.search.m = 2;
    cfg.postprocess_enabled = false;
    cfg.clip_len = 4;
    return cfg;
}

TaskSpec sr_spec(uint32_t t = 4, uint32_t h = 16, uint32_t w = 16, uint64_t seed = 1) {
    const SyntheticClip clip = generate_synthetic(SyntheticKind::MovingSquare, t, h, w, seed);
    TaskSpec spec;
    spec.task = TaskKind::Sr4x;
    spec.op = Downsample{4};
    spec.degraded = apply_forward(spec.op, clip.clean);
    spec.ground_truth = clip.clean;
    spec.flow = clip.flow;
    return spec;
}

}  // namespace

TEST_CASE("synthetic fixtures") {
    SUBCASE("static clip has zero flow and zero warping error") {
        const SyntheticClip clip = generate_synthetic(SyntheticKind::Static, 4, 8, 8, 3);
        CHECK(max_abs(clip.flow.data) == 0.0);
        CHECK(warping_error(clip.clean, clip.flow) == doctest::Approx(0.0));
    }
    SUBCASE("moving square carries its velocity in the flow field") {
        const SyntheticClip clip = generate_synthetic(SyntheticKind::MovingSquare, 4, 16, 16, 4);
        CHECK(warping_error(clip.clean, clip.flow) <= 1e-6);
        // flow is nonzero somewhere on the square
        CHECK(max_abs(clip.flow.data) == doctest::Approx(1.0));
    }
    SUBCASE("same seed reproduces the clip bit-exactly") {
        const SyntheticClip a = generate_synthetic(SyntheticKind::MovingSquare, 5, 16, 16, 7);
        const SyntheticClip b = generate_synthetic(SyntheticKind::MovingSquare, 5, 16, 16, 7);
        CHECK(bit_equal(a.clean, b.clean));
        CHECK(bit_equal(a.flow.data, b.flow.data));
    }
    SUBCASE("ramp is static") {
        const SyntheticClip clip = generate_synthetic(SyntheticKind::Ramp, 3, 8, 8, 0);
        CHECK(max_abs(clip.flow.data) == 0.0);
        for (uint32_t t = 1; t < 3; ++t)
            CHECK(std::memcmp(clip.clean.frame(t), clip.clean.frame(0),
                              clip.clean.frame_size() * 4) == 0);
    }
}

TEST_CASE("zero fusion weights reproduce the single-branch baseline bit-exactly") {
    TaskSpec spec = sr_spec();
    PipelineConfig cfg = small_config();
    cfg.search.fixed_mode = true;
    cfg.search.initial_centers = {0.0, 0.0, 0.0};
    cfg.fusion_enabled = true;
    const RestorationResult fused = run_restoration(spec, cfg);

    PipelineConfig base = cfg;
    base.fusion_enabled = false;
    const RestorationResult single = run_restoration(spec, base);

    CHECK(bit_equal(fused.video, single.video));
}

TEST_CASE("identical seeds give bit-identical outputs and traces") {
    TaskSpec spec = sr_spec();
    PipelineConfig cfg = small_config();
    cfg.seed = 123;
    const RestorationResult a = run_restoration(spec, cfg);
    const RestorationResult b = run_restoration(spec, cfg);
    CHECK(bit_equal(a.video, b.video));
    REQUIRE(a.report.lambda_trace.size() == b.report.lambda_trace.size());
    for (size_t i = 0; i < a.report.lambda_trace.size(); ++i) {
        CHECK(a.report.lambda_trace[i].ratios.lambda_f1 ==
              b.report.lambda_trace[i].ratios.lambda_f1);
        CHECK(a.report.lambda_trace[i].ratios.lambda_f ==
              b.report.lambda_trace[i].ratios.lambda_f);
    }
    REQUIRE(a.report.candidates.size() == b.report.candidates.size());
    for (size_t i = 0; i < a.report.candidates.size(); ++i)
        CHECK(a.report.candidates[i].report.quality == b.report.candidates[i].report.quality);
}

TEST_CASE("guidance halves the data-fidelity residual on the toy SR task") {
    const SyntheticClip clip = generate_synthetic(SyntheticKind::MovingSquare, 8, 32, 32, 11);
    TaskSpec spec;
    spec.task = TaskKind::Sr4x;
    spec.op = Downsample{4};
    spec.degraded = apply_forward(spec.op, clip.clean);
    spec.ground_truth = clip.clean;
    spec.flow = clip.flow;

    PipelineConfig cfg;
    cfg.ddim_steps = 50;
    cfg.postprocess_enabled = false;
    cfg.search.fixed_mode = true;

    PipelineConfig unguided = cfg;
    unguided.guidance.steps_per_t = 0;

    const RestorationResult guided = run_restoration(spec, cfg);
    const RestorationResult free_run = run_restoration(spec, unguided);
    CHECK(guided.report.data_fidelity <= 0.5 * free_run.report.data_fidelity);
}

TEST_CASE("lambda trace is piecewise constant with breakpoints at search events") {
    TaskSpec spec = sr_spec(4, 16, 16, 21);
    PipelineConfig cfg = small_config();
    cfg.ddim_steps = 10;
    cfg.search.every_k = 5;
    cfg.search.m = 2;
    const RestorationResult res = run_restoration(spec, cfg);
    REQUIRE(res.report.lambda_trace.size() == 10);
    for (size_t i = 1; i < 10; ++i) {
        const auto& prev = res.report.lambda_trace[i - 1].ratios;
        const auto& cur = res.report.lambda_trace[i].ratios;
        if (i % 5 != 0) {
            CHECK(cur.lambda_f1 == prev.lambda_f1);
            CHECK(cur.lambda_f2 == prev.lambda_f2);
            CHECK(cur.lambda_f == prev.lambda_f);
        }
    }
    // search events at steps 0 and 5 -> 2 events x 3 lambdas x 3 candidates
    CHECK(res.report.candidates.size() == 2 * 3 * 3);
}

TEST_CASE("fixed mode holds the initial ratios at every timestep") {
    TaskSpec spec = sr_spec(4, 16, 16, 22);
    PipelineConfig cfg = small_config();
    cfg.search.fixed_mode = true;
    const RestorationResult res = run_restoration(spec, cfg);
    CHECK(res.report.candidates.empty());
    for (const LambdaRow& row : res.report.lambda_trace) {
        CHECK(row.ratios.lambda_f1 == doctest::Approx(0.1));
        CHECK(row.ratios.lambda_f2 == doctest::Approx(0.01));
        CHECK(row.ratios.lambda_f == doctest::Approx(0.5));
    }
}

TEST_CASE("deblur task runs end to end") {
    const SyntheticClip clip = generate_synthetic(SyntheticKind::MovingSquare, 6, 16, 16, 31);
    TaskSpec spec;
    spec.task = TaskKind::DeblurTemporal;
    spec.op = TemporalUniformBlur{5};
    spec.degraded = apply_forward(spec.op, clip.clean);
    spec.ground_truth = clip.clean;
    spec.flow = clip.flow;
    PipelineConfig cfg = small_config();
    const RestorationResult res = run_restoration(spec, cfg);
    CHECK(res.video.dims() == clip.clean.dims());
    CHECK(all_finite(res.video));
    CHECK(res.report.psnr_db.has_value());
}

TEST_CASE("lowlight task fits the degradation factor during sampling") {
    const SyntheticClip clip = generate_synthetic(SyntheticKind::MovingSquare, 4, 16, 16, 41);
    VideoTensor mask({1, 3, 16, 16}, 0.05f);
    const DegradationOp true_op = LowLight{0.3, mask};
    TaskSpec spec;
    spec.task = TaskKind::LowLightEnhance;
    spec.op = LowLight{1.0, VideoTensor({1, 3, 16, 16})};
    spec.degraded = apply_forward(true_op, clip.clean);
    spec.ground_truth = clip.clean;
    spec.flow = clip.flow;

    PipelineConfig cfg = small_config();
    cfg.lowlight_iters = 400;
    cfg.lowlight_lr = 1e-4;
    const RestorationResult res = run_restoration(spec, cfg);
    CHECK(all_finite(res.video));
    // the fitted factor should move from 1.0 toward the true 0.3
    CHECK(res.report.lowlight_f < 0.7);
    CHECK(res.report.lowlight_f > 0.05);
}

TEST_CASE("postprocess toggle is reflected in the report") {
    TaskSpec spec = sr_spec(4, 16, 16, 51);
    PipelineConfig cfg = small_config();
    cfg.postprocess_enabled = true;
    cfg.clip_len = 4;
    const RestorationResult on = run_restoration(spec, cfg);
    CHECK(on.report.postprocess_ran);
    cfg.postprocess_enabled = false;
    const RestorationResult off = run_restoration(spec, cfg);
    CHECK_FALSE(off.report.postprocess_ran);
}

TEST_CASE("dimension mismatch aborts with a stage-tagged error") {
    TaskSpec spec = sr_spec();
    spec.degraded = VideoTensor({4, 3, 3, 3});  // not divisible by the factor
    PipelineConfig cfg = small_config();
    CHECK_THROWS_AS(run_restoration(spec, cfg), PipelineError);
}

TEST_CASE("baseline equivalence holds under stochastic stepping too") {
    TaskSpec spec = sr_spec(4, 16, 16, 61);
    PipelineConfig cfg = small_config();
    cfg.eta = 0.2;
    cfg.seed = 5;
    cfg.search.fixed_mode = true;
    cfg.search.initial_centers = {0.0, 0.0, 0.0};
    const RestorationResult fused = run_restoration(spec, cfg);
    PipelineConfig base = cfg;
    base.fusion_enabled = false;
    const RestorationResult single = run_restoration(spec, base);
    CHECK(bit_equal(fused.video, single.video));
}
