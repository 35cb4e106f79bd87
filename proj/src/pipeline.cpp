#include "zvr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>

#include "zvr/quality.hpp"
#include "zvr/rng.hpp"

namespace zvr {

namespace {

// rng stream ids
constexpr uint64_t kStreamInitLatent = 1;
constexpr uint64_t kStreamHeteroInit = 2;
constexpr uint64_t kStreamStepNoise = 3;
constexpr uint64_t kStreamHeteroStepNoise = 4;

struct Stage {
    const char* name;
};

template <typename F>
auto stage(const char* name, F&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

FlowField zero_flow(const Dims4& video) {
    return FlowField(VideoTensor({video.t - 1, 2, video.h, video.w}));
}

}  // namespace

const char* task_name(TaskKind k) {
    switch (k) {
        case TaskKind::Sr4x: return "sr4x";
        case TaskKind::DeblurTemporal: return "deblur_temporal";
        case TaskKind::LowLightEnhance: return "lowlight";
    }
    return "?";
}

TaskKind task_from_name(const std::string& name) {
    if (name == "sr4x") return TaskKind::Sr4x;
    if (name == "deblur_temporal") return TaskKind::DeblurTemporal;
    if (name == "lowlight") return TaskKind::LowLightEnhance;
    throw ConfigError("unknown task: " + name);
}

SyntheticKind synthetic_from_name(const std::string& name) {
    if (name == "moving_square") return SyntheticKind::MovingSquare;
    if (name == "ramp") return SyntheticKind::Ramp;
    if (name == "static") return SyntheticKind::Static;
    throw ConfigError("unknown synthetic kind: " + name);
}

VideoTensor initial_estimate(const DegradationOp& op, const VideoTensor& degraded) {
    if (const auto* ds = std::get_if<Downsample>(&op)) {
        const double k2 = double(ds->factor) * double(ds->factor);
        return scale(apply_adjoint(op, degraded), k2);
    }
    return degraded;
}

SyntheticClip generate_synthetic(SyntheticKind kind, uint32_t t, uint32_t h, uint32_t w,
                                 uint64_t seed) {
    if (t < 1 || h < 1 || w < 1) throw ValueError("synthetic dims must be positive");
    const uint32_t c = 3;
    SyntheticClip clip;
    clip.clean = VideoTensor({t, c, h, w});
    clip.flow = t > 1 ? FlowField(VideoTensor({t - 1, 2, h, w})) : FlowField(VideoTensor({0, 2, h, w}));

    if (kind == SyntheticKind::Ramp) {
        for (uint32_t f = 0; f < t; ++f)
            for (uint32_t ch = 0; ch < c; ++ch)
                for (uint32_t y = 0; y < h; ++y)
                    for (uint32_t x = 0; x < w; ++x) {
                        const double ry = h > 1 ? double(y) / double(h - 1) : 0.0;
                        const double rx = w > 1 ? double(x) / double(w - 1) : 0.0;
                        clip.clean.at(f, ch, y, x) = float(0.5 * (rx + ry));
                    }
        return clip;
    }

    if (kind == SyntheticKind::Static) {
        Rng rng(seed, 77);
        VideoTensor frame({1, c, h, w});
        for (size_t i = 0; i < frame.size(); ++i) frame[i] = float(rng.uniform());
        for (uint32_t f = 0; f < t; ++f)
            std::memcpy(clip.clean.frame(f), frame.data(), frame.size() * 4);
        return clip;
    }

    // moving square over a flat background, one pixel per frame, bouncing
    Rng rng(seed, 78);
    const float bg = 0.15f;
    const float colors[3] = {0.9f, 0.6f, 0.3f};
    const uint32_t side = std::max<uint32_t>(2, std::min(h, w) / 4);
    int x0 = w > side ? int(rng.next_u64() % (w - side)) : 0;
    int y0 = h > side ? int((h - side) / 2) : 0;
    int vx = 1;

    for (size_t i = 0; i < clip.clean.size(); ++i) clip.clean[i] = bg;

    std::vector<int> xs(t), ys(t), vxs(t);
    for (uint32_t f = 0; f < t; ++f) {
        xs[f] = x0;
        ys[f] = y0;
        for (uint32_t ch = 0; ch < c; ++ch)
            for (uint32_t dy = 0; dy < side; ++dy)
                for (uint32_t dx = 0; dx < side; ++dx)
                    clip.clean.at(f, ch, uint32_t(y0) + dy, uint32_t(x0) + dx) = colors[ch];
        // advance with bounce
        if (w > side) {
            if (x0 + vx < 0 || uint32_t(x0 + vx) > w - side) vx = -vx;
            vxs[f] = vx;
            x0 += vx;
        } else {
            vxs[f] = 0;
        }
    }

    // flow carries the velocity over the union of the square's old and new
    // positions: the new rectangle warps back onto the square, the vacated
    // strip warps onto background one step behind it; elsewhere the flat
    // background makes zero flow exact
    for (uint32_t f = 0; f + 1 < t; ++f) {
        const int dx = xs[f + 1] - xs[f];
        for (int ox : {xs[f], xs[f + 1]}) {
            const int oy = ys[f];
            for (uint32_t dyq = 0; dyq < side; ++dyq)
                for (uint32_t dxq = 0; dxq < side; ++dxq) {
                    clip.flow.data.at(f, 0, uint32_t(oy) + dyq, uint32_t(ox) + dxq) = 0.0f;
                    clip.flow.data.at(f, 1, uint32_t(oy) + dyq, uint32_t(ox) + dxq) = float(dx);
                }
        }
    }
    return clip;
}

namespace {

struct PipelineState {
    DdpmSchedule sched_image;
    DdpmSchedule sched_hetero;
    DdimGrid grid_image;
    DdimGrid grid_hetero;
    Codec2D codec2d;
    Codec3D codec3d;
    std::shared_ptr<GaussianPriorDenoiser> den_image;
    std::shared_ptr<Denoiser> den_homo;
    std::shared_ptr<Denoiser> den_hetero;
};

}  // namespace

RestorationResult run_restoration(const TaskSpec& spec, const PipelineConfig& cfg) {
    const auto start_time = std::chrono::steady_clock::now();

    check_finite(spec.degraded, "degraded input");

    PipelineState st{make_linear_schedule(cfg.n_train, cfg.beta_start, cfg.beta_end),
                     make_linear_schedule(cfg.n_train, cfg.hetero_beta_start, cfg.hetero_beta_end),
                     make_uniform_grid(cfg.n_train, cfg.ddim_steps, cfg.eta, cfg.seed),
                     make_uniform_grid(cfg.n_train, cfg.ddim_steps, cfg.eta, cfg.seed),
                     Codec2D(cfg.codec2d_block, cfg.codec2d_keep),
                     Codec3D(cfg.codec3d_block, cfg.codec3d_group, cfg.codec3d_keep),
                     nullptr,
                     nullptr,
                     nullptr};

    // full-resolution working estimate and latent prior means
    const VideoTensor estimate = stage("init", [&] {
        return initial_estimate(spec.op, spec.degraded);
    });
    const Dims4 pixel_dims = estimate.dims();
    if (spec.task != TaskKind::LowLightEnhance) {
        const Dims4 expect = output_dims(spec.op, pixel_dims);
        if (!(expect == spec.degraded.dims()))
            throw PipelineError("init", "operator output dims " + expect.str() +
                                            " do not match degraded input " +
                                            spec.degraded.dims().str());
    }

    // prior means: a neutral mid-gray video keeps the measurement path in the
    // guidance term; "observation" pins the prior to the upsampled input
    const VideoTensor prior_pixels =
        cfg.prior == PriorKind::Gray ? VideoTensor(pixel_dims, 0.5f) : estimate;
    const VideoTensor mean_image = stage("init", [&] { return st.codec2d.encode(prior_pixels); });
    const VideoTensor mean_hetero = stage("init", [&] { return st.codec3d.encode(prior_pixels); });

    const auto odd_window = [](int window, uint32_t frames) {
        int w = std::min(window, int(frames));
        if (w % 2 == 0) --w;
        return std::max(w, 1);
    };

    st.den_image = std::make_shared<GaussianPriorDenoiser>(mean_image, cfg.ir_prior_var,
                                                           st.sched_image, false);
    st.den_homo = std::make_shared<TemporalSmootherDenoiser>(
        std::make_shared<GaussianPriorDenoiser>(mean_image, cfg.video_prior_var, st.sched_image,
                                                true),
        cfg.homo_kappa, odd_window(cfg.homo_window, mean_image.dims().t), st.sched_image);
    st.den_hetero = std::make_shared<TemporalSmootherDenoiser>(
        std::make_shared<GaussianPriorDenoiser>(mean_hetero, cfg.video_prior_var,
                                                st.sched_hetero, true),
        cfg.hetero_kappa, odd_window(cfg.hetero_window, mean_hetero.dims().t), st.sched_hetero);

    // flow for the reward: ground-truth flow when provided, zero flow otherwise
    const FlowField reward_flow =
        spec.flow.has_value() ? *spec.flow : zero_flow(pixel_dims);

    RunReport report;
    report.seed = cfg.seed;

    // ---- branch initialization ----
    Rng init_rng(cfg.seed, kStreamInitLatent);
    VideoTensor z_image = init_rng.normal_tensor(st.codec2d.latent_dims(pixel_dims));
    VideoTensor z_homo = z_image;  // shared initial noisy latents
    VideoTensor z_hetero;
    if (cfg.fusion_enabled) {
        // the heterogeneous trajectory starts from the encoded degraded video,
        // noised up to the first grid level
        Rng hetero_rng(cfg.seed, kStreamHeteroInit);
        z_hetero = stage("hetero-init", [&] {
            const VideoTensor z0_hetero = st.codec3d.encode(estimate);
            const VideoTensor eps = hetero_rng.normal_tensor(z0_hetero.dims());
            return add_noise(z0_hetero, st.grid_hetero.timesteps[0], eps, st.sched_hetero);
        });
    }

    LowLightParams ll;
    ll.lr = cfg.lowlight_lr;
    ll.iters = cfg.lowlight_iters;

    FusionRatios ratios{cfg.search.initial_centers[0], cfg.search.initial_centers[1],
                        cfg.search.initial_centers[2]};
    std::array<double, 3> centers = cfg.search.initial_centers;
    double radius = cfg.search.r0;

    SharpnessWarpReward reward;
    // separate stream per branch so the image trajectory's draws do not
    // depend on whether the video branches run
    Rng step_rng(cfg.seed, kStreamStepNoise);
    Rng hetero_step_rng(cfg.seed, kStreamHeteroStepNoise);
    const VideoTensor no_noise(z_image.dims());

    // ---- reverse diffusion ----
    for (int i = 0; i < st.grid_image.steps(); ++i) {
        const int t = st.grid_image.timesteps[size_t(i)];
        const int t_prev = st.grid_image.prev_of(i);

        // denoise + DDIM step, every branch
        stage("ddim", [&] {
            VideoTensor eps = st.den_image->predict_noise(z_image, t);
            VideoTensor noise = cfg.eta > 0.0 ? step_rng.normal_tensor(z_image.dims()) : no_noise;
            z_image = ddim_step(z_image, eps, t, t_prev, st.grid_image, st.sched_image, noise);
            if (cfg.fusion_enabled) {
                VideoTensor eps_h = st.den_homo->predict_noise(z_homo, t);
                z_homo = ddim_step(z_homo, eps_h, t, t_prev, st.grid_image, st.sched_image,
                                   noise);
                VideoTensor eps_v = st.den_hetero->predict_noise(z_hetero, t);
                VideoTensor noise_v = cfg.eta > 0.0 ? hetero_step_rng.normal_tensor(z_hetero.dims())
                                                    : VideoTensor(z_hetero.dims());
                z_hetero = ddim_step(z_hetero, eps_v, t, t_prev, st.grid_hetero, st.sched_hetero,
                                     noise_v);
            }
            return 0;
        });

        // guidance on the image branch, applied to the post-step latent
        stage("guidance", [&] {
            if (cfg.guidance.steps_per_t <= 0) return 0;
            if (spec.task == TaskKind::LowLightEnhance) {
                const VideoTensor z0_hat =
                    t_prev == 0 ? z_image
                                : predict_z0(z_image, st.den_image->predict_noise(z_image, t_prev),
                                             t_prev, st.sched_image);
                ll = lowlight_fit(spec.degraded, z0_hat, st.codec2d, ll);
                z_image = guided_update(
                    z_image,
                    [&](const VideoTensor& z) {
                        return lowlight_gradient(z, *st.den_image, t_prev, spec.degraded, ll.f,
                                                 ll.mask, st.codec2d, st.sched_image,
                                                 cfg.guidance);
                    },
                    cfg.guidance);
            } else {
                z_image = guided_update(
                    z_image,
                    [&](const VideoTensor& z) {
                        return psld_gradient(z, *st.den_image, t_prev, spec.degraded, spec.op,
                                             st.codec2d, st.sched_image, cfg.guidance);
                    },
                    cfg.guidance);
            }
            return 0;
        });

        if (cfg.fusion_enabled) {
            // conversions at the post-step timestep
            const VideoTensor z_het_to_img = stage("convert", [&] {
                return convert_hetero_to_image(z_hetero, *st.den_hetero, t_prev, st.codec3d,
                                               st.codec2d, st.sched_image, st.sched_hetero);
            });

            const auto latent_to_video = [&](const VideoTensor& z) {
                const VideoTensor zhat0 =
                    t_prev == 0
                        ? z
                        : predict_z0(z, st.den_image->predict_noise(z, t_prev), t_prev,
                                     st.sched_image);
                return st.codec2d.decode(zhat0);
            };

            if (!cfg.search.fixed_mode && i % cfg.search.every_k == 0) {
                stage("search", [&] {
                    SearchEventResult ev =
                        run_search_step(z_image, z_homo, z_het_to_img, latent_to_video, reward,
                                        &reward_flow, centers, radius, cfg.search);
                    ratios = ev.ratios;
                    centers = ev.centers;
                    radius = ev.radius_next;
                    for (int which = 0; which < 3; ++which)
                        for (const CandidateReport& rep : ev.reports[size_t(which)])
                            report.candidates.push_back(CandidateRow{i, which, rep});
                    return 0;
                });
            }

            stage("fusion", [&] {
                const VideoTensor z_img_to_het =
                    convert_image_to_hetero(z_image, *st.den_image, t_prev, st.codec2d,
                                            st.codec3d, st.sched_image, st.sched_hetero);
                const VideoTensor z_f1 = fuse_homologous(z_image, z_homo, ratios.lambda_f1);
                const VideoTensor z_next = fuse_final(z_image, z_f1, z_het_to_img, ratios);
                z_hetero = fuse_for_hetero(z_hetero, z_img_to_het, ratios.lambda_f2);
                z_homo = z_f1;
                z_image = z_next;
                return 0;
            });
        }

        report.lambda_trace.push_back(LambdaRow{i, t, ratios});
    }

    // ---- decode + post-process ----
    VideoTensor restored = stage("decode", [&] { return st.codec2d.decode(z_image); });
    check_finite(restored, "restored video");

    report.data_fidelity = stage("metrics", [&] {
        if (spec.task == TaskKind::LowLightEnhance) {
            report.lowlight_f = ll.f;
            if (ll.mask.empty()) return 0.0;
            return lowlight_objective(spec.degraded, restored, ll.f, ll.mask);
        }
        return sum_squares(sub(spec.degraded, apply_forward(spec.op, restored)));
    });

    if (cfg.postprocess_enabled) {
        restored = stage("postprocess", [&] {
            EdmRunConfig pp;
            pp.schedule = make_karras_schedule(cfg.edm_steps, cfg.edm_sigma_min,
                                               cfg.edm_sigma_max, cfg.edm_sigma_data);
            pp.steps = cfg.edm_steps;
            pp.condition_weight = cfg.postprocess_rho;
            pp.uniform_indices = cfg.edm_uniform_indices;
            ClipPlan plan{cfg.clip_len};
            Codec2D pp_codec(2, 1.0);
            return strengthen(restored, pp, plan, pp_codec);
        });
        report.postprocess_ran = true;
    }

    stage("metrics", [&] {
        report.sharpness = sharpness_proxy(restored);
        if (spec.ground_truth.has_value()) {
            report.psnr_db = psnr(restored, *spec.ground_truth);
            report.ssim_score = ssim(restored, *spec.ground_truth);
        }
        if (restored.dims().t > 1) report.warp_error = warping_error(restored, reward_flow);
        return 0;
    });

    report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start_time)
                            .count();

    return RestorationResult{std::move(restored), std::move(report)};
}

}  // namespace zvr
