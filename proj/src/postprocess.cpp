#include "zvr/postprocess.hpp"

#include <cmath>
#include <cstring>

namespace zvr {

VideoTensor ToyConditionalDenoiser::raw(const VideoTensor& u, double /*c_noise*/,
                                        double sigma) const {
    if (rho_ == 0.0) return u;
    const Dims4& d = u.dims();
    const Dims4& cd = condition_.dims();
    if (cd.c != d.c || cd.h != d.h || cd.w != d.w)
        throw ShapeError("condition frame " + cd.str() + " does not match input " + d.str());
    const double c_in = edm_coeffs(sigma, sigma_data_).c_in;
    VideoTensor out(d);
    const size_t fs = u.frame_size();
    for (uint32_t t = 0; t < d.t; ++t) {
        const float* in = u.frame(t);
        float* o = out.frame(t);
        for (size_t i = 0; i < fs; ++i)
            o[i] = float((1.0 - rho_) * double(in[i]) + rho_ * c_in * double(condition_[i]));
    }
    return out;
}

namespace {

void check_steps(const EdmRunConfig& cfg) {
    if (cfg.steps < 0 || cfg.steps > cfg.schedule.levels())
        throw ValueError("edm steps must be in [0, schedule levels]");
}

}  // namespace

VideoTensor edm_invert(const VideoTensor& z0, const EdmDenoiser& den, const EdmRunConfig& cfg) {
    check_steps(cfg);
    VideoTensor z = z0;
    for (int t = 0; t < cfg.steps; ++t) {
        const double s_t = cfg.schedule.sigma_at_level(t);
        const double s_t1 = cfg.schedule.sigma_at_level(t + 1);
        const EdmCoeffs c1 = cfg.schedule.coeffs_at_level(t + 1);
        const double denom = (s_t - s_t1) * (1.0 - c1.c_skip) + s_t1;
        if (std::abs(denom) < 1e-12)
            throw ValueError("edm_invert: singular step at level " + std::to_string(t));
        const double sigma_in = cfg.uniform_indices ? s_t1 : s_t;
        const double c_in = cfg.uniform_indices
                                ? c1.c_in
                                : cfg.schedule.coeffs_at_level(t).c_in;
        const VideoTensor f = den.raw(scale(z, c_in), c1.c_noise, sigma_in);
        z = scale(lincomb(s_t1, z, (s_t - s_t1) * c1.c_out, f), 1.0 / denom);
    }
    return z;
}

VideoTensor edm_sample(const VideoTensor& zT, const EdmDenoiser& den, const EdmRunConfig& cfg) {
    check_steps(cfg);
    VideoTensor z = zT;
    for (int t = cfg.steps - 1; t >= 0; --t) {
        const double s_t = cfg.schedule.sigma_at_level(t);
        const double s_t1 = cfg.schedule.sigma_at_level(t + 1);
        if (!(s_t1 > 0.0))
            throw ValueError("edm_sample: singular step at level " + std::to_string(t));
        const EdmCoeffs c1 = cfg.schedule.coeffs_at_level(t + 1);
        const VideoTensor f = den.raw(scale(z, c1.c_in), c1.c_noise, s_t1);
        const VideoTensor denoised = lincomb(c1.c_skip, z, c1.c_out, f);
        const double ratio = (s_t - s_t1) / s_t1;
        // z + ratio * (z - denoised)
        z = lincomb(1.0 + ratio, z, -ratio, denoised);
    }
    return z;
}

VideoTensor strengthen(const VideoTensor& video, const EdmRunConfig& cfg, const ClipPlan& plan,
                       const Codec2D& codec, StrengthenTrace* trace) {
    const Dims4& d = video.dims();
    if (plan.clip_len < 2) throw ValueError("clip_len must be >= 2");
    if (d.t < 2) throw ValueError("strengthen needs at least 2 frames");

    VideoTensor out(d);
    const size_t fs = video.frame_size();

    VideoTensor condition({1, d.c, d.h, d.w});
    std::memcpy(condition.data(), video.frame(0), fs * 4);

    int start = 0;
    bool first_clip = true;
    while (start + 1 < int(d.t)) {
        const int end = std::min(start + plan.clip_len - 1, int(d.t) - 1);
        const int len = end - start + 1;

        VideoTensor clip({uint32_t(len), d.c, d.h, d.w});
        std::memcpy(clip.frame(0), condition.data(), fs * 4);
        for (int f = 1; f < len; ++f)
            std::memcpy(clip.frame(uint32_t(f)), video.frame(uint32_t(start + f)), fs * 4);

        if (trace != nullptr) {
            VideoTensor cond_frame({1, d.c, d.h, d.w});
            std::memcpy(cond_frame.data(), clip.frame(0), fs * 4);
            trace->clip_conditions.push_back(std::move(cond_frame));
            trace->clip_ranges.emplace_back(start, end);
        }

        VideoTensor cond_pixel({1, d.c, d.h, d.w});
        std::memcpy(cond_pixel.data(), clip.frame(0), fs * 4);
        const VideoTensor cond_latent = codec.encode(cond_pixel);

        const ToyConditionalDenoiser inverter(cond_latent, 0.0, cfg.schedule.sigma_data);
        const ToyConditionalDenoiser sampler(cond_latent, cfg.condition_weight,
                                             cfg.schedule.sigma_data);

        const VideoTensor latent = codec.encode(clip);
        const VideoTensor noisy = edm_invert(latent, inverter, cfg);
        const VideoTensor resampled = edm_sample(noisy, sampler, cfg);
        const VideoTensor processed = codec.decode(resampled);

        const int emit_from = first_clip ? 0 : 1;
        for (int f = emit_from; f < len; ++f)
            std::memcpy(out.frame(uint32_t(start + f)), processed.frame(uint32_t(f)), fs * 4);

        std::memcpy(condition.data(), processed.frame(uint32_t(len - 1)), fs * 4);
        start = end;
        first_clip = false;
    }
    return out;
}

}  // namespace zvr
