#ifndef ZVR_DENOISER_HPP
#define ZVR_DENOISER_HPP

#include <memory>
#include <optional>

#include "zvr/schedule.hpp"
#include "zvr/tensor.hpp"

namespace zvr {

// Noise predictor over DDPM timesteps. Implementations are immutable and
// predictions are pure functions of (z_t, t).
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual VideoTensor predict_noise(const VideoTensor& z_t, int t) const = 0;

    // Image models predict frame-by-frame, video models see the whole clip.
    virtual bool whole_clip() const = 0;

    // Scalar c such that d zhat0 / d z_t = c * I when the denoiser's zhat0 map
    // is affine with a scalar linear part; enables analytic guidance gradients.
    virtual std::optional<double> z0_linear_coeff(int /*t*/) const { return std::nullopt; }
};

// Exactness test double: predicts the noise consistent with (z_t, t, target),
// so predict_z0 of its output recovers the target exactly.
class OracleDenoiser : public Denoiser {
public:
    OracleDenoiser(VideoTensor target, DdpmSchedule sched)
        : target_(std::move(target)), sched_(std::move(sched)) {}

    VideoTensor predict_noise(const VideoTensor& z_t, int t) const override;
    bool whole_clip() const override { return true; }
    std::optional<double> z0_linear_coeff(int) const override { return 0.0; }

    const VideoTensor& target() const { return target_; }

private:
    VideoTensor target_;
    DdpmSchedule sched_;
};

// Posterior-mean predictor for the prior z0 ~ N(mean, var * I):
//   E[z0|z_t] = (sqrt(abar)*var*z_t + (1-abar)*mean) / (abar*var + 1-abar)
// returned as the consistent eps prediction.
class GaussianPriorDenoiser : public Denoiser {
public:
    GaussianPriorDenoiser(VideoTensor mean, double var, DdpmSchedule sched,
                          bool whole_clip = false)
        : mean_(std::move(mean)), var_(var), sched_(std::move(sched)), whole_clip_(whole_clip) {
        if (!(var_ > 0.0)) throw ValueError("gaussian prior needs var > 0");
    }

    VideoTensor predict_noise(const VideoTensor& z_t, int t) const override;
    bool whole_clip() const override { return whole_clip_; }
    std::optional<double> z0_linear_coeff(int t) const override;

    // posterior mean of z0 given z_t (exposed for tests)
    VideoTensor posterior_mean(const VideoTensor& z_t, int t) const;

private:
    VideoTensor mean_;
    double var_;
    DdpmSchedule sched_;
    bool whole_clip_;
};

// Wraps a base denoiser and pulls its zhat0 toward a centered temporal moving
// average (edge-clamped), emulating a video model's temporal prior. kappa = 0
// reduces to the base exactly.
class TemporalSmootherDenoiser : public Denoiser {
public:
    TemporalSmootherDenoiser(std::shared_ptr<const Denoiser> base, double kappa, int window,
                             DdpmSchedule sched)
        : base_(std::move(base)), kappa_(kappa), window_(window), sched_(std::move(sched)) {
        if (window_ % 2 == 0) throw ValueError("smoother window must be odd");
        if (kappa_ < 0.0 || kappa_ > 1.0) throw ValueError("kappa must be in [0,1]");
    }

    VideoTensor predict_noise(const VideoTensor& z_t, int t) const override;
    bool whole_clip() const override { return true; }

private:
    std::shared_ptr<const Denoiser> base_;
    double kappa_;
    int window_;
    DdpmSchedule sched_;
};

// Centered per-pixel moving average over frames, boundary frames replicated.
VideoTensor temporal_moving_average(const VideoTensor& x, int window);

}  // namespace zvr

#endif
