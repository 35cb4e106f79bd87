#ifndef ZVR_GUIDANCE_HPP
#define ZVR_GUIDANCE_HPP

#include <functional>

#include "zvr/codec.hpp"
#include "zvr/degradation.hpp"
#include "zvr/denoiser.hpp"
#include "zvr/schedule.hpp"
#include "zvr/tensor.hpp"

namespace zvr {

enum class GradMode { Analytic, FiniteDiff };

struct GuidanceConfig {
    double gamma1 = 0.1;       // weight of the fixed-point regularizer
    double step_size = 1.0;    // eta; steps use the max-abs normalized gradient
    int steps_per_t = 1;       // 0 disables guidance
    GradMode grad_mode = GradMode::Analytic;
    bool analytic_fallback = true;  // fall back to finite differences when the
                                    // denoiser has no scalar zhat0 coefficient
    double fd_step = 1e-3;
};

// L_rec = ||y - A(D(zhat0))||^2
// L_reg = ||zhat0 - E(A^T y + (I - A^T A) D(zhat0))||^2
// returns L_rec + gamma1 * L_reg. The operator must be linear.
double psld_loss(const VideoTensor& z0_hat, const VideoTensor& y, const DegradationOp& op,
                 const Codec2D& codec, const GuidanceConfig& cfg);

// d psld_loss(predict_z0(z_t, eps(z_t), t)) / d z_t.
// Analytic mode uses the chain of linear maps and requires a denoiser whose
// zhat0 map has a scalar linear part; otherwise central finite differences.
VideoTensor psld_gradient(const VideoTensor& z_t, const Denoiser& den, int t,
                          const VideoTensor& y, const DegradationOp& op, const Codec2D& codec,
                          const DdpmSchedule& sched, const GuidanceConfig& cfg);

// Variant for the affine low-light task: L_rec only, with the current (f, M)
// estimate as the forward model.
VideoTensor lowlight_gradient(const VideoTensor& z_t, const Denoiser& den, int t,
                              const VideoTensor& y, double f, const VideoTensor& mask,
                              const Codec2D& codec, const DdpmSchedule& sched,
                              const GuidanceConfig& cfg);

// z <- z - eta * grad / max|grad|, steps_per_t times, recomputing the gradient
// each step.
VideoTensor guided_update(const VideoTensor& z,
                          const std::function<VideoTensor(const VideoTensor&)>& grad_fn,
                          const GuidanceConfig& cfg);
// single precomputed-gradient step (steps_per_t <= 1 path)
VideoTensor guided_update(const VideoTensor& z, const VideoTensor& grad,
                          const GuidanceConfig& cfg);

struct LowLightParams {
    double f = 1.0;
    VideoTensor mask;  // one frame (C, H, W), broadcast over T
    double lr = 1e-4;
    int iters = 100;
};

// Gradient descent on g(f, M) = ||y - (f * D(zhat0) + M)||^2 over the scalar f
// and the per-pixel frame mask M (shared across frames). f stays >= 1e-3.
LowLightParams lowlight_fit(const VideoTensor& y, const VideoTensor& z0_hat,
                            const Codec2D& codec, LowLightParams params);

// objective value for the current parameters (exposed for tests)
double lowlight_objective(const VideoTensor& y, const VideoTensor& decoded, double f,
                          const VideoTensor& mask);

}  // namespace zvr

#endif
