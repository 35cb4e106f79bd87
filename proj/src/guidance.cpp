#include "zvr/guidance.hpp"

#include <cmath>

namespace zvr {

namespace {

// A^T y + (I - A^T A) D(zhat0): the measurement-consistent pixel projection
// whose fixed points the regularizer rewards
VideoTensor projected_pixels(const VideoTensor& decoded, const VideoTensor& y,
                             const DegradationOp& op) {
    VideoTensor proj = apply_adjoint(op, y);
    VideoTensor ax = apply_forward(op, decoded);
    VideoTensor atax = apply_adjoint(op, ax);
    return add(proj, sub(decoded, atax));
}

struct LossParts {
    double rec = 0.0, reg = 0.0;
};

LossParts psld_loss_parts(const VideoTensor& z0_hat, const VideoTensor& y,
                          const DegradationOp& op, const Codec2D& codec) {
    if (!is_linear(op))
        throw UnsupportedError("psld loss needs a linear operator; use the lowlight path");
    LossParts parts;
    const VideoTensor decoded = codec.decode(z0_hat);
    parts.rec = sum_squares(sub(y, apply_forward(op, decoded)));
    const VideoTensor reproj = codec.encode(projected_pixels(decoded, y, op));
    parts.reg = sum_squares(sub(z0_hat, reproj));
    return parts;
}

// gradient of the loss with respect to zhat0
VideoTensor psld_loss_grad_z0(const VideoTensor& z0_hat, const VideoTensor& y,
                              const DegradationOp& op, const Codec2D& codec,
                              const GuidanceConfig& cfg) {
    const VideoTensor decoded = codec.decode(z0_hat);

    // d L_rec: -2 D^T A^T (y - A D z)
    const VideoTensor res_rec = sub(y, apply_forward(op, decoded));
    VideoTensor grad = scale(codec.decode_adjoint(apply_adjoint(op, res_rec)), -2.0);

    if (cfg.gamma1 != 0.0) {
        // r = zhat0 - E(u), u = A^T y + (I - A^T A) D zhat0
        // d L_reg = 2 [ r - D^T (I - A^T A) E^T r ]
        const VideoTensor r = sub(z0_hat, codec.encode(projected_pixels(decoded, y, op)));
        const VideoTensor er = codec.encode_adjoint(r);
        const VideoTensor m = sub(er, apply_adjoint(op, apply_forward(op, er)));
        const VideoTensor reg_grad = lincomb(2.0, r, -2.0, codec.decode_adjoint(m));
        grad = lincomb(1.0, grad, cfg.gamma1, reg_grad);
    }
    return grad;
}

VideoTensor finite_diff_gradient(const VideoTensor& z_t,
                                 const std::function<double(const VideoTensor&)>& loss,
                                 double h) {
    VideoTensor grad(z_t.dims());
    VideoTensor probe = z_t;
    for (size_t i = 0; i < z_t.size(); ++i) {
        const float orig = probe[i];
        probe[i] = float(double(orig) + h);
        const double hi = double(probe[i]);
        const double up = loss(probe);
        probe[i] = float(double(orig) - h);
        const double lo = double(probe[i]);
        const double down = loss(probe);
        probe[i] = orig;
        // divide by the step actually stored in the float tensor
        grad[i] = float((up - down) / (hi - lo));
    }
    return grad;
}

VideoTensor zhat0_of(const VideoTensor& z_t, const Denoiser& den, int t,
                     const DdpmSchedule& sched) {
    if (sched.alpha_bar_at(t) >= 1.0) return z_t;  // t = 0: the latent is zhat0
    return predict_z0(z_t, den.predict_noise(z_t, t), t, sched);
}

}  // namespace

double psld_loss(const VideoTensor& z0_hat, const VideoTensor& y, const DegradationOp& op,
                 const Codec2D& codec, const GuidanceConfig& cfg) {
    const LossParts parts = psld_loss_parts(z0_hat, y, op, codec);
    return parts.rec + cfg.gamma1 * parts.reg;
}

VideoTensor psld_gradient(const VideoTensor& z_t, const Denoiser& den, int t,
                          const VideoTensor& y, const DegradationOp& op, const Codec2D& codec,
                          const DdpmSchedule& sched, const GuidanceConfig& cfg) {
    const double abar = sched.alpha_bar_at(t);
    const std::optional<double> coeff =
        abar >= 1.0 ? std::optional<double>(1.0) : den.z0_linear_coeff(t);

    if (cfg.grad_mode == GradMode::Analytic) {
        if (coeff.has_value()) {
            const VideoTensor z0_hat = zhat0_of(z_t, den, t, sched);
            return scale(psld_loss_grad_z0(z0_hat, y, op, codec, cfg), *coeff);
        }
        if (!cfg.analytic_fallback)
            throw UnsupportedError("analytic gradient needs an affine denoiser");
    }
    return finite_diff_gradient(
        z_t,
        [&](const VideoTensor& z) { return psld_loss(zhat0_of(z, den, t, sched), y, op, codec, cfg); },
        cfg.fd_step);
}

VideoTensor lowlight_gradient(const VideoTensor& z_t, const Denoiser& den, int t,
                              const VideoTensor& y, double f, const VideoTensor& mask,
                              const Codec2D& codec, const DdpmSchedule& sched,
                              const GuidanceConfig& cfg) {
    const double abar = sched.alpha_bar_at(t);
    const std::optional<double> coeff =
        abar >= 1.0 ? std::optional<double>(1.0) : den.z0_linear_coeff(t);
    const DegradationOp op = LowLight{f, mask};

    if (cfg.grad_mode == GradMode::Analytic && coeff.has_value()) {
        // L = ||y - f D(z0) - M||^2, d/dz0 = -2 f D^T r
        const VideoTensor z0_hat = zhat0_of(z_t, den, t, sched);
        const VideoTensor res = sub(y, apply_forward(op, codec.decode(z0_hat)));
        return scale(codec.decode_adjoint(res), -2.0 * f * (*coeff));
    }
    if (cfg.grad_mode == GradMode::Analytic && !cfg.analytic_fallback)
        throw UnsupportedError("analytic gradient needs an affine denoiser");
    return finite_diff_gradient(
        z_t,
        [&](const VideoTensor& z) {
            const VideoTensor z0_hat = zhat0_of(z, den, t, sched);
            return sum_squares(sub(y, apply_forward(op, codec.decode(z0_hat))));
        },
        cfg.fd_step);
}

VideoTensor guided_update(const VideoTensor& z,
                          const std::function<VideoTensor(const VideoTensor&)>& grad_fn,
                          const GuidanceConfig& cfg) {
    if (cfg.steps_per_t <= 0 || cfg.step_size == 0.0) return z;
    VideoTensor cur = z;
    for (int s = 0; s < cfg.steps_per_t; ++s) {
        cur = guided_update(cur, grad_fn(cur), cfg);
    }
    return cur;
}

VideoTensor guided_update(const VideoTensor& z, const VideoTensor& grad,
                          const GuidanceConfig& cfg) {
    if (cfg.steps_per_t <= 0 || cfg.step_size == 0.0) return z;
    require_same_dims(z, grad, "guided_update");
    const double m = max_abs(grad);
    if (m <= 0.0) return z;
    return lincomb(1.0, z, -cfg.step_size / m, grad);
}

double lowlight_objective(const VideoTensor& y, const VideoTensor& decoded, double f,
                          const VideoTensor& mask) {
    const DegradationOp op = LowLight{f, mask};
    return sum_squares(sub(y, apply_forward(op, decoded)));
}

LowLightParams lowlight_fit(const VideoTensor& y, const VideoTensor& z0_hat,
                            const Codec2D& codec, LowLightParams params) {
    if (params.iters < 0) throw ValueError("lowlight_fit: iters must be >= 0");
    const VideoTensor x = codec.decode(z0_hat);
    require_same_dims(x, y, "lowlight_fit");
    const Dims4& d = x.dims();
    if (params.mask.empty()) params.mask = VideoTensor({1, d.c, d.h, d.w});
    const Dims4& md = params.mask.dims();
    if (md.t != 1 || md.c != d.c || md.h != d.h || md.w != d.w)
        throw ShapeError("lowlight mask must be one frame of the decoded video");

    const size_t fs = x.frame_size();
    std::vector<double> mask(fs), mask_grad(fs);
    for (size_t i = 0; i < fs; ++i) mask[i] = double(params.mask[i]);
    double f = params.f;

    for (int it = 0; it < params.iters; ++it) {
        double f_grad = 0.0;
        std::fill(mask_grad.begin(), mask_grad.end(), 0.0);
        for (uint32_t t = 0; t < d.t; ++t) {
            const float* xf = x.frame(t);
            const float* yf = y.frame(t);
            for (size_t i = 0; i < fs; ++i) {
                const double r = double(yf[i]) - f * double(xf[i]) - mask[i];
                f_grad += -2.0 * double(xf[i]) * r;
                mask_grad[i] += -2.0 * r;
            }
        }
        f -= params.lr * f_grad;
        f = std::max(f, 1e-3);
        for (size_t i = 0; i < fs; ++i) mask[i] -= params.lr * mask_grad[i];
    }

    params.f = f;
    for (size_t i = 0; i < fs; ++i) params.mask[i] = float(mask[i]);
    return params;
}

}  // namespace zvr
