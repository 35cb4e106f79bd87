#include "zvr/denoiser.hpp"

#include <algorithm>
#include <cmath>

namespace zvr {

VideoTensor OracleDenoiser::predict_noise(const VideoTensor& z_t, int t) const {
    require_same_dims(z_t, target_, "oracle_predict");
    const double abar = sched_.alpha_bar_at(t);
    if (abar >= 1.0) throw ValueError("oracle_predict: degenerate timestep (alpha_bar = 1)");
    const double inv = 1.0 / std::sqrt(1.0 - abar);
    return lincomb(inv, z_t, -std::sqrt(abar) * inv, target_);
}

VideoTensor GaussianPriorDenoiser::posterior_mean(const VideoTensor& z_t, int t) const {
    require_same_dims(z_t, mean_, "gaussian_predict");
    const double abar = sched_.alpha_bar_at(t);
    const double denom = abar * var_ + (1.0 - abar);
    return lincomb(std::sqrt(abar) * var_ / denom, z_t, (1.0 - abar) / denom, mean_);
}

VideoTensor GaussianPriorDenoiser::predict_noise(const VideoTensor& z_t, int t) const {
    const double abar = sched_.alpha_bar_at(t);
    if (abar >= 1.0) throw ValueError("gaussian_predict: degenerate timestep (alpha_bar = 1)");
    const VideoTensor m = posterior_mean(z_t, t);
    const double inv = 1.0 / std::sqrt(1.0 - abar);
    return lincomb(inv, z_t, -std::sqrt(abar) * inv, m);
}

std::optional<double> GaussianPriorDenoiser::z0_linear_coeff(int t) const {
    const double abar = sched_.alpha_bar_at(t);
    return std::sqrt(abar) * var_ / (abar * var_ + (1.0 - abar));
}

VideoTensor temporal_moving_average(const VideoTensor& x, int window) {
    if (window % 2 == 0) throw ValueError("temporal_moving_average: even window");
    const int T = int(x.dims().t);
    const int half = window / 2;
    VideoTensor out(x.dims());
    const size_t fs = x.frame_size();
    for (int f = 0; f < T; ++f) {
        std::vector<double> acc(fs, 0.0);
        for (int d = -half; d <= half; ++d) {
            const int src = std::clamp(f + d, 0, T - 1);
            const float* p = x.frame(uint32_t(src));
            for (size_t i = 0; i < fs; ++i) acc[i] += double(p[i]);
        }
        float* q = out.frame(uint32_t(f));
        for (size_t i = 0; i < fs; ++i) q[i] = float(acc[i] / double(window));
    }
    return out;
}

VideoTensor TemporalSmootherDenoiser::predict_noise(const VideoTensor& z_t, int t) const {
    if (window_ > int(z_t.dims().t)) throw ValueError("smoother window exceeds clip length");
    VideoTensor eps_base = base_->predict_noise(z_t, t);
    if (kappa_ == 0.0) return eps_base;
    const double abar = sched_.alpha_bar_at(t);
    if (abar >= 1.0) throw ValueError("smoother_predict: degenerate timestep (alpha_bar = 1)");
    const VideoTensor zhat0_base = predict_z0(z_t, eps_base, t, sched_);
    const VideoTensor zhat0_smooth = temporal_moving_average(zhat0_base, window_);
    const VideoTensor zhat0_out = lerp(zhat0_base, zhat0_smooth, kappa_);
    // eps consistent with zhat0_out
    const double inv = 1.0 / std::sqrt(1.0 - abar);
    return lincomb(inv, z_t, -std::sqrt(abar) * inv, zhat0_out);
}

}  // namespace zvr
