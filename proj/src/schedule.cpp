#include "zvr/schedule.hpp"

#include <cmath>
#include <string>

namespace zvr {

double DdpmSchedule::alpha_bar_at(int t) const {
    if (t < 0 || t > n_train())
        throw ValueError("timestep " + std::to_string(t) + " out of [0, " +
                         std::to_string(n_train()) + "]");
    return t == 0 ? 1.0 : alpha_bars[size_t(t) - 1];
}

DdpmSchedule make_linear_schedule(int n_train, double beta_start, double beta_end) {
    if (n_train < 1) throw ValueError("n_train must be >= 1");
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
        throw ValueError("need 0 < beta_start <= beta_end < 1");
    DdpmSchedule s;
    s.betas.resize(size_t(n_train));
    s.alpha_bars.resize(size_t(n_train));
    double prod = 1.0;
    for (int i = 0; i < n_train; ++i) {
        const double beta =
            n_train == 1 ? beta_start
                         : beta_start + (beta_end - beta_start) * double(i) / double(n_train - 1);
        s.betas[size_t(i)] = beta;
        prod *= 1.0 - beta;
        s.alpha_bars[size_t(i)] = prod;
    }
    return s;
}

DdimGrid make_uniform_grid(int n_train, int n_steps, double eta, uint64_t seed) {
    if (n_steps < 1 || n_steps > n_train)
        throw ValueError("grid steps must be in [1, n_train]");
    if (n_train % n_steps != 0)
        throw ValueError("n_train must be divisible by grid steps");
    DdimGrid g;
    g.eta = eta;
    g.rng_seed = seed;
    const int stride = n_train / n_steps;
    for (int t = n_train; t >= stride; t -= stride) g.timesteps.push_back(t);
    return g;
}

VideoTensor add_noise(const VideoTensor& z0, int t, const VideoTensor& eps,
                      const DdpmSchedule& s) {
    require_same_dims(z0, eps, "add_noise");
    const double abar = s.alpha_bar_at(t);
    return lincomb(std::sqrt(abar), z0, std::sqrt(1.0 - abar), eps);
}

VideoTensor predict_z0(const VideoTensor& z_t, const VideoTensor& eps_pred, int t,
                       const DdpmSchedule& s) {
    require_same_dims(z_t, eps_pred, "predict_z0");
    const double abar = s.alpha_bar_at(t);
    if (!(abar > 0.0)) throw ValueError("predict_z0: alpha_bar <= 0");
    const double inv = 1.0 / std::sqrt(abar);
    return lincomb(inv, z_t, -std::sqrt(1.0 - abar) * inv, eps_pred);
}

VideoTensor ddim_step(const VideoTensor& z_t, const VideoTensor& eps_pred, int t, int t_prev,
                      const DdimGrid& grid, const DdpmSchedule& s, const VideoTensor& noise) {
    if (t <= t_prev)
        throw ValueError("ddim_step: need t > t_prev, got " + std::to_string(t) + " -> " +
                         std::to_string(t_prev));
    const double abar_t = s.alpha_bar_at(t);
    const double abar_prev = s.alpha_bar_at(t_prev);
    const double alpha = abar_t / abar_prev;  // alpha over the stride
    const double beta = 1.0 - alpha;

    const VideoTensor zhat0 = predict_z0(z_t, eps_pred, t, s);
    const double cz = std::sqrt(alpha) * (1.0 - abar_prev) / (1.0 - abar_t);
    const double c0 = std::sqrt(abar_prev) * beta / (1.0 - abar_t);
    VideoTensor out = lincomb(cz, z_t, c0, zhat0);

    if (grid.eta > 0.0) {
        require_same_dims(z_t, noise, "ddim_step noise");
        const double sigma =
            grid.eta * std::sqrt((1.0 - abar_prev) / (1.0 - abar_t)) * std::sqrt(beta);
        out = lincomb(1.0, out, sigma, noise);
    }
    return out;
}

EdmCoeffs edm_coeffs(double sigma, double sigma_data) {
    if (sigma < 0.0 || !(sigma_data > 0.0)) throw ValueError("edm_coeffs: bad sigma");
    const double s2 = sigma * sigma, d2 = sigma_data * sigma_data;
    EdmCoeffs c;
    c.c_skip = d2 / (s2 + d2);
    c.c_out = sigma * sigma_data / std::sqrt(s2 + d2);
    c.c_in = 1.0 / std::sqrt(s2 + d2);
    c.c_noise = sigma > 0.0 ? 0.25 * std::log(sigma) : 0.0;
    return c;
}

EdmCoeffs EdmSchedule::coeffs_at_level(int level) const {
    return edm_coeffs(sigma_at_level(level), sigma_data);
}

EdmSchedule make_karras_schedule(int n, double sigma_min, double sigma_max, double sigma_data,
                                 double rho) {
    if (n < 2) throw ValueError("karras schedule needs n >= 2");
    if (!(sigma_min > 0.0) || !(sigma_min < sigma_max)) throw ValueError("bad sigma range");
    EdmSchedule s;
    s.sigma_data = sigma_data;
    s.sigmas.resize(size_t(n) + 1);
    const double lo = std::pow(sigma_min, 1.0 / rho), hi = std::pow(sigma_max, 1.0 / rho);
    for (int i = 0; i < n; ++i) {
        const double u = double(i) / double(n - 1);
        s.sigmas[size_t(i)] = std::pow(hi + u * (lo - hi), rho);
    }
    s.sigmas[size_t(n)] = 0.0;
    return s;
}

}  // namespace zvr
