#ifndef ZVR_SCHEDULE_HPP
#define ZVR_SCHEDULE_HPP

#include <vector>

#include "zvr/tensor.hpp"

namespace zvr {

// DDPM variance schedule. betas[i] is beta_{i+1} (timesteps are 1-based);
// alpha_bar(t) = prod_{i=1..t} (1 - beta_i), alpha_bar(0) = 1.
struct DdpmSchedule {
    std::vector<double> betas;
    std::vector<double> alpha_bars;  // alpha_bars[i] = alpha_bar(i+1)

    int n_train() const { return int(betas.size()); }

    double alpha_bar_at(int t) const;  // t in [0, n_train]
};

DdpmSchedule make_linear_schedule(int n_train, double beta_start, double beta_end);

// Strictly decreasing sub-grid of schedule timesteps traversed by DDIM.
// The step after the last listed timestep goes to t = 0 (alpha_bar = 1),
// which collapses the update to the predicted z0.
struct DdimGrid {
    std::vector<int> timesteps;
    double eta = 0.0;
    uint64_t rng_seed = 0;

    int steps() const { return int(timesteps.size()); }
    // timestep after position i (0 once past the end)
    int prev_of(int i) const { return i + 1 < steps() ? timesteps[size_t(i) + 1] : 0; }
};

// n_steps uniformly spaced timesteps: n_train, n_train - stride, ..., stride.
DdimGrid make_uniform_grid(int n_train, int n_steps, double eta = 0.0, uint64_t seed = 0);

// sqrt(abar_t) * z0 + sqrt(1 - abar_t) * eps
VideoTensor add_noise(const VideoTensor& z0, int t, const VideoTensor& eps,
                      const DdpmSchedule& s);

// zhat0 = z_t / sqrt(abar_t) - sqrt(1 - abar_t) * eps_pred / sqrt(abar_t)
VideoTensor predict_z0(const VideoTensor& z_t, const VideoTensor& eps_pred, int t,
                       const DdpmSchedule& s);

// One reverse update from t to t_prev (t > t_prev >= 0):
//   z_prev = sqrt(a)*(1-abar_prev)/(1-abar_t) * z_t
//          + sqrt(abar_prev)*b/(1-abar_t)     * zhat0
//          + sigma * noise
// with a = abar_t/abar_prev the alpha over the stride, b = 1 - a, and
// sigma = eta * sqrt((1-abar_prev)/(1-abar_t)) * sqrt(1 - a). eta = 0 is
// deterministic; t_prev = 0 returns zhat0 exactly.
VideoTensor ddim_step(const VideoTensor& z_t, const VideoTensor& eps_pred, int t, int t_prev,
                      const DdimGrid& grid, const DdpmSchedule& s, const VideoTensor& noise);

// --- EDM ---

struct EdmCoeffs {
    double c_skip, c_in, c_out, c_noise;
};

// c_skip = sd^2/(s^2+sd^2), c_out = s*sd/sqrt(s^2+sd^2), c_in = 1/sqrt(s^2+sd^2),
// c_noise = ln(s)/4 (0 at s = 0, where the network is never queried).
EdmCoeffs edm_coeffs(double sigma, double sigma_data);

// sigma grid stored descending: sigmas[0] = sigma_max, ..., terminal 0 allowed.
// Level indexing used by the post-processing equations counts upward from the
// clean end: sigma(level) = sigmas[size-1-level].
struct EdmSchedule {
    std::vector<double> sigmas;
    double sigma_data = 0.5;

    int levels() const { return int(sigmas.size()) - 1; }  // number of intervals
    double sigma_at_level(int level) const { return sigmas[sigmas.size() - 1 - size_t(level)]; }
    EdmCoeffs coeffs_at_level(int level) const;
};

// Karras rho=7 interpolation between sigma_max and sigma_min over n points,
// with a terminal 0 appended.
EdmSchedule make_karras_schedule(int n, double sigma_min, double sigma_max, double sigma_data,
                                 double rho = 7.0);

}  // namespace zvr

#endif
