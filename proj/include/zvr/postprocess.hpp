#ifndef ZVR_POSTPROCESS_HPP
#define ZVR_POSTPROCESS_HPP

#include <memory>
#include <vector>

#include "zvr/codec.hpp"
#include "zvr/schedule.hpp"
#include "zvr/tensor.hpp"

namespace zvr {

// Raw network interface for the EDM steps: the caller preconditions the input
// with c_in and applies c_skip/c_out outside. sigma is the noise level whose
// c_in scaled the input.
class EdmDenoiser {
public:
    virtual ~EdmDenoiser() = default;
    virtual VideoTensor raw(const VideoTensor& preconditioned, double c_noise,
                            double sigma) const = 0;
};

// Affine shrinkage toward a conditioning latent frame, applied in
// preconditioned coordinates: F(u) = (1-rho) u + rho * c_in(sigma) * condition.
// rho = 0 is the identity on its input.
class ToyConditionalDenoiser : public EdmDenoiser {
public:
    ToyConditionalDenoiser(VideoTensor condition_latent_frame, double rho, double sigma_data)
        : condition_(std::move(condition_latent_frame)), rho_(rho), sigma_data_(sigma_data) {
        if (rho_ < 0.0 || rho_ > 1.0) throw ValueError("condition weight must be in [0,1]");
        if (condition_.dims().t != 1) throw ValueError("condition must be a single frame");
    }

    VideoTensor raw(const VideoTensor& preconditioned, double c_noise,
                    double sigma) const override;

private:
    VideoTensor condition_;
    double rho_;
    double sigma_data_;
};

struct EdmRunConfig {
    EdmSchedule schedule;
    int steps = 25;                 // <= schedule.levels()
    double condition_weight = 0.15;  // rho
    bool uniform_indices = false;    // replace the printed c_in^t input scaling
                                     // by c_in^{t+1} (sensitivity switch)
};

// Ascending traversal over sigma levels t = 0..steps-1:
//   z_{t+1} = [s_{t+1} z_t + (s_t - s_{t+1}) c_out^{t+1} F(c_in^t z_t; c_noise^{t+1})]
//             / [(s_t - s_{t+1})(1 - c_skip^{t+1}) + s_{t+1}]
VideoTensor edm_invert(const VideoTensor& z0, const EdmDenoiser& den, const EdmRunConfig& cfg);

// Descending traversal t = steps-1..0:
//   z_t = z_{t+1} + (s_t - s_{t+1})/s_{t+1} *
//         (z_{t+1} - (c_skip^{t+1} z_{t+1} + c_out^{t+1} F(c_in^{t+1} z_{t+1}; c_noise^{t+1})))
VideoTensor edm_sample(const VideoTensor& zT, const EdmDenoiser& den, const EdmRunConfig& cfg);

struct ClipPlan {
    int clip_len = 8;  // frames per clip, neighbouring clips share one frame
};

struct StrengthenTrace {
    std::vector<VideoTensor> clip_conditions;  // pixel frame conditioning each clip
    std::vector<std::pair<int, int>> clip_ranges;
};

// Temporal strengthening: split into overlapping clips, per clip encode ->
// invert (unconditioned) -> resample with the conditioned toy denoiser ->
// decode. The processed last frame of a clip conditions (and opens) the next
// clip; the shared frame is emitted once.
VideoTensor strengthen(const VideoTensor& video, const EdmRunConfig& cfg, const ClipPlan& plan,
                       const Codec2D& codec, StrengthenTrace* trace = nullptr);

}  // namespace zvr

#endif
