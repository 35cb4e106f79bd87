#ifndef ZVR_DEGRADATION_HPP
#define ZVR_DEGRADATION_HPP

#include <variant>

#include "zvr/tensor.hpp"

namespace zvr {

// y = A x with A the k x k mean pooling per frame.
struct Downsample {
    uint32_t factor = 4;
};

// Separable normalized gaussian kernel, reflected borders.
struct GaussianBlur {
    int radius = 2;
    double sigma = 1.0;
};

// Mean over `window` adjacent frames, boundary frames replicated. window odd.
struct TemporalUniformBlur {
    int window = 5;
};

// Affine low-light model y = f*x + M. The mask may hold one frame (broadcast
// over T) or match the video. Not linear: no adjoint.
struct LowLight {
    double f = 1.0;
    VideoTensor mask;
};

using DegradationOp = std::variant<Downsample, GaussianBlur, TemporalUniformBlur, LowLight>;

bool is_linear(const DegradationOp& op);
const char* op_name(const DegradationOp& op);
Dims4 output_dims(const DegradationOp& op, Dims4 in);

VideoTensor apply_forward(const DegradationOp& op, const VideoTensor& x);

// Exact adjoint of apply for the linear variants; LowLight throws.
VideoTensor apply_adjoint(const DegradationOp& op, const VideoTensor& y);

}  // namespace zvr

#endif
