#ifndef ZVR_QUALITY_HPP
#define ZVR_QUALITY_HPP

#include "zvr/tensor.hpp"

namespace zvr {

// Mean central-difference gradient magnitude per frame, normalized by the
// frame dynamic range (floor 1e-6); averaged over frames. Higher = sharper.
// Invariant under affine pixel rescaling v -> a*v + b with a > 0.
double sharpness_proxy(const VideoTensor& v);

// Mean |v[t+1] - warp(v[t], flow[t])| over in-bounds pixels, bilinear sampling.
// warp(v[t], flow)[p] samples v[t] at p - flow[t][p]. Throws MetricError when
// every pixel of some pair is out of bounds.
double warping_error(const VideoTensor& v, const FlowField& flow);

// Data range [0,1]; 10*log10(1/MSE) capped at 99 dB.
double psnr(const VideoTensor& a, const VideoTensor& b);

// Windowed SSIM, 8x8 windows (shrunk for smaller frames), stride 4,
// C1 = 0.01^2, C2 = 0.03^2, averaged over frames, channels and windows.
double ssim(const VideoTensor& a, const VideoTensor& b);

}  // namespace zvr

#endif
