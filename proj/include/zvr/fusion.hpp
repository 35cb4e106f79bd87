#ifndef ZVR_FUSION_HPP
#define ZVR_FUSION_HPP

#include "zvr/codec.hpp"
#include "zvr/denoiser.hpp"
#include "zvr/schedule.hpp"
#include "zvr/tensor.hpp"

namespace zvr {

// Per-timestep fusion weights, each clamped to [0,1].
struct FusionRatios {
    double lambda_f1 = 0.1;
    double lambda_f2 = 0.01;
    double lambda_f = 0.5;
};

// The three live latent trajectories at timestep t.
struct BranchState {
    VideoTensor z_ir;      // image-restoration branch (2D-codec latent space)
    VideoTensor z_homo;    // homologous video branch, same space
    VideoTensor z_hetero;  // heterogeneous video branch (3D-codec latent space)
    int t = 0;
};

// z_f1 = (1 - lambda) z_ir + lambda z_homo; both branches continue from z_f1.
VideoTensor fuse_homologous(const VideoTensor& z_ir, const VideoTensor& z_homo, double lambda_f1);

// Two-stage combination for the image branch:
//   z_f2 = (1 - lambda_f2) z_ir + lambda_f2 z_hetero_to_image
//   z_f  = (1 - lambda_f) z_f1 + lambda_f z_f2
VideoTensor fuse_final(const VideoTensor& z_ir, const VideoTensor& z_f1,
                       const VideoTensor& z_hetero_to_image, const FusionRatios& ratios);

// Update for the heterogeneous branch; note the reversed weight orientation:
//   z = lambda_f2 * z_hetero + (1 - lambda_f2) * z_image_to_hetero
VideoTensor fuse_for_hetero(const VideoTensor& z_hetero, const VideoTensor& z_image_to_hetero,
                            double lambda_f2);

// Transfers the heterogeneous trajectory into the image latent space at
// timestep t: predict zhat0, move it (and the implied noise) through pixel
// space, re-noise with the image-branch schedule. At t = 0 this is the pure
// codec transfer. When both codecs are the identity map and the schedules
// coincide the input comes back unchanged.
VideoTensor convert_hetero_to_image(const VideoTensor& z_hetero, const Denoiser& den_hetero,
                                    int t, const Codec3D& codec3d, const Codec2D& codec2d,
                                    const DdpmSchedule& sched_image,
                                    const DdpmSchedule& sched_hetero);

// Mirror direction: image latent into the heterogeneous space.
VideoTensor convert_image_to_hetero(const VideoTensor& z_image, const Denoiser& den_image, int t,
                                    const Codec2D& codec2d, const Codec3D& codec3d,
                                    const DdpmSchedule& sched_image,
                                    const DdpmSchedule& sched_hetero);

}  // namespace zvr

#endif
