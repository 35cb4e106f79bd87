#include "zvr/fusion.hpp"

#include <cmath>

namespace zvr {

VideoTensor fuse_homologous(const VideoTensor& z_ir, const VideoTensor& z_homo,
                            double lambda_f1) {
    return lerp(z_ir, z_homo, lambda_f1);
}

VideoTensor fuse_final(const VideoTensor& z_ir, const VideoTensor& z_f1,
                       const VideoTensor& z_hetero_to_image, const FusionRatios& ratios) {
    const VideoTensor z_f2 = lerp(z_ir, z_hetero_to_image, ratios.lambda_f2);
    return lerp(z_f1, z_f2, ratios.lambda_f);
}

VideoTensor fuse_for_hetero(const VideoTensor& z_hetero, const VideoTensor& z_image_to_hetero,
                            double lambda_f2) {
    // weight orientation is reversed on this branch: lambda multiplies z_hetero
    return lerp(z_hetero, z_image_to_hetero, 1.0 - lambda_f2);
}

VideoTensor convert_hetero_to_image(const VideoTensor& z_hetero, const Denoiser& den_hetero,
                                    int t, const Codec3D& codec3d, const Codec2D& codec2d,
                                    const DdpmSchedule& sched_image,
                                    const DdpmSchedule& sched_hetero) {
    const auto transfer = [&](const VideoTensor& v) {
        return codec2d.encode(codec3d.decode(v));
    };
    if (sched_hetero.alpha_bar_at(t) >= 1.0) return transfer(z_hetero);

    const VideoTensor eps = den_hetero.predict_noise(z_hetero, t);
    const VideoTensor zhat0_src = predict_z0(z_hetero, eps, t, sched_hetero);
    const VideoTensor zhat0_dst = transfer(zhat0_src);
    const VideoTensor eps_dst = transfer(eps);  // implied noise, moved the same way
    const double abar_img = sched_image.alpha_bar_at(t);
    return lincomb(std::sqrt(abar_img), zhat0_dst, std::sqrt(1.0 - abar_img), eps_dst);
}

VideoTensor convert_image_to_hetero(const VideoTensor& z_image, const Denoiser& den_image, int t,
                                    const Codec2D& codec2d, const Codec3D& codec3d,
                                    const DdpmSchedule& sched_image,
                                    const DdpmSchedule& sched_hetero) {
    const auto transfer = [&](const VideoTensor& v) {
        return codec3d.encode(codec2d.decode(v));
    };
    if (sched_image.alpha_bar_at(t) >= 1.0) return transfer(z_image);

    const VideoTensor eps = den_image.predict_noise(z_image, t);
    const VideoTensor zhat0_src = predict_z0(z_image, eps, t, sched_image);
    const VideoTensor zhat0_dst = transfer(zhat0_src);
    const VideoTensor eps_dst = transfer(eps);
    const double abar_het = sched_hetero.alpha_bar_at(t);
    return lincomb(std::sqrt(abar_het), zhat0_dst, std::sqrt(1.0 - abar_het), eps_dst);
}

}  // namespace zvr
