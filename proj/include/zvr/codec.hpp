#ifndef ZVR_CODEC_HPP
#define ZVR_CODEC_HPP

#include <vector>

#include "zvr/tensor.hpp"

namespace zvr {

// Per-frame latent codec built on an orthonormal block Haar transform.
// encode maps (T, C, H, W) -> (T, C*b^2, H/b, W/b); coefficients beyond
// keep_ratio (in a fixed zigzag-like frequency order, DC first) are zeroed on
// encode. decode inverse-transforms whatever coefficients it is given.
// keep_ratio = 1 makes the round trip lossless.
class Codec2D {
public:
    explicit Codec2D(uint32_t block = 2, double keep_ratio = 1.0);

    VideoTensor encode(const VideoTensor& x) const;
    VideoTensor decode(const VideoTensor& z) const;

    // exact adjoints of the linear maps above:
    // decode = Q^T            => decode_adjoint = Q (forward transform, no truncation)
    // encode = P.Q            => encode_adjoint = Q^T.P (truncate, then inverse)
    VideoTensor decode_adjoint(const VideoTensor& x) const;
    VideoTensor encode_adjoint(const VideoTensor& z) const;

    Dims4 latent_dims(Dims4 pixel) const;
    Dims4 pixel_dims(Dims4 latent) const;

    uint32_t block() const { return block_; }
    double keep_ratio() const { return keep_ratio_; }
    int kept_coeffs() const { return kept_; }

private:
    VideoTensor forward(const VideoTensor& x, bool truncate) const;
    VideoTensor inverse(const VideoTensor& z, bool truncate) const;

    uint32_t block_;
    double keep_ratio_;
    int kept_;
    std::vector<char> keep_mask_;  // per coefficient index iy*b+ix
};

// Spatiotemporal codec: temporal Haar over groups of g frames on top of the
// spatial block transform. encode maps (T, C, H, W) -> (T/g, C*b^2*g, H/b, W/b).
class Codec3D {
public:
    explicit Codec3D(uint32_t block = 2, uint32_t group = 2, double keep_ratio = 1.0);

    VideoTensor encode(const VideoTensor& x) const;
    VideoTensor decode(const VideoTensor& z) const;
    VideoTensor decode_adjoint(const VideoTensor& x) const;
    VideoTensor encode_adjoint(const VideoTensor& z) const;

    Dims4 latent_dims(Dims4 pixel) const;
    Dims4 pixel_dims(Dims4 latent) const;

    uint32_t block() const { return block_; }
    uint32_t group() const { return group_; }
    double keep_ratio() const { return keep_ratio_; }
    int kept_coeffs() const { return kept_; }

private:
    VideoTensor forward(const VideoTensor& x, bool truncate) const;
    VideoTensor inverse(const VideoTensor& z, bool truncate) const;

    uint32_t block_;
    uint32_t group_;
    double keep_ratio_;
    int kept_;
    std::vector<char> keep_mask_;  // per coefficient index ti*b^2 + iy*b + ix
};

}  // namespace zvr

#endif
