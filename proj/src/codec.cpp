#include "zvr/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace zvr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_pow2(uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

// full multilevel orthonormal Haar, in place, n a power of two
void haar_fwd(double* v, int n) {
    std::vector<double> tmp(static_cast<size_t>(n));
    for (int len = n; len > 1; len >>= 1) {
        const int half = len / 2;
        for (int i = 0; i < half; ++i) {
            tmp[size_t(i)] = (v[2 * i] + v[2 * i + 1]) * kInvSqrt2;
            tmp[size_t(half + i)] = (v[2 * i] - v[2 * i + 1]) * kInvSqrt2;
        }
        std::copy(tmp.begin(), tmp.begin() + len, v);
    }
}

void haar_inv(double* v, int n) {
    std::vector<double> tmp(static_cast<size_t>(n));
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len / 2;
        for (int i = 0; i < half; ++i) {
            tmp[size_t(2 * i)] = (v[i] + v[half + i]) * kInvSqrt2;
            tmp[size_t(2 * i + 1)] = (v[i] - v[half + i]) * kInvSqrt2;
        }
        std::copy(tmp.begin(), tmp.begin() + len, v);
    }
}

// keep the first `kept` coefficient indices in the given frequency order
std::vector<char> make_keep_mask(const std::vector<std::array<int, 3>>& coords, int kept) {
    std::vector<size_t> order(coords.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const auto& ca = coords[a];
        const auto& cb = coords[b];
        const int sa = ca[0] + ca[1] + ca[2], sb = cb[0] + cb[1] + cb[2];
        if (sa != sb) return sa < sb;
        return ca < cb;
    });
    std::vector<char> mask(coords.size(), 0);
    for (int i = 0; i < kept; ++i) mask[order[size_t(i)]] = 1;
    return mask;
}

int kept_count(double keep_ratio, int total) {
    if (!(keep_ratio > 0.0) || keep_ratio > 1.0)
        throw ValueError("keep_ratio must be in (0, 1]");
    const int k = int(std::ceil(keep_ratio * total - 1e-9));
    return std::clamp(k, 1, total);
}

}  // namespace

// ---------------- Codec2D ----------------

Codec2D::Codec2D(uint32_t block, double keep_ratio) : block_(block), keep_ratio_(keep_ratio) {
    if (!is_pow2(block_)) throw ValueError("codec block size must be a power of two");
    const int total = int(block_ * block_);
    kept_ = kept_count(keep_ratio_, total);
    std::vector<std::array<int, 3>> coords;
    for (uint32_t iy = 0; iy < block_; ++iy)
        for (uint32_t ix = 0; ix < block_; ++ix) coords.push_back({0, int(iy), int(ix)});
    keep_mask_ = make_keep_mask(coords, kept_);
}

Dims4 Codec2D::latent_dims(Dims4 p) const {
    if (p.h % block_ != 0 || p.w % block_ != 0)
        throw ShapeError("H, W must be divisible by block " + std::to_string(block_) + ", got " +
                         p.str());
    return {p.t, p.c * block_ * block_, p.h / block_, p.w / block_};
}

Dims4 Codec2D::pixel_dims(Dims4 l) const {
    const uint32_t bb = block_ * block_;
    if (l.c % bb != 0) throw ShapeError("latent channels not a multiple of b^2: " + l.str());
    return {l.t, l.c / bb, l.h * block_, l.w * block_};
}

VideoTensor Codec2D::forward(const VideoTensor& x, bool truncate) const {
    const Dims4 ld = latent_dims(x.dims());
    const Dims4& pd = x.dims();
    VideoTensor z(ld);
    const uint32_t b = block_;
    std::vector<double> blk(size_t(b) * b);
    for (uint32_t t = 0; t < pd.t; ++t)
        for (uint32_t c = 0; c < pd.c; ++c)
            for (uint32_t by = 0; by < ld.h; ++by)
                for (uint32_t bx = 0; bx < ld.w; ++bx) {
                    for (uint32_t iy = 0; iy < b; ++iy)
                        for (uint32_t ix = 0; ix < b; ++ix)
                            blk[size_t(iy) * b + ix] =
                                double(x.at(t, c, by * b + iy, bx * b + ix));
                    for (uint32_t iy = 0; iy < b; ++iy) haar_fwd(&blk[size_t(iy) * b], int(b));
                    std::vector<double> col(b);
                    for (uint32_t ix = 0; ix < b; ++ix) {
                        for (uint32_t iy = 0; iy < b; ++iy) col[iy] = blk[size_t(iy) * b + ix];
                        haar_fwd(col.data(), int(b));
                        for (uint32_t iy = 0; iy < b; ++iy) blk[size_t(iy) * b + ix] = col[iy];
                    }
                    for (uint32_t k = 0; k < b * b; ++k) {
                        const double v = (truncate && !keep_mask_[k]) ? 0.0 : blk[k];
                        z.at(t, c * b * b + k, by, bx) = float(v);
                    }
                }
    return z;
}

VideoTensor Codec2D::inverse(const VideoTensor& z, bool truncate) const {
    const Dims4 pd = pixel_dims(z.dims());
    const Dims4& ld = z.dims();
    VideoTensor x(pd);
    const uint32_t b = block_;
    std::vector<double> blk(size_t(b) * b);
    for (uint32_t t = 0; t < pd.t; ++t)
        for (uint32_t c = 0; c < pd.c; ++c)
            for (uint32_t by = 0; by < ld.h; ++by)
                for (uint32_t bx = 0; bx < ld.w; ++bx) {
                    for (uint32_t k = 0; k < b * b; ++k) {
                        const float v = z.at(t, c * b * b + k, by, bx);
                        blk[k] = (truncate && !keep_mask_[k]) ? 0.0 : double(v);
                    }
                    std::vector<double> col(b);
                    for (uint32_t ix = 0; ix < b; ++ix) {
                        for (uint32_t iy = 0; iy < b; ++iy) col[iy] = blk[size_t(iy) * b + ix];
                        haar_inv(col.data(), int(b));
                        for (uint32_t iy = 0; iy < b; ++iy) blk[size_t(iy) * b + ix] = col[iy];
                    }
                    for (uint32_t iy = 0; iy < b; ++iy) haar_inv(&blk[size_t(iy) * b], int(b));
                    for (uint32_t iy = 0; iy < b; ++iy)
                        for (uint32_t ix = 0; ix < b; ++ix)
                            x.at(t, c, by * b + iy, bx * b + ix) = float(blk[size_t(iy) * b + ix]);
                }
    return x;
}

VideoTensor Codec2D::encode(const VideoTensor& x) const { return forward(x, true); }
VideoTensor Codec2D::decode(const VideoTensor& z) const { return inverse(z, false); }
VideoTensor Codec2D::decode_adjoint(const VideoTensor& x) const { return forward(x, false); }
VideoTensor Codec2D::encode_adjoint(const VideoTensor& z) const { return inverse(z, true); }

// ---------------- Codec3D ----------------

Codec3D::Codec3D(uint32_t block, uint32_t group, double keep_ratio)
    : block_(block), group_(group), keep_ratio_(keep_ratio) {
    if (!is_pow2(block_) || !is_pow2(group_))
        throw ValueError("codec block and group sizes must be powers of two");
    const int total = int(group_ * block_ * block_);
    kept_ = kept_count(keep_ratio_, total);
    std::vector<std::array<int, 3>> coords;
    for (uint32_t ti = 0; ti < group_; ++ti)
        for (uint32_t iy = 0; iy < block_; ++iy)
            for (uint32_t ix = 0; ix < block_; ++ix) coords.push_back({int(ti), int(iy), int(ix)});
    keep_mask_ = make_keep_mask(coords, kept_);
}

Dims4 Codec3D::latent_dims(Dims4 p) const {
    if (p.h % block_ != 0 || p.w % block_ != 0)
        throw ShapeError("H, W must be divisible by block " + std::to_string(block_) + ", got " +
                         p.str());
    if (p.t % group_ != 0)
        throw ShapeError("T must be divisible by group " + std::to_string(group_) + ", got " +
                         p.str());
    return {p.t / group_, p.c * block_ * block_ * group_, p.h / block_, p.w / block_};
}

Dims4 Codec3D::pixel_dims(Dims4 l) const {
    const uint32_t per = block_ * block_ * group_;
    if (l.c % per != 0)
        throw ShapeError("latent channels not a multiple of g*b^2: " + l.str());
    return {l.t * group_, l.c / per, l.h * block_, l.w * block_};
}

VideoTensor Codec3D::forward(const VideoTensor& x, bool truncate) const {
    const Dims4 ld = latent_dims(x.dims());
    const Dims4& pd = x.dims();
    VideoTensor z(ld);
    const uint32_t b = block_, g = group_;
    std::vector<double> cube(size_t(g) * b * b);  // [ti][iy][ix]
    std::vector<double> line(std::max(b, g));
    for (uint32_t gt = 0; gt < ld.t; ++gt)
        for (uint32_t c = 0; c < pd.c; ++c)
            for (uint32_t by = 0; by < ld.h; ++by)
                for (uint32_t bx = 0; bx < ld.w; ++bx) {
                    for (uint32_t ti = 0; ti < g; ++ti)
                        for (uint32_t iy = 0; iy < b; ++iy)
                            for (uint32_t ix = 0; ix < b; ++ix)
                                cube[(size_t(ti) * b + iy) * b + ix] =
                                    double(x.at(gt * g + ti, c, by * b + iy, bx * b + ix));
                    // temporal transform per (iy, ix)
                    for (uint32_t iy = 0; iy < b; ++iy)
                        for (uint32_t ix = 0; ix < b; ++ix) {
                            for (uint32_t ti = 0; ti < g; ++ti)
                                line[ti] = cube[(size_t(ti) * b + iy) * b + ix];
                            haar_fwd(line.data(), int(g));
                            for (uint32_t ti = 0; ti < g; ++ti)
                                cube[(size_t(ti) * b + iy) * b + ix] = line[ti];
                        }
                    // spatial transform per temporal slice
                    for (uint32_t ti = 0; ti < g; ++ti) {
                        double* slice = &cube[size_t(ti) * b * b];
                        for (uint32_t iy = 0; iy < b; ++iy) haar_fwd(slice + size_t(iy) * b, int(b));
                        for (uint32_t ix = 0; ix < b; ++ix) {
                            for (uint32_t iy = 0; iy < b; ++iy) line[iy] = slice[size_t(iy) * b + ix];
                            haar_fwd(line.data(), int(b));
                            for (uint32_t iy = 0; iy < b; ++iy) slice[size_t(iy) * b + ix] = line[iy];
                        }
                    }
                    for (uint32_t k = 0; k < g * b * b; ++k) {
                        const double v = (truncate && !keep_mask_[k]) ? 0.0 : cube[k];
                        z.at(gt, c * g * b * b + k, by, bx) = float(v);
                    }
                }
    return z;
}

VideoTensor Codec3D::inverse(const VideoTensor& z, bool truncate) const {
    const Dims4 pd = pixel_dims(z.dims());
    const Dims4& ld = z.dims();
    VideoTensor x(pd);
    const uint32_t b = block_, g = group_;
    std::vector<double> cube(size_t(g) * b * b);
    std::vector<double> line(std::max(b, g));
    for (uint32_t gt = 0; gt < ld.t; ++gt)
        for (uint32_t c = 0; c < pd.c; ++c)
            for (uint32_t by = 0; by < ld.h; ++by)
                for (uint32_t bx = 0; bx < ld.w; ++bx) {
                    for (uint32_t k = 0; k < g * b * b; ++k) {
                        const float v = z.at(gt, c * g * b * b + k, by, bx);
                        cube[k] = (truncate && !keep_mask_[k]) ? 0.0 : double(v);
                    }
                    for (uint32_t ti = 0; ti < g; ++ti) {
                        double* slice = &cube[size_t(ti) * b * b];
                        for (uint32_t ix = 0; ix < b; ++ix) {
                            for (uint32_t iy = 0; iy < b; ++iy) line[iy] = slice[size_t(iy) * b + ix];
                            haar_inv(line.data(), int(b));
                            for (uint32_t iy = 0; iy < b; ++iy) slice[size_t(iy) * b + ix] = line[iy];
                        }
                        for (uint32_t iy = 0; iy < b; ++iy) haar_inv(slice + size_t(iy) * b, int(b));
                    }
                    for (uint32_t iy = 0; iy < b; ++iy)
                        for (uint32_t ix = 0; ix < b; ++ix) {
                            for (uint32_t ti = 0; ti < g; ++ti)
                                line[ti] = cube[(size_t(ti) * b + iy) * b + ix];
                            haar_inv(line.data(), int(g));
                            for (uint32_t ti = 0; ti < g; ++ti)
                                cube[(size_t(ti) * b + iy) * b + ix] = line[ti];
                        }
                    for (uint32_t ti = 0; ti < g; ++ti)
                        for (uint32_t iy = 0; iy < b; ++iy)
                            for (uint32_t ix = 0; ix < b; ++ix)
                                x.at(gt * g + ti, c, by * b + iy, bx * b + ix) =
                                    float(cube[(size_t(ti) * b + iy) * b + ix]);
                }
    return x;
}

VideoTensor Codec3D::encode(const VideoTensor& x) const { return forward(x, true); }
VideoTensor Codec3D::decode(const VideoTensor& z) const { return inverse(z, false); }
VideoTensor Codec3D::decode_adjoint(const VideoTensor& x) const { return forward(x, false); }
VideoTensor Codec3D::encode_adjoint(const VideoTensor& z) const { return inverse(z, true); }

}  // namespace zvr
