#include "zvr/quality.hpp"

#include <algorithm>
#include <cmath>

namespace zvr {

double sharpness_proxy(const VideoTensor& v) {
    const Dims4& d = v.dims();
    if (d.t < 1) throw ValueError("sharpness_proxy: empty video");
    double total = 0.0;
    for (uint32_t t = 0; t < d.t; ++t) {
        double lo = double(v.at(t, 0, 0, 0)), hi = lo;
        double grad_sum = 0.0;
        size_t grad_n = 0;
        for (uint32_t c = 0; c < d.c; ++c)
            for (uint32_t y = 0; y < d.h; ++y)
                for (uint32_t x = 0; x < d.w; ++x) {
                    const double p = double(v.at(t, c, y, x));
                    lo = std::min(lo, p);
                    hi = std::max(hi, p);
                    if (y > 0 && y + 1 < d.h && x > 0 && x + 1 < d.w) {
                        const double gx =
                            0.5 * (double(v.at(t, c, y, x + 1)) - double(v.at(t, c, y, x - 1)));
                        const double gy =
                            0.5 * (double(v.at(t, c, y + 1, x)) - double(v.at(t, c, y - 1, x)));
                        grad_sum += std::sqrt(gx * gx + gy * gy);
                        ++grad_n;
                    }
                }
        const double range = std::max(hi - lo, 1e-6);
        if (grad_n > 0) total += grad_sum / double(grad_n) / range;
    }
    return total / double(d.t);
}

double warping_error(const VideoTensor& v, const FlowField& flow) {
    const Dims4& d = v.dims();
    flow.check_matches(d);
    if (d.t < 2) throw MetricError("warping_error: need at least 2 frames");
    double total = 0.0;
    for (uint32_t t = 0; t + 1 < d.t; ++t) {
        double acc = 0.0;
        size_t n = 0;
        for (uint32_t y = 0; y < d.h; ++y)
            for (uint32_t x = 0; x < d.w; ++x) {
                const double sy = double(y) - double(flow.data.at(t, 0, y, x));
                const double sx = double(x) - double(flow.data.at(t, 1, y, x));
                if (sy < 0.0 || sy > double(d.h - 1) || sx < 0.0 || sx > double(d.w - 1))
                    continue;
                const uint32_t y0 = uint32_t(sy), x0 = uint32_t(sx);
                const uint32_t y1 = std::min(y0 + 1, d.h - 1), x1 = std::min(x0 + 1, d.w - 1);
                const double fy = sy - double(y0), fx = sx - double(x0);
                for (uint32_t c = 0; c < d.c; ++c) {
                    const double warped =
                        (1 - fy) * ((1 - fx) * double(v.at(t, c, y0, x0)) +
                                    fx * double(v.at(t, c, y0, x1))) +
                        fy * ((1 - fx) * double(v.at(t, c, y1, x0)) +
                              fx * double(v.at(t, c, y1, x1)));
                    acc += std::abs(double(v.at(t + 1, c, y, x)) - warped);
                    ++n;
                }
            }
        if (n == 0) throw MetricError("warping_error: all pixels out of bounds at pair " +
                                      std::to_string(t));
        total += acc / double(n);
    }
    return total / double(d.t - 1);
}

double psnr(const VideoTensor& a, const VideoTensor& b) {
    const double m = mse(a, b);
    if (m <= 0.0) return 99.0;
    return std::min(10.0 * std::log10(1.0 / m), 99.0);
}

double ssim(const VideoTensor& a, const VideoTensor& b) {
    require_same_dims(a, b, "ssim");
    const Dims4& d = a.dims();
    constexpr double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
    const uint32_t win = std::min<uint32_t>(8, std::min(d.h, d.w));
    const uint32_t stride = 4;
    double total = 0.0;
    size_t count = 0;
    for (uint32_t t = 0; t < d.t; ++t)
        for (uint32_t c = 0; c < d.c; ++c)
            for (uint32_t wy = 0; wy == 0 || wy + win <= d.h; wy += stride) {
                if (wy + win > d.h) break;
                for (uint32_t wx = 0; wx == 0 || wx + win <= d.w; wx += stride) {
                    if (wx + win > d.w) break;
                    double ma = 0, mb = 0;
                    const double n = double(win) * win;
                    for (uint32_t y = 0; y < win; ++y)
                        for (uint32_t x = 0; x < win; ++x) {
                            ma += double(a.at(t, c, wy + y, wx + x));
                            mb += double(b.at(t, c, wy + y, wx + x));
                        }
                    ma /= n;
                    mb /= n;
                    double va = 0, vb = 0, cov = 0;
                    for (uint32_t y = 0; y < win; ++y)
                        for (uint32_t x = 0; x < win; ++x) {
                            const double da = double(a.at(t, c, wy + y, wx + x)) - ma;
                            const double db = double(b.at(t, c, wy + y, wx + x)) - mb;
                            va += da * da;
                            vb += db * db;
                            cov += da * db;
                        }
                    va /= n;
                    vb /= n;
                    cov /= n;
                    total += ((2 * ma * mb + C1) * (2 * cov + C2)) /
                             ((ma * ma + mb * mb + C1) * (va + vb + C2));
                    ++count;
                }
            }
    return count > 0 ? total / double(count) : 1.0;
}

}  // namespace zvr
