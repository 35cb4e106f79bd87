#include "zvr/degradation.hpp"

#include <algorithm>
#include <cmath>

namespace zvr {

namespace {

int mirror_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

std::vector<double> gaussian_kernel(int radius, double sigma) {
    if (radius < 0) throw ValueError("blur radius must be >= 0");
    if (!(sigma > 0.0)) throw ValueError("blur sigma must be > 0");
    std::vector<double> k(size_t(2 * radius) + 1);
    double sum = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        const double v = std::exp(-0.5 * double(d) * double(d) / (sigma * sigma));
        k[size_t(d + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// 1D convolution along rows (horizontal = true) or columns, mirrored borders.
// adjoint = false: gather  out[i] = sum_d w[d] * in[mirror(i+d)]
// adjoint = true : scatter out[mirror(i+d)] += w[d] * in[i]
VideoTensor conv1d_spatial(const VideoTensor& x, const std::vector<double>& w, bool horizontal,
                           bool adjoint) {
    const Dims4& d = x.dims();
    const int radius = (int(w.size()) - 1) / 2;
    const int n = horizontal ? int(d.w) : int(d.h);
    VideoTensor out(d);
    std::vector<double> acc(static_cast<size_t>(n));
    for (uint32_t t = 0; t < d.t; ++t)
        for (uint32_t c = 0; c < d.c; ++c) {
            const uint32_t lines = horizontal ? d.h : d.w;
            for (uint32_t l = 0; l < lines; ++l) {
                std::fill(acc.begin(), acc.end(), 0.0);
                for (int i = 0; i < n; ++i) {
                    const auto pick = [&](int j) {
                        return horizontal ? double(x.at(t, c, l, uint32_t(j)))
                                          : double(x.at(t, c, uint32_t(j), l));
                    };
                    if (!adjoint) {
                        double s = 0.0;
                        for (int dd = -radius; dd <= radius; ++dd)
                            s += w[size_t(dd + radius)] * pick(mirror_index(i + dd, n));
                        acc[size_t(i)] = s;
                    } else {
                        const double v = pick(i);
                        for (int dd = -radius; dd <= radius; ++dd)
                            acc[size_t(mirror_index(i + dd, n))] += w[size_t(dd + radius)] * v;
                    }
                }
                for (int i = 0; i < n; ++i) {
                    if (horizontal)
                        out.at(t, c, l, uint32_t(i)) = float(acc[size_t(i)]);
                    else
                        out.at(t, c, uint32_t(i), l) = float(acc[size_t(i)]);
                }
            }
        }
    return out;
}

VideoTensor temporal_blur(const VideoTensor& x, int window, bool adjoint) {
    if (window % 2 == 0 || window < 1) throw ValueError("temporal blur window must be odd >= 1");
    const int T = int(x.dims().t);
    if (window > T) throw ValueError("temporal blur window exceeds clip length");
    const int half = window / 2;
    const size_t fs = x.frame_size();
    VideoTensor out(x.dims());
    std::vector<double> acc(fs);
    if (!adjoint) {
        for (int f = 0; f < T; ++f) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int dd = -half; dd <= half; ++dd) {
                const float* p = x.frame(uint32_t(std::clamp(f + dd, 0, T - 1)));
                for (size_t i = 0; i < fs; ++i) acc[i] += double(p[i]);
            }
            float* q = out.frame(uint32_t(f));
            for (size_t i = 0; i < fs; ++i) q[i] = float(acc[i] / double(window));
        }
    } else {
        std::vector<std::vector<double>> accs(size_t(T), std::vector<double>(fs, 0.0));
        for (int f = 0; f < T; ++f) {
            const float* p = x.frame(uint32_t(f));
            for (int dd = -half; dd <= half; ++dd) {
                auto& a = accs[size_t(std::clamp(f + dd, 0, T - 1))];
                for (size_t i = 0; i < fs; ++i) a[i] += double(p[i]) / double(window);
            }
        }
        for (int f = 0; f < T; ++f) {
            float* q = out.frame(uint32_t(f));
            for (size_t i = 0; i < fs; ++i) q[i] = float(accs[size_t(f)][i]);
        }
    }
    return out;
}

}  // namespace

bool is_linear(const DegradationOp& op) { return !std::holds_alternative<LowLight>(op); }

const char* op_name(const DegradationOp& op) {
    if (std::holds_alternative<Downsample>(op)) return "downsample";
    if (std::holds_alternative<GaussianBlur>(op)) return "gaussian_blur";
    if (std::holds_alternative<TemporalUniformBlur>(op)) return "temporal_blur";
    return "lowlight";
}

Dims4 output_dims(const DegradationOp& op, Dims4 in) {
    if (const auto* ds = std::get_if<Downsample>(&op)) {
        if (ds->factor == 0 || in.h % ds->factor != 0 || in.w % ds->factor != 0)
            throw ShapeError("dims " + in.str() + " not divisible by downsample factor " +
                             std::to_string(ds->factor));
        return {in.t, in.c, in.h / ds->factor, in.w / ds->factor};
    }
    return in;
}

VideoTensor apply_forward(const DegradationOp& op, const VideoTensor& x) {
    if (const auto* ds = std::get_if<Downsample>(&op)) {
        const Dims4 od = output_dims(op, x.dims());
        const uint32_t k = ds->factor;
        VideoTensor y(od);
        const double inv = 1.0 / double(k * k);
        for (uint32_t t = 0; t < od.t; ++t)
            for (uint32_t c = 0; c < od.c; ++c)
                for (uint32_t oy = 0; oy < od.h; ++oy)
                    for (uint32_t ox = 0; ox < od.w; ++ox) {
                        double s = 0.0;
                        for (uint32_t iy = 0; iy < k; ++iy)
                            for (uint32_t ix = 0; ix < k; ++ix)
                                s += double(x.at(t, c, oy * k + iy, ox * k + ix));
                        y.at(t, c, oy, ox) = float(s * inv);
                    }
        return y;
    }
    if (const auto* gb = std::get_if<GaussianBlur>(&op)) {
        const auto w = gaussian_kernel(gb->radius, gb->sigma);
        return conv1d_spatial(conv1d_spatial(x, w, true, false), w, false, false);
    }
    if (const auto* tb = std::get_if<TemporalUniformBlur>(&op)) {
        return temporal_blur(x, tb->window, false);
    }
    const auto& ll = std::get<LowLight>(op);
    const Dims4& md = ll.mask.dims();
    const Dims4& xd = x.dims();
    if (!(md.c == xd.c && md.h == xd.h && md.w == xd.w && (md.t == xd.t || md.t == 1)))
        throw ShapeError("lowlight mask " + md.str() + " does not match video " + xd.str());
    VideoTensor y(xd);
    const size_t fs = x.frame_size();
    for (uint32_t t = 0; t < xd.t; ++t) {
        const float* xf = x.frame(t);
        const float* mf = ll.mask.frame(md.t == 1 ? 0 : t);
        float* yf = y.frame(t);
        for (size_t i = 0; i < fs; ++i) yf[i] = float(ll.f * double(xf[i]) + double(mf[i]));
    }
    return y;
}

VideoTensor apply_adjoint(const DegradationOp& op, const VideoTensor& y) {
    if (const auto* ds = std::get_if<Downsample>(&op)) {
        const uint32_t k = ds->factor;
        const Dims4& od = y.dims();
        const Dims4 in{od.t, od.c, od.h * k, od.w * k};
        VideoTensor x(in);
        const double inv = 1.0 / double(k * k);
        for (uint32_t t = 0; t < od.t; ++t)
            for (uint32_t c = 0; c < od.c; ++c)
                for (uint32_t oy = 0; oy < od.h; ++oy)
                    for (uint32_t ox = 0; ox < od.w; ++ox) {
                        const float v = float(double(y.at(t, c, oy, ox)) * inv);
                        for (uint32_t iy = 0; iy < k; ++iy)
                            for (uint32_t ix = 0; ix < k; ++ix)
                                x.at(t, c, oy * k + iy, ox * k + ix) = v;
                    }
        return x;
    }
    if (const auto* gb = std::get_if<GaussianBlur>(&op)) {
        const auto w = gaussian_kernel(gb->radius, gb->sigma);
        // apply = V . H  =>  adjoint = H^T . V^T
        return conv1d_spatial(conv1d_spatial(y, w, false, true), w, true, true);
    }
    if (const auto* tb = std::get_if<TemporalUniformBlur>(&op)) {
        return temporal_blur(y, tb->window, true);
    }
    throw UnsupportedError("adjoint of the affine lowlight operator");
}

}  // namespace zvr
