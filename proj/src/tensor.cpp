#include "zvr/tensor.hpp"

#include <cmath>

namespace zvr {

std::string Dims4::str() const {
    return std::to_string(t) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
}

void require_same_dims(const VideoTensor& a, const VideoTensor& b, const char* what) {
    if (!(a.dims() == b.dims()))
        throw ShapeError(std::string(what) + ": " + a.dims().str() + " vs " + b.dims().str());
}

VideoTensor lerp(const VideoTensor& a, const VideoTensor& b, double w) {
    require_same_dims(a, b, "lerp");
    if (w == 0.0) return a;
    if (w == 1.0) return b;
    VideoTensor out(a.dims());
    const double cw = 1.0 - w;
    for (size_t i = 0; i < a.size(); ++i)
        out[i] = float(cw * double(a[i]) + w * double(b[i]));
    return out;
}

VideoTensor add(const VideoTensor& a, const VideoTensor& b) {
    require_same_dims(a, b, "add");
    VideoTensor out(a.dims());
    for (size_t i = 0; i < a.size(); ++i) out[i] = float(double(a[i]) + double(b[i]));
    return out;
}

VideoTensor sub(const VideoTensor& a, const VideoTensor& b) {
    require_same_dims(a, b, "sub");
    VideoTensor out(a.dims());
    for (size_t i = 0; i < a.size(); ++i) out[i] = float(double(a[i]) - double(b[i]));
    return out;
}

VideoTensor scale(const VideoTensor& a, double s) {
    VideoTensor out(a.dims());
    for (size_t i = 0; i < a.size(); ++i) out[i] = float(s * double(a[i]));
    return out;
}

VideoTensor lincomb(double ca, const VideoTensor& a, double cb, const VideoTensor& b) {
    require_same_dims(a, b, "lincomb");
    VideoTensor out(a.dims());
    for (size_t i = 0; i < a.size(); ++i)
        out[i] = float(ca * double(a[i]) + cb * double(b[i]));
    return out;
}

double dot(const VideoTensor& a, const VideoTensor& b) {
    require_same_dims(a, b, "dot");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += double(a[i]) * double(b[i]);
    return acc;
}

double sum_squares(const VideoTensor& a) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += double(a[i]) * double(a[i]);
    return acc;
}

double max_abs(const VideoTensor& a) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i])));
    return m;
}

double mse(const VideoTensor& a, const VideoTensor& b) {
    require_same_dims(a, b, "mse");
    if (a.size() == 0) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = double(a[i]) - double(b[i]);
        acc += d * d;
    }
    return acc / double(a.size());
}

bool all_finite(const VideoTensor& a) {
    for (size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a[i])) return false;
    return true;
}

void check_finite(const VideoTensor& a, const char* what) {
    if (!all_finite(a)) throw ValueError(std::string(what) + ": non-finite values");
}

}  // namespace zvr
