#ifndef ZVR_TENSOR_HPP
#define ZVR_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zvr/error.hpp"

namespace zvr {

struct Dims4 {
    uint32_t t = 0;  // frames
    uint32_t c = 0;  // channels
    uint32_t h = 0;  // rows
    uint32_t w = 0;  // cols

    bool operator==(const Dims4&) const = default;
    size_t numel() const {
        return size_t(t) * size_t(c) * size_t(h) * size_t(w);
    }
    std::string str() const;
};

// Dense T x C x H x W video / latent tensor, row-major within frame,
// ordered T -> C -> H -> W. Float storage; reductions accumulate in double.
// Immutable by convention once handed to another module: all operations
// below return fresh tensors.
class VideoTensor {
public:
    VideoTensor() = default;
    explicit VideoTensor(Dims4 dims, float fill = 0.0f)
        : dims_(dims), data_(dims.numel(), fill) {}
    VideoTensor(Dims4 dims, std::vector<float> data) : dims_(dims), data_(std::move(data)) {
        if (data_.size() != dims_.numel())
            throw ShapeError("data length " + std::to_string(data_.size()) +
                             " != dims " + dims_.str());
    }

    const Dims4& dims() const { return dims_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    float& operator[](size_t i) { return data_[i]; }
    float operator[](size_t i) const { return data_[i]; }

    size_t index(uint32_t t, uint32_t c, uint32_t y, uint32_t x) const {
        return ((size_t(t) * dims_.c + c) * dims_.h + y) * dims_.w + x;
    }
    float& at(uint32_t t, uint32_t c, uint32_t y, uint32_t x) { return data_[index(t, c, y, x)]; }
    float at(uint32_t t, uint32_t c, uint32_t y, uint32_t x) const { return data_[index(t, c, y, x)]; }

    size_t frame_size() const { return size_t(dims_.c) * dims_.h * dims_.w; }
    float* frame(uint32_t t) { return data_.data() + size_t(t) * frame_size(); }
    const float* frame(uint32_t t) const { return data_.data() + size_t(t) * frame_size(); }

private:
    Dims4 dims_;
    std::vector<float> data_;
};

// Per-pixel (dy, dx) displacement mapping frame i to frame i+1, stored as a
// (T-1, 2, H, W) tensor. Convention used by the warping error: frame i+1 at
// pixel p is predicted by sampling frame i at p - flow[i][p].
struct FlowField {
    VideoTensor data;

    FlowField() = default;
    explicit FlowField(VideoTensor d) : data(std::move(d)) {
        if (data.dims().c != 2)
            throw ShapeError("flow field needs 2 channels (dy,dx), got " + data.dims().str());
    }

    uint32_t pairs() const { return data.dims().t; }

    // dims check against the video the flow annotates
    void check_matches(const Dims4& video) const {
        if (data.dims().t + 1 != video.t || data.dims().h != video.h || data.dims().w != video.w)
            throw ShapeError("flow " + data.dims().str() + " does not match video " + video.str());
    }
};

void require_same_dims(const VideoTensor& a, const VideoTensor& b, const char* what);

// (1-w)*a + w*b elementwise. w = 0 and w = 1 return the argument bit-exactly.
VideoTensor lerp(const VideoTensor& a, const VideoTensor& b, double w);

// elementwise helpers shared across modules
VideoTensor add(const VideoTensor& a, const VideoTensor& b);
VideoTensor sub(const VideoTensor& a, const VideoTensor& b);
VideoTensor scale(const VideoTensor& a, double s);
// ca*a + cb*b with double intermediates
VideoTensor lincomb(double ca, const VideoTensor& a, double cb, const VideoTensor& b);

double dot(const VideoTensor& a, const VideoTensor& b);      // 64-bit accumulation
double sum_squares(const VideoTensor& a);
double max_abs(const VideoTensor& a);
double mse(const VideoTensor& a, const VideoTensor& b);

bool all_finite(const VideoTensor& a);
void check_finite(const VideoTensor& a, const char* what);

}  // namespace zvr

#endif
