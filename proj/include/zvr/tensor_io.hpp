#ifndef ZVR_TENSOR_IO_HPP
#define ZVR_TENSOR_IO_HPP

#include <string>

#include "zvr/tensor.hpp"

namespace zvr {

// Raw tensor file ".vten":
//   magic "VTEN" | u32 version = 1 | u32 ndims = 4 | 4 x u32 dims (T,C,H,W) |
//   T*C*H*W x f32 payload, all little-endian.
// save/load round trip is bit-exact.
void save_raw(const VideoTensor& t, const std::string& path);
VideoTensor load_raw(const std::string& path);

// One binary PPM (P6, C=3) or PGM (P5, C=1) per frame, named frame_%04d.ppm/.pgm
// inside dir. Values are read as [0,1] and quantized as round(clamp(v,0,1)*255).
void export_frames(const VideoTensor& t, const std::string& dir);

}  // namespace zvr

#endif
