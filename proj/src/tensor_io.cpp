#include "zvr/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

namespace zvr {

namespace {

constexpr char kMagic[4] = {'V', 'T', 'E', 'N'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw FormatError("truncated header");
    return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}

}  // namespace

void save_raw(const VideoTensor& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, 4);
    put_u32(os, t.dims().t);
    put_u32(os, t.dims().c);
    put_u32(os, t.dims().h);
    put_u32(os, t.dims().w);
    // f32 little-endian payload; assumes LE host (checked below at load)
    static_assert(sizeof(float) == 4);
    static_assert(std::numeric_limits<float>::is_iec559);
    os.write(reinterpret_cast<const char*>(t.data()), std::streamsize(t.size() * 4));
    if (!os) throw IoError("write failed: " + path);
}

VideoTensor load_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic in " + path);
    const uint32_t version = get_u32(is);
    if (version != kVersion)
        throw FormatError("unsupported version " + std::to_string(version) + " in " + path);
    const uint32_t ndims = get_u32(is);
    if (ndims != 4) throw FormatError("expected 4 dims, got " + std::to_string(ndims));
    Dims4 d;
    d.t = get_u32(is);
    d.c = get_u32(is);
    d.h = get_u32(is);
    d.w = get_u32(is);
    constexpr uint64_t kMaxElems = uint64_t(1) << 31;
    const uint64_t n = uint64_t(d.t) * d.c * d.h * d.w;
    if (n > kMaxElems) throw FormatError("dim overflow: " + d.str());
    VideoTensor t(d);
    is.read(reinterpret_cast<char*>(t.data()), std::streamsize(n * 4));
    if (!is) throw FormatError("truncated payload in " + path);
    check_finite(t, "load_raw");
    return t;
}

void export_frames(const VideoTensor& t, const std::string& dir) {
    const Dims4& d = t.dims();
    if (d.c != 1 && d.c != 3)
        throw ValueError("export_frames needs C in {1,3}, got C=" + std::to_string(d.c));
    std::filesystem::create_directories(dir);
    const bool rgb = d.c == 3;
    for (uint32_t f = 0; f < d.t; ++f) {
        char name[32];
        std::snprintf(name, sizeof(name), rgb ? "frame_%04u.ppm" : "frame_%04u.pgm", f);
        const std::string path = dir + "/" + name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw IoError("cannot open for write: " + path);
        os << (rgb ? "P6" : "P5") << "\n" << d.w << " " << d.h << "\n255\n";
        std::vector<unsigned char> row(size_t(d.w) * d.c);
        for (uint32_t y = 0; y < d.h; ++y) {
            for (uint32_t x = 0; x < d.w; ++x)
                for (uint32_t c = 0; c < d.c; ++c) {
                    const double v = std::clamp(double(t.at(f, c, y, x)), 0.0, 1.0);
                    row[size_t(x) * d.c + c] = static_cast<unsigned char>(std::lround(v * 255.0));
                }
            os.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
        }
        if (!os) throw IoError("write failed: " + path);
    }
}

}  // namespace zvr
