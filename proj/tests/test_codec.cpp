#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "zvr/codec.hpp"
#include "zvr/rng.hpp"

using namespace zvr;

namespace {

VideoTensor random_tensor(Dims4 d, uint64_t seed) {
    Rng rng(seed);
    VideoTensor t(d);
    for (size_t i = 0; i < t.size(); ++i) t[i] = float(rng.normal());
    return t;
}

double max_abs_diff(const VideoTensor& a, const VideoTensor& b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(double(a[i]) - double(b[i])));
    return m;
}

}  // namespace

TEST_CASE("lossless 2D round trip") {
    Codec2D codec(2, 1.0);
    VideoTensor x = random_tensor({3, 2, 8, 8}, 1);
    VideoTensor z = codec.encode(x);
    CHECK(z.dims() == Dims4{3, 8, 4, 4});
    CHECK(max_abs_diff(codec.decode(z), x) <= 1e-5);
}

TEST_CASE("lossless 3D round trip") {
    Codec3D codec(2, 2, 1.0);
    VideoTensor x = random_tensor({4, 3, 8, 8}, 2);
    VideoTensor z = codec.encode(x);
    CHECK(z.dims() == Dims4{2, 24, 4, 4});
    CHECK(max_abs_diff(codec.decode(z), x) <= 1e-5);
}

TEST_CASE("3D codec with group 1 equals the 2D codec") {
    Codec3D c3(2, 1, 1.0);
    Codec2D c2(2, 1.0);
    VideoTensor x = random_tensor({3, 1, 4, 4}, 3);
    CHECK(max_abs_diff(c3.encode(x), c2.encode(x)) <= 1e-6);
}

TEST_CASE("constant frames survive any keep_ratio that includes DC") {
    for (double keep : {0.25, 0.5, 1.0}) {
        Codec2D codec(2, keep);
        VideoTensor x({2, 1, 4, 4}, 0.37f);
        CHECK(max_abs_diff(codec.decode(codec.encode(x)), x) <= 1e-6);
    }
    Codec3D c3(2, 2, 1.0 / 8.0);  // keeps exactly the DC of the 2x2x2 cube
    VideoTensor x({4, 1, 4, 4}, -0.8f);
    CHECK(max_abs_diff(c3.decode(c3.encode(x)), x) <= 1e-6);
}

TEST_CASE("truncation reduces energy (Parseval)") {
    Codec2D codec(2, 0.25);
    CHECK(codec.kept_coeffs() == 1);
    for (uint64_t seed = 0; seed < 6; ++seed) {
        VideoTensor x = random_tensor({1, 1, 8, 8}, 10 + seed);
        VideoTensor rec = codec.decode(codec.encode(x));
        CHECK(sum_squares(rec) <= sum_squares(x) + 1e-9);
    }
}

TEST_CASE("orthonormality preserves inner products at keep_ratio 1") {
    Codec2D c2(4, 1.0);
    Codec3D c3(2, 2, 1.0);
    for (uint64_t seed = 0; seed < 4; ++seed) {
        VideoTensor x = random_tensor({2, 1, 8, 8}, 20 + seed);
        VideoTensor y = random_tensor({2, 1, 8, 8}, 40 + seed);
        CHECK(dot(c2.encode(x), c2.encode(y)) == doctest::Approx(dot(x, y)).epsilon(1e-4));
        CHECK(dot(c3.encode(x), c3.encode(y)) == doctest::Approx(dot(x, y)).epsilon(1e-4));
    }
}

TEST_CASE("truncation is idempotent through a round trip") {
    Codec2D c2(2, 0.75);
    Codec3D c3(2, 2, 0.5);
    VideoTensor x = random_tensor({2, 2, 8, 8}, 50);
    VideoTensor z2 = c2.encode(x);
    CHECK(max_abs_diff(c2.encode(c2.decode(z2)), z2) <= 1e-5);
    VideoTensor z3 = c3.encode(x);
    CHECK(max_abs_diff(c3.encode(c3.decode(z3)), z3) <= 1e-5);
}

TEST_CASE("encode and decode are linear") {
    Codec2D codec(2, 0.75);
    VideoTensor x = random_tensor({1, 1, 4, 4}, 60);
    VideoTensor y = random_tensor({1, 1, 4, 4}, 61);
    const double a = 0.7, b = -1.3;
    VideoTensor lhs = codec.encode(lincomb(a, x, b, y));
    VideoTensor rhs = lincomb(a, codec.encode(x), b, codec.encode(y));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-5);
}

TEST_CASE("codec adjoints satisfy the inner-product identity") {
    // decode: latent -> pixel; <decode(z), x> == <z, decode_adjoint(x)>
    Codec2D c2(2, 0.75);
    VideoTensor z = random_tensor({2, 4, 4, 4}, 70);
    VideoTensor x = random_tensor({2, 1, 8, 8}, 71);
    CHECK(dot(c2.decode(z), x) == doctest::Approx(dot(z, c2.decode_adjoint(x))).epsilon(1e-5));
    // encode: pixel -> latent; <encode(x), z> == <x, encode_adjoint(z)>
    CHECK(dot(c2.encode(x), z) == doctest::Approx(dot(x, c2.encode_adjoint(z))).epsilon(1e-5));

    Codec3D c3(2, 2, 0.5);
    VideoTensor z3 = random_tensor({1, 8, 4, 4}, 72);
    VideoTensor x3 = random_tensor({2, 1, 8, 8}, 73);
    CHECK(dot(c3.decode(z3), x3) == doctest::Approx(dot(z3, c3.decode_adjoint(x3))).epsilon(1e-5));
    CHECK(dot(c3.encode(x3), z3) == doctest::Approx(dot(x3, c3.encode_adjoint(z3))).epsilon(1e-5));
}

TEST_CASE("divisibility violations raise shape errors") {
    Codec2D c2(2, 1.0);
    CHECK_THROWS_AS(c2.encode(random_tensor({1, 1, 3, 4}, 80)), ShapeError);
    Codec3D c3(2, 2, 1.0);
    CHECK_THROWS_AS(c3.encode(random_tensor({3, 1, 4, 4}, 81)), ShapeError);
}

TEST_CASE("invalid codec parameters") {
    CHECK_THROWS_AS(Codec2D(3, 1.0), ValueError);
    CHECK_THROWS_AS(Codec2D(2, 0.0), ValueError);
    CHECK_THROWS_AS(Codec3D(2, 3, 1.0), ValueError);
}
