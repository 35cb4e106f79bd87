#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>

#include "zvr/denoiser.hpp"
#include "zvr/rng.hpp"

using namespace zvr;

namespace {

VideoTensor random_tensor(Dims4 d, uint64_t seed) {
    Rng rng(seed);
    VideoTensor t(d);
    for (size_t i = 0; i < t.size(); ++i) t[i] = float(rng.normal());
    return t;
}

double rel_err(const VideoTensor& got, const VideoTensor& want) {
    double num = 0, den = 0;
    for (size_t i = 0; i < got.size(); ++i) {
        const double d = double(got[i]) - double(want[i]);
        num += d * d;
        den += double(want[i]) * double(want[i]);
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-30);
}

double frame_diff_msd(const VideoTensor& v) {
    double acc = 0.0;
    const size_t fs = v.frame_size();
    for (uint32_t t = 0; t + 1 < v.dims().t; ++t) {
        const float* a = v.frame(t);
        const float* b = v.frame(t + 1);
        for (size_t i = 0; i < fs; ++i) {
            const double d = double(b[i]) - double(a[i]);
            acc += d * d;
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("oracle predicts the exact noise used by add_noise") {
    DdpmSchedule s = make_linear_schedule(1000, 1e-4, 0.02);
    VideoTensor target = random_tensor({2, 1, 6, 6}, 1);
    VideoTensor eps = random_tensor({2, 1, 6, 6}, 2);
    OracleDenoiser oracle(target, s);
    for (int t : {10, 500, 1000}) {
        VideoTensor z_t = add_noise(target, t, eps, s);
        CHECK(rel_err(oracle.predict_noise(z_t, t), eps) <= 1e-5);
        VideoTensor rec = predict_z0(z_t, oracle.predict_noise(z_t, t), t, s);
        CHECK(rel_err(rec, target) <= 1e-5);
    }
}

TEST_CASE("oracle with zero target scales z_t") {
    DdpmSchedule s = make_linear_schedule(3, 0.1, 0.1);
    OracleDenoiser oracle(VideoTensor({1, 1, 4, 4}), s);
    VideoTensor z = random_tensor({1, 1, 4, 4}, 3);
    VideoTensor out = oracle.predict_noise(z, 2);
    const double c = 1.0 / std::sqrt(1.0 - 0.81);
    for (size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == doctest::Approx(c * double(z[i])).epsilon(1e-6));
}

TEST_CASE("oracle rejects the degenerate timestep") {
    DdpmSchedule s = make_linear_schedule(3, 0.1, 0.1);
    VideoTensor z = random_tensor({1, 1, 2, 2}, 4);
    OracleDenoiser oracle(VideoTensor({1, 1, 2, 2}), s);
    CHECK_THROWS_AS(oracle.predict_noise(z, 0), ValueError);
}

TEST_CASE("gaussian posterior mean, scalar check at alpha_bar = 0.5") {
    DdpmSchedule s = make_linear_schedule(1, 0.5, 0.5);
    GaussianPriorDenoiser den(VideoTensor({1, 1, 2, 2}), 1.0, s);
    VideoTensor z = random_tensor({1, 1, 2, 2}, 5);
    VideoTensor post = den.posterior_mean(z, 1);
    for (size_t i = 0; i < post.size(); ++i)
        CHECK(post[i] == doctest::Approx(std::sqrt(0.5) * double(z[i])).epsilon(1e-6));
}

TEST_CASE("gaussian with vanishing prior variance pins zhat0 to the mean") {
    DdpmSchedule s = make_linear_schedule(3, 0.1, 0.1);
    VideoTensor mean = random_tensor({1, 1, 3, 3}, 6);
    GaussianPriorDenoiser den(mean, 1e-12, s);
    VideoTensor z = random_tensor({1, 1, 3, 3}, 7);
    const double abar = 0.81;
    VideoTensor eps = den.predict_noise(z, 2);
    for (size_t i = 0; i < eps.size(); ++i) {
        const double want =
            (double(z[i]) - std::sqrt(abar) * double(mean[i])) / std::sqrt(1.0 - abar);
        CHECK(eps[i] == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("gaussian posterior mean matches Monte-Carlo conditional means") {
    // scalar case: z0 ~ N(mu, s2), z_t = sqrt(abar) z0 + sqrt(1-abar) eps
    const double mu = 0.3, s2 = 0.7, abar = 0.6;
    Rng rng(123);
    const int n = 200000;
    const int bins = 16;
    const double lo = -3.0, hi = 3.0;
    std::vector<double> sum_z0(bins, 0.0), sum_pred(bins, 0.0);
    std::vector<int> cnt(bins, 0);
    const double denom = abar * s2 + (1.0 - abar);
    for (int i = 0; i < n; ++i) {
        const double z0 = mu + std::sqrt(s2) * rng.normal();
        const double zt = std::sqrt(abar) * z0 + std::sqrt(1.0 - abar) * rng.normal();
        if (zt < lo || zt >= hi) continue;
        const int b = int((zt - lo) / (hi - lo) * bins);
        sum_z0[size_t(b)] += z0;
        sum_pred[size_t(b)] += (std::sqrt(abar) * s2 * zt + (1.0 - abar) * mu) / denom;
        cnt[size_t(b)] += 1;
    }
    const double post_var = s2 * (1.0 - abar) / denom;
    int checked = 0;
    for (int b = 0; b < bins; ++b) {
        if (cnt[size_t(b)] < 500) continue;
        const double emp = sum_z0[size_t(b)] / cnt[size_t(b)];
        const double pred = sum_pred[size_t(b)] / cnt[size_t(b)];
        const double se = std::sqrt(post_var / cnt[size_t(b)]);
        CHECK(std::abs(emp - pred) <= 3.0 * se);
        ++checked;
    }
    CHECK(checked >= 8);
}

TEST_CASE("temporal moving average, replicated boundary frames") {
    VideoTensor x({2, 1, 1, 1});
    x.at(0, 0, 0, 0) = 0.0f;
    x.at(1, 0, 0, 0) = 2.0f;
    VideoTensor avg = temporal_moving_average(x, 3);
    CHECK(avg.at(0, 0, 0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(avg.at(1, 0, 0, 0) == doctest::Approx(4.0 / 3.0));

    CHECK_THROWS_AS(temporal_moving_average(x, 2), ValueError);
}

TEST_CASE("temporal smoother") {
    DdpmSchedule s = make_linear_schedule(1000, 1e-4, 0.02);
    auto base = std::make_shared<GaussianPriorDenoiser>(VideoTensor({4, 1, 4, 4}), 1.0, s);

    SUBCASE("kappa = 0 is bit-exact the base") {
        TemporalSmootherDenoiser sm(base, 0.0, 3, s);
        VideoTensor z = random_tensor({4, 1, 4, 4}, 8);
        VideoTensor a = sm.predict_noise(z, 500);
        VideoTensor b = base->predict_noise(z, 500);
        CHECK(std::memcmp(a.data(), b.data(), a.size() * 4) == 0);
    }

    SUBCASE("static clip is untouched by smoothing") {
        TemporalSmootherDenoiser sm(base, 0.7, 3, s);
        VideoTensor frame = random_tensor({1, 1, 4, 4}, 9);
        VideoTensor z({4, 1, 4, 4});
        for (uint32_t t = 0; t < 4; ++t)
            std::memcpy(z.frame(t), frame.data(), frame.size() * 4);
        VideoTensor a = sm.predict_noise(z, 500);
        VideoTensor b = base->predict_noise(z, 500);
        CHECK(rel_err(a, b) <= 1e-6);
    }

    SUBCASE("even window is rejected") {
        CHECK_THROWS_AS(TemporalSmootherDenoiser(base, 0.5, 4, s), ValueError);
    }

    SUBCASE("window longer than the clip is rejected") {
        TemporalSmootherDenoiser sm(base, 0.5, 5, s);
        VideoTensor z = random_tensor({4, 1, 4, 4}, 10);
        CHECK_THROWS_AS(sm.predict_noise(z, 500), ValueError);
    }
}

TEST_CASE("smoothing never raises frame-to-frame variance of zhat0") {
    DdpmSchedule s = make_linear_schedule(1000, 1e-4, 0.02);
    auto base = std::make_shared<GaussianPriorDenoiser>(VideoTensor({6, 1, 4, 4}), 1.0, s);
    const int t = 600;
    for (uint64_t seed = 0; seed < 8; ++seed) {
        VideoTensor z = random_tensor({6, 1, 4, 4}, 20 + seed);
        Rng kr(40 + seed);
        const double kappa = 0.2 + 0.8 * kr.uniform();
        TemporalSmootherDenoiser sm(base, kappa, 3, s);
        VideoTensor z0_base = predict_z0(z, base->predict_noise(z, t), t, s);
        VideoTensor z0_sm = predict_z0(z, sm.predict_noise(z, t), t, s);
        CHECK(frame_diff_msd(z0_sm) <= frame_diff_msd(z0_base) + 1e-9);
    }
}

TEST_CASE("denoiser outputs are finite and shape-preserving across the grid") {
    DdpmSchedule s = make_linear_schedule(1000, 1e-4, 0.02);
    DdimGrid grid = make_uniform_grid(1000, 10);
    GaussianPriorDenoiser den(VideoTensor({3, 2, 4, 4}), 2.0, s);
    VideoTensor z = random_tensor({3, 2, 4, 4}, 11);
    for (int t : grid.timesteps) {
        VideoTensor eps = den.predict_noise(z, t);
        REQUIRE(eps.dims() == z.dims());
        CHECK(all_finite(eps));
        CHECK(all_finite(predict_z0(z, eps, t, s)));
    }
}
