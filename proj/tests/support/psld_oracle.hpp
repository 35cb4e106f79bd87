// Double-precision transcription of the guidance loss for a 1x4x2x2 latent
// (4x4 pixels, Haar block-2 codec, 2x mean pooling), independent of the
// library implementation. Used as the finite-difference oracle.
#ifndef ZVR_TESTS_PSLD_ORACLE_HPP
#define ZVR_TESTS_PSLD_ORACLE_HPP

#include <cmath>
#include <vector>

namespace psld_oracle {

struct Instance {
    std::vector<double> y;     // 2x2 measurements
    std::vector<double> mean;  // latent prior mean (16)
    double var = 1.0;
    double abar = 0.0;
    double gamma1 = 0.1;
};

inline std::vector<double> decode(const std::vector<double>& z) {
    std::vector<double> x(16, 0.0);
    for (int by = 0; by < 2; ++by)
        for (int bx = 0; bx < 2; ++bx) {
            const double c00 = z[size_t(0 * 4 + by * 2 + bx)];
            const double c01 = z[size_t(1 * 4 + by * 2 + bx)];
            const double c10 = z[size_t(2 * 4 + by * 2 + bx)];
            const double c11 = z[size_t(3 * 4 + by * 2 + bx)];
            x[size_t((by * 2 + 0) * 4 + bx * 2 + 0)] = (c00 + c01 + c10 + c11) / 2.0;
            x[size_t((by * 2 + 0) * 4 + bx * 2 + 1)] = (c00 - c01 + c10 - c11) / 2.0;
            x[size_t((by * 2 + 1) * 4 + bx * 2 + 0)] = (c00 + c01 - c10 - c11) / 2.0;
            x[size_t((by * 2 + 1) * 4 + bx * 2 + 1)] = (c00 - c01 - c10 + c11) / 2.0;
        }
    return x;
}

inline std::vector<double> encode(const std::vector<double>& x) {
    std::vector<double> z(16, 0.0);
    for (int by = 0; by < 2; ++by)
        for (int bx = 0; bx < 2; ++bx) {
            const double p00 = x[size_t((by * 2 + 0) * 4 + bx * 2 + 0)];
            const double p01 = x[size_t((by * 2 + 0) * 4 + bx * 2 + 1)];
            const double p10 = x[size_t((by * 2 + 1) * 4 + bx * 2 + 0)];
            const double p11 = x[size_t((by * 2 + 1) * 4 + bx * 2 + 1)];
            z[size_t(0 * 4 + by * 2 + bx)] = (p00 + p01 + p10 + p11) / 2.0;
            z[size_t(1 * 4 + by * 2 + bx)] = (p00 - p01 + p10 - p11) / 2.0;
            z[size_t(2 * 4 + by * 2 + bx)] = (p00 + p01 - p10 - p11) / 2.0;
            z[size_t(3 * 4 + by * 2 + bx)] = (p00 - p01 - p10 + p11) / 2.0;
        }
    return z;
}

inline std::vector<double> pool(const std::vector<double>& x) {
    std::vector<double> y(4, 0.0);
    for (int oy = 0; oy < 2; ++oy)
        for (int ox = 0; ox < 2; ++ox)
            y[size_t(oy * 2 + ox)] =
                (x[size_t((oy * 2) * 4 + ox * 2)] + x[size_t((oy * 2) * 4 + ox * 2 + 1)] +
                 x[size_t((oy * 2 + 1) * 4 + ox * 2)] + x[size_t((oy * 2 + 1) * 4 + ox * 2 + 1)]) /
                4.0;
    return y;
}

inline std::vector<double> pool_adjoint(const std::vector<double>& y) {
    std::vector<double> x(16, 0.0);
    for (int oy = 0; oy < 2; ++oy)
        for (int ox = 0; ox < 2; ++ox)
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx)
                    x[size_t((oy * 2 + dy) * 4 + ox * 2 + dx)] = y[size_t(oy * 2 + ox)] / 4.0;
    return x;
}

// loss as a function of z_t through the gaussian-prior zhat0 map
inline double loss(const std::vector<double>& z_t, const Instance& inst) {
    const double denom = inst.abar * inst.var + (1.0 - inst.abar);
    std::vector<double> z0(16);
    for (size_t i = 0; i < 16; ++i)
        z0[i] = (std::sqrt(inst.abar) * inst.var * z_t[i] + (1.0 - inst.abar) * inst.mean[i]) /
                denom;
    const std::vector<double> decoded = decode(z0);
    const std::vector<double> ax = pool(decoded);
    double l_rec = 0.0;
    for (size_t i = 0; i < 4; ++i) {
        const double r = inst.y[i] - ax[i];
        l_rec += r * r;
    }
    const std::vector<double> aty = pool_adjoint(inst.y);
    const std::vector<double> atax = pool_adjoint(ax);
    std::vector<double> proj(16);
    for (size_t i = 0; i < 16; ++i) proj[i] = aty[i] + decoded[i] - atax[i];
    const std::vector<double> reproj = encode(proj);
    double l_reg = 0.0;
    for (size_t i = 0; i < 16; ++i) {
        const double r = z0[i] - reproj[i];
        l_reg += r * r;
    }
    return l_rec + inst.gamma1 * l_reg;
}

inline std::vector<double> fd_gradient(const std::vector<double>& z_t, const Instance& inst,
                                       double h) {
    std::vector<double> g(z_t.size());
    std::vector<double> probe = z_t;
    for (size_t i = 0; i < z_t.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + h;
        const double up = loss(probe, inst);
        probe[i] = orig - h;
        const double down = loss(probe, inst);
        probe[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace psld_oracle

#endif
