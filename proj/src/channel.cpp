#include "avlc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "avlc/errors.hpp"

namespace avlc {

void Geometry::set_link_len(double len) {
    rx[0].z = tx[0].z + len;
    rx[1].z = tx[1].z + len;
}

void Geometry::validate() const {
    if (tx[0].z != tx[1].z) throw validation_error("geometry.tx2.z", "both LEDs must share one plane");
    if (rx[0].z != rx[1].z) throw validation_error("geometry.link_len", "both PDs must share one plane");
    if (!(link_len() > 0.0)) throw validation_error("geometry.link_len", "must be > 0");
    if (!(obstacle.diameter > 0.0)) throw validation_error("geometry.obstacle.diameter", "must be > 0");
    if (!(obstacle.z > tx[0].z && obstacle.z < rx[0].z))
        throw validation_error("geometry.obstacle.z", "must lie strictly between the LED and PD planes");
    if (!(lambert_m >= 0.0)) throw validation_error("geometry.lambert_m", "must be >= 0");
    if (!(rx_area > 0.0)) throw validation_error("geometry.rx_area", "must be > 0");
    if (!(fov_deg > 0.0 && fov_deg <= 90.0)) throw validation_error("geometry.fov_deg", "must lie in (0, 90]");
    if (!(beam_radius >= 0.0)) throw validation_error("geometry.beam_radius", "must be >= 0");
}

double los_gain(Point tx, Point rx, double lambert_m, double rx_area, double fov_deg) {
    const double dx = rx.x - tx.x;
    const double dz = rx.z - tx.z;
    const double d2 = dx * dx + dz * dz;
    const double cos_angle = std::abs(dz) / std::sqrt(d2);
    const double fov_cos = std::cos(fov_deg * std::numbers::pi / 180.0);
    if (cos_angle < fov_cos) return 0.0;
    return (lambert_m + 1.0) * rx_area / (2.0 * std::numbers::pi * d2) * std::pow(cos_angle, lambert_m) * cos_angle;
}

double occlusion(Point tx, Point rx, const Obstacle& obstacle, double beam_radius) {
    const double t = (obstacle.z - tx.z) / (rx.z - tx.z);
    const double x_at_plane = tx.x + t * (rx.x - tx.x);
    const double dist = std::abs(x_at_plane - obstacle.x);
    const double r = 0.5 * obstacle.diameter;
    if (beam_radius <= 0.0) return dist < r ? 0.0 : 1.0;
    const double f = (dist - (r - beam_radius)) / (2.0 * beam_radius);
    return std::clamp(f, 0.0, 1.0);
}

ChannelMatrix channel_matrix(const Geometry& g) {
    ChannelMatrix out;
    const auto gain = [&](int i, int j) {
        return los_gain(g.tx[static_cast<std::size_t>(i)], g.rx[static_cast<std::size_t>(j)], g.lambert_m, g.rx_area,
                        g.fov_deg);
    };
    out.normalization = 0.5 * (gain(0, 0) + gain(1, 1));
    if (!(out.normalization > 0.0)) out.normalization = 1.0;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            out.h(j, i) = gain(i, j) *
                          occlusion(g.tx[static_cast<std::size_t>(i)], g.rx[static_cast<std::size_t>(j)], g.obstacle,
                                    g.beam_radius) /
                          out.normalization;
    return out;
}

double Lowpass::pole() const {
    return std::exp(-2.0 * std::numbers::pi * f3db_per_symbol / sps);
}

namespace {

std::vector<Cplx> one_pole(std::span<const Cplx> x, double a) {
    std::vector<Cplx> y(x.size());
    Cplx state{};
    for (std::size_t n = 0; n < x.size(); ++n) {
        state = a * state + (1.0 - a) * x[n];
        y[n] = state;
    }
    return y;
}

std::vector<Cplx> one_pole_inverse(std::span<const Cplx> y, double a) {
    std::vector<Cplx> x(y.size());
    Cplx prev{};
    for (std::size_t n = 0; n < y.size(); ++n) {
        x[n] = (y[n] - a * prev) / (1.0 - a);
        prev = y[n];
    }
    return x;
}

}  // namespace

Streams apply_channel(const Streams& x, const ChannelState& state, Rng& noise) {
    if (x[0].size() != x[1].size()) throw length_error("apply_channel: branches differ in length");
    Streams in = x;
    if (state.lowpass) {
        const double a = state.lowpass->pole();
        for (auto& s : in) {
            s = one_pole(s, a);
            if (state.lowpass->equalize) s = one_pole_inverse(s, a);
        }
    }
    Streams y;
    const std::size_t n = in[0].size();
    for (std::size_t j = 0; j < 2; ++j) y[j].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (int j = 0; j < 2; ++j) {
            const Cplx v = state.h(j, 0) * in[0][k] + state.h(j, 1) * in[1][k];
            y[static_cast<std::size_t>(j)][k] = v + noise.complex_gaussian(state.n0);
        }
    }
    return y;
}

Streams apply_channel(const Streams& x, const ChannelState& state, std::uint64_t seed) {
    Rng rng(seed);
    return apply_channel(x, state, rng);
}

}  // namespace avlc
