#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "avlc/numerics.hpp"

namespace avlc {

/// Position in the link plane, cm. z runs along the optical axis.
struct Point {
    double x = 0.0;
    double z = 0.0;
};

struct Obstacle {
    double diameter = 4.5;
    double z = 109.0;
    double x = 0.0;
};

/// Desk-scale 2x2 link: two LEDs at z = 0 facing +z, two PDs at z = link_len
/// facing -z.
struct Geometry {
    std::array<Point, 2> tx{{{-2.5, 0.0}, {2.5, 0.0}}};
    std::array<Point, 2> rx{{{-2.5, 218.0}, {2.5, 218.0}}};
    Obstacle obstacle;
    /// Collimated source: ~0.5 deg half-power semi-angle.
    double lambert_m = 18000.0;
    double rx_area = 1.0;  // cm^2
    double fov_deg = 60.0;
    /// Half-width of the soft shadow edge at the obstacle plane; 0 = hard ray shadow.
    double beam_radius = 0.0;

    double link_len() const { return rx[0].z - tx[0].z; }
    void set_link_len(double len);
    /// Throws validation_error naming the offending geometry key.
    void validate() const;
};

/// Lambertian LOS DC gain, boresight along +z at the source and -z at the detector.
double los_gain(Point tx, Point rx, double lambert_m, double rx_area, double fov_deg);

/// Fraction of the tx->rx ray that passes the obstacle: 0 or 1 for a hard
/// shadow; a linear ramp of half-width beam_radius around the obstacle edge otherwise.
double occlusion(Point tx, Point rx, const Obstacle& obstacle, double beam_radius = 0.0);

struct ChannelMatrix {
    /// h(j, i): gain from LED i to PD j, normalized.
    Mat2 h;
    /// Raw gain that maps to 1 (mean unobstructed direct-path gain).
    double normalization = 1.0;
};

ChannelMatrix channel_matrix(const Geometry& g);

/// First-order LED response with its optional exact one-pole inverse.
struct Lowpass {
    double f3db_per_symbol = 0.25;
    int sps = 4;
    bool equalize = true;

    double pole() const;
};

struct ChannelState {
    Mat2 h;
    double n0 = 1.0;  // noise variance per complex sample
    std::optional<Lowpass> lowpass;
};

using Streams = std::array<std::vector<Cplx>, 2>;

/// y_j = sum_i h(j, i) x_i + AWGN(n0); throws length_error for unequal branches.
Streams apply_channel(const Streams& x, const ChannelState& state, Rng& noise);
Streams apply_channel(const Streams& x, const ChannelState& state, std::uint64_t seed);

}  // namespace avlc
