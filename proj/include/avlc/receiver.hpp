#pragma once

#include <array>
#include <span>
#include <vector>

#include "avlc/mode.hpp"
#include "avlc/numerics.hpp"

namespace avlc {

struct ChannelEstimate {
    Mat2 h_hat;
    int pilot_len = 0;
    /// RMS of y - h_hat * pilot over all four pilot segments.
    double residual_rms = 0.0;
};

/// segments[j][i]: symbols received on PD j while LED i sends its pilot block.
using PilotSegments = std::array<std::array<std::vector<Cplx>, 2>, 2>;

/// Least-squares estimate under time-orthogonal pilots:
/// h_hat(j, i) = <y_ji, p_i> / ||p_i||^2.
ChannelEstimate estimate_channel(const PilotSegments& segments, const std::array<std::vector<Cplx>, 2>& pilots);

struct StreamSnrs {
    Scheme scheme = Scheme::sm;
    /// Linear SNR per stream: two entries for SM, one for SD.
    std::vector<double> snr;
};

/// Per-stream SNR predicted from a channel estimate.
///
/// Each LED radiates p_total / 2 in both schemes. SM uses the post-zero-forcing
/// SNR (p_total / 2) / (n0 [(H^H H)^-1]_ii); throws singular_matrix when H
/// cannot be inverted. SD repeats one symbol on both LEDs and combines both
/// PDs with MRC: ||H [1 1]^T||^2 (p_total / 2) / n0.
StreamSnrs stream_snrs(const ChannelEstimate& est, double p_total, double n0, Scheme scheme);

using SymbolPair = std::array<Cplx, 2>;

/// x_hat = H_hat^-1 y per symbol pair.
std::vector<SymbolPair> detect_sm_zf(std::span<const SymbolPair> y, const ChannelEstimate& est);

/// Unit-gain MRC with effective column g = H_hat [1 1]^T / sqrt(2):
/// s_hat = g^H y / ||g||^2. Throws dead_channel when ||g|| < 1e-12.
std::vector<Cplx> combine_sd_mrc(std::span<const SymbolPair> y, const ChannelEstimate& est);

}  // namespace avlc
