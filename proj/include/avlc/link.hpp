#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "avlc/channel.hpp"
#include "avlc/framing.hpp"
#include "avlc/mode.hpp"
#include "avlc/receiver.hpp"

namespace avlc {

/// Everything needed to push one frame through TX, channel and RX.
struct LinkSetup {
    FrameSpec frame;
    Mat2 h;
    double p_total = 2.0;
    double n0 = 1.0;
    std::optional<Lowpass> lowpass;

    /// p_total / n0
    double snr() const { return p_total / n0; }
    static LinkSetup at_snr(const FrameSpec& frame, const Mat2& h, double snr_linear);
};

struct FrameResult {
    Mode mode;
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;
    /// False when sync failed or the detector had no usable channel.
    bool delivered = false;
    std::optional<ChannelEstimate> estimate;
    /// Equalized payload symbols, normalized to unit constellation energy,
    /// and the transmitted ones they estimate (streams concatenated).
    std::vector<Cplx> rx_symbols;
    std::vector<Cplx> tx_symbols;
};

/// Silence before the frame in the simulated sample stream.
inline constexpr std::size_t lead_in_samples = 97;

/// Simulate one frame in `mode`. Payload bits come from `bits`, channel noise
/// from `noise`; the noise draw count does not depend on the mode, so runs
/// sharing a noise seed see identical noise. A lost frame counts half of its
/// bits as errors.
FrameResult simulate_frame(const Mode& mode, const LinkSetup& link, Rng& bits, Rng& noise);

}  // namespace avlc
