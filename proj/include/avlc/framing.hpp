#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "avlc/errors.hpp"
#include "avlc/mode.hpp"
#include "avlc/numerics.hpp"

namespace avlc {

/// Physical frame parameters. Lengths are in symbols unless noted.
struct FrameSpec {
    int preamble_len = 63;
    int pilot_len = 32;
    int payload_len = 4096;
    int cp_len = 8;
    int sps = 4;
    double rolloff = 0.35;
    int rrc_span = 10;

    /// Throws parameter_error naming the first offending field.
    void validate() const;
    int taps() const { return rrc_span * sps + 1; }
};

/// Symbol offsets of each segment inside one branch.
///
///   [preamble | pilot slot 1 | pilot slot 2 | CP | payload]
///
/// Branch 1 transmits its pilots in slot 1 and is silent in slot 2; branch 2
/// does the opposite. Symbol k of the frame peaks at TX sample k*sps + (taps-1)/2
/// and at matched-filter output sample k*sps + taps - 1 relative to frame start.
struct FrameLayout {
    std::size_t preamble = 0;
    std::size_t pilot1 = 0;
    std::size_t pilot2 = 0;
    std::size_t cp = 0;
    std::size_t payload = 0;
    std::size_t total_symbols = 0;
    std::size_t total_samples = 0;

    static FrameLayout of(const FrameSpec& spec);
};

struct TxFrame {
    std::array<std::vector<Cplx>, 2> branch_samples;
    /// Pre-filter symbol streams, one per branch.
    std::array<std::vector<Cplx>, 2> branch_symbols;
    FrameLayout layout;
};

/// Unit-energy root-raised-cosine taps, span*sps + 1 long.
std::vector<double> rrc_taps(double rolloff, int sps, int span);

/// Length-n maximal-length +-1 sequence; n in {31, 63, 127, 255, 511}.
/// The 63-chip default uses x^6 + x^5 + 1.
std::vector<double> preamble_sequence(int n);

/// Known unit-modulus QPSK pilot block of `branch` (0 or 1).
std::vector<Cplx> pilot_sequence(int branch, int len);

std::vector<Cplx> add_cp(std::span<const Cplx> symbols, std::size_t cp_len);
std::vector<Cplx> remove_cp(std::span<const Cplx> symbols, std::size_t cp_len);

/// Zero-stuff by sps and filter with taps (full convolution).
std::vector<Cplx> upsample_filter(std::span<const Cplx> symbols, std::span<const double> taps, int sps);

TxFrame build_frame(const std::array<std::vector<Cplx>, 2>& payload, const FrameSpec& spec, Scheme scheme);

/// Matched-filter `samples` and take `count` symbols, the first one being the
/// symbol that starts at sample `start`.
std::vector<Cplx> matched_filter_downsample(std::span<const Cplx> samples, const FrameSpec& spec, std::size_t start,
                                            std::size_t count);
/// Whole frame (layout total_symbols).
std::vector<Cplx> matched_filter_downsample(std::span<const Cplx> samples, const FrameSpec& spec, std::size_t start);

inline constexpr double sync_threshold = 0.6;

struct SyncResult {
    std::size_t start = 0;
    /// Normalized preamble correlation in [0, 1]; 1 for a clean ISI-free frame.
    double metric = 0.0;
};

/// Locate the frame start by correlating the matched-filtered streams against
/// the preamble. Correlations of all streams are combined non-coherently.
/// Throws sync_not_found if the peak metric is below sync_threshold.
SyncResult synchronize(std::span<const std::vector<Cplx>> streams, const FrameSpec& spec);
SyncResult synchronize(std::span<const Cplx> samples, const FrameSpec& spec);

/// Per-segment symbol slices of one received branch.
struct FrameSegments {
    std::vector<Cplx> preamble;
    std::vector<Cplx> pilot1;
    std::vector<Cplx> pilot2;
    /// Payload after CP removal.
    std::vector<Cplx> payload;
};

FrameSegments split_frame(std::span<const Cplx> frame_symbols, const FrameSpec& spec);

}  // namespace avlc
