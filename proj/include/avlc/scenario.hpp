#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avlc/adapt.hpp"
#include "avlc/channel.hpp"
#include "avlc/framing.hpp"
#include "avlc/metrics.hpp"

namespace avlc {

struct PositionGrid {
    double start = -65.0;
    double step = 5.0;
    double stop = 65.0;

    std::vector<double> positions() const;
};

/// SNR grid of the BER sweep, dB of p_total / n0.
struct SnrGrid {
    double start = 0.0;
    double step = 2.0;
    double stop = 40.0;

    std::vector<double> values() const;
};

/// Settling frames excluded from every per-position measurement.
inline constexpr int settling_frames = 2;

struct ScenarioConfig {
    Geometry geometry;
    FrameSpec frame;
    AdaptPolicy policy;
    std::optional<Lowpass> lowpass;

    /// Fixed p_total / n0 in dB; calibrated when absent.
    std::optional<double> snr_db;
    double calibrate_margin_db = 1.0;

    PositionGrid positions;
    int frames_per_position = 4;
    /// Minimum measured payload bits per position; steady-state frames are
    /// added past frames_per_position until it is reached.
    std::uint64_t payload_bits = 100000;

    SnrGrid ber_snr;
    std::uint64_t ber_min_errors = 100;
    std::uint64_t ber_max_bits = 2000000;

    std::uint64_t base_seed = 1;

    void validate() const;
};

/// Parse line-oriented key=value text; '#' starts a comment. Unknown keys and
/// malformed lines throw parse_error; out-of-range values throw validation_error.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Minimum p_total / n0 (linear) at which SM-256 on `h` predicts ber_tgt,
/// raised by margin_db. Throws calibration_impossible.
double calibrate_matrix(const Mat2& h, double ber_tgt, double margin_db);
double calibrate(const ScenarioConfig& config);

/// Geometry of the config with the obstacle moved far out of every beam.
Geometry unobstructed(Geometry g);

/// p_total / n0 used by the sweeps: snr_db if set, else calibrated.
double operating_snr(const ScenarioConfig& config);

struct PositionRun {
    LinkReport report;
    /// Mode applied in each frame, settling frames included.
    std::vector<Mode> applied;
};

/// One obstacle position with seed base_seed + index. `fixed` pins the mode;
/// otherwise the adaptive controller runs.
PositionRun run_position(const ScenarioConfig& config, std::size_t index, double snr_linear,
                         std::optional<Mode> fixed = std::nullopt);

struct BlockageSweep {
    double snr_linear = 0.0;
    std::vector<LinkReport> adaptive;
    std::vector<LinkReport> fixed_sm64;
    std::vector<LinkReport> fixed_sd64;
    double avg_adaptive = 0.0;
    double avg_sm64 = 0.0;
    double avg_sd64 = 0.0;
};

BlockageSweep run_blockage_sweep(const ScenarioConfig& config);
/// Three report blocks (adaptive, fixed SM-64, fixed SD-64), each preceded by a
/// '# name' line, then a '# averages' block.
void write_blockage_csv(std::ostream& os, const BlockageSweep& sweep);

struct BerPoint {
    Scheme scheme = Scheme::sm;
    QamOrder order = QamOrder::qam4;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber_mc = 0.0;
    double ber_theory = 0.0;
    double eff_bshz = 0.0;
};

/// Monte-Carlo through the full chain on the unobstructed channel.
std::vector<BerPoint> run_ber_sweep(const ScenarioConfig& config);
/// Single grid point; exposed so callers can probe arbitrary SNRs.
BerPoint run_ber_point(const ScenarioConfig& config, const Mat2& h, const Mode& mode, double snr_db,
                       std::uint64_t seed);
void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points);

}  // namespace avlc
