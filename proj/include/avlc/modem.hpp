#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "avlc/numerics.hpp"

namespace avlc {

enum class QamOrder : int { qam4 = 4, qam16 = 16, qam64 = 64, qam256 = 256 };

inline constexpr QamOrder all_orders[] = {QamOrder::qam4, QamOrder::qam16, QamOrder::qam64, QamOrder::qam256};

constexpr int points(QamOrder m) { return static_cast<int>(m); }
constexpr int bits_per_symbol(QamOrder m) {
    switch (m) {
        case QamOrder::qam4: return 2;
        case QamOrder::qam16: return 4;
        case QamOrder::qam64: return 6;
        case QamOrder::qam256: return 8;
    }
    return 0;
}

/// Throws parameter_error for anything but 4, 16, 64, 256.
QamOrder qam_order_from_int(int m);

using Bits = std::vector<std::uint8_t>;

/// Square Gray-coded M-QAM with unit average energy.
///
/// A k-bit label splits into k/2 I bits followed by k/2 Q bits. Each half is
/// the binary-reflected Gray code of the level index, where level 0 is the
/// most positive amplitude. For 4-QAM this gives 00 -> (+1+1i)/sqrt(2) and
/// 11 -> (-1-1i)/sqrt(2).
class Constellation {
public:
    explicit Constellation(QamOrder order);

    QamOrder order() const { return order_; }
    int bits_per_symbol() const { return avlc::bits_per_symbol(order_); }
    int levels_per_axis() const { return levels_; }
    /// Amplitude spacing between adjacent levels after normalization.
    double min_distance() const { return 2.0 * scale_; }

    /// Point for label in [0, M).
    Cplx point(unsigned label) const;
    /// Label of the nearest point; ties go to the smaller I, then smaller Q.
    unsigned nearest_label(Cplx z) const;

    /// All M points indexed by label.
    const std::vector<Cplx>& points() const { return points_; }

private:
    unsigned axis_level(double v) const;

    QamOrder order_;
    int levels_;
    double scale_;
    std::vector<unsigned> gray_of_level_;
    std::vector<unsigned> level_of_gray_;
    std::vector<Cplx> points_;
};

/// Throws length_error when bits.size() is not a multiple of log2(M).
std::vector<Cplx> qam_map(std::span<const std::uint8_t> bits, QamOrder order);
Bits qam_demap(std::span<const Cplx> symbols, QamOrder order);

/// Gray-QAM nearest-neighbour BER approximation at linear per-symbol SNR.
double ber_theoretical(QamOrder order, double snr);

/// RMS error vector magnitude of rx against ref, normalized to ref power.
double evm(std::span<const Cplx> rx, std::span<const Cplx> ref);

/// Data-aided SNR estimate 1 / evm^2.
double snr_from_evm(double evm_rms);

}  // namespace avlc
