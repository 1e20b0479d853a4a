#include "avlc/modem.hpp"

#include <cmath>

#include "avlc/errors.hpp"

namespace avlc {

QamOrder qam_order_from_int(int m) {
    switch (m) {
        case 4: return QamOrder::qam4;
        case 16: return QamOrder::qam16;
        case 64: return QamOrder::qam64;
        case 256: return QamOrder::qam256;
        default: throw parameter_error("unsupported QAM order " + std::to_string(m));
    }
}

Constellation::Constellation(QamOrder order) : order_(order) {
    const int m = avlc::points(order);
    levels_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    // Mean of (L-1-2i)^2 over both axes is 2(M-1)/3.
    scale_ = 1.0 / std::sqrt(2.0 * (m - 1) / 3.0);

    gray_of_level_.resize(static_cast<std::size_t>(levels_));
    level_of_gray_.resize(static_cast<std::size_t>(levels_));
    for (unsigned i = 0; i < static_cast<unsigned>(levels_); ++i) {
        const unsigned g = i ^ (i >> 1);
        gray_of_level_[i] = g;
        level_of_gray_[g] = i;
    }

    points_.resize(static_cast<std::size_t>(m));
    for (unsigned label = 0; label < static_cast<unsigned>(m); ++label) points_[label] = point(label);
}

Cplx Constellation::point(unsigned label) const {
    const int half = bits_per_symbol() / 2;
    const unsigned mask = (1u << half) - 1u;
    const unsigned gi = (label >> half) & mask;
    const unsigned gq = label & mask;
    const auto amp = [&](unsigned level) { return (levels_ - 1 - 2 * static_cast<int>(level)) * scale_; };
    return {amp(level_of_gray_[gi]), amp(level_of_gray_[gq])};
}

unsigned Constellation::axis_level(double v) const {
    // Continuous level index; floor(u + 0.5) rounds half-way cases to the
    // larger index, i.e. the smaller amplitude.
    const double u = 0.5 * ((levels_ - 1) - v / scale_);
    double idx = std::floor(u + 0.5);
    if (!(idx >= 0.0)) idx = 0.0;
    if (idx > levels_ - 1) idx = levels_ - 1;
    return static_cast<unsigned>(idx);
}

unsigned Constellation::nearest_label(Cplx z) const {
    const int half = bits_per_symbol() / 2;
    return (gray_of_level_[axis_level(z.real())] << half) | gray_of_level_[axis_level(z.imag())];
}

std::vector<Cplx> qam_map(std::span<const std::uint8_t> bits, QamOrder order) {
    const auto k = static_cast<std::size_t>(bits_per_symbol(order));
    if (bits.size() % k != 0)
        throw length_error("bit count " + std::to_string(bits.size()) + " not divisible by " + std::to_string(k));
    const Constellation c(order);
    std::vector<Cplx> out;
    out.reserve(bits.size() / k);
    for (std::size_t i = 0; i < bits.size(); i += k) {
        unsigned label = 0;
        for (std::size_t b = 0; b < k; ++b) label = (label << 1) | (bits[i + b] & 1u);
        out.push_back(c.points()[label]);
    }
    return out;
}

Bits qam_demap(std::span<const Cplx> symbols, QamOrder order) {
    const Constellation c(order);
    const int k = c.bits_per_symbol();
    Bits out;
    out.reserve(symbols.size() * static_cast<std::size_t>(k));
    for (const Cplx& s : symbols) {
        const unsigned label = c.nearest_label(s);
        for (int b = k - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
    }
    return out;
}

double ber_theoretical(QamOrder order, double snr) {
    const double m = points(order);
    const double k = bits_per_symbol(order);
    if (std::isinf(snr)) return 0.0;
    return (4.0 / k) * (1.0 - 1.0 / std::sqrt(m)) * qfunc(std::sqrt(3.0 * snr / (m - 1.0)));
}

double evm(std::span<const Cplx> rx, std::span<const Cplx> ref) {
    if (rx.size() != ref.size()) throw length_error("evm: length mismatch");
    if (rx.empty()) throw empty_input("evm: no symbols");
    double err = 0.0;
    double pwr = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        err += std::norm(rx[i] - ref[i]);
        pwr += std::norm(ref[i]);
    }
    if (pwr == 0.0) throw divide_by_zero("evm: reference has zero power");
    return std::sqrt(err / pwr);
}

double snr_from_evm(double evm_rms) {
    if (!(evm_rms > 0.0) || !std::isfinite(evm_rms)) throw divide_by_zero("snr_from_evm: evm must be positive and finite");
    return 1.0 / (evm_rms * evm_rms);
}

}  // namespace avlc
