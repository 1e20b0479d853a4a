#include "avlc/receiver.hpp"

#include <cmath>
#include <numbers>

#include "avlc/errors.hpp"

namespace avlc {

ChannelEstimate estimate_channel(const PilotSegments& segments, const std::array<std::vector<Cplx>, 2>& pilots) {
    const std::size_t np = pilots[0].size();
    if (np < 4) throw length_error("estimate_channel: pilot blocks need at least 4 symbols");
    if (pilots[1].size() != np) throw length_error("estimate_channel: pilot blocks differ in length");
    for (const auto& pd : segments)
        for (const auto& seg : pd)
            if (seg.size() != np) throw length_error("estimate_channel: segment length does not match pilots");

    ChannelEstimate est;
    est.pilot_len = static_cast<int>(np);
    double residual = 0.0;
    for (int i = 0; i < 2; ++i) {
        const auto& p = pilots[static_cast<std::size_t>(i)];
        double energy = 0.0;
        for (const Cplx& v : p) energy += std::norm(v);
        if (energy == 0.0) throw divide_by_zero("estimate_channel: pilot block has zero energy");
        for (int j = 0; j < 2; ++j) {
            const auto& y = segments[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            Cplx acc{};
            for (std::size_t n = 0; n < np; ++n) acc += y[n] * std::conj(p[n]);
            const Cplx h = acc / energy;
            est.h_hat(j, i) = h;
            for (std::size_t n = 0; n < np; ++n) residual += std::norm(y[n] - h * p[n]);
        }
    }
    est.residual_rms = std::sqrt(residual / static_cast<double>(4 * np));
    return est;
}

StreamSnrs stream_snrs(const ChannelEstimate& est, double p_total, double n0, Scheme scheme) {
    if (!(p_total > 0.0)) throw parameter_error("stream_snrs: p_total must be > 0");
    if (!(n0 > 0.0)) throw parameter_error("stream_snrs: n0 must be > 0");
    const double per_led = 0.5 * p_total;
    StreamSnrs out;
    out.scheme = scheme;
    const Mat2& h = est.h_hat;
    if (scheme == Scheme::sm) {
        const Mat2 gram_inv = inv2(h.adjoint() * h);
        out.snr = {per_led / (n0 * gram_inv(0, 0).real()), per_led / (n0 * gram_inv(1, 1).real())};
    } else {
        const auto col = h * std::array<Cplx, 2>{1.0, 1.0};
        out.snr = {(std::norm(col[0]) + std::norm(col[1])) * per_led / n0};
    }
    return out;
}

std::vector<SymbolPair> detect_sm_zf(std::span<const SymbolPair> y, const ChannelEstimate& est) {
    const Mat2 w = inv2(est.h_hat);
    std::vector<SymbolPair> out;
    out.reserve(y.size());
    for (const auto& v : y) out.push_back(w * v);
    return out;
}

std::vector<Cplx> combine_sd_mrc(std::span<const SymbolPair> y, const ChannelEstimate& est) {
    const auto sum = est.h_hat * std::array<Cplx, 2>{1.0, 1.0};
    const SymbolPair g{sum[0] / std::numbers::sqrt2, sum[1] / std::numbers::sqrt2};
    const double g2 = std::norm(g[0]) + std::norm(g[1]);
    if (std::sqrt(g2) < 1e-12) throw dead_channel("combine_sd_mrc: both receive paths are dead");
    std::vector<Cplx> out;
    out.reserve(y.size());
    for (const auto& v : y) out.push_back((std::conj(g[0]) * v[0] + std::conj(g[1]) * v[1]) / g2);
    return out;
}

}  // namespace avlc
