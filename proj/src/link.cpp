#include "avlc/link.hpp"

#include <cmath>

#include "avlc/errors.hpp"
#include "avlc/metrics.hpp"

namespace avlc {

LinkSetup LinkSetup::at_snr(const FrameSpec& frame, const Mat2& h, double snr_linear) {
    LinkSetup s;
    s.frame = frame;
    s.h = h;
    s.p_total = 2.0;
    s.n0 = s.p_total / snr_linear;
    return s;
}

namespace {

Bits random_bits(Rng& rng, std::size_t n) {
    Bits out(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng.next_u64();
        out[i] = static_cast<std::uint8_t>(word & 1u);
        word >>= 1;
    }
    return out;
}

FrameResult lost(FrameResult r) {
    r.delivered = false;
    r.bit_errors = r.bits_sent / 2;
    return r;
}

}  // namespace

FrameResult simulate_frame(const Mode& mode, const LinkSetup& link, Rng& bits, Rng& noise) {
    const FrameSpec& spec = link.frame;
    const auto layout = FrameLayout::of(spec);
    const std::size_t n_payload = static_cast<std::size_t>(spec.payload_len);
    const std::size_t k = static_cast<std::size_t>(bits_per_symbol(mode.order));

    FrameResult r;
    r.mode = mode;

    // Payload symbols per stream.
    std::array<Bits, 2> tx_bits;
    std::array<std::vector<Cplx>, 2> payload;
    for (int s = 0; s < mode.streams(); ++s) {
        tx_bits[static_cast<std::size_t>(s)] = random_bits(bits, n_payload * k);
        payload[static_cast<std::size_t>(s)] = qam_map(tx_bits[static_cast<std::size_t>(s)], mode.order);
    }
    if (mode.scheme == Scheme::sd) payload[1] = payload[0];
    r.bits_sent = static_cast<std::uint64_t>(mode.streams()) * n_payload * k;

    const TxFrame frame = build_frame(payload, spec, mode.scheme);

    // Each LED radiates p_total / 2 per symbol.
    const double amp = std::sqrt(0.5 * link.p_total);
    Streams tx;
    for (std::size_t b = 0; b < 2; ++b) {
        tx[b].assign(lead_in_samples + layout.total_samples + lead_in_samples, Cplx{});
        for (std::size_t n = 0; n < frame.branch_samples[b].size(); ++n)
            tx[b][lead_in_samples + n] = amp * frame.branch_samples[b][n];
    }

    ChannelState state;
    state.h = link.h;
    state.n0 = link.n0;
    state.lowpass = link.lowpass;
    const Streams rx = apply_channel(tx, state, noise);

    SyncResult sync;
    try {
        sync = synchronize(std::span<const std::vector<Cplx>>(rx.data(), rx.size()), spec);
    } catch (const sync_not_found&) {
        return lost(std::move(r));
    }

    std::array<FrameSegments, 2> seg;
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<Cplx> symbols;
        try {
            symbols = matched_filter_downsample(rx[j], spec, sync.start);
        } catch (const range_error&) {
            return lost(std::move(r));
        }
        seg[j] = split_frame(symbols, spec);
    }

    PilotSegments pilot_seg;
    for (std::size_t j = 0; j < 2; ++j) {
        pilot_seg[j][0] = seg[j].pilot1;
        pilot_seg[j][1] = seg[j].pilot2;
    }
    std::array<std::vector<Cplx>, 2> pilots{pilot_sequence(0, spec.pilot_len), pilot_sequence(1, spec.pilot_len)};
    for (auto& p : pilots)
        for (auto& v : p) v *= amp;
    r.estimate = estimate_channel(pilot_seg, pilots);

    std::vector<SymbolPair> y(n_payload);
    for (std::size_t n = 0; n < n_payload; ++n) y[n] = {seg[0].payload[n], seg[1].payload[n]};

    std::array<std::vector<Cplx>, 2> detected;
    try {
        if (mode.scheme == Scheme::sm) {
            const auto x = detect_sm_zf(y, *r.estimate);
            for (std::size_t s = 0; s < 2; ++s) {
                detected[s].resize(n_payload);
                for (std::size_t n = 0; n < n_payload; ++n) detected[s][n] = x[n][s] / amp;
            }
        } else {
            detected[0] = combine_sd_mrc(y, *r.estimate);
            const double g = std::sqrt(link.p_total);
            for (auto& v : detected[0]) v /= g;
        }
    } catch (const singular_matrix&) {
        return lost(std::move(r));
    } catch (const dead_channel&) {
        return lost(std::move(r));
    }

    r.delivered = true;
    for (int s = 0; s < mode.streams(); ++s) {
        const auto& d = detected[static_cast<std::size_t>(s)];
        const Bits rx_bits = qam_demap(d, mode.order);
        r.bit_errors += count_ber(tx_bits[static_cast<std::size_t>(s)], rx_bits).errors;
        r.rx_symbols.insert(r.rx_symbols.end(), d.begin(), d.end());
        const auto& ref = payload[static_cast<std::size_t>(s)];
        r.tx_symbols.insert(r.tx_symbols.end(), ref.begin(), ref.end());
    }
    return r;
}

}  // namespace avlc
