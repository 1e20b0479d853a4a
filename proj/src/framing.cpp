#include "avlc/framing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace avlc {

void FrameSpec::validate() const {
    const auto fail = [](const char* field, const char* why) { throw parameter_error(std::string(field) + ": " + why); };
    if (preamble_len < 1) fail("preamble_len", "must be >= 1");
    if (pilot_len < 4) fail("pilot_len", "must be >= 4");
    if (payload_len < 1) fail("payload_len", "must be >= 1");
    if (cp_len < 1) fail("cp_len", "must be >= 1");
    if (cp_len >= payload_len) fail("cp_len", "must be shorter than payload_len");
    if (sps < 2) fail("sps", "must be >= 2");
    if (!(rolloff > 0.0 && rolloff <= 1.0)) fail("rolloff", "must lie in (0, 1]");
    if (rrc_span < 4) fail("rrc_span", "must be >= 4");
    switch (preamble_len) {
        case 31: case 63: case 127: case 255: case 511: break;
        default: fail("preamble_len", "must be 31, 63, 127, 255 or 511");
    }
}

FrameLayout FrameLayout::of(const FrameSpec& spec) {
    FrameLayout l;
    l.preamble = 0;
    l.pilot1 = static_cast<std::size_t>(spec.preamble_len);
    l.pilot2 = l.pilot1 + static_cast<std::size_t>(spec.pilot_len);
    l.cp = l.pilot2 + static_cast<std::size_t>(spec.pilot_len);
    l.payload = l.cp + static_cast<std::size_t>(spec.cp_len);
    l.total_symbols = l.payload + static_cast<std::size_t>(spec.payload_len);
    l.total_samples = l.total_symbols * static_cast<std::size_t>(spec.sps) + static_cast<std::size_t>(spec.taps()) - 1;
    return l;
}

namespace {

// Solves a x = b in place for a small dense system (partial pivoting).
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) throw parameter_error("rrc_taps: degenerate pulse constraints");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t c = i + 1; c < n; ++c) v -= a[i][c] * x[c];
        x[i] = v / a[i][i];
    }
    return x;
}

// Residuals: c[0] = energy - 1, c[k] = autocorrelation at lag k * sps.
std::vector<double> nyquist_residual(const std::vector<double>& h, int sps, int lags) {
    std::vector<double> c(static_cast<std::size_t>(lags) + 1, 0.0);
    const int n = static_cast<int>(h.size());
    for (int k = 0; k <= lags; ++k) {
        double acc = 0.0;
        for (int i = 0; i + k * sps < n; ++i) acc += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i + k * sps)];
        c[static_cast<std::size_t>(k)] = acc;
    }
    c[0] -= 1.0;
    return c;
}

}  // namespace

std::vector<double> rrc_taps(double rolloff, int sps, int span) {
    if (!(rolloff > 0.0 && rolloff <= 1.0)) throw parameter_error("rrc_taps: rolloff must lie in (0, 1]");
    if (sps < 2) throw parameter_error("rrc_taps: sps must be >= 2");
    if (span < 4) throw parameter_error("rrc_taps: span must be >= 4");

    constexpr double pi = std::numbers::pi;
    const double b = rolloff;
    const int n = span * sps + 1;
    const int mid = n / 2;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - mid) / sps;
        double v;
        if (i == mid) {
            v = 1.0 - b + 4.0 * b / pi;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) {
            v = b / std::numbers::sqrt2 *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        } else {
            const double x = 4.0 * b * t;
            v = (std::sin(pi * t * (1.0 - b)) + x * std::cos(pi * t * (1.0 + b))) / (pi * t * (1.0 - x * x));
        }
        h[static_cast<std::size_t>(i)] = v;
    }
    for (int i = 0; i < mid; ++i) h[static_cast<std::size_t>(n - 1 - i)] = h[static_cast<std::size_t>(i)];
    double energy = 0.0;
    for (double v : h) energy += v * v;
    for (double& v : h) v /= std::sqrt(energy);

    // Truncation leaves symbol-spaced ISI of a few 1e-3 in h * h. Refine the
    // taps with min-norm Newton steps until the autocorrelation at every
    // nonzero multiple of sps vanishes and the energy is exactly 1.
    const int lags = (n - 1) / sps;
    const auto worst_of = [](const std::vector<double>& c) {
        double w = 0.0;
        for (double v : c) w = std::max(w, std::abs(v));
        return w;
    };
    auto c = nyquist_residual(h, sps, lags);
    double worst = worst_of(c);
    for (int iter = 0; iter < 50 && worst > 1e-15; ++iter) {
        const std::size_t m = c.size();
        std::vector<std::vector<double>> jac(m, std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (int i = 0; i < n; ++i) jac[0][static_cast<std::size_t>(i)] = 2.0 * h[static_cast<std::size_t>(i)];
        for (int k = 1; k <= lags; ++k) {
            for (int i = 0; i < n; ++i) {
                double d = 0.0;
                if (i + k * sps < n) d += h[static_cast<std::size_t>(i + k * sps)];
                if (i - k * sps >= 0) d += h[static_cast<std::size_t>(i - k * sps)];
                jac[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = d;
            }
        }
        std::vector<std::vector<double>> jjt(m, std::vector<double>(m, 0.0));
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t q = 0; q < m; ++q)
                for (int i = 0; i < n; ++i) jjt[r][q] += jac[r][static_cast<std::size_t>(i)] * jac[q][static_cast<std::size_t>(i)];
        const auto y = solve_dense(jjt, c);
        std::vector<double> step(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            for (std::size_t r = 0; r < m; ++r) step[static_cast<std::size_t>(i)] += jac[r][static_cast<std::size_t>(i)] * y[r];

        // Backtrack until the residual shrinks; stop if it never does.
        bool improved = false;
        for (double t = 1.0; t > 1e-3 && !improved; t *= 0.5) {
            auto trial = h;
            for (int i = 0; i < n; ++i) trial[static_cast<std::size_t>(i)] -= t * step[static_cast<std::size_t>(i)];
            for (int i = 0; i < mid; ++i) trial[static_cast<std::size_t>(n - 1 - i)] = trial[static_cast<std::size_t>(i)];
            auto tc = nyquist_residual(trial, sps, lags);
            const double tw = worst_of(tc);
            if (tw < worst) {
                h = std::move(trial);
                c = std::move(tc);
                worst = tw;
                improved = true;
            }
        }
        if (!improved) break;
    }
    energy = 0.0;
    for (double v : h) energy += v * v;
    for (double& v : h) v /= std::sqrt(energy);
    return h;
}

std::vector<double> preamble_sequence(int n) {
    // Exponents of the non-leading, non-constant terms of a primitive polynomial.
    std::vector<int> terms;
    int degree = 0;
    switch (n) {
        case 31: degree = 5; terms = {3}; break;
        case 63: degree = 6; terms = {5}; break;
        case 127: degree = 7; terms = {6}; break;
        case 255: degree = 8; terms = {6, 5, 4}; break;
        case 511: degree = 9; terms = {5}; break;
        default: throw parameter_error("preamble_sequence: unsupported length " + std::to_string(n));
    }
    // a[k+d] = a[k] + sum a[k+t], seeded with 0...01.
    std::vector<int> a(static_cast<std::size_t>(n + degree), 0);
    a[static_cast<std::size_t>(degree - 1)] = 1;
    for (int k = 0; k + degree < n + degree; ++k) {
        int v = a[static_cast<std::size_t>(k)];
        for (int t : terms) v ^= a[static_cast<std::size_t>(k + t)];
        a[static_cast<std::size_t>(k + degree)] = v;
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] ? -1.0 : 1.0;
    return out;
}

std::vector<Cplx> pilot_sequence(int branch, int len) {
    if (branch != 0 && branch != 1) throw parameter_error("pilot_sequence: branch must be 0 or 1");
    if (len < 1) throw parameter_error("pilot_sequence: length must be >= 1");
    Rng rng(0x70696c6f74ULL, static_cast<std::uint64_t>(branch));
    const double a = 1.0 / std::numbers::sqrt2;
    std::vector<Cplx> out(static_cast<std::size_t>(len));
    for (auto& p : out) {
        const auto r = rng.next_u64();
        p = {(r & 1u) ? -a : a, (r & 2u) ? -a : a};
    }
    return out;
}

std::vector<Cplx> add_cp(std::span<const Cplx> symbols, std::size_t cp_len) {
    if (cp_len > 0 && cp_len >= symbols.size()) throw length_error("add_cp: cp_len must be shorter than the block");
    std::vector<Cplx> out;
    out.reserve(symbols.size() + cp_len);
    out.insert(out.end(), symbols.end() - static_cast<std::ptrdiff_t>(cp_len), symbols.end());
    out.insert(out.end(), symbols.begin(), symbols.end());
    return out;
}

std::vector<Cplx> remove_cp(std::span<const Cplx> symbols, std::size_t cp_len) {
    if (cp_len > 0 && cp_len >= symbols.size()) throw length_error("remove_cp: cp_len must be shorter than the block");
    return {symbols.begin() + static_cast<std::ptrdiff_t>(cp_len), symbols.end()};
}

std::vector<Cplx> upsample_filter(std::span<const Cplx> symbols, std::span<const double> taps, int sps) {
    const std::size_t n_taps = taps.size();
    const std::size_t step = static_cast<std::size_t>(sps);
    std::vector<Cplx> out(symbols.size() * step + n_taps - 1);
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        const Cplx s = symbols[k];
        if (s == Cplx{}) continue;
        Cplx* dst = out.data() + k * step;
        for (std::size_t t = 0; t < n_taps; ++t) dst[t] += s * taps[t];
    }
    return out;
}

TxFrame build_frame(const std::array<std::vector<Cplx>, 2>& payload, const FrameSpec& spec, Scheme scheme) {
    spec.validate();
    for (const auto& p : payload)
        if (p.size() != static_cast<std::size_t>(spec.payload_len))
            throw length_error("build_frame: payload length " + std::to_string(p.size()) + " != " +
                               std::to_string(spec.payload_len));
    if (scheme == Scheme::sd && payload[0] != payload[1])
        throw scheme_error("build_frame: SD branches must carry identical symbols");

    TxFrame f;
    f.layout = FrameLayout::of(spec);
    const auto pre = preamble_sequence(spec.preamble_len);
    const auto taps = rrc_taps(spec.rolloff, spec.sps, spec.rrc_span);

    for (int b = 0; b < 2; ++b) {
        auto& sym = f.branch_symbols[static_cast<std::size_t>(b)];
        sym.assign(f.layout.total_symbols, Cplx{});
        std::copy(pre.begin(), pre.end(), sym.begin() + static_cast<std::ptrdiff_t>(f.layout.preamble));
        const auto pilots = pilot_sequence(b, spec.pilot_len);
        const std::size_t slot = b == 0 ? f.layout.pilot1 : f.layout.pilot2;
        std::copy(pilots.begin(), pilots.end(), sym.begin() + static_cast<std::ptrdiff_t>(slot));
        const auto body = add_cp(payload[static_cast<std::size_t>(b)], static_cast<std::size_t>(spec.cp_len));
        std::copy(body.begin(), body.end(), sym.begin() + static_cast<std::ptrdiff_t>(f.layout.cp));
        f.branch_samples[static_cast<std::size_t>(b)] = upsample_filter(sym, taps, spec.sps);
    }
    return f;
}

namespace {

// Matched-filter output at full-convolution index n (taps are symmetric, so
// the matched filter is the tap sequence itself).
Cplx mf_at(std::span<const Cplx> x, std::span<const double> taps, std::size_t n) {
    Cplx acc{};
    const std::size_t l = taps.size();
    const std::size_t lo = n + 1 >= l ? n + 1 - l : 0;
    const std::size_t hi = std::min(n, x.size() - 1);
    for (std::size_t i = lo; i <= hi; ++i) acc += x[i] * taps[n - i];
    return acc;
}

std::vector<Cplx> mf_full(std::span<const Cplx> x, std::span<const double> taps) {
    std::vector<Cplx> out(x.size() + taps.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Cplx s = x[i];
        if (s == Cplx{}) continue;
        for (std::size_t t = 0; t < taps.size(); ++t) out[i + t] += s * taps[t];
    }
    return out;
}

}  // namespace

std::vector<Cplx> matched_filter_downsample(std::span<const Cplx> samples, const FrameSpec& spec, std::size_t start,
                                            std::size_t count) {
    const auto taps = rrc_taps(spec.rolloff, spec.sps, spec.rrc_span);
    const std::size_t l = taps.size();
    const std::size_t step = static_cast<std::size_t>(spec.sps);
    if (count == 0) return {};
    const std::size_t last = start + l - 1 + (count - 1) * step;
    if (last >= samples.size())
        throw range_error("matched_filter_downsample: stream too short for " + std::to_string(count) +
                          " symbols from sample " + std::to_string(start));
    std::vector<Cplx> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = mf_at(samples, taps, start + l - 1 + k * step);
    return out;
}

std::vector<Cplx> matched_filter_downsample(std::span<const Cplx> samples, const FrameSpec& spec, std::size_t start) {
    return matched_filter_downsample(samples, spec, start, FrameLayout::of(spec).total_symbols);
}

SyncResult synchronize(std::span<const std::vector<Cplx>> streams, const FrameSpec& spec) {
    if (streams.empty()) throw sync_not_found("synchronize: no input streams");
    const auto taps = rrc_taps(spec.rolloff, spec.sps, spec.rrc_span);
    const auto pre = preamble_sequence(spec.preamble_len);
    const std::size_t l = taps.size();
    const std::size_t step = static_cast<std::size_t>(spec.sps);
    const std::size_t span = (pre.size() - 1) * step;

    std::vector<std::vector<Cplx>> mf;
    mf.reserve(streams.size());
    std::size_t mf_len = 0;
    for (const auto& s : streams) {
        if (s.empty()) throw sync_not_found("synchronize: empty stream");
        mf.push_back(mf_full(s, taps));
        mf_len = mf_len == 0 ? mf.back().size() : std::min(mf_len, mf.back().size());
    }
    if (mf_len < l + span) throw sync_not_found("synchronize: stream shorter than the preamble");

    double pre_energy = 0.0;
    for (double p : pre) pre_energy += p * p;

    SyncResult best;
    const std::size_t candidates = mf_len - (l - 1) - span;
    for (std::size_t d = 0; d < candidates; ++d) {
        double corr = 0.0;
        double energy = 0.0;
        for (const auto& z : mf) {
            Cplx c{};
            const Cplx* base = z.data() + d + l - 1;
            for (std::size_t k = 0; k < pre.size(); ++k) {
                const Cplx v = base[k * step];
                c += v * pre[k];
                energy += std::norm(v);
            }
            corr += std::norm(c);
        }
        if (energy <= 0.0) continue;
        const double metric = std::sqrt(corr / (pre_energy * energy));
        if (metric > best.metric) {
            best.metric = metric;
            best.start = d;
        }
    }
    if (best.metric < sync_threshold)
        throw sync_not_found("synchronize: peak metric " + std::to_string(best.metric) + " below threshold");
    return best;
}

SyncResult synchronize(std::span<const Cplx> samples, const FrameSpec& spec) {
    const std::vector<Cplx> one(samples.begin(), samples.end());
    return synchronize(std::span<const std::vector<Cplx>>(&one, 1), spec);
}

FrameSegments split_frame(std::span<const Cplx> frame_symbols, const FrameSpec& spec) {
    const auto l = FrameLayout::of(spec);
    if (frame_symbols.size() < l.total_symbols) throw length_error("split_frame: too few symbols");
    const auto slice = [&](std::size_t from, std::size_t to) {
        return std::vector<Cplx>(frame_symbols.begin() + static_cast<std::ptrdiff_t>(from),
                                 frame_symbols.begin() + static_cast<std::ptrdiff_t>(to));
    };
    FrameSegments s;
    s.preamble = slice(l.preamble, l.pilot1);
    s.pilot1 = slice(l.pilot1, l.pilot2);
    s.pilot2 = slice(l.pilot2, l.cp);
    s.payload = slice(l.payload, l.total_symbols);
    return s;
}

}  // namespace avlc
