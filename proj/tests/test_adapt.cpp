#include <doctest.h>

#include <cmath>
#include <optional>

#include "avlc/adapt.hpp"
#include "avlc/errors.hpp"
#include "avlc/metrics.hpp"
#include "avlc/modem.hpp"

using namespace avlc;

namespace {

double db(double x) { return std::pow(10.0, x / 10.0); }

StreamSnrs sm_of(double a, double b) { return {Scheme::sm, {a, b}}; }
StreamSnrs sd_of(double a) { return {Scheme::sd, {a}}; }

/// Independent enumeration: filter the eight modes, then order by
/// (efficiency desc, predicted BER asc, SD first).
Mode brute_force(const std::optional<StreamSnrs>& sm, const StreamSnrs& sd, const AdaptPolicy& p) {
    const double k = std::pow(10.0, -p.margin_db / 10.0);
    struct Cand {
        Mode m;
        double eta;
        double ber;
    };
    std::vector<Cand> ok;
    for (unsigned code = 0; code < 8; ++code) {
        const Mode m = decode_mode(code);
        double ber;
        if (m.scheme == Scheme::sd) {
            ber = ber_theoretical(m.order, sd.snr[0] * k);
        } else {
            if (!sm) continue;
            ber = 0.5 * (ber_theoretical(m.order, sm->snr[0] * k) + ber_theoretical(m.order, sm->snr[1] * k));
        }
        if (ber <= p.ber_tgt) ok.push_back({m, (m.scheme == Scheme::sm ? 2.0 : 1.0) * std::log2(points(m.order)), ber});
    }
    if (ok.empty()) return p.fallback;
    Cand best = ok.front();
    for (const auto& c : ok) {
        const bool sd_first = c.m.scheme == Scheme::sd && best.m.scheme == Scheme::sm;
        if (c.eta > best.eta || (c.eta == best.eta && (c.ber < best.ber || (c.ber == best.ber && sd_first)))) best = c;
    }
    return best.m;
}

}  // namespace

TEST_CASE("mode table") {
    CHECK(all_modes.size() == 8);
    for (const auto& m : all_modes) {
        const double want = (m.scheme == Scheme::sm ? 2.0 : 1.0) * std::log2(points(m.order));
        CHECK(m.efficiency() == want);
        CHECK(parse_mode(mode_name(m)) == m);
    }
    CHECK(mode_name({Scheme::sm, QamOrder::qam64}) == "SM-64");
    CHECK(mode_name({Scheme::sd, QamOrder::qam256}) == "SD-256");
    CHECK_THROWS_AS(parse_mode("SM-32"), parameter_error);
    CHECK_THROWS_AS(parse_mode("XX-4"), parameter_error);
}

TEST_CASE("policy validation") {
    AdaptPolicy p;
    CHECK_NOTHROW(p.validate());
    for (double bad : {0.0, 0.5, -1.0, 2.0}) {
        p.ber_tgt = bad;
        CHECK_THROWS_AS(p.validate(), validation_error);
    }
    p = AdaptPolicy{};
    p.margin_db = -1.0;
    CHECK_THROWS_AS(p.validate(), validation_error);
}

TEST_CASE("predicted ber") {
    const Mode sm64{Scheme::sm, QamOrder::qam64};
    CHECK(predicted_ber(sm64, sm_of(100.0, 100.0)) == doctest::Approx(ber_theoretical(QamOrder::qam64, 100.0)));
    CHECK(predicted_ber(sm64, sm_of(100.0, INFINITY)) == doctest::Approx(0.5 * ber_theoretical(QamOrder::qam64, 100.0)));
    CHECK(predicted_ber({Scheme::sd, QamOrder::qam4}, sd_of(9.55)) == doctest::Approx(9.99747087e-4).epsilon(1e-6));
    CHECK_THROWS_AS(predicted_ber(sm64, sd_of(10.0)), scheme_error);
    CHECK_THROWS_AS(predicted_ber({Scheme::sd, QamOrder::qam4}, sm_of(1.0, 1.0)), scheme_error);
}

TEST_CASE("select: examples") {
    const AdaptPolicy p;
    CHECK(select_mode(sm_of(db(40), db(40)), sd_of(db(43)), p) == Mode{Scheme::sm, QamOrder::qam256});

    // SD-256 needs 694.17 (28.41 dB) to reach 1e-3; at 28 dB SD-64 is the best that qualifies.
    CHECK(select_mode(std::nullopt, sd_of(db(28)), p) == Mode{Scheme::sd, QamOrder::qam64});
    CHECK(select_mode(std::nullopt, sd_of(db(29)), p) == Mode{Scheme::sd, QamOrder::qam256});
    CHECK(select_mode(std::nullopt, sd_of(694.0), p) == Mode{Scheme::sd, QamOrder::qam64});
    CHECK(select_mode(std::nullopt, sd_of(694.2), p) == Mode{Scheme::sd, QamOrder::qam256});

    const auto fb = select_mode_detail(sm_of(1.0, 1.0), sd_of(1.0), p);
    CHECK(fb.mode == Mode{Scheme::sd, QamOrder::qam4});
    CHECK(fb.fallback);
    CHECK(fb.predicted_ber > p.ber_tgt);

    AdaptPolicy other = p;
    other.fallback = {Scheme::sd, QamOrder::qam16};
    CHECK(select_mode(std::nullopt, sd_of(0.1), other) == other.fallback);
}

TEST_CASE("select: equal efficiency prefers lower ber, then SD") {
    const AdaptPolicy p;
    // SD-256 and SM-16 both give 8 b/s/Hz.
    // SM at 150 is below the SM-64 threshold (179.8) but well above SM-16's.
    const auto s = select_mode_detail(sm_of(150.0, 150.0), sd_of(1e5), p);
    CHECK(s.mode == Mode{Scheme::sd, QamOrder::qam256});
    const auto t = select_mode_detail(sm_of(150.0, 150.0), sd_of(700.0), p);
    CHECK(t.mode == Mode{Scheme::sm, QamOrder::qam16});
    CHECK(t.predicted_ber < predicted_ber({Scheme::sd, QamOrder::qam256}, sd_of(700.0)));
}

TEST_CASE("select: margin de-rates every snr") {
    AdaptPolicy p;
    const auto sm = sm_of(db(31), db(31));
    const auto sd = sd_of(db(34));
    CHECK(select_mode(sm, sd, p) == Mode{Scheme::sm, QamOrder::qam256});
    p.margin_db = 3.0;
    CHECK(select_mode(sm, sd, p) == select_mode(sm_of(db(28), db(28)), sd_of(db(31)), AdaptPolicy{}));
}

TEST_CASE("select: agrees with brute force on 1000 random tuples") {
    Rng rng(41);
    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
        AdaptPolicy p;
        p.ber_tgt = std::pow(10.0, -1.0 - 4.0 * rng.uniform());
        p.margin_db = t % 3 == 0 ? 2.0 * rng.uniform() : 0.0;
        std::optional<StreamSnrs> sm;
        if (t % 10 != 0) sm = sm_of(db(-5.0 + 50.0 * rng.uniform()), db(-5.0 + 50.0 * rng.uniform()));
        const auto sd = sd_of(db(-5.0 + 50.0 * rng.uniform()));
        if (select_mode(sm, sd, p) == brute_force(sm, sd, p)) ++agree;
    }
    CHECK(agree == 1000);
}

TEST_CASE("select: efficiency is monotone in snr") {
    Rng rng(42);
    const AdaptPolicy p;
    for (int t = 0; t < 500; ++t) {
        const double a = db(50.0 * rng.uniform());
        const double b = db(50.0 * rng.uniform());
        const double c = db(50.0 * rng.uniform());
        const double up = db(0.01 + 5.0 * rng.uniform());
        const double lo = select_mode(sm_of(a, b), sd_of(c), p).efficiency();
        const double hi = select_mode(sm_of(a * up, b * up), sd_of(c * up), p).efficiency();
        CHECK(hi >= lo);
    }
}

namespace {

/// Symbol-level simulation of `mode` on channel h with exact channel knowledge.
BerCount simulate_mode(const Mode& mode, const Mat2& h, double p_total, double n0, std::size_t bits, Rng& rng) {
    const int k = bits_per_symbol(mode.order);
    const std::size_t per_stream = bits / static_cast<std::size_t>(mode.streams() * k);
    const double amp = std::sqrt(p_total / 2.0);
    const ChannelEstimate est{h, 32, 0.0};
    std::array<Bits, 2> b;
    std::array<std::vector<Cplx>, 2> s;
    for (int i = 0; i < mode.streams(); ++i) {
        b[static_cast<std::size_t>(i)].resize(per_stream * static_cast<std::size_t>(k));
        for (auto& v : b[static_cast<std::size_t>(i)]) v = static_cast<std::uint8_t>(rng.next_u64() & 1u);
        s[static_cast<std::size_t>(i)] = qam_map(b[static_cast<std::size_t>(i)], mode.order);
    }
    if (mode.scheme == Scheme::sd) s[1] = s[0];
    std::vector<SymbolPair> y(per_stream);
    for (std::size_t n = 0; n < per_stream; ++n) {
        const auto hx = h * SymbolPair{amp * s[0][n], amp * s[1][n]};
        y[n] = {hx[0] + rng.complex_gaussian(n0), hx[1] + rng.complex_gaussian(n0)};
    }
    BerCount total{};
    if (mode.scheme == Scheme::sm) {
        const auto x = detect_sm_zf(y, est);
        for (std::size_t i = 0; i < 2; ++i) {
            std::vector<Cplx> z(per_stream);
            for (std::size_t n = 0; n < per_stream; ++n) z[n] = x[n][i] / amp;
            const auto c = count_ber(b[i], qam_demap(z, mode.order));
            total.errors += c.errors;
            total.total += c.total;
        }
    } else {
        auto z = combine_sd_mrc(y, est);
        for (auto& v : z) v /= std::sqrt(p_total);
        const auto c = count_ber(b[0], qam_demap(z, mode.order));
        total.errors += c.errors;
        total.total += c.total;
    }
    return total;
}

}  // namespace

TEST_CASE("select: measured ber of the chosen mode meets the target") {
    Rng rng(43);
    const AdaptPolicy p;
    const LinkBudget budget{2.0, 1.0};
    int checked = 0;
    for (double snr_db : {18.0, 24.0, 30.0, 36.0}) {
        Mat2 h;
        for (auto& v : h.e) v = Cplx(0.2 + rng.uniform(), 0.0);
        h(0, 0) += 1.0;
        h(1, 1) += 1.0;
        const double n0 = budget.p_total / db(snr_db);
        const ChannelEstimate est{h, 32, 0.0};
        std::optional<StreamSnrs> sm = stream_snrs(est, budget.p_total, n0, Scheme::sm);
        const auto sd = stream_snrs(est, budget.p_total, n0, Scheme::sd);
        const auto sel = select_mode_detail(sm, sd, p);
        if (sel.fallback) continue;
        const auto c = simulate_mode(sel.mode, h, budget.p_total, n0, 1000000, rng);
        const double ber = static_cast<double>(c.errors) / static_cast<double>(c.total);
        const double sigma = std::sqrt(p.ber_tgt * (1.0 - p.ber_tgt) / static_cast<double>(c.total));
        MESSAGE(mode_name(sel.mode) << " at " << snr_db << " dB: measured " << ber << ", predicted " << sel.predicted_ber);
        CHECK(ber <= p.ber_tgt + 3.0 * sigma);
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("mode codes") {
    CHECK(encode_mode({Scheme::sd, QamOrder::qam4}) == 0b000);
    CHECK(encode_mode({Scheme::sd, QamOrder::qam256}) == 0b011);
    CHECK(encode_mode({Scheme::sm, QamOrder::qam4}) == 0b100);
    CHECK(encode_mode({Scheme::sm, QamOrder::qam256}) == 0b111);
    for (unsigned c = 0; c < 8; ++c) CHECK(encode_mode(decode_mode(c)) == c);
    for (const auto& m : all_modes) CHECK(decode_mode(encode_mode(m)) == m);
    CHECK_THROWS_AS(decode_mode(8), bad_code);
    CHECK_THROWS_AS(decode_mode(255), bad_code);
}

namespace {

ChannelEstimate estimate_for(double gain) { return {Mat2::diag({gain, 0}, {gain, 0}), 32, 0.0}; }

}  // namespace

TEST_CASE("controller: initial mode then convergence") {
    const AdaptPolicy p;
    const LinkBudget budget{2.0, 2.0 / db(40)};
    auto st = make_controller(p);
    CHECK(st.next_mode() == Mode{Scheme::sm, QamOrder::qam64});

    const auto est = estimate_for(1.0);
    const Mode best = select_mode(stream_snrs(est, budget.p_total, budget.n0, Scheme::sm),
                                  stream_snrs(est, budget.p_total, budget.n0, Scheme::sd), p);
    std::vector<Mode> applied;
    for (int f = 0; f < 10; ++f) applied.push_back(controller_step(st, est, p, budget));
    CHECK(applied[0] == p.initial);
    for (int f = 1; f < 10; ++f) CHECK(applied[static_cast<std::size_t>(f)] == best);
    CHECK(st.history.size() == 10);
    CHECK(st.history[0].frame == 1);
    CHECK(st.history[0].selected == best);
}

TEST_CASE("controller: applied mode lags the selection by one frame") {
    const AdaptPolicy p;
    const LinkBudget budget{2.0, 2.0 / db(30)};
    auto st = make_controller(p);
    const ChannelEstimate a = estimate_for(1.0);
    const ChannelEstimate b = estimate_for(0.2);
    for (int f = 0; f < 12; ++f) controller_step(st, f % 2 == 0 ? a : b, p, budget);
    REQUIRE(st.history.size() == 12);
    CHECK(st.history[0].selected != st.history[1].selected);
    for (std::size_t f = 1; f < st.history.size(); ++f) CHECK(st.history[f].applied == st.history[f - 1].selected);
}

TEST_CASE("controller: singular estimate restricts to SD, lost frame falls back") {
    const AdaptPolicy p;
    const LinkBudget budget{2.0, 2.0 / db(35)};
    auto st = make_controller(p);
    controller_step(st, {Mat2::diag({1, 0}, {0, 0}), 32, 0.0}, p, budget);
    CHECK(st.next_mode().scheme == Scheme::sd);
    controller_step_lost(st, p);
    CHECK(st.next_mode() == p.fallback);
    CHECK(st.history.back().predicted_ber == 0.5);
}
