#include "avlc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "avlc/errors.hpp"
#include "avlc/link.hpp"

namespace avlc {

std::vector<double> PositionGrid::positions() const {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::vector<double> SnrGrid::values() const {
    return PositionGrid{start, step, stop}.positions();
}

void ScenarioConfig::validate() const {
    geometry.validate();
    try {
        frame.validate();
    } catch (const parameter_error& e) {
        const std::string what = e.what();
        throw validation_error("frame." + what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
    }
    policy.validate();
    if (lowpass && !(lowpass->f3db_per_symbol > 0.0))
        throw validation_error("channel.lowpass.f3db", "must be > 0");
    if (!(calibrate_margin_db >= 0.0)) throw validation_error("calibrate.margin_db", "must be >= 0");
    if (!(positions.step > 0.0)) throw validation_error("sweep.positions.step", "must be > 0");
    if (!(positions.start <= positions.stop)) throw validation_error("sweep.positions.start", "must be <= stop");
    if (frames_per_position < settling_frames + 1)
        throw validation_error("sweep.frames_per_position", "must be >= 3");
    if (payload_bits < 1) throw validation_error("sweep.payload_bits", "must be >= 1");
    if (!(ber_snr.step > 0.0)) throw validation_error("ber.snr_db.step", "must be > 0");
    if (!(ber_snr.start <= ber_snr.stop)) throw validation_error("ber.snr_db.start", "must be <= stop");
    if (ber_max_bits < 1) throw validation_error("ber.max_bits", "must be >= 1");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Field {
    std::string_view key;
    std::string_view value;
    std::size_t line;
};

double as_double(const Field& f) {
    double v = 0.0;
    const auto* end = f.value.data() + f.value.size();
    const auto [p, ec] = std::from_chars(f.value.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw parse_error(f.line, std::string(f.key) + ": '" + std::string(f.value) + "' is not a number");
    return v;
}

std::int64_t as_int(const Field& f) {
    std::int64_t v = 0;
    const auto* end = f.value.data() + f.value.size();
    const auto [p, ec] = std::from_chars(f.value.data(), end, v);
    if (ec != std::errc() || p != end)
        throw parse_error(f.line, std::string(f.key) + ": '" + std::string(f.value) + "' is not an integer");
    return v;
}

int as_small_int(const Field& f) {
    const auto v = as_int(f);
    if (v < -1000000000 || v > 1000000000) throw validation_error(std::string(f.key), "out of range");
    return static_cast<int>(v);
}

std::uint64_t as_count(const Field& f) {
    const auto v = as_int(f);
    if (v < 0) throw validation_error(std::string(f.key), "must be >= 0");
    return static_cast<std::uint64_t>(v);
}

bool as_bool(const Field& f) {
    if (f.value == "true" || f.value == "1") return true;
    if (f.value == "false" || f.value == "0") return false;
    throw parse_error(f.line, std::string(f.key) + ": expected true or false");
}

Mode as_mode(const Field& f) {
    try {
        return parse_mode(std::string(f.value));
    } catch (const parameter_error&) {
        throw validation_error(std::string(f.key), "unknown mode '" + std::string(f.value) + "'");
    }
}

Lowpass& lowpass_of(ScenarioConfig& c) {
    if (!c.lowpass) {
        c.lowpass = Lowpass{};
        c.lowpass->sps = c.frame.sps;
    }
    return *c.lowpass;
}

using Setter = std::function<void(ScenarioConfig&, const Field&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table{
        {"geometry.tx1.x", [](auto& c, const auto& f) { c.geometry.tx[0].x = as_double(f); }},
        {"geometry.tx2.x", [](auto& c, const auto& f) { c.geometry.tx[1].x = as_double(f); }},
        {"geometry.rx1.x", [](auto& c, const auto& f) { c.geometry.rx[0].x = as_double(f); }},
        {"geometry.rx2.x", [](auto& c, const auto& f) { c.geometry.rx[1].x = as_double(f); }},
        {"geometry.link_len", [](auto& c, const auto& f) { c.geometry.set_link_len(as_double(f)); }},
        {"geometry.obstacle.diameter", [](auto& c, const auto& f) { c.geometry.obstacle.diameter = as_double(f); }},
        {"geometry.obstacle.z", [](auto& c, const auto& f) { c.geometry.obstacle.z = as_double(f); }},
        {"geometry.obstacle.x", [](auto& c, const auto& f) { c.geometry.obstacle.x = as_double(f); }},
        {"geometry.lambert_m", [](auto& c, const auto& f) { c.geometry.lambert_m = as_double(f); }},
        {"geometry.rx_area", [](auto& c, const auto& f) { c.geometry.rx_area = as_double(f); }},
        {"geometry.fov_deg", [](auto& c, const auto& f) { c.geometry.fov_deg = as_double(f); }},
        {"geometry.beam_radius", [](auto& c, const auto& f) { c.geometry.beam_radius = as_double(f); }},
        {"frame.preamble_len", [](auto& c, const auto& f) { c.frame.preamble_len = as_small_int(f); }},
        {"frame.pilot_len", [](auto& c, const auto& f) { c.frame.pilot_len = as_small_int(f); }},
        {"frame.payload_len", [](auto& c, const auto& f) { c.frame.payload_len = as_small_int(f); }},
        {"frame.cp_len", [](auto& c, const auto& f) { c.frame.cp_len = as_small_int(f); }},
        {"frame.sps",
         [](auto& c, const auto& f) {
             c.frame.sps = as_small_int(f);
             if (c.lowpass) c.lowpass->sps = c.frame.sps;
         }},
        {"frame.rolloff", [](auto& c, const auto& f) { c.frame.rolloff = as_double(f); }},
        {"frame.rrc_span", [](auto& c, const auto& f) { c.frame.rrc_span = as_small_int(f); }},
        {"channel.lowpass.f3db", [](auto& c, const auto& f) { lowpass_of(c).f3db_per_symbol = as_double(f); }},
        {"channel.lowpass.equalize", [](auto& c, const auto& f) { lowpass_of(c).equalize = as_bool(f); }},
        {"policy.ber_tgt", [](auto& c, const auto& f) { c.policy.ber_tgt = as_double(f); }},
        {"policy.margin_db", [](auto& c, const auto& f) { c.policy.margin_db = as_double(f); }},
        {"policy.initial", [](auto& c, const auto& f) { c.policy.initial = as_mode(f); }},
        {"policy.fallback", [](auto& c, const auto& f) { c.policy.fallback = as_mode(f); }},
        {"sweep.positions.start", [](auto& c, const auto& f) { c.positions.start = as_double(f); }},
        {"sweep.positions.step", [](auto& c, const auto& f) { c.positions.step = as_double(f); }},
        {"sweep.positions.stop", [](auto& c, const auto& f) { c.positions.stop = as_double(f); }},
        {"sweep.frames_per_position", [](auto& c, const auto& f) { c.frames_per_position = as_small_int(f); }},
        {"sweep.payload_bits", [](auto& c, const auto& f) { c.payload_bits = as_count(f); }},
        {"snr_db", [](auto& c, const auto& f) { c.snr_db = as_double(f); }},
        {"calibrate.margin_db", [](auto& c, const auto& f) { c.calibrate_margin_db = as_double(f); }},
        {"ber.snr_db.start", [](auto& c, const auto& f) { c.ber_snr.start = as_double(f); }},
        {"ber.snr_db.step", [](auto& c, const auto& f) { c.ber_snr.step = as_double(f); }},
        {"ber.snr_db.stop", [](auto& c, const auto& f) { c.ber_snr.stop = as_double(f); }},
        {"ber.min_errors", [](auto& c, const auto& f) { c.ber_min_errors = as_count(f); }},
        {"ber.max_bits", [](auto& c, const auto& f) { c.ber_max_bits = as_count(f); }},
        {"base_seed", [](auto& c, const auto& f) { c.base_seed = as_count(f); }},
    };
    return table;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig c;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw parse_error(line_no, "expected key=value");
        const Field f{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (f.key.empty()) throw parse_error(line_no, "empty key");
        if (f.value.empty()) throw parse_error(line_no, std::string(f.key) + ": empty value");

        const auto it = setters().find(f.key);
        if (it == setters().end()) throw parse_error(line_no, "unknown key '" + std::string(f.key) + "'");
        if (const auto prev = seen.find(f.key); prev != seen.end())
            throw parse_error(line_no, "duplicate key '" + std::string(f.key) + "' (first on line " +
                                           std::to_string(prev->second) + ")");
        seen.emplace(std::string(f.key), line_no);
        it->second(c, f);
    }
    if (seen.contains("snr_db") && seen.contains("calibrate.margin_db"))
        throw validation_error("snr_db", "a fixed snr_db excludes calibrate.margin_db");
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Geometry unobstructed(Geometry g) {
    g.obstacle.x = 1e9;
    return g;
}

double calibrate_matrix(const Mat2& h, double ber_tgt, double margin_db) {
    const Mode target{Scheme::sm, QamOrder::qam256};
    ChannelEstimate est;
    est.h_hat = h;
    const auto ber_at = [&](double snr_db) {
        const double snr = db_to_linear(snr_db);
        return predicted_ber(target, stream_snrs(est, 2.0, 2.0 / snr, Scheme::sm));
    };
    double lo = -50.0;
    double hi = 300.0;
    try {
        if (!(ber_at(hi) <= ber_tgt)) throw calibration_impossible("no finite SNR reaches the target BER");
    } catch (const singular_matrix&) {
        throw calibration_impossible("unobstructed channel is singular; SM cannot be calibrated");
    }
    if (ber_at(lo) <= ber_tgt) return db_to_linear(lo + margin_db);
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ber_at(mid) <= ber_tgt ? hi : lo) = mid;
    }
    return db_to_linear(hi + margin_db);
}

double calibrate(const ScenarioConfig& config) {
    const Mat2 h = channel_matrix(unobstructed(config.geometry)).h;
    return calibrate_matrix(h, config.policy.ber_tgt, config.calibrate_margin_db);
}

double operating_snr(const ScenarioConfig& config) {
    return config.snr_db ? db_to_linear(*config.snr_db) : calibrate(config);
}

PositionRun run_position(const ScenarioConfig& config, std::size_t index, double snr_linear,
                         std::optional<Mode> fixed) {
    const auto grid = config.positions.positions();
    if (index >= grid.size()) throw range_error("run_position: index outside the position grid");
    Geometry g = config.geometry;
    g.obstacle.x = grid[index];

    LinkSetup link = LinkSetup::at_snr(config.frame, channel_matrix(g).h, snr_linear);
    link.lowpass = config.lowpass;
    const LinkBudget budget{link.p_total, link.n0};

    const std::uint64_t seed = config.base_seed + index;
    Rng bits(seed, 1);
    Rng noise(seed, 2);
    ControllerState ctrl = make_controller(config.policy);

    PositionRun run;
    run.report.position_cm = grid[index];
    std::vector<Cplx> rx_sym;
    std::vector<Cplx> tx_sym;
    std::optional<ChannelEstimate> last_est;
    constexpr int frame_cap = 100000;
    for (int f = 1; f <= frame_cap; ++f) {
        const Mode mode = fixed ? *fixed : ctrl.next_mode();
        const FrameResult res = simulate_frame(mode, link, bits, noise);
        if (!fixed) {
            if (res.estimate)
                controller_step(ctrl, *res.estimate, config.policy, budget);
            else
                controller_step_lost(ctrl, config.policy);
        }
        run.applied.push_back(mode);
        if (f > settling_frames) {
            run.report.mode = mode;
            run.report.bits_sent += res.bits_sent;
            run.report.bit_errors += res.bit_errors;
            rx_sym.insert(rx_sym.end(), res.rx_symbols.begin(), res.rx_symbols.end());
            tx_sym.insert(tx_sym.end(), res.tx_symbols.begin(), res.tx_symbols.end());
            if (res.estimate) last_est = res.estimate;
        }
        if (f >= config.frames_per_position && run.report.bits_sent >= config.payload_bits) break;
    }

    LinkReport& r = run.report;
    r.ber = r.bits_sent ? static_cast<double>(r.bit_errors) / static_cast<double>(r.bits_sent) : 1.0;
    r.eff_bshz = error_free_efficiency(r.mode, r.ber, config.policy.ber_tgt);
    r.evm = rx_sym.empty() ? std::nan("") : evm(rx_sym, tx_sym);
    if (last_est) {
        try {
            for (double s : stream_snrs(*last_est, budget.p_total, budget.n0, r.mode.scheme).snr)
                r.snrs_db.push_back(linear_to_db(s));
        } catch (const singular_matrix&) {
            r.snrs_db.clear();
        }
    }
    return run;
}

BlockageSweep run_blockage_sweep(const ScenarioConfig& config) {
    BlockageSweep out;
    out.snr_linear = operating_snr(config);
    const std::size_t n = config.positions.positions().size();
    const Mode sm64{Scheme::sm, QamOrder::qam64};
    const Mode sd64{Scheme::sd, QamOrder::qam64};
    std::vector<double> e_ad, e_sm, e_sd;
    for (std::size_t i = 0; i < n; ++i) {
        const auto annotate = [&](auto&& fn) {
            try {
                return fn();
            } catch (const error& e) {
                throw error("position " + std::to_string(config.positions.positions()[i]) + " cm: " + e.what());
            }
        };
        out.adaptive.push_back(annotate([&] { return run_position(config, i, out.snr_linear).report; }));
        out.fixed_sm64.push_back(annotate([&] { return run_position(config, i, out.snr_linear, sm64).report; }));
        out.fixed_sd64.push_back(annotate([&] { return run_position(config, i, out.snr_linear, sd64).report; }));
        e_ad.push_back(out.adaptive.back().eff_bshz);
        e_sm.push_back(out.fixed_sm64.back().eff_bshz);
        e_sd.push_back(out.fixed_sd64.back().eff_bshz);
    }
    out.avg_adaptive = average_efficiency(e_ad);
    out.avg_sm64 = average_efficiency(e_sm);
    out.avg_sd64 = average_efficiency(e_sd);
    return out;
}

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

void write_blockage_csv(std::ostream& os, const BlockageSweep& sweep) {
    os << "# snr_db=" << fixed3(linear_to_db(sweep.snr_linear)) << '\n';
    os << "# adaptive\n";
    write_report_csv(os, sweep.adaptive);
    os << "\n# fixed SM-64\n";
    write_report_csv(os, sweep.fixed_sm64);
    os << "\n# fixed SD-64\n";
    write_report_csv(os, sweep.fixed_sd64);
    os << "\n# averages\npolicy,avg_eff_bshz\n";
    os << "adaptive," << fixed3(sweep.avg_adaptive) << '\n';
    os << "SM-64," << fixed3(sweep.avg_sm64) << '\n';
    os << "SD-64," << fixed3(sweep.avg_sd64) << '\n';
}

BerPoint run_ber_point(const ScenarioConfig& config, const Mat2& h, const Mode& mode, double snr_db,
                       std::uint64_t seed) {
    LinkSetup link = LinkSetup::at_snr(config.frame, h, db_to_linear(snr_db));
    link.lowpass = config.lowpass;
    Rng bits(seed, 1);
    Rng noise(seed, 2);

    BerPoint p;
    p.scheme = mode.scheme;
    p.order = mode.order;
    p.snr_db = snr_db;
    p.eff_bshz = spectral_efficiency(mode);
    do {
        const FrameResult r = simulate_frame(mode, link, bits, noise);
        p.bits += r.bits_sent;
        p.errors += r.bit_errors;
    } while (p.errors < config.ber_min_errors && p.bits < config.ber_max_bits);
    p.ber_mc = static_cast<double>(p.errors) / static_cast<double>(p.bits);

    ChannelEstimate truth;
    truth.h_hat = h;
    try {
        p.ber_theory = predicted_ber(mode, stream_snrs(truth, link.p_total, link.n0, mode.scheme));
    } catch (const singular_matrix&) {
        p.ber_theory = 0.5;
    }
    return p;
}

std::vector<BerPoint> run_ber_sweep(const ScenarioConfig& config) {
    const Mat2 h = channel_matrix(unobstructed(config.geometry)).h;
    std::vector<BerPoint> out;
    std::uint64_t index = 0;
    for (const Mode& m : all_modes)
        for (double snr_db : config.ber_snr.values()) out.push_back(run_ber_point(config, h, m, snr_db, config.base_seed + index++));
    return out;
}

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points) {
    os << "scheme,order,mode_name,snr_db,bits,errors,ber_mc,ber_theory,eff_bshz\n";
    for (const auto& p : points) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%d,%s,%.3f,%llu,%llu,%.6e,%.6e,%.3f\n", to_string(p.scheme).c_str(),
                      avlc::points(p.order), mode_name({p.scheme, p.order}).c_str(), p.snr_db,
                      static_cast<unsigned long long>(p.bits), static_cast<unsigned long long>(p.errors), p.ber_mc,
                      p.ber_theory, p.eff_bshz);
        os << buf;
    }
}

}  // namespace avlc
