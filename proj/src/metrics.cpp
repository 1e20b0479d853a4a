#include "avlc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "avlc/adapt.hpp"
#include "avlc/errors.hpp"

namespace avlc {

BerCount count_ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size()) throw length_error("count_ber: streams differ in length");
    if (tx.empty()) throw length_error("count_ber: empty streams");
    BerCount c;
    c.total = tx.size();
    for (std::size_t i = 0; i < tx.size(); ++i) c.errors += (tx[i] & 1u) != (rx[i] & 1u);
    c.ber = static_cast<double>(c.errors) / static_cast<double>(c.total);
    return c;
}

double spectral_efficiency(const Mode& m) {
    return m.efficiency();
}

double error_free_efficiency(const Mode& m, double measured_ber, double ber_tgt) {
    return measured_ber <= ber_tgt ? spectral_efficiency(m) : 0.0;
}

double average_efficiency(std::span<const double> per_position) {
    if (per_position.empty()) return 0.0;
    double s = 0.0;
    for (double v : per_position) s += v;
    return s / static_cast<double>(per_position.size());
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string db_field(const std::vector<double>& snrs, std::size_t i) {
    if (i >= snrs.size()) return "nan";
    return fmt("%.3f", snrs[i]);
}

}  // namespace

void write_report_csv(std::ostream& os, std::span<const LinkReport> reports) {
    os << "position_cm,mode_code,mode_name,ber,eff_bshz,snr1_db,snr2_db,evm\n";
    for (const auto& r : reports) {
        os << fmt("%.3f", r.position_cm) << ',' << static_cast<int>(encode_mode(r.mode)) << ',' << mode_name(r.mode)
           << ',' << fmt("%.6e", r.ber) << ',' << fmt("%.3f", r.eff_bshz) << ',' << db_field(r.snrs_db, 0) << ','
           << db_field(r.snrs_db, 1) << ',' << fmt("%.6f", r.evm) << '\n';
    }
}

void dump_constellation(std::span<const Cplx> symbols, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << "I,Q\n";
    for (const Cplx& s : symbols) out << fmt("%.6f", s.real()) << ',' << fmt("%.6f", s.imag()) << '\n';
    if (!out) throw io_error("write to " + path.string() + " failed");
}

std::vector<Cplx> read_constellation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "I,Q") throw io_error(path.string() + ": missing I,Q header");
    std::vector<Cplx> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error(path.string() + ": malformed row '" + line + "'");
        out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return out;
}

}  // namespace avlc
