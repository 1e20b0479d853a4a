#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "avlc/mode.hpp"
#include "avlc/numerics.hpp"

namespace avlc {

struct BerCount {
    std::uint64_t errors = 0;
    std::uint64_t total = 0;
    double ber = 0.0;
};

/// Hamming distance between equal-length, non-empty bit streams.
BerCount count_ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

double spectral_efficiency(const Mode& m);

/// The mode's efficiency when measured_ber <= ber_tgt, else 0.
double error_free_efficiency(const Mode& m, double measured_ber, double ber_tgt);

/// Uniform average over sweep positions; 0 for an empty sweep.
double average_efficiency(std::span<const double> per_position);

/// Steady-state record for one obstacle position.
struct LinkReport {
    double position_cm = 0.0;
    Mode mode;
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double eff_bshz = 0.0;
    /// Two post-ZF stream SNRs for SM, the MRC SNR for SD.
    std::vector<double> snrs_db;
    double evm = 0.0;
};

/// Header plus one row per report:
/// position_cm,mode_code,mode_name,ber,eff_bshz,snr1_db,snr2_db,evm
void write_report_csv(std::ostream& os, std::span<const LinkReport> reports);

/// "I,Q" header then one point per line with 6 decimals. Throws io_error.
void dump_constellation(std::span<const Cplx> symbols, const std::filesystem::path& path);
std::vector<Cplx> read_constellation(const std::filesystem::path& path);

}  // namespace avlc
