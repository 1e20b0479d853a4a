#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "avlc/errors.hpp"
#include "avlc/metrics.hpp"

using namespace avlc;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("avlc_test_" + name); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("count ber") {
    Rng rng(51);
    Bits a(1000);
    for (auto& v : a) v = static_cast<std::uint8_t>(rng.next_u64() & 1u);

    auto c = count_ber(a, a);
    CHECK(c.errors == 0);
    CHECK(c.total == 1000);
    CHECK(c.ber == 0.0);

    Bits flipped = a;
    for (auto& v : flipped) v ^= 1u;
    c = count_ber(a, flipped);
    CHECK(c.errors == 1000);
    CHECK(c.ber == 1.0);

    Bits five = a;
    for (std::size_t i : {3u, 100u, 101u, 500u, 999u}) five[i] ^= 1u;
    c = count_ber(a, five);
    CHECK(c.errors == 5);
    CHECK(c.total == 1000);
    CHECK(c.ber == doctest::Approx(0.005));

    CHECK_THROWS_AS(count_ber(a, Bits(999)), length_error);
    CHECK_THROWS_AS(count_ber(Bits{}, Bits{}), length_error);
}

TEST_CASE("spectral efficiency") {
    CHECK(spectral_efficiency({Scheme::sm, QamOrder::qam64}) == 12.0);
    CHECK(spectral_efficiency({Scheme::sd, QamOrder::qam64}) == 6.0);
    CHECK(spectral_efficiency({Scheme::sm, QamOrder::qam256}) == 16.0);
    CHECK(spectral_efficiency({Scheme::sd, QamOrder::qam4}) == 2.0);
    for (auto o : all_orders)
        CHECK(spectral_efficiency({Scheme::sm, o}) == 2.0 * spectral_efficiency({Scheme::sd, o}));
}

TEST_CASE("error-free efficiency") {
    const Mode sm64{Scheme::sm, QamOrder::qam64};
    CHECK(error_free_efficiency(sm64, 0.0, 1e-3) == 12.0);
    CHECK(error_free_efficiency(sm64, 1e-3, 1e-3) == 12.0);
    CHECK(error_free_efficiency(sm64, 0.02, 1e-3) == 0.0);

    double prev = 1e9;
    for (double ber = 0.0; ber <= 0.01; ber += 1e-4) {
        const double e = error_free_efficiency(sm64, ber, 1e-3);
        CHECK(e <= prev);
        prev = e;
    }
}

TEST_CASE("average efficiency") {
    CHECK(average_efficiency(std::vector<double>{}) == 0.0);
    std::vector<double> v{16, 16, 12, 0, 8, 16, 6};
    const double mean = (16 + 16 + 12 + 0 + 8 + 16 + 6) / 7.0;
    CHECK(average_efficiency(v) == doctest::Approx(mean));
    std::reverse(v.begin(), v.end());
    CHECK(average_efficiency(v) == doctest::Approx(mean));
    std::rotate(v.begin(), v.begin() + 3, v.end());
    CHECK(average_efficiency(v) == doctest::Approx(mean));
}

TEST_CASE("constellation dump: QPSK") {
    const double a = 1.0 / std::sqrt(2.0);
    const std::vector<Cplx> q{{a, a}, {-a, a}, {-a, -a}, {a, -a}};
    const auto path = temp_file("qpsk.csv");
    dump_constellation(q, path);
    CHECK(slurp(path) ==
          "I,Q\n0.707107,0.707107\n-0.707107,0.707107\n-0.707107,-0.707107\n0.707107,-0.707107\n");
    const auto back = read_constellation(path);
    REQUIRE(back.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(back[k] - q[k]) < 1e-6);
    fs::remove(path);
}

TEST_CASE("constellation dump: empty and round trip") {
    const auto path = temp_file("empty.csv");
    dump_constellation(std::vector<Cplx>{}, path);
    CHECK(slurp(path) == "I,Q\n");
    CHECK(read_constellation(path).empty());

    Rng rng(52);
    std::vector<Cplx> pts(500);
    for (auto& v : pts) v = rng.complex_gaussian(2.0);
    dump_constellation(pts, path);
    const auto back = read_constellation(path);
    REQUIRE(back.size() == pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        CHECK(std::abs(back[k].real() - pts[k].real()) <= 5e-7 + 1e-12);
        CHECK(std::abs(back[k].imag() - pts[k].imag()) <= 5e-7 + 1e-12);
    }
    fs::remove(path);
}

TEST_CASE("constellation dump: io errors") {
    CHECK_THROWS_AS(dump_constellation(std::vector<Cplx>{}, "/nonexistent-dir/x/y.csv"), io_error);
    CHECK_THROWS_AS(read_constellation("/nonexistent-dir/x/y.csv"), io_error);
}

TEST_CASE("report csv") {
    LinkReport sm;
    sm.position_cm = -65;
    sm.mode = {Scheme::sm, QamOrder::qam256};
    sm.bits_sent = 100000;
    sm.bit_errors = 30;
    sm.ber = 3e-4;
    sm.eff_bshz = 16;
    sm.snrs_db = {31.5, 31.25};
    sm.evm = 0.02;
    LinkReport sd = sm;
    sd.position_cm = 0;
    sd.mode = {Scheme::sd, QamOrder::qam64};
    sd.snrs_db = {30.0};
    std::ostringstream os;
    write_report_csv(os, std::vector<LinkReport>{sm, sd});
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "position_cm,mode_code,mode_name,ber,eff_bshz,snr1_db,snr2_db,evm");
    std::getline(in, line);
    CHECK(line.rfind("-65.000,7,SM-256,3.000000e-04,16.000,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    std::getline(in, line);
    CHECK(line.rfind("0.000,2,SD-64,", 0) == 0);
    CHECK(line.find(",nan,") != std::string::npos);
    CHECK(!std::getline(in, line));
}
