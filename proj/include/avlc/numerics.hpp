#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

namespace avlc {

using Cplx = std::complex<double>;

/// 2x2 complex matrix, row-major: (r, c) with r, c in {0, 1}.
struct Mat2 {
    std::array<Cplx, 4> e{};

    constexpr Cplx& operator()(int r, int c) { return e[static_cast<std::size_t>(2 * r + c)]; }
    constexpr const Cplx& operator()(int r, int c) const { return e[static_cast<std::size_t>(2 * r + c)]; }

    static Mat2 identity() { return diag(1.0, 1.0); }
    static Mat2 diag(Cplx d0, Cplx d1) {
        Mat2 m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        return m;
    }

    Mat2 adjoint() const;
    Cplx det() const { return e[0] * e[3] - e[1] * e[2]; }
    double frobenius() const;
    bool finite() const;

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(Cplx s, const Mat2& a);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
std::array<Cplx, 2> operator*(const Mat2& a, const std::array<Cplx, 2>& x);

struct Svd2 {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    Mat2 u;
    Mat2 v;

    /// U * diag(sigma) * V^H
    Mat2 reconstruct() const;
    double condition() const;
};

/// Upper tail of the standard normal, P(N(0,1) > x).
double qfunc(double x);

/// Closed-form SVD through the eigen-decomposition of the Hermitian A^H A.
/// The small singular value is taken from |det A| / sigma1, which keeps it
/// relatively accurate on ill-conditioned channels.
Svd2 svd2(const Mat2& a);

/// Throws singular_matrix when |det a| <= 1e-12 * ||a||_F^2.
Mat2 inv2(const Mat2& a);

/// Seedable Gaussian/bit source on top of mt19937_64.
///
/// The engine is fully specified by the standard; uniform conversion and
/// Box-Muller are done here so streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Independent stream `stream` of `seed`, derived through std::seed_seq.
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    std::pair<double, double> gaussian_pair();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    Cplx complex_gaussian(double variance);

private:
    std::mt19937_64 engine_;
};

/// Two independent N(0,1) variates; the stream is fully determined by the seed.
inline std::pair<double, double> gaussian_pair(Rng& rng) { return rng.gaussian_pair(); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin);

}  // namespace avlc
