#include "avlc/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "avlc/errors.hpp"

namespace avlc {

Mat2 Mat2::adjoint() const {
    Mat2 r;
    r(0, 0) = std::conj((*this)(0, 0));
    r(0, 1) = std::conj((*this)(1, 0));
    r(1, 0) = std::conj((*this)(0, 1));
    r(1, 1) = std::conj((*this)(1, 1));
    return r;
}

double Mat2::frobenius() const {
    double s = 0.0;
    for (const auto& z : e) s += std::norm(z);
    return std::sqrt(s);
}

bool Mat2::finite() const {
    for (const auto& z : e)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat2 operator*(Cplx s, const Mat2& a) {
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.e[i] = s * a.e[i];
    return r;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

std::array<Cplx, 2> operator*(const Mat2& a, const std::array<Cplx, 2>& x) {
    return {a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]};
}

Mat2 Svd2::reconstruct() const {
    return u * Mat2::diag(sigma1, sigma2) * v.adjoint();
}

double Svd2::condition() const {
    if (sigma2 == 0.0) return std::numeric_limits<double>::infinity();
    return sigma1 / sigma2;
}

double qfunc(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace {

using Vec2 = std::array<Cplx, 2>;

double norm2(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

Vec2 scaled(const Vec2& v, Cplx s) { return {v[0] * s, v[1] * s}; }

// Unit vector orthogonal to unit vector v.
Vec2 complement(const Vec2& v) { return {-std::conj(v[1]), std::conj(v[0])}; }

Mat2 from_columns(const Vec2& c0, const Vec2& c1) {
    Mat2 m;
    m(0, 0) = c0[0];
    m(1, 0) = c0[1];
    m(0, 1) = c1[0];
    m(1, 1) = c1[1];
    return m;
}

}  // namespace

Svd2 svd2(const Mat2& a) {
    Svd2 out;
    out.u = Mat2::identity();
    out.v = Mat2::identity();

    const Mat2 g = a.adjoint() * a;
    const double p = g(0, 0).real();
    const double d = g(1, 1).real();
    const Cplx b = g(0, 1);

    const double half_sum = 0.5 * (p + d);
    const double half_diff = 0.5 * (p - d);
    const double radius = std::hypot(half_diff, std::abs(b));
    const double lambda1 = half_sum + radius;
    if (!(lambda1 > 0.0)) return out;  // zero matrix

    out.sigma1 = std::sqrt(lambda1);
    out.sigma2 = std::abs(a.det()) / out.sigma1;
    if (out.sigma2 > out.sigma1) out.sigma2 = out.sigma1;

    // Dominant eigenvector of g: pick the better-conditioned of the two
    // algebraically equivalent forms.
    Vec2 v1;
    if (std::abs(b) == 0.0) {
        v1 = p >= d ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    } else {
        const Vec2 c1{b, lambda1 - p};
        const Vec2 c2{lambda1 - d, std::conj(b)};
        v1 = norm2(c1) >= norm2(c2) ? c1 : c2;
        v1 = scaled(v1, 1.0 / norm2(v1));
    }
    const Vec2 v2 = complement(v1);

    Vec2 u1 = a * v1;
    u1 = scaled(u1, 1.0 / out.sigma1);
    u1 = scaled(u1, 1.0 / norm2(u1));

    // u2 spans the complement of u1; its phase makes u2^H A v2 real and >= 0.
    Vec2 u2 = complement(u1);
    const Vec2 av2 = a * v2;
    const Cplx proj = std::conj(u2[0]) * av2[0] + std::conj(u2[1]) * av2[1];
    if (std::abs(proj) > 0.0) u2 = scaled(u2, proj / std::abs(proj));

    out.u = from_columns(u1, u2);
    out.v = from_columns(v1, v2);
    return out;
}

Mat2 inv2(const Mat2& a) {
    const Cplx det = a.det();
    const double scale = a.frobenius();
    if (!(std::abs(det) > 1e-12 * scale * scale)) throw singular_matrix("matrix is singular");
    Mat2 r;
    r(0, 0) = a(1, 1) / det;
    r(0, 1) = -a(0, 1) / det;
    r(1, 0) = -a(1, 0) / det;
    r(1, 1) = a(0, 0) / det;
    return r;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> Rng::gaussian_pair() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

Cplx Rng::complex_gaussian(double variance) {
    const auto [g0, g1] = gaussian_pair();
    const double s = std::sqrt(0.5 * variance);
    return {s * g0, s * g1};
}

double linear_to_db(double lin) {
    return 10.0 * std::log10(lin);
}

}  // namespace avlc
