#ifndef FSLAB_QUADRATURE_HPP
#define FSLAB_QUADRATURE_HPP

#include "fslab/common.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace fslab::quad {

inline constexpr std::array<double, 8> kGauss8X = {
    -9.60289856497536176e-01, -7.96666477413626728e-01, -5.25532409916328991e-01,
    -1.83434642495649780e-01, 1.83434642495649780e-01,  5.25532409916328991e-01,
    7.96666477413626728e-01,  9.60289856497536176e-01};
inline constexpr std::array<double, 8> kGauss8W = {
    1.01228536290376689e-01, 2.22381034453374343e-01, 3.13706645877887047e-01,
    3.62683783378361768e-01, 3.62683783378361768e-01, 3.13706645877887047e-01,
    2.22381034453374343e-01, 1.01228536290376689e-01};

inline constexpr std::array<double, 16> kGauss16X = {
    -9.89400934991649939e-01, -9.44575023073232600e-01, -8.65631202387831755e-01,
    -7.55404408355002999e-01, -6.17876244402643771e-01, -4.58016777657227370e-01,
    -2.81603550779258915e-01, -9.50125098376374544e-02, 9.50125098376374544e-02,
    2.81603550779258915e-01,  4.58016777657227370e-01,  6.17876244402643771e-01,
    7.55404408355002999e-01,  8.65631202387831755e-01,  9.44575023073232600e-01,
    9.89400934991649939e-01};
inline constexpr std::array<double, 16> kGauss16W = {
    2.71524594117540374e-02, 6.22535239386477063e-02, 9.51585116824925914e-02,
    1.24628971255534030e-01, 1.49595988816576764e-01, 1.69156519395002619e-01,
    1.82603415044923612e-01, 1.89450610455068585e-01, 1.89450610455068585e-01,
    1.82603415044923612e-01, 1.69156519395002619e-01, 1.49595988816576764e-01,
    1.24628971255534030e-01, 9.51585116824925914e-02, 6.22535239386477063e-02,
    2.71524594117540374e-02};

template <typename F>
double gauss16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 16; ++i) s += kGauss16W[i] * f(mid + half * kGauss16X[i]);
    return s * half;
}

template <typename F>
double gauss8_rect(F&& f, double ax, double bx, double ay, double by) {
    const double mx = 0.5 * (ax + bx), hx = 0.5 * (bx - ax);
    const double my = 0.5 * (ay + by), hy = 0.5 * (by - ay);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            s += kGauss8W[i] * kGauss8W[j] * f(mx + hx * kGauss8X[i], my + hy * kGauss8X[j]);
    return s * hx * hy;
}

/// int_a^b u^p du for 0 <= a < b, including the p = -1 log branch.
/// Evaluated through expm1 so nearby exponents stay accurate as p -> -1.
inline double power_integral(double a, double b, double p) {
    const double p1 = p + 1.0;
    if (a <= 0.0) return std::pow(b, p1) / p1;  // requires p > -1
    const double L = std::log(b / a);
    if (p1 == 0.0) return L;
    return std::pow(a, p1) * std::expm1(p1 * L) / p1;
}

/// int_0^{pi/2} cos(u)^alpha du = sqrt(pi) Gamma((1+alpha)/2) / (2 Gamma(1+alpha/2)).
inline double cospow_halfpi(double alpha) {
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (1.0 + alpha)) /
           (2.0 * std::tgamma(1.0 + 0.5 * alpha));
}

/// int_0^T sin(u)^alpha du for T <= pi/4, via sin^alpha u = u^alpha exp(alpha log sinc u)
/// integrated termwise: the exponential expands in u^2 with rapidly decaying
/// coefficients, so nine terms already reach ~1e-13 relative accuracy.
inline double sinpow_integral(double alpha, double T) {
    if (T <= 0.0) return 0.0;
    // log(sin u / u) = - sum c_k u^{2k}
    constexpr std::array<double, 9> c = {
        1.66666666666666667e-01, 5.55555555555555556e-03, 3.52733686067019400e-04,
        2.64550264550264550e-05, 2.13777991555769334e-06, 1.80367023400533101e-07,
        1.56613913227669841e-08, 1.38841304937372994e-09, 1.25043591760049960e-10};
    constexpr int K = 9;
    double y[K + 1] = {0.0};  // polynomial in u^2
    for (int k = 1; k <= K; ++k) y[k] = -alpha * c[k - 1];
    // a = exp(y), truncated to degree K in u^2
    double a[K + 1] = {1.0};
    double ypow[K + 1] = {1.0};  // y^j, truncated
    double fact = 1.0;
    for (int j = 1; j <= K; ++j) {
        double next[K + 1] = {0.0};
        for (int d1 = 0; d1 <= K; ++d1) {
            if (ypow[d1] == 0.0) continue;
            for (int d2 = 1; d1 + d2 <= K; ++d2) next[d1 + d2] += ypow[d1] * y[d2];
        }
        for (int d = 0; d <= K; ++d) ypow[d] = next[d];
        fact *= j;
        for (int d = 0; d <= K; ++d) a[d] += ypow[d] / fact;
    }
    // int_0^T u^{alpha + 2k} du termwise
    const double T2 = T * T;
    double result = 0.0, Tpow = std::pow(T, alpha + 1.0);
    for (int k = 0; k <= K; ++k) {
        result += a[k] * Tpow / (alpha + 2.0 * k + 1.0);
        Tpow *= T2;
    }
    return result;
}

/// int_0^theta cos(u)^alpha du for theta in [0, pi/2].
inline double cospow_integral(double alpha, double theta) {
    constexpr double quarter = std::numbers::pi / 4.0;
    if (theta <= 0.0) return 0.0;
    if (theta <= quarter)
        return gauss16([&](double u) { return std::pow(std::cos(u), alpha); }, 0.0, theta);
    return cospow_halfpi(alpha) - sinpow_integral(alpha, std::numbers::pi / 2.0 - theta);
}

}  // namespace fslab::quad

#endif
