#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "picketlab/special_functions.hpp"

using namespace picketlab;

namespace {

// Defining-series oracle psi(x) = -gamma + sum_{j>=0} (1/(j+1) - 1/(j+x)),
// truncated at J with the first-order tail (x-1)/J restored; the neglected
// remainder is O(x^2/J^2).
double digamma_series(double x, long long J = 10000000) {
    double sum = 0.0;
    for (long long j = J - 1; j >= 0; --j)
        sum += 1.0 / static_cast<double>(j + 1) - 1.0 / (static_cast<double>(j) + x);
    return -euler_gamma + sum + (x - 1.0) / static_cast<double>(J);
}

// psi'(x) = sum_{j>=0} 1/(j+x)^2, tail restored through the Euler-Maclaurin
// terms 1/(J+x) + 1/(2(J+x)^2); remainder O(1/J^3).
double trigamma_series(double x, long long J = 10000000) {
    double sum = 0.0;
    for (long long j = J - 1; j >= 0; --j) {
        const double t = static_cast<double>(j) + x;
        sum += 1.0 / (t * t);
    }
    const double edge = static_cast<double>(J) + x;
    return sum + 1.0 / edge + 1.0 / (2.0 * edge * edge);
}

}  // namespace

TEST_CASE("digamma matches its defining series") {
    for (double x : {0.5, 1.0, 1.75, 3.0, 7.3, 11.5})
        CHECK(std::abs(digamma(x) - digamma_series(x)) < 1e-9);
}

TEST_CASE("digamma special values") {
    CHECK(std::abs(digamma(1.0) + euler_gamma) < 1e-13);
    CHECK(std::abs(digamma(2.0) - (1.0 - euler_gamma)) < 1e-13);
    CHECK(std::abs(digamma(0.5) + euler_gamma + 2.0 * std::log(2.0)) < 1e-13);
    // psi(m) = H_{m-1} - gamma
    double h99 = 0.0;
    for (int k = 99; k >= 1; --k)
        h99 += 1.0 / k;
    CHECK(std::abs(digamma(100.0) - (h99 - euler_gamma)) < 1e-12);
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x") {
    for (double x : {0.1, 0.9, 1.0, 2.5, 11.9, 12.0, 40.0, 1234.5})
        CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12);
}

TEST_CASE("digamma rejects nonpositive arguments") {
    CHECK_THROWS_AS(digamma(0.0), std::domain_error);
    CHECK_THROWS_AS(digamma(-3.2), std::domain_error);
}

TEST_CASE("trigamma matches its defining series") {
    for (double x : {0.5, 1.0, 2.25, 5.0, 11.5})
        CHECK(std::abs(trigamma(x) - trigamma_series(x)) < 1e-10);
}

TEST_CASE("trigamma special values") {
    const double pi = std::numbers::pi;
    CHECK(std::abs(trigamma(1.0) - pi * pi / 6.0) < 1e-13);
    CHECK(std::abs(trigamma(0.5) - pi * pi / 2.0) < 1e-12);
    // psi'(100) = pi^2/6 - sum_{k<=99} 1/k^2
    double partial = 0.0;
    for (int k = 99; k >= 1; --k)
        partial += 1.0 / (static_cast<double>(k) * k);
    CHECK(std::abs(trigamma(100.0) - (pi * pi / 6.0 - partial)) < 1e-13);
    CHECK(trigamma(100.0) == doctest::Approx(0.0100502).epsilon(1e-5));
}

TEST_CASE("trigamma recurrence psi'(x) = psi'(x+1) + 1/x^2") {
    for (double x : {0.2, 1.0, 3.7, 11.9, 12.0, 250.0})
        CHECK(std::abs(trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)) < 1e-12);
}

TEST_CASE("trigamma rejects nonpositive arguments") {
    CHECK_THROWS_AS(trigamma(0.0), std::domain_error);
    CHECK_THROWS_AS(trigamma(-1.0), std::domain_error);
}

TEST_CASE("harmonic numbers") {
    CHECK(harmonic(0) == 0.0);
    CHECK(harmonic(1) == 1.0);
    CHECK(std::abs(harmonic(3) - 11.0 / 6.0) < 1e-15);
    // straddle the direct-summation cutoff
    for (long long m : {63LL, 64LL, 65LL, 1000LL}) {
        double direct = 0.0;
        for (long long j = m; j >= 1; --j)
            direct += 1.0 / static_cast<double>(j);
        CHECK(std::abs(harmonic(m) - direct) < 1e-12);
    }
    CHECK_THROWS_AS(harmonic(-1), std::domain_error);
}

TEST_CASE("harmonic consistency with digamma") {
    for (long long m : {5LL, 100LL, 100000LL})
        CHECK(std::abs(harmonic(m) - (digamma(static_cast<double>(m) + 1.0) + euler_gamma)) <
              1e-12);
}

TEST_CASE("log_gamma agrees with lgamma on the positive reals") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.7, 10.0, 40.5}) {
        const std::complex<double> lg = log_gamma(std::complex<double>(x, 0.0));
        CHECK(std::abs(lg.imag()) < 1e-12);
        CHECK(std::abs(lg.real() - std::lgamma(x)) < 1e-11 * std::max(1.0, std::abs(std::lgamma(x))));
    }
}

TEST_CASE("log_gamma functional equation Gamma(z+1) = z Gamma(z)") {
    const std::complex<double> points[] = {
        {0.3, 0.0}, {1.2, 0.7}, {-0.8, 0.4}, {-2.3, -1.1}, {4.0, 3.0}, {0.5, -2.0},
    };
    for (const std::complex<double>& z : points) {
        const std::complex<double> ratio =
            std::exp(log_gamma(z + 1.0) - log_gamma(z) - std::log(z));
        CHECK(std::abs(ratio - 1.0) < 1e-11);
    }
}

TEST_CASE("log_gamma reflection Gamma(z) Gamma(1-z) = pi / sin(pi z)") {
    const double pi = std::numbers::pi;
    const std::complex<double> points[] = {
        {0.25, 0.0}, {0.7, 0.3}, {-1.4, 0.6}, {2.6, -0.9},
    };
    for (const std::complex<double>& z : points) {
        const std::complex<double> lhs = std::exp(log_gamma(z) + log_gamma(1.0 - z));
        const std::complex<double> rhs = pi / std::sin(pi * z);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
    }
}

TEST_CASE("log_gamma at integers reproduces factorials") {
    double factorial = 1.0;
    for (int m = 1; m <= 12; ++m) {
        if (m > 1)
            factorial *= m - 1;
        const std::complex<double> lg = log_gamma(std::complex<double>(m, 0.0));
        CHECK(std::abs(std::exp(lg.real()) - factorial) < 1e-9 * factorial);
        CHECK(std::abs(lg.imag()) < 1e-12);
    }
}
