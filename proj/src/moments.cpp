#include "picketlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "picketlab/chain.hpp"
#include "picketlab/parallel.hpp"
#include "picketlab/sampler.hpp"
#include "picketlab/special_functions.hpp"

namespace picketlab {

namespace {

constexpr int kNodeCap = 1 << 14;
constexpr double kNodeTolerance = 1e-10;
constexpr double kImagTolerance = 1e-8;
constexpr double kVarianceFeasibleC = 0.35;

using Complex = std::complex<double>;

void check_prefix(int n, const std::vector<Entry>& prefix, const char* where) {
    if (n < 1)
        throw std::domain_error(std::string(where) + ": n must be >= 1");
    if (prefix.empty())
        throw std::invalid_argument(std::string(where) + ": prefix must be nonempty");
    for (const Entry& e : prefix)
        if (!e.infinite && e.value <= n)
            throw std::invalid_argument(std::string(where) + ": finite entry " +
                                        std::to_string(e.value) + " must exceed n = " +
                                        std::to_string(n));
}

// Multiplicities of the distinct entries; the transform factor is a function
// of the entry alone, so repeated entries cost one evaluation.
std::vector<std::pair<Entry, long long>> group_entries(const std::vector<Entry>& prefix) {
    std::map<Entry, long long> counts;
    for (const Entry& e : prefix)
        ++counts[e];
    return {counts.begin(), counts.end()};
}

std::vector<std::pair<Entry, long long>> group_cycled(const std::vector<Entry>& pattern,
                                                      long long T) {
    std::map<Entry, long long> counts;
    const long long P = static_cast<long long>(pattern.size());
    for (const Entry& e : pattern)
        counts[e] += T / P;
    for (long long tau = (T / P) * P + 1; tau <= T; ++tau)
        counts[pattern[static_cast<std::size_t>((tau - 1) % P)]] += 1;
    std::vector<std::pair<Entry, long long>> groups;
    for (const auto& [entry, count] : counts)
        if (count > 0)
            groups.emplace_back(entry, count);
    return groups;
}

Complex log_factor_sum(const std::vector<std::pair<Entry, long long>>& groups, int n,
                       double c, Complex u, bool shifted) {
    Complex sum = 0.0;
    for (const auto& [entry, count] : groups)
        sum += static_cast<double>(count) * detail::log_factor(entry, n, c, u, shifted);
    return sum;
}

// log of the rational prefactor prod_l (u+l-1)/(u+c+l-1).
Complex log_prefactor(int n, double c, Complex u) {
    Complex sum = 0.0;
    for (int l = 1; l <= n; ++l)
        sum += std::log(u + static_cast<double>(l - 1)) -
               std::log(u + c + static_cast<double>(l - 1));
    return sum;
}

double contour_center(int n, double c) {
    return -c - 0.5 * static_cast<double>(n - 1);
}

struct MeanPartial {
    double sum = 0.0;
    double sum_sq = 0.0;
};

struct PowerPartial {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;
};

double trial_statistic(const MomentQuery& query, double shift, long long trial,
                       RngStream base) {
    const long long T = static_cast<long long>(query.prefix.size());
    const RngStream trial_stream = substream(base, static_cast<std::uint64_t>(trial));
    std::vector<ComplexMatrix> factors;
    factors.reserve(static_cast<std::size_t>(T));
    for (long long tau = 1; tau <= T; ++tau) {
        Xoshiro256pp rng(substream(trial_stream, static_cast<std::uint64_t>(tau)));
        factors.push_back(sample_factor(query.prefix[static_cast<std::size_t>(tau - 1)],
                                        query.n, rng));
    }
    const std::vector<double> log_y = exact_log_squared_singular_values(factors);
    double S = 0.0;
    for (double ly : log_y)
        S += std::exp(query.c * (ly + shift));
    return S;
}

}  // namespace

void validate(const MomentQuery& query) {
    check_prefix(query.n, query.prefix, "MomentQuery");
    if (!(query.c > 0.0))
        throw std::domain_error("MomentQuery: c must be positive");
    if (query.m != 1 && query.m != 2)
        throw std::invalid_argument("MomentQuery: m must be 1 or 2");
    if (query.m == 2 && !(query.c < kVarianceFeasibleC))
        throw contour_infeasible(
            "MomentQuery: variance contours nest only for c < 0.35 (gap r2 - r1); got c = " +
            std::to_string(query.c));
}

std::complex<double> infinite_factor(std::complex<double> u, double c) {
    if (!(c > 0.0))
        throw std::domain_error("infinite_factor: c must be positive");
    if (u.imag() == 0.0 && u.real() >= 0.5) {
        const double nearest = std::round(u.real());
        if (nearest >= 1.0 && std::abs(u.real() - nearest) < 1e-12)
            throw std::domain_error("infinite_factor: pole at positive integer u");
    }
    return std::exp(c * euler_gamma + log_gamma(1.0 - u) - log_gamma(1.0 - u - c));
}

namespace detail {

std::complex<double> log_factor(Entry entry, int n, double c, std::complex<double> u,
                                bool shifted) {
    if (entry.infinite) {
        Complex value = log_gamma(1.0 - u) - log_gamma(1.0 - u - c);
        if (shifted)
            value += c * euler_gamma;
        return value;
    }
    const long long gap = entry.value - n;
    Complex sum = 0.0;
    for (long long k = 1; k <= gap; ++k) {
        const double dk = static_cast<double>(k);
        sum += std::log((u + c - dk) / (u - dk));
    }
    sum += shifted ? c * harmonic(gap)
                   : c * std::log(static_cast<double>(entry.value));
    return sum;
}

std::complex<double> contour_m1_raw(const MomentQuery& query, int nodes,
                                    double radius_offset) {
    const auto groups = group_entries(query.prefix);
    const double x0 = contour_center(query.n, query.c);
    const double r = 0.5 * static_cast<double>(query.n - 1) + 0.5 + radius_offset;
    Complex total = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(nodes);
        const Complex dir = std::polar(1.0, theta);
        const Complex u = x0 + r * dir;
        const Complex lf = log_prefactor(query.n, query.c, u) +
                           log_factor_sum(groups, query.n, query.c, u, query.shifted);
        total += std::exp(lf) * (r * dir);
    }
    return (-1.0 / query.c) * total / static_cast<double>(nodes);
}

std::complex<double> variance_raw(int n, const std::vector<std::pair<Entry, long long>>& groups,
                                  double c, bool shifted, int nodes, bool cross_kernel) {
    const double x0 = contour_center(n, c);
    const double r1 = 0.5 * static_cast<double>(n - 1) + 0.25;
    const double r2 = 0.5 * static_cast<double>(n - 1) + 0.6;
    std::vector<Complex> u1(static_cast<std::size_t>(nodes)), w1(u1.size());
    std::vector<Complex> u2(u1.size()), w2(u1.size());
    for (int j = 0; j < nodes; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(nodes);
        const Complex dir = std::polar(1.0, theta);
        const auto f = [&](double r) {
            const Complex u = x0 + r * dir;
            return std::exp(log_prefactor(n, c, u) + log_factor_sum(groups, n, c, u, shifted)) *
                   (r * dir);
        };
        u1[static_cast<std::size_t>(j)] = x0 + r1 * dir;
        u2[static_cast<std::size_t>(j)] = x0 + r2 * dir;
        w1[static_cast<std::size_t>(j)] = f(r1);
        w2[static_cast<std::size_t>(j)] = f(r2);
    }
    Complex total = 0.0;
    for (std::size_t j = 0; j < u1.size(); ++j) {
        Complex row = 0.0;
        for (std::size_t k = 0; k < u2.size(); ++k) {
            const Complex delta = u2[k] - u1[j];
            const Complex kernel = cross_kernel ? 1.0 / (delta * delta - c * c) : Complex(0.0);
            row += w2[k] * kernel;
        }
        total += w1[j] * row;
    }
    return total / (static_cast<double>(nodes) * static_cast<double>(nodes));
}

}  // namespace detail

MomentResult residue_moment_m1(const MomentQuery& query) {
    validate(query);
    if (query.m != 1)
        throw std::invalid_argument("residue_moment_m1: m must be 1");
    const auto groups = group_entries(query.prefix);
    double total = 0.0;
    for (int l = 1; l <= query.n; ++l) {
        double coeff = 1.0;
        for (int h = 1; h <= query.n; ++h)
            if (h != l)
                coeff *= (static_cast<double>(h - l) - query.c) / static_cast<double>(h - l);
        if (coeff == 0.0)
            continue;  // exact zero factor when c is an integer and h = l + c
        const double u = -query.c - static_cast<double>(l - 1);
        if (!(u < 1.0))
            throw numeric_failure("residue_moment_m1: residue point collides with a factor pole");
        const Complex lf = log_factor_sum(groups, query.n, query.c, Complex(u, 0.0),
                                          query.shifted);
        total += coeff * std::exp(lf.real());
    }
    return MomentResult{total, MomentMethod::residue, 0.0};
}

namespace {

MomentResult doubled_quadrature(int start_nodes,
                                const std::function<Complex(int)>& eval,
                                const char* where) {
    if (start_nodes < 8)
        throw std::domain_error(std::string(where) + ": nodes must be >= 8");
    int nodes = std::min(start_nodes, kNodeCap);
    Complex value = eval(nodes);
    double gap = std::numeric_limits<double>::infinity();
    while (nodes < kNodeCap) {
        nodes *= 2;
        const Complex refined = eval(nodes);
        gap = std::abs(refined - value);
        value = refined;
        if (gap < kNodeTolerance)
            break;
    }
    if (std::abs(value.imag()) > kImagTolerance)
        throw numeric_failure(std::string(where) + ": imaginary part " +
                              std::to_string(value.imag()) + " exceeds 1e-8");
    return MomentResult{value.real(), MomentMethod::quadrature, gap};
}

}  // namespace

MomentResult contour_moment(const MomentQuery& query, int nodes) {
    validate(query);
    if (query.m == 1)
        return doubled_quadrature(
            nodes, [&](int N) { return detail::contour_m1_raw(query, N, 0.0); },
            "contour_moment");
    const auto groups = group_entries(query.prefix);
    return doubled_quadrature(
        nodes,
        [&](int N) {
            return detail::variance_raw(query.n, groups, query.c, query.shifted, N, true);
        },
        "contour_moment");
}

MomentResult variance_m2(int n, const std::vector<Entry>& pattern, double c_hat,
                         long long T, int nodes) {
    check_prefix(n, pattern, "variance_m2");
    if (T < 1)
        throw std::domain_error("variance_m2: T must be >= 1");
    if (!(c_hat > 0.0))
        throw std::domain_error("variance_m2: c_hat must be positive");
    const double c = c_hat / static_cast<double>(T);
    if (!(c < kVarianceFeasibleC))
        throw contour_infeasible(
            "variance_m2: contour nesting requires c = c_hat/T < 0.35; got c = " +
            std::to_string(c));
    const auto groups = group_cycled(pattern, T);
    return doubled_quadrature(
        nodes,
        [&](int N) { return detail::variance_raw(n, groups, c, true, N, true); },
        "variance_m2");
}

MomentResult mc_moment(const MomentQuery& query, long long trials, RngStream base) {
    validate(query);
    if (query.m != 1)
        throw std::invalid_argument("mc_moment: m must be 1");
    if (trials < 1)
        throw std::domain_error("mc_moment: trials must be >= 1");
    if (query.prefix.size() > 200)
        throw std::invalid_argument("mc_moment: exact product path requires T <= 200");
    double shift = 0.0;
    if (query.shifted)
        for (const Entry& e : query.prefix)
            shift += shift_s(query.n, e);

    const auto partials = map_blocks<MeanPartial>(trials, [&](BlockRange range) {
        MeanPartial p;
        for (long long t = range.begin; t < range.end; ++t) {
            const double S = trial_statistic(query, shift, t, base);
            p.sum += S;
            p.sum_sq += S * S;
        }
        return p;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (const MeanPartial& p : partials) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    const double count = static_cast<double>(trials);
    const double mean = sum / count;
    double stderr_mean = 0.0;
    if (trials >= 2) {
        const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1.0));
        stderr_mean = std::sqrt(var / count);
    }
    return MomentResult{mean, MomentMethod::monte_carlo, stderr_mean};
}

VarianceEstimate mc_variance(int n, const std::vector<Entry>& pattern, double c_hat,
                             long long T, long long trials, RngStream base) {
    check_prefix(n, pattern, "mc_variance");
    if (T < 1 || T > 200)
        throw std::invalid_argument("mc_variance: exact product path requires 1 <= T <= 200");
    if (trials < 2)
        throw std::domain_error("mc_variance: trials must be >= 2");
    if (!(c_hat > 0.0))
        throw std::domain_error("mc_variance: c_hat must be positive");

    MomentQuery query;
    query.n = n;
    query.c = c_hat / static_cast<double>(T);
    query.m = 1;
    query.shifted = true;
    const long long P = static_cast<long long>(pattern.size());
    for (long long tau = 1; tau <= T; ++tau)
        query.prefix.push_back(pattern[static_cast<std::size_t>((tau - 1) % P)]);
    double shift = 0.0;
    for (const Entry& e : query.prefix)
        shift += shift_s(n, e);

    const auto partials = map_blocks<PowerPartial>(trials, [&](BlockRange range) {
        PowerPartial p;
        for (long long t = range.begin; t < range.end; ++t) {
            const double S = trial_statistic(query, shift, t, base);
            const double S2 = S * S;
            p.s1 += S;
            p.s2 += S2;
            p.s3 += S2 * S;
            p.s4 += S2 * S2;
        }
        return p;
    });
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (const PowerPartial& p : partials) {
        s1 += p.s1;
        s2 += p.s2;
        s3 += p.s3;
        s4 += p.s4;
    }
    const double count = static_cast<double>(trials);
    const double mean = s1 / count;
    const double m2 = std::max(0.0, s2 / count - mean * mean);
    const double m4 = std::max(
        0.0, s4 / count - 4.0 * mean * (s3 / count) + 6.0 * mean * mean * (s2 / count) -
                 3.0 * mean * mean * mean * mean);
    VarianceEstimate est;
    est.variance = m2 * count / (count - 1.0);
    est.stderr_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / count);
    return est;
}

}  // namespace picketlab
