#include "cornn/stats.hpp"

#include "cornn/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace cornn {

namespace {

std::vector<double> pool(std::span<const double> a, std::span<const double> b) {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    return all;
}

void check_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("Mann-Whitney test needs non-empty samples");
    for (auto s : {a, b}) {
        for (double v : s) {
            if (std::isnan(v)) throw InvalidArgument("Mann-Whitney test: NaN in sample");
        }
    }
}

// Sum over tie groups of t^3 - t.
double tie_term(std::span<const double> pooled) {
    std::vector<double> sorted(pooled.begin(), pooled.end());
    std::sort(sorted.begin(), sorted.end());
    double term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        term += t * t * t - t;
        i = j;
    }
    return term;
}

UTestResult exact_test(std::span<const double> a, std::span<const double> b) {
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    const std::size_t total = m + n;
    if (total > kExactMaxCombined) {
        throw InvalidArgument("exact Mann-Whitney test limited to " +
                              std::to_string(kExactMaxCombined) + " pooled observations");
    }
    const auto ranks = midranks(pool(a, b));
    // Doubled midranks are integers.
    std::vector<std::int64_t> r2(total);
    for (std::size_t k = 0; k < total; ++k) r2[k] = std::llround(2.0 * ranks[k]);
    const std::int64_t max_sum = std::accumulate(r2.begin(), r2.end(), std::int64_t{0});

    // ways[j][s]: subsets of size j with doubled rank sum s.
    std::vector<std::vector<double>> ways(m + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t k = 0; k < total; ++k) {
        for (std::size_t j = std::min(k + 1, m); j >= 1; --j) {
            auto& dst = ways[j];
            const auto& src = ways[j - 1];
            for (std::int64_t s = max_sum; s >= r2[k]; --s) {
                dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r2[k])];
            }
        }
    }

    std::int64_t observed = 0;
    for (std::size_t k = 0; k < m; ++k) observed += r2[k];
    // Doubled expected rank sum of a is m(N+1).
    const std::int64_t centre = static_cast<std::int64_t>(m * (total + 1));
    const std::int64_t dev = std::llabs(observed - centre);

    double count_all = 0.0, count_le = 0.0, count_extreme = 0.0;
    const auto& dist = ways[m];
    for (std::int64_t s = 0; s <= max_sum; ++s) {
        const double c = dist[static_cast<std::size_t>(s)];
        if (c == 0.0) continue;
        count_all += c;
        if (s <= observed) count_le += c;
        if (std::llabs(s - centre) >= dev) count_extreme += c;
    }

    UTestResult r;
    r.method = UTestMethod::Exact;
    r.u_statistic = static_cast<double>(observed - static_cast<std::int64_t>(m * (m + 1))) / 2.0;
    r.p_one_tailed_a_less = count_le / count_all;
    r.p_two_tailed = std::min(1.0, count_extreme / count_all);
    return r;
}

UTestResult approx_test(std::span<const double> a, std::span<const double> b) {
    const double m = static_cast<double>(a.size());
    const double n = static_cast<double>(b.size());
    const double total = m + n;
    const auto pooled = pool(a, b);

    UTestResult r;
    r.method = UTestMethod::NormalApproxTieCorrected;
    r.u_statistic = u_statistic(a, b);
    const double mu = m * n / 2.0;
    double var = m * n / 12.0 * (total + 1.0);
    if (total > 1.0) var -= m * n / 12.0 * tie_term(pooled) / (total * (total - 1.0));
    if (!(var > 0.0)) {
        r.p_two_tailed = 1.0;
        r.p_one_tailed_a_less = 1.0;
        return r;
    }
    const double sd = std::sqrt(var);
    r.p_one_tailed_a_less = normal_cdf((r.u_statistic - mu + 0.5) / sd);
    const double z = std::max(0.0, std::abs(r.u_statistic - mu) - 0.5) / sd;
    r.p_two_tailed = std::min(1.0, 2.0 * normal_cdf(-z));
    return r;
}

} // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> midranks(std::span<const double> pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(pooled.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
        // positions i..j-1 share ranks i+1..j
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

double u_statistic(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const auto ranks = midranks(pool(a, b));
    const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    const double m = static_cast<double>(a.size());
    return rank_sum - m * (m + 1.0) / 2.0;
}

UTestResult mann_whitney(std::span<const double> a, std::span<const double> b, UTestMethod method) {
    check_samples(a, b);
    return method == UTestMethod::Exact ? exact_test(a, b) : approx_test(a, b);
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::AWins: return "AWins";
    case Outcome::Draw: return "Draw";
    case Outcome::BWins: return "BWins";
    }
    return "?";
}

Outcome compare(std::span<const double> a, std::span<const double> b, double alpha,
                UTestMethod method) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("compare: alpha must lie in (0, 1)");
    const auto ab = mann_whitney(a, b, method);
    if (!(ab.p_two_tailed < alpha)) return Outcome::Draw;
    if (ab.p_one_tailed_a_less < alpha) return Outcome::AWins;
    const auto ba = mann_whitney(b, a, method);
    if (ba.p_one_tailed_a_less < alpha) return Outcome::BWins;
    return Outcome::Draw;
}

} // namespace cornn
