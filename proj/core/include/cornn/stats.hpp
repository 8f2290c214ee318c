#pragma once

#include <span>
#include <string>
#include <vector>

namespace cornn {

enum class UTestMethod { Exact, NormalApproxTieCorrected };

/// Largest |a| + |b| accepted by the exact method.
inline constexpr std::size_t kExactMaxCombined = 20;

struct UTestResult {
    /// U for sample a: number of pairs with a_i > b_j, ties counting 1/2.
    double u_statistic = 0.0;
    double p_two_tailed = 1.0;
    /// Alternative: a is stochastically smaller than b.
    double p_one_tailed_a_less = 1.0;
    UTestMethod method = UTestMethod::NormalApproxTieCorrected;
};

/// U computed from midrank sums.
double u_statistic(std::span<const double> a, std::span<const double> b);

/// Midranks (1-based) of the pooled sample a ++ b.
std::vector<double> midranks(std::span<const double> pooled);

/// Mann-Whitney U test. Exact mode gives the permutation distribution of
/// the observed midranks, so it stays exact under ties. The approximation
/// uses the tie-corrected variance and a 0.5 continuity correction.
UTestResult mann_whitney(std::span<const double> a, std::span<const double> b,
                         UTestMethod method = UTestMethod::NormalApproxTieCorrected);

enum class Outcome { AWins, Draw, BWins };

std::string to_string(Outcome o);

/// Lower values are better. Draw unless the two-tailed p is strictly below
/// alpha; otherwise the significant one-tailed test picks the winner.
Outcome compare(std::span<const double> a, std::span<const double> b, double alpha = 0.05,
                UTestMethod method = UTestMethod::NormalApproxTieCorrected);

/// Standard normal CDF.
double normal_cdf(double z);

} // namespace cornn
