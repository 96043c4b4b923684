#pragma once

// Momentum/winning relationship measures and the permutation test for
// randomness of scoring runs.

#include "matchflow/momentum.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::trend {

// Throws Error(Shape) on length mismatch, Error(UndefinedSimilarity) for a zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct SurfaceSample {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct SurfaceFit {
    // p00, p10, p01, p20, p11, p02
    std::array<double, 6> coefficients{};
    double r_squared = 0.0;
    std::vector<double> residuals;

    double operator()(double x, double y) const noexcept;
};

// Basis values {1, x, y, x^2, xy, y^2}.
std::array<double, 6> poly22_basis(double x, double y) noexcept;

// Least squares on column-scaled basis via pivoted QR. R^2 = 1 - SSE/SST; when
// SST is 0 (constant z) R^2 is reported as 1. Throws Error(SingularDesign)
// when fewer than 6 samples or the basis is rank deficient.
SurfaceFit fit_poly22(std::span<const SurfaceSample> samples);

// Long-format (x, y, z_hat) grid over the sample bounding box.
std::string surface_grid_csv(const SurfaceFit& fit, std::span<const SurfaceSample> samples, int steps = 25);

enum class Statistic { MomentumVariance, MaxStreak, Lag1Autocorr };

std::string_view to_string(Statistic s) noexcept;
Statistic parse_statistic(std::string_view name);

double compute_statistic(Statistic stat, std::span<const int> victors, const momentum::MomentumParams& params);

struct PermutationReport {
    Statistic statistic = Statistic::MomentumVariance;
    double observed = 0.0;
    double null_mean = 0.0;
    double null_sd = 0.0;
    std::array<double, 5> null_quantiles{}; // 5%, 25%, 50%, 75%, 95%
    long exceedances = 0;                   // null >= observed
    double p_value = 1.0;
    int n_permutations = 0;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::vector<std::string> warnings;
};

struct RandomnessOptions {
    Statistic statistic = Statistic::MomentumVariance;
    int n_permutations = 999;
    std::uint64_t seed = 7;
    bool stratify_by_server = false;
    unsigned threads = 1;
};

// Shuffles the point-victor sequence (within server strata when requested).
// p = (1 + #{null >= observed}) / (1 + permutations). Requires >= 99
// permutations and >= 20 points (Error(Domain) otherwise).
PermutationReport randomness_test(std::span<const int> victors, std::span<const int> servers,
                                  const momentum::MomentumParams& params, const RandomnessOptions& options);

// Cumulative fraction of points won by player 1 after each point.
std::vector<double> cumulative_win_rate(std::span<const int> victors);

void to_json(nlohmann::json& j, const SurfaceFit& fit);
void to_json(nlohmann::json& j, const PermutationReport& report);

} // namespace matchflow::trend
