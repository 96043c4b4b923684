#pragma once

// Continuous wavelet transform of a real series with the complex Morlet basis.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::wavelet {

enum class Boundary { Reflect, ZeroPad };

std::string_view to_string(Boundary b) noexcept;
Boundary parse_boundary(std::string_view name);

struct WaveletConfig {
    double omega0 = 6.0;
    int scale_count = 32;
    double min_period = 2.0;
    double max_period = 0.0;    // 0 means N / 2
    std::vector<double> scales; // explicit ladder, overrides the period range
    Boundary boundary = Boundary::Reflect;

    void validate() const;
};

std::complex<double> morlet(double t, double omega0) noexcept;

// Scale whose Morlet carrier matches the given period: omega0 * period / (2 pi).
double scale_for_period(double period, double omega0) noexcept;

// Geometric ladder for a signal of length n under cfg.
std::vector<double> scale_ladder(std::size_t n, const WaveletConfig& cfg);

struct Scalogram {
    std::vector<double> scales;
    std::vector<double> times;
    Eigen::MatrixXcd coefficients; // scales x times
    Eigen::MatrixXd amplitude;
};

// W(a, b) = sum_t f(t) a^{-1/2} conj(psi((t - b) / a)), truncated at |t - b| <= 8a.
// Throws Error(InsufficientData) below 8 samples, Error(Domain) for a bad scale.
Scalogram cwt(std::span<const double> signal, const WaveletConfig& cfg);

struct Peak {
    std::size_t scale_index = 0;
    std::size_t time_index = 0;
    double scale = 0.0;
    double time = 0.0;
    double amplitude = 0.0;
};

struct ScalogramRow {
    double scale = 0.0;
    double time = 0.0;
    double amplitude = 0.0;
};

struct ScalogramTable {
    std::vector<ScalogramRow> rows;   // scale-major
    std::vector<Peak> scale_maxima;   // one per scale
    std::vector<Peak> time_maxima;    // one per time
    Peak global;
};

ScalogramTable scalogram_export(const Scalogram& s);
std::string scalogram_csv(const ScalogramTable& t);

void to_json(nlohmann::json& j, const WaveletConfig& cfg);
void to_json(nlohmann::json& j, const ScalogramTable& t);

} // namespace matchflow::wavelet
