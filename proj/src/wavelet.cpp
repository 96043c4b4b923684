#include "matchflow/wavelet.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

namespace matchflow::wavelet {

namespace {

constexpr double kSupport = 8.0;

double extended(std::span<const double> f, long t, Boundary b) noexcept {
    const auto n = static_cast<long>(f.size());
    if (t >= 0 && t < n) return f[static_cast<std::size_t>(t)];
    if (b == Boundary::ZeroPad) return 0.0;
    // symmetric extension f(-t-1) = f(t), period 2n
    long m = t % (2 * n);
    if (m < 0) m += 2 * n;
    return m < n ? f[static_cast<std::size_t>(m)] : f[static_cast<std::size_t>(2 * n - 1 - m)];
}

} // namespace

std::string_view to_string(Boundary b) noexcept {
    return b == Boundary::Reflect ? "reflect" : "zero_pad";
}

Boundary parse_boundary(std::string_view name) {
    if (name == "reflect") return Boundary::Reflect;
    if (name == "zero_pad" || name == "zero-pad") return Boundary::ZeroPad;
    fail(ErrorKind::UnknownName, "unknown boundary '" + std::string(name) + "'");
}

void WaveletConfig::validate() const {
    if (!(omega0 >= 5.0) || !std::isfinite(omega0)) fail(ErrorKind::Config, "omega0 must be >= 5");
    if (scales.empty()) {
        if (scale_count < 1) fail(ErrorKind::Config, "scale_count must be positive");
        if (!(min_period > 0.0)) fail(ErrorKind::Config, "min_period must be positive");
        if (max_period != 0.0 && !(max_period >= min_period)) fail(ErrorKind::Config, "max_period below min_period");
    }
    for (double a : scales) {
        if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::Domain, "scales must be positive");
    }
}

std::complex<double> morlet(double t, double omega0) noexcept {
    const double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
    return norm * std::exp(-0.5 * t * t) * std::polar(1.0, omega0 * t);
}

double scale_for_period(double period, double omega0) noexcept {
    return omega0 * period / (2.0 * std::numbers::pi);
}

std::vector<double> scale_ladder(std::size_t n, const WaveletConfig& cfg) {
    cfg.validate();
    if (!cfg.scales.empty()) return cfg.scales;
    const double hi_period = cfg.max_period > 0.0 ? cfg.max_period : static_cast<double>(n) / 2.0;
    const double lo = scale_for_period(cfg.min_period, cfg.omega0);
    const double hi = scale_for_period(std::max(hi_period, cfg.min_period), cfg.omega0);
    std::vector<double> out(static_cast<std::size_t>(cfg.scale_count));
    if (cfg.scale_count == 1) {
        out[0] = lo;
        return out;
    }
    const double ratio = std::log(hi / lo) / (cfg.scale_count - 1);
    for (int k = 0; k < cfg.scale_count; ++k) out[static_cast<std::size_t>(k)] = lo * std::exp(ratio * k);
    return out;
}

Scalogram cwt(std::span<const double> signal, const WaveletConfig& cfg) {
    if (signal.empty()) fail(ErrorKind::EmptyInput, "empty signal");
    if (signal.size() < 8) fail(ErrorKind::InsufficientData, "wavelet transform needs at least 8 samples");
    for (double v : signal) {
        if (!std::isfinite(v)) fail(ErrorKind::Domain, "signal contains a non-finite value");
    }
    Scalogram s;
    s.scales = scale_ladder(signal.size(), cfg);
    const auto ns = static_cast<Eigen::Index>(s.scales.size());
    const auto nt = static_cast<Eigen::Index>(signal.size());
    s.times.resize(signal.size());
    for (std::size_t t = 0; t < signal.size(); ++t) s.times[t] = static_cast<double>(t);
    s.coefficients.resize(ns, nt);

    for (Eigen::Index k = 0; k < ns; ++k) {
        const double a = s.scales[static_cast<std::size_t>(k)];
        const double inv_sqrt = 1.0 / std::sqrt(a);
        const auto reach = static_cast<long>(std::floor(kSupport * a));
        for (Eigen::Index b = 0; b < nt; ++b) {
            std::complex<double> acc{0.0, 0.0};
            for (long t = b - reach; t <= b + reach; ++t) {
                const double f = extended(signal, t, cfg.boundary);
                if (f == 0.0) continue;
                acc += f * std::conj(morlet(static_cast<double>(t - b) / a, cfg.omega0));
            }
            s.coefficients(k, b) = acc * inv_sqrt;
        }
    }
    s.amplitude = s.coefficients.cwiseAbs();
    return s;
}

ScalogramTable scalogram_export(const Scalogram& s) {
    ScalogramTable t;
    const auto ns = s.amplitude.rows();
    const auto nt = s.amplitude.cols();
    auto peak_at = [&](Eigen::Index k, Eigen::Index b) {
        return Peak{static_cast<std::size_t>(k), static_cast<std::size_t>(b), s.scales[static_cast<std::size_t>(k)],
                    s.times[static_cast<std::size_t>(b)], s.amplitude(k, b)};
    };
    t.rows.reserve(static_cast<std::size_t>(ns * nt));
    for (Eigen::Index k = 0; k < ns; ++k) {
        for (Eigen::Index b = 0; b < nt; ++b) {
            t.rows.push_back({s.scales[static_cast<std::size_t>(k)], s.times[static_cast<std::size_t>(b)],
                              s.amplitude(k, b)});
        }
    }
    if (ns == 0 || nt == 0) return t;
    for (Eigen::Index k = 0; k < ns; ++k) {
        Eigen::Index b = 0;
        s.amplitude.row(k).maxCoeff(&b);
        t.scale_maxima.push_back(peak_at(k, b));
    }
    for (Eigen::Index b = 0; b < nt; ++b) {
        Eigen::Index k = 0;
        s.amplitude.col(b).maxCoeff(&k);
        t.time_maxima.push_back(peak_at(k, b));
    }
    Eigen::Index gk = 0, gb = 0;
    s.amplitude.maxCoeff(&gk, &gb);
    t.global = peak_at(gk, gb);
    return t;
}

std::string scalogram_csv(const ScalogramTable& t) {
    std::string out = "scale,time,amplitude\n";
    for (const auto& r : t.rows) {
        out += csv::format_double(r.scale) + "," + csv::format_double(r.time) + "," +
               csv::format_double(r.amplitude) + "\n";
    }
    return out;
}

void to_json(nlohmann::json& j, const WaveletConfig& cfg) {
    j = nlohmann::json{{"family", "morlet"},
                       {"omega0", cfg.omega0},
                       {"scale_count", cfg.scale_count},
                       {"min_period", cfg.min_period},
                       {"max_period", cfg.max_period},
                       {"scales", cfg.scales},
                       {"boundary", to_string(cfg.boundary)}};
}

namespace {

nlohmann::json peak_json(const Peak& p) {
    return {{"scale", p.scale}, {"time", p.time}, {"amplitude", p.amplitude}};
}

} // namespace

void to_json(nlohmann::json& j, const ScalogramTable& t) {
    nlohmann::json per_scale = nlohmann::json::array();
    for (const auto& p : t.scale_maxima) per_scale.push_back(peak_json(p));
    nlohmann::json per_time = nlohmann::json::array();
    for (const auto& p : t.time_maxima) per_time.push_back(peak_json(p));
    j = nlohmann::json{{"rows", t.rows.size()},
                       {"global_peak", peak_json(t.global)},
                       {"scale_maxima", per_scale},
                       {"time_maxima", per_time}};
}

} // namespace matchflow::wavelet
