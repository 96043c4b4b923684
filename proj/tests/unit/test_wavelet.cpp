#include "matchflow/error.hpp"
#include "matchflow/wavelet.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace matchflow;
using namespace matchflow::wavelet;

namespace {

std::vector<double> random_signal(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(gen);
    return v;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_SUITE("wavelet_trend") {

TEST_CASE("morlet values") {
    const auto z = morlet(0.0, 6.0);
    CHECK(z.real() == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    CHECK(z.imag() == 0.0);
    CHECK(z.real() == doctest::Approx(0.7511).epsilon(1e-4));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 50; ++i) {
        const double t = u(gen);
        CHECK(std::abs(morlet(t, 6.0)) == doctest::Approx(std::abs(morlet(-t, 6.0))).epsilon(1e-15));
    }
    CHECK(std::abs(morlet(5.0, 6.0)) < 1e-5 * std::abs(morlet(0.0, 6.0)));
}

TEST_CASE("scale ladder") {
    WaveletConfig cfg;
    const auto s = scale_ladder(128, cfg);
    REQUIRE(s.size() == 32);
    CHECK(s.front() == doctest::Approx(scale_for_period(2.0, 6.0)));
    CHECK(s.back() == doctest::Approx(scale_for_period(64.0, 6.0)));
    for (std::size_t i = 2; i < s.size(); ++i) CHECK(s[i] / s[i - 1] == doctest::Approx(s[1] / s[0]));
    cfg.scales = {1.0, 2.0};
    CHECK(scale_ladder(128, cfg) == std::vector<double>{1.0, 2.0});
    CHECK(scale_for_period(16.0, 6.0) == doctest::Approx(6.0 * 16.0 / (2.0 * std::numbers::pi)));
}

TEST_CASE("direct summation oracle on length-32 signals") {
    std::mt19937_64 gen(32);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_signal(gen, 32);
        for (auto boundary : {Boundary::ZeroPad, Boundary::Reflect}) {
            WaveletConfig cfg;
            cfg.boundary = boundary;
            cfg.scale_count = 8;
            const auto s = cwt(f, cfg);
            const auto ref = oracle::cwt(f, s.scales, cfg.omega0, boundary == Boundary::Reflect);
            REQUIRE(s.coefficients.rows() == 8);
            REQUIRE(s.coefficients.cols() == 32);
            double worst = 0.0;
            for (Eigen::Index a = 0; a < 8; ++a) {
                for (Eigen::Index b = 0; b < 32; ++b) {
                    worst = std::max(worst, std::abs(s.coefficients(a, b) - ref[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]));
                    CHECK(s.amplitude(a, b) >= 0.0);
                }
            }
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("linearity and sign invariance") {
    std::mt19937_64 gen(7);
    const auto f = random_signal(gen, 64);
    std::vector<double> twice, neg;
    for (double x : f) {
        twice.push_back(2.0 * x);
        neg.push_back(-x);
    }
    WaveletConfig cfg;
    const auto a = cwt(f, cfg);
    const auto b = cwt(twice, cfg);
    const auto c = cwt(neg, cfg);
    CHECK((b.coefficients - 2.0 * a.coefficients).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((c.amplitude - a.amplitude).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("shift covariance of interior coefficients") {
    std::mt19937_64 gen(9);
    const auto long_signal = random_signal(gen, 120);
    const int shift = 5;
    const std::vector<double> f(long_signal.begin(), long_signal.begin() + 100);
    const std::vector<double> g(long_signal.begin() + shift, long_signal.begin() + 100 + shift);
    WaveletConfig cfg;
    cfg.scales = {1.0, 2.0, 3.0};
    const auto a = cwt(f, cfg);
    const auto b = cwt(g, cfg);
    for (Eigen::Index s = 0; s < 3; ++s) {
        const int reach = static_cast<int>(std::floor(8.0 * cfg.scales[static_cast<std::size_t>(s)]));
        for (int t = reach; t + shift + reach < 100; ++t) {
            CHECK(std::abs(b.coefficients(s, t) - a.coefficients(s, t + shift)) <= 1e-8);
        }
    }
}

TEST_CASE("constant signal is annihilated") {
    const std::vector<double> f(128, 3.0);
    const auto s = cwt(f, WaveletConfig{});
    CHECK(s.amplitude.maxCoeff() < 1e-6 * norm(f));
}

TEST_CASE("sinusoid ridge sits at the carrier scale") {
    std::vector<double> f(128);
    for (std::size_t t = 0; t < f.size(); ++t) f[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 16.0);
    const WaveletConfig cfg;
    const auto s = cwt(f, cfg);
    const double predicted = scale_for_period(16.0, cfg.omega0);
    const double step = std::log(s.scales[1] / s.scales[0]);
    for (Eigen::Index b = 32; b < 96; ++b) {
        Eigen::Index best = 0;
        s.amplitude.col(b).maxCoeff(&best);
        CHECK(std::abs(std::log(s.scales[static_cast<std::size_t>(best)] / predicted)) <= step);
    }
}

TEST_CASE("export is lossless and annotated") {
    std::mt19937_64 gen(3);
    const auto f = random_signal(gen, 16);
    WaveletConfig cfg;
    cfg.scales = {1.5, 3.0};
    const auto s = cwt(std::span<const double>(f.data(), 16), cfg);
    const auto t = scalogram_export(s);
    REQUIRE(t.rows.size() == 32);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i].amplitude == s.amplitude(static_cast<Eigen::Index>(i / 16), static_cast<Eigen::Index>(i % 16)));
    }
    Eigen::Index r = 0, c = 0;
    const double peak = s.amplitude.maxCoeff(&r, &c);
    CHECK(t.global.amplitude == peak);
    CHECK(t.global.scale_index == static_cast<std::size_t>(r));
    CHECK(t.global.time_index == static_cast<std::size_t>(c));
    CHECK(t.scale_maxima.size() == 2);
    CHECK(t.time_maxima.size() == 16);
    CHECK(scalogram_csv(t).rfind("scale,time,amplitude\n", 0) == 0);

    WaveletConfig tiny;
    tiny.scales = {1.0, 2.0};
    const std::vector<double> g{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto small = cwt(g, tiny);
    CHECK(scalogram_export(small).rows.size() == 18);
}

TEST_CASE("errors and config") {
    CHECK_THROWS_AS(cwt(std::vector<double>{}, WaveletConfig{}), Error);
    CHECK_THROWS_AS(cwt(std::vector<double>(5, 1.0), WaveletConfig{}), Error);
    std::vector<double> bad(16, 1.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(cwt(bad, WaveletConfig{}), Error);
    WaveletConfig cfg;
    cfg.scales = {1.0, -2.0};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = WaveletConfig{};
    cfg.omega0 = 4.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK(parse_boundary("zero_pad") == Boundary::ZeroPad);
    CHECK(parse_boundary("reflect") == Boundary::Reflect);
    CHECK_THROWS_AS(parse_boundary("periodic"), Error);
    nlohmann::json j = WaveletConfig{};
    CHECK(j["omega0"] == 6.0);
}

}
