#pragma once

// Command-line front end: configuration, command dispatch and artifact output.

#include "matchflow/ahp.hpp"
#include "matchflow/bayes_labels.hpp"
#include "matchflow/error.hpp"
#include "matchflow/ingest.hpp"
#include "matchflow/momentum.hpp"
#include "matchflow/sensitivity.hpp"
#include "matchflow/softmax_model.hpp"
#include "matchflow/trend_tests.hpp"
#include "matchflow/wavelet.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::app {

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kOutputDirEnv = "MATCHFLOW_OUTPUT_DIR";

struct LinearLine {
    double intercept = 0.0;
    std::map<std::string, double> slopes;
};

struct RunConfig {
    std::vector<std::string> inputs;
    ingest::ColumnMap columns;
    std::string output_dir;
    std::uint64_t seed = 42;
    std::optional<std::string> holdout;
    std::optional<std::string> match;
    bool plots = true;

    momentum::MomentumParams momentum;
    softmax::TrainConfig train;
    labels::TimeUnit label_unit = labels::TimeUnit::Point;
    bool laplace = false;

    std::optional<std::string> ahp_matrix_csv;
    std::vector<ahp::Judgment> ahp_judgments; // used when no matrix file is given
    ahp::WeightMethod ahp_method = ahp::WeightMethod::GeometricMean;
    std::vector<std::string> ahp_indicators;
    std::vector<std::string> ahp_cost_indicators;

    std::string trend_x = "momentum";
    std::string trend_y = "streak";

    trend::RandomnessOptions random;

    std::vector<sweep::Axis> sweep_axes;
    double sweep_tolerance = 1e-3;
    std::optional<std::pair<LinearLine, LinearLine>> sweep_linear; // serve_first, serve_second

    wavelet::WaveletConfig wavelet;
};

RunConfig default_config();

// Applies a JSON document over `cfg`. Relative paths resolve against `base`.
// Unknown keys and ill-typed values throw Error(Config).
void apply_config(RunConfig& cfg, const nlohmann::json& doc, const std::filesystem::path& base);

// Default AHP indicators (momentum plus six per-point features) and a
// nine-scale judgment set derived from a fixed priority order.
const std::vector<std::string>& default_ahp_indicators();
const std::vector<std::string>& default_ahp_cost_indicators();
std::vector<ahp::Judgment> default_ahp_judgments();

int exit_code(ErrorKind kind) noexcept;

// Full CLI entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace matchflow::app
