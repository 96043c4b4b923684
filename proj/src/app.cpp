#include "matchflow/app.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/eval_metrics.hpp"
#include "matchflow/svg.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace matchflow::app {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Output {
public:
    Output(fs::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {}

    void write(const std::string& name, std::string_view data) const {
        const fs::path p = dir_ / name;
        std::error_code ec;
        fs::create_directories(dir_, ec);
        std::ofstream o(p, std::ios::binary | std::ios::trunc);
        if (!o) fail(ErrorKind::Io, "cannot write '" + p.string() + "'");
        o.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!o) fail(ErrorKind::Io, "failed writing '" + p.string() + "'");
        log_ << "wrote " << p.string() << "\n";
    }

    void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }

private:
    fs::path dir_;
    std::ostream& log_;
};

std::string resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal().string();
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) fail(ErrorKind::Config, "'" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(ErrorKind::Config, "unknown key '" + key + "' in '" + where + "'");
        }
    }
}

template <class T>
void take(const json& obj, const char* key, T& dst) {
    if (obj.contains(key)) dst = obj.at(key).get<T>();
}

LinearLine parse_line(const json& j, const std::string& where) {
    check_keys(j, {"intercept", "slopes"}, where);
    LinearLine line;
    take(j, "intercept", line.intercept);
    if (j.contains("slopes")) line.slopes = j.at("slopes").get<std::map<std::string, double>>();
    return line;
}

sweep::Axis parse_axis_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 4) fail(ErrorKind::Config, "axis '" + text + "' must be name:lo:hi:step");
    sweep::Axis a;
    a.indicator = parts[0];
    const auto lo = csv::parse_double(parts[1]);
    const auto hi = csv::parse_double(parts[2]);
    const auto step = csv::parse_double(parts[3]);
    if (!lo || !hi || !step) fail(ErrorKind::Config, "axis '" + text + "' has a non-numeric bound");
    a.lo = *lo;
    a.hi = *hi;
    a.step = *step;
    return a;
}

struct Corpus {
    std::vector<ingest::CleanResult> matches;
    std::vector<ingest::RowIssue> parse_rejected;
    std::vector<std::string> sources;
};

Corpus load_corpus(const RunConfig& cfg) {
    if (cfg.inputs.empty()) fail(ErrorKind::Config, "no input file given");
    std::map<std::string, ingest::RawTimeline> raw;
    Corpus c;
    for (const auto& path : cfg.inputs) {
        auto parsed = ingest::parse_match_csv(read_file(path), cfg.columns);
        c.sources.push_back(fs::path(path).filename().string());
        for (auto& m : parsed.matches) {
            const std::string id = m.match_id;
            if (!raw.emplace(id, std::move(m)).second) {
                fail(ErrorKind::Schema, "match '" + id + "' appears in more than one input");
            }
        }
        c.parse_rejected.insert(c.parse_rejected.end(), parsed.rejected.begin(), parsed.rejected.end());
    }
    for (const auto& [id, m] : raw) c.matches.push_back(ingest::clean(m));
    return c;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::optional<std::size_t> find_match(const Corpus& c, const std::string& id) {
    for (std::size_t i = 0; i < c.matches.size(); ++i) {
        if (c.matches[i].timeline.match_id == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> default_holdout(const Corpus& c) {
    for (std::size_t i = 0; i < c.matches.size(); ++i) {
        if (ends_with(c.matches[i].timeline.match_id, "1701")) return i;
    }
    return std::nullopt;
}

std::size_t select_match(const Corpus& c, const RunConfig& cfg) {
    for (const auto* id : {&cfg.match, &cfg.holdout}) {
        if (*id) {
            auto i = find_match(c, **id);
            if (!i) fail(ErrorKind::Config, "match '" + **id + "' not found in the input");
            return *i;
        }
    }
    return default_holdout(c).value_or(0);
}

// Everything the single-match analyses share.
struct MatchView {
    const ingest::MatchTimeline* timeline = nullptr;
    ingest::FeatureTable features;
    momentum::MomentumSeries series;
    std::vector<int> victors;
    std::vector<int> servers;
    std::vector<double> win_rate;

    std::vector<double> column(const std::string& name) const {
        if (name == "momentum") return series.p1.momentum;
        if (name == "win_rate") return win_rate;
        std::string feature = name == "streak" ? "streak_len_p1" : name;
        const auto idx = ingest::FeatureTable::index_of(feature);
        if (!idx) fail(ErrorKind::Config, "unknown indicator '" + name + "'");
        std::vector<double> out;
        out.reserve(features.rows.size());
        for (const auto& r : features.rows) out.push_back(ingest::FeatureTable::as_vector(r)[*idx]);
        return out;
    }
};

MatchView view_of(const ingest::MatchTimeline& t, const momentum::MomentumParams& params) {
    MatchView v;
    v.timeline = &t;
    v.features = ingest::derive_features(t);
    v.series = momentum::momentum_series(t, params);
    v.victors = momentum::victors_of(t);
    for (const auto& r : t.records) v.servers.push_back(r.server);
    v.win_rate = trend::cumulative_win_rate(v.victors);
    return v;
}

json header(const std::string& command) {
    return json{{"schema_version", kSchemaVersion}, {"command", command}};
}

json repairs_json(const ingest::ColumnRepairs& r) {
    return json{{"ad_replacements", r.ad_replacements}, {"mean_imputed", r.mean_imputed},
                {"mode_imputed", r.mode_imputed},       {"carried_forward", r.carried_forward},
                {"recomputed", r.recomputed},           {"inferred", r.inferred},
                {"invalid_tokens", r.invalid_tokens},   {"unknown_categories", r.unknown_categories},
                {"total", r.total()}};
}

json issues_json(const std::vector<ingest::RowIssue>& issues) {
    json out = json::array();
    for (const auto& i : issues) out.push_back({{"line", i.line}, {"match_id", i.match_id}, {"reason", i.reason}});
    return out;
}

json cmd_clean(const Corpus& c, const Output& out) {
    std::vector<ingest::MatchTimeline> timelines;
    json matches = json::array();
    ingest::ColumnRepairs grand;
    for (const auto& m : c.matches) {
        timelines.push_back(m.timeline);
        json cols = json::object();
        for (const auto& [name, rep] : m.report.columns) cols[name] = repairs_json(rep);
        matches.push_back({{"match_id", m.report.match_id},
                           {"rows_in", m.report.rows_in},
                           {"rows_out", m.report.rows_out},
                           {"absent_columns", m.report.absent_columns},
                           {"rejected", issues_json(m.report.rejected)},
                           {"columns", cols},
                           {"totals", repairs_json(m.report.totals())}});
        grand += m.report.totals();
    }
    out.write("cleaned.csv", ingest::write_cleaned_csv(timelines));
    json doc = header("clean");
    doc["sources"] = c.sources;
    doc["matches"] = matches;
    doc["parse_rejected"] = issues_json(c.parse_rejected);
    doc["totals"] = repairs_json(grand);
    out.write_json("cleaning_report.json", doc);
    return doc;
}

const std::vector<std::string>& class_names() {
    static const std::vector<std::string> names{"zero", "lose", "win", "one"};
    return names;
}

json cmd_train_eval(const Corpus& c, const RunConfig& cfg, const Output& out) {
    const std::size_t n_matches = c.matches.size();
    std::optional<std::size_t> hold;
    if (cfg.holdout) {
        hold = find_match(c, *cfg.holdout);
        if (!hold) fail(ErrorKind::Config, "holdout match '" + *cfg.holdout + "' not found in the input");
        if (n_matches < 2) fail(ErrorKind::Config, "holdout leaves no training matches");
    } else if (n_matches > 1) {
        hold = default_holdout(c);
    }

    std::vector<ingest::MatchTimeline> train_tl;
    for (std::size_t m = 0; m < n_matches; ++m) {
        if (!hold || m != *hold) train_tl.push_back(c.matches[m].timeline);
    }
    const auto stats = labels::estimate_serve_win_posterior(train_tl, cfg.label_unit, cfg.laplace);
    const auto levels = labels::LabelLevels::from(stats);

    struct Row {
        std::size_t match;
        std::size_t point;
    };
    std::vector<Row> rows;
    std::vector<std::vector<double>> features;
    std::vector<int> y;
    for (std::size_t m = 0; m < n_matches; ++m) {
        const auto& t = c.matches[m].timeline;
        const auto table = ingest::derive_features(t);
        for (std::size_t i = 0; i < t.records.size(); ++i) {
            rows.push_back({m, i});
            features.push_back(ingest::FeatureTable::as_vector(table.rows[i]));
            y.push_back(static_cast<int>(labels::level_for(t.records[i].point_victor, t.records[i].server)));
        }
    }
    if (rows.empty()) fail(ErrorKind::InsufficientData, "no points to train on");

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    if (hold) {
        for (std::size_t r = 0; r < rows.size(); ++r) (rows[r].match == *hold ? test_idx : train_idx).push_back(r);
    } else {
        auto split = softmax::stratified_split(y, cfg.train.train_fraction, cfg.seed);
        train_idx = std::move(split.train);
        test_idx = std::move(split.test);
    }
    if (test_idx.empty()) fail(ErrorKind::InsufficientData, "evaluation set is empty");

    const auto p = static_cast<Eigen::Index>(ingest::FeatureTable::names().size());
    auto gather = [&](const std::vector<std::size_t>& idx, Eigen::MatrixXd& x, std::vector<int>& labels_out) {
        x.resize(static_cast<Eigen::Index>(idx.size()), p);
        labels_out.clear();
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (Eigen::Index j = 0; j < p; ++j) x(static_cast<Eigen::Index>(r), j) = features[idx[r]][static_cast<std::size_t>(j)];
            labels_out.push_back(y[idx[r]]);
        }
    };
    Eigen::MatrixXd x_train, x_test;
    std::vector<int> y_train, y_test;
    gather(train_idx, x_train, y_train);
    gather(test_idx, x_test, y_test);

    softmax::TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    auto model = softmax::train(x_train, y_train, 4, tc);
    model.class_names = class_names();
    model.class_values.clear();
    for (int k = 0; k < 4; ++k) model.class_values.push_back(levels.label(static_cast<labels::Level>(k)).value);
    model.feature_names = ingest::FeatureTable::names();

    std::vector<int> pred;
    std::vector<std::vector<double>> proba;
    std::string probs = "match_id,point_no";
    for (const auto& name : class_names()) probs += ",prob_" + name;
    probs += ",forecast_value,forecast_winner,actual_value\n";
    for (std::size_t r = 0; r < test_idx.size(); ++r) {
        const std::vector<double> row(features[test_idx[r]]);
        proba.push_back(softmax::predict_proba(model, row));
        pred.push_back(softmax::argmax_class(proba.back()));
        const auto& rec = c.matches[rows[test_idx[r]].match].timeline.records[rows[test_idx[r]].point];
        probs += csv::escape(rec.match_id) + "," + std::to_string(rec.point_no);
        for (double v : proba.back()) probs += "," + csv::format_double(v);
        const int k = pred.back();
        probs += "," + csv::format_double(model.class_values[static_cast<std::size_t>(k)]) + "," +
                  (k >= static_cast<int>(labels::Level::Win) ? "player1" : "player2") + "," +
                  csv::format_double(model.class_values[static_cast<std::size_t>(y_test[r])]) + "\n";
    }

    const auto counts = metrics::confusion(y_test, pred, 4);
    const auto summary = metrics::summary_metrics(counts);
    json roc = json::array();
    std::vector<svg::Line> roc_lines;
    for (int k = 0; k < 4; ++k) {
        std::vector<double> score;
        for (const auto& pr : proba) score.push_back(pr[static_cast<std::size_t>(k)]);
        const auto& name = class_names()[static_cast<std::size_t>(k)];
        try {
            const auto curve = metrics::roc_auc(y_test, score, k);
            out.write("roc_" + name + ".csv", metrics::roc_csv(curve));
            roc.push_back({{"class", name}, {"auc", curve.auc}});
            svg::Line line{name, {}, {}};
            for (const auto& pt : curve.points) {
                line.x.push_back(pt.fpr);
                line.y.push_back(pt.tpr);
            }
            roc_lines.push_back(std::move(line));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedRoc) throw;
            roc.push_back({{"class", name}, {"auc", nullptr}});
        }
    }

    out.write_json("model.json", json(model));
    out.write("holdout_probabilities.csv", probs);
    if (cfg.plots && !roc_lines.empty()) {
        out.write("roc.svg", svg::line_chart(roc_lines, {"ROC by class", "false positive rate", "true positive rate"}));
    }

    json doc = header("train-eval");
    doc["split"] = {{"mode", hold ? "holdout" : "stratified"},
                    {"holdout", hold ? json(c.matches[*hold].timeline.match_id) : json(nullptr)},
                    {"train_rows", train_idx.size()},
                    {"test_rows", test_idx.size()},
                    {"seed", cfg.seed}};
    doc["posterior"] = stats;
    doc["classes"] = {{"names", model.class_names}, {"values", model.class_values}};
    doc["training"] = {{"iterations", model.info.iterations},
                       {"final_loss", model.info.final_loss},
                       {"gradient_norm", model.info.gradient_norm},
                       {"stop_reason", model.info.stop_reason}};
    doc["metrics"] = metrics::metrics_report(counts, summary, model.class_names);
    doc["roc"] = roc;
    out.write_json("metrics.json", doc);
    return doc;
}

std::vector<std::pair<std::size_t, int>> unit_ends(const ingest::MatchTimeline& t, bool sets) {
    std::vector<std::pair<std::size_t, int>> out;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        const auto& r = t.records[i];
        const bool last = i + 1 == t.records.size();
        const bool boundary = last || t.records[i + 1].set_no != r.set_no ||
                              (!sets && t.records[i + 1].game_no != r.game_no);
        if (boundary) out.emplace_back(i, r.point_victor);
    }
    return out;
}

json cmd_momentum(const MatchView& v, const RunConfig& cfg, const Output& out) {
    const auto& t = *v.timeline;
    const auto tp1 = momentum::turning_points(v.series.p1.momentum);
    const auto tp2 = momentum::turning_points(v.series.p2.momentum);
    const auto games = unit_ends(t, false);
    const auto sets = unit_ends(t, true);

    const std::size_t n = t.records.size();
    std::vector<std::string> turn1(n), turn2(n);
    for (const auto& tp : tp1) turn1[tp.index] = tp.peak ? "peak" : "trough";
    for (const auto& tp : tp2) turn2[tp.index] = tp.peak ? "peak" : "trough";
    std::vector<int> game_victor(n, 0), set_victor(n, 0);
    for (const auto& [i, w] : games) game_victor[i] = w;
    for (const auto& [i, w] : sets) set_victor[i] = w;

    std::istringstream base(momentum::series_csv(v.series));
    std::string csv_out;
    std::string line;
    std::getline(base, line);
    csv_out += line + ",p1_turn,p2_turn,game_victor,set_victor\n";
    for (std::size_t i = 0; std::getline(base, line) && i < n; ++i) {
        csv_out += line + "," + turn1[i] + "," + turn2[i] + "," + std::to_string(game_victor[i]) + "," +
                   std::to_string(set_victor[i]) + "\n";
    }
    out.write("momentum.csv", csv_out);

    auto turns_json = [&](const std::vector<momentum::TurningPoint>& tps) {
        json a = json::array();
        for (const auto& tp : tps) {
            a.push_back({{"point_no", t.records[tp.index].point_no},
                         {"kind", tp.peak ? "peak" : "trough"},
                         {"value", tp.value}});
        }
        return a;
    };
    auto ends_json = [&](const std::vector<std::pair<std::size_t, int>>& ends) {
        json a = json::array();
        for (const auto& [i, w] : ends) {
            a.push_back({{"set_no", t.records[i].set_no},
                         {"game_no", t.records[i].game_no},
                         {"point_no", t.records[i].point_no},
                         {"victor", w}});
        }
        return a;
    };

    json doc = header("momentum");
    doc["match_id"] = t.match_id;
    doc["players"] = {t.player1, t.player2};
    doc["params"] = cfg.momentum;
    doc["series"] = v.series;
    doc["turning_points"] = {{"p1", turns_json(tp1)}, {"p2", turns_json(tp2)}};
    doc["game_victors"] = ends_json(games);
    doc["set_victors"] = ends_json(sets);
    out.write_json("momentum.json", doc);

    if (cfg.plots) {
        std::vector<double> x(v.series.point_no.begin(), v.series.point_no.end());
        out.write("momentum.svg", svg::line_chart({{t.player1.empty() ? "player 1" : t.player1, x, v.series.p1.momentum},
                                                   {t.player2.empty() ? "player 2" : t.player2, x, v.series.p2.momentum}},
                                                  {"Momentum " + t.match_id, "point", "momentum"}));
    }
    return doc;
}

json cmd_ahp(const MatchView& v, const RunConfig& cfg, const Output& out) {
    const bool defaults = cfg.ahp_indicators.empty();
    const auto& indicators = defaults ? default_ahp_indicators() : cfg.ahp_indicators;
    const auto& cost = defaults && cfg.ahp_cost_indicators.empty() ? default_ahp_cost_indicators()
                                                                   : cfg.ahp_cost_indicators;
    const int n = static_cast<int>(indicators.size());

    std::optional<ahp::JudgmentMatrix> matrix;
    if (cfg.ahp_matrix_csv) {
        matrix = ahp::judgment_matrix_from_csv(read_file(*cfg.ahp_matrix_csv));
    } else if (!cfg.ahp_judgments.empty()) {
        matrix = ahp::build_judgment_matrix(n, cfg.ahp_judgments);
    } else if (defaults) {
        matrix = ahp::build_judgment_matrix(n, default_ahp_judgments());
    } else {
        fail(ErrorKind::Config, "custom AHP indicators need a judgment matrix");
    }
    if (matrix->order() != n) fail(ErrorKind::Config, "judgment matrix order differs from the indicator count");

    const auto w = ahp::weights(*matrix, cfg.ahp_method);
    const auto result = ahp::consistency(*matrix, w, std::nullopt);

    const std::size_t rows = v.timeline->records.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), n);
    std::vector<bool> cost_flags;
    for (int j = 0; j < n; ++j) {
        const auto col = v.column(indicators[static_cast<std::size_t>(j)]);
        for (std::size_t i = 0; i < rows; ++i) x(static_cast<Eigen::Index>(i), j) = col[i];
        cost_flags.push_back(std::find(cost.begin(), cost.end(), indicators[static_cast<std::size_t>(j)]) != cost.end());
    }
    for (const auto& name : cost) {
        if (std::find(indicators.begin(), indicators.end(), name) == indicators.end()) {
            fail(ErrorKind::Config, "cost indicator '" + name + "' is not among the indicators");
        }
    }
    std::unique_ptr<bool[]> flags(new bool[cost_flags.size()]);
    std::copy(cost_flags.begin(), cost_flags.end(), flags.get());
    const auto normalized = ahp::min_max_normalize(x, std::span<const bool>(flags.get(), cost_flags.size()));
    const auto scores = ahp::score_rounds(normalized, result.weights);
    out.write("ahp_rounds.csv", ahp::rounds_csv(scores));

    json mat = json::array();
    for (int i = 0; i < n; ++i) {
        json r = json::array();
        for (int j = 0; j < n; ++j) r.push_back((*matrix)(i, j));
        mat.push_back(r);
    }
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores.rank[a] < scores.rank[b]; });
    json top = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(10, rows); ++i) {
        top.push_back({{"point_no", v.timeline->records[order[i]].point_no},
                       {"score", scores.score[order[i]]},
                       {"rank", scores.rank[order[i]]}});
    }

    json doc = header("analyze ahp");
    doc["match_id"] = v.timeline->match_id;
    doc["indicators"] = indicators;
    doc["cost_indicators"] = cost;
    doc["method"] = cfg.ahp_method == ahp::WeightMethod::RowSum ? "row_sum" : "geometric_mean";
    doc["matrix"] = mat;
    doc["result"] = result;
    doc["weights_row_sum"] = ahp::weights(*matrix, ahp::WeightMethod::RowSum);
    doc["weights_geometric_mean"] = ahp::weights(*matrix, ahp::WeightMethod::GeometricMean);
    doc["top_rounds"] = top;
    out.write_json("ahp.json", doc);
    return doc;
}

json cmd_trend(const MatchView& v, const RunConfig& cfg, const Output& out) {
    const auto& mom = v.series.p1.momentum;
    const auto xs = v.column(cfg.trend_x);
    const auto ys = v.column(cfg.trend_y);
    std::vector<trend::SurfaceSample> samples;
    for (std::size_t i = 0; i < xs.size(); ++i) samples.push_back({xs[i], ys[i], v.win_rate[i]});
    const auto fit = trend::fit_poly22(samples);
    out.write("trend_surface.csv", trend::surface_grid_csv(fit, samples));

    json doc = header("analyze trend");
    doc["match_id"] = v.timeline->match_id;
    doc["pairing"] = {"p1_momentum", "cumulative_win_rate"};
    doc["cosine_similarity"] = trend::cosine_similarity(mom, v.win_rate);
    doc["euclidean_distance"] = trend::euclidean_distance(mom, v.win_rate);
    json surface = fit;
    surface["x"] = cfg.trend_x;
    surface["y"] = cfg.trend_y;
    surface["z"] = "cumulative_win_rate";
    doc["surface"] = surface;
    out.write_json("trend.json", doc);
    return doc;
}

json cmd_random(const MatchView& v, const RunConfig& cfg, const Output& out) {
    auto opts = cfg.random;
    opts.seed = cfg.seed;
    const auto rep = trend::randomness_test(v.victors, v.servers, cfg.momentum, opts);
    json doc = header("analyze random");
    doc["match_id"] = v.timeline->match_id;
    doc["report"] = rep;
    out.write_json("randomness.json", doc);
    return doc;
}

std::unique_ptr<sweep::ResponseModel> linear_response(const LinearLine& first, const LinearLine& second) {
    const auto& names = ingest::FeatureTable::names();
    auto coefs = [&](const LinearLine& line) {
        std::vector<double> c(names.size(), 0.0);
        for (const auto& [name, slope] : line.slopes) {
            const auto idx = ingest::FeatureTable::index_of(name);
            if (!idx) fail(ErrorKind::Config, "unknown feature '" + name + "' in linear response");
            c[*idx] = slope;
        }
        return c;
    };
    const auto serve = *ingest::FeatureTable::index_of("serve_indicator");
    return std::make_unique<sweep::FunctionResponse>(
        names, [=, a = coefs(first), b = coefs(second)](std::span<const double> x) {
            const bool first_ctx = x[serve] >= 0.5;
            const auto& c = first_ctx ? a : b;
            double v = first_ctx ? first.intercept : second.intercept;
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (j != serve) v += c[j] * x[j];
            }
            return v;
        });
}

json cmd_sweep(const Corpus& c, const MatchView& v, const RunConfig& cfg, const Output& out) {
    std::unique_ptr<sweep::ResponseModel> model;
    std::string response_kind;
    if (cfg.sweep_linear) {
        model = linear_response(cfg.sweep_linear->first, cfg.sweep_linear->second);
        response_kind = "linear";
    } else {
        std::vector<ingest::FeatureTable> tables;
        std::vector<std::vector<double>> targets;
        for (const auto& m : c.matches) {
            tables.push_back(ingest::derive_features(m.timeline));
            targets.push_back(momentum::momentum_series(m.timeline, cfg.momentum).p1.momentum);
        }
        softmax::TrainConfig tc = cfg.train;
        tc.seed = cfg.seed;
        model = std::make_unique<sweep::MomentumResponseModel>(sweep::MomentumResponseModel::fit(tables, targets, tc));
        response_kind = "momentum_model";
    }

    sweep::SweepSpec spec;
    spec.axes = cfg.sweep_axes;
    spec.tolerance = cfg.sweep_tolerance;
    const auto& names = ingest::FeatureTable::names();
    spec.baseline.assign(names.size(), 0.0);
    for (const auto& r : v.features.rows) {
        const auto row = ingest::FeatureTable::as_vector(r);
        for (std::size_t j = 0; j < row.size(); ++j) spec.baseline[j] += row[j];
    }
    for (double& b : spec.baseline) b /= static_cast<double>(std::max<std::size_t>(v.features.rows.size(), 1));

    json doc = header("analyze sweep");
    doc["match_id"] = v.timeline->match_id;
    doc["response"] = response_kind;
    json base = json::object();
    for (std::size_t j = 0; j < names.size(); ++j) base[names[j]] = spec.baseline[j];
    doc["baseline"] = base;
    doc["tolerance"] = spec.tolerance;

    if (spec.axes.size() == 1) {
        const auto r = sweep::sweep_1d(*model, spec);
        out.write("sweep.csv", sweep::sweep_csv(r));
        doc["result"] = r;
        if (cfg.plots) {
            out.write("sweep.svg", svg::line_chart({{"serve first", r.grid, r.serve_first},
                                                    {"serve second", r.grid, r.serve_second},
                                                    {"mean", r.grid, r.mean}},
                                                   {"Sensitivity of momentum", r.indicator, "momentum"}));
        }
    } else {
        const auto r = sweep::sweep_2d(*model, spec);
        out.write("sweep.csv", sweep::sweep_csv(r));
        doc["result"] = r;
        if (cfg.plots) {
            out.write("sweep.svg", svg::heatmap(r.mean, r.grid_x, r.grid_y,
                                                {"Mean momentum", r.indicator_y, r.indicator_x}));
        }
    }
    out.write_json("sweep.json", doc);
    return doc;
}

json cmd_wavelet(const MatchView& v, const RunConfig& cfg, const Output& out) {
    auto scalogram = wavelet::cwt(v.series.p1.momentum, cfg.wavelet);
    scalogram.times.assign(v.series.point_no.begin(), v.series.point_no.end());
    const auto table = wavelet::scalogram_export(scalogram);
    out.write("scalogram.csv", wavelet::scalogram_csv(table));

    json doc = header("analyze wavelet");
    doc["match_id"] = v.timeline->match_id;
    doc["config"] = cfg.wavelet;
    doc["signal"] = "p1_momentum";
    doc["signal_length"] = v.series.point_no.size();
    doc["scales"] = scalogram.scales;
    doc["summary"] = table;
    out.write_json("wavelet.json", doc);
    if (cfg.plots) {
        out.write("scalogram.svg", svg::heatmap(scalogram.amplitude, scalogram.scales, scalogram.times,
                                                {"Scalogram " + v.timeline->match_id, "point", "scale"}));
    }
    return doc;
}

} // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.sweep_axes = {{"psychological_factor", 0.0, 1.0, 0.01}};
    return cfg;
}

void apply_config(RunConfig& cfg, const json& doc, const fs::path& base) {
    try {
        check_keys(doc,
                   {"input", "inputs", "columns", "output_dir", "seed", "holdout", "match", "plots", "momentum",
                    "train", "labels", "ahp", "trend", "random", "sweep", "wavelet"},
                   "config");
        if (doc.contains("input")) cfg.inputs = {resolve(base, doc.at("input").get<std::string>())};
        if (doc.contains("inputs")) {
            cfg.inputs.clear();
            for (const auto& p : doc.at("inputs")) cfg.inputs.push_back(resolve(base, p.get<std::string>()));
        }
        take(doc, "columns", cfg.columns);
        if (doc.contains("output_dir")) cfg.output_dir = resolve(base, doc.at("output_dir").get<std::string>());
        take(doc, "seed", cfg.seed);
        if (doc.contains("holdout")) cfg.holdout = doc.at("holdout").get<std::string>();
        if (doc.contains("match")) cfg.match = doc.at("match").get<std::string>();
        take(doc, "plots", cfg.plots);

        if (doc.contains("momentum")) {
            const auto& m = doc.at("momentum");
            check_keys(m, {"w1", "w2", "alpha1", "beta1", "k_cap", "streak_min", "causal"}, "momentum");
            take(m, "w1", cfg.momentum.w1);
            take(m, "w2", cfg.momentum.w2);
            take(m, "alpha1", cfg.momentum.alpha1);
            take(m, "beta1", cfg.momentum.beta1);
            take(m, "k_cap", cfg.momentum.k_cap);
            take(m, "streak_min", cfg.momentum.streak_min);
            take(m, "causal", cfg.momentum.causal);
        }
        if (doc.contains("train")) {
            const auto& t = doc.at("train");
            check_keys(t, {"learning_rate", "max_iters", "tol", "l2_penalty", "train_fraction", "max_backtracks"},
                       "train");
            take(t, "learning_rate", cfg.train.learning_rate);
            take(t, "max_iters", cfg.train.max_iters);
            take(t, "tol", cfg.train.tol);
            take(t, "l2_penalty", cfg.train.l2_penalty);
            take(t, "train_fraction", cfg.train.train_fraction);
            take(t, "max_backtracks", cfg.train.max_backtracks);
        }
        if (doc.contains("labels")) {
            const auto& l = doc.at("labels");
            check_keys(l, {"unit", "laplace"}, "labels");
            if (l.contains("unit")) cfg.label_unit = labels::parse_time_unit(l.at("unit").get<std::string>());
            take(l, "laplace", cfg.laplace);
        }
        if (doc.contains("ahp")) {
            const auto& a = doc.at("ahp");
            check_keys(a, {"matrix_csv", "judgments", "method", "indicators", "cost"}, "ahp");
            if (a.contains("matrix_csv")) cfg.ahp_matrix_csv = resolve(base, a.at("matrix_csv").get<std::string>());
            if (a.contains("judgments")) {
                cfg.ahp_judgments.clear();
                for (const auto& jd : a.at("judgments")) {
                    if (!jd.is_array() || jd.size() != 3) fail(ErrorKind::Config, "judgments must be [i, j, value]");
                    cfg.ahp_judgments.push_back({jd[0].get<int>() - 1, jd[1].get<int>() - 1, jd[2].get<double>()});
                }
            }
            if (a.contains("method")) cfg.ahp_method = ahp::parse_weight_method(a.at("method").get<std::string>());
            take(a, "indicators", cfg.ahp_indicators);
            take(a, "cost", cfg.ahp_cost_indicators);
        }
        if (doc.contains("trend")) {
            const auto& t = doc.at("trend");
            check_keys(t, {"x", "y"}, "trend");
            take(t, "x", cfg.trend_x);
            take(t, "y", cfg.trend_y);
        }
        if (doc.contains("random")) {
            const auto& r = doc.at("random");
            check_keys(r, {"statistic", "permutations", "stratify_by_server", "threads"}, "random");
            if (r.contains("statistic")) cfg.random.statistic = trend::parse_statistic(r.at("statistic").get<std::string>());
            take(r, "permutations", cfg.random.n_permutations);
            take(r, "stratify_by_server", cfg.random.stratify_by_server);
            take(r, "threads", cfg.random.threads);
        }
        if (doc.contains("sweep")) {
            const auto& s = doc.at("sweep");
            check_keys(s, {"indicators", "tolerance", "response"}, "sweep");
            if (s.contains("indicators")) {
                cfg.sweep_axes.clear();
                for (const auto& ax : s.at("indicators")) {
                    check_keys(ax, {"name", "lo", "hi", "step"}, "sweep.indicators");
                    sweep::Axis a;
                    a.indicator = ax.at("name").get<std::string>();
                    take(ax, "lo", a.lo);
                    take(ax, "hi", a.hi);
                    take(ax, "step", a.step);
                    cfg.sweep_axes.push_back(a);
                }
            }
            take(s, "tolerance", cfg.sweep_tolerance);
            if (s.contains("response")) {
                const auto& r = s.at("response");
                check_keys(r, {"type", "serve_first", "serve_second"}, "sweep.response");
                const auto type = r.value("type", std::string("momentum_model"));
                if (type == "linear") {
                    if (!r.contains("serve_first") || !r.contains("serve_second")) {
                        fail(ErrorKind::Config, "linear response needs serve_first and serve_second");
                    }
                    cfg.sweep_linear = std::pair{parse_line(r.at("serve_first"), "sweep.response.serve_first"),
                                                 parse_line(r.at("serve_second"), "sweep.response.serve_second")};
                } else if (type == "momentum_model") {
                    cfg.sweep_linear.reset();
                } else {
                    fail(ErrorKind::Config, "unknown sweep response type '" + type + "'");
                }
            }
        }
        if (doc.contains("wavelet")) {
            const auto& w = doc.at("wavelet");
            check_keys(w, {"omega0", "scale_count", "min_period", "max_period", "scales", "boundary"}, "wavelet");
            take(w, "omega0", cfg.wavelet.omega0);
            take(w, "scale_count", cfg.wavelet.scale_count);
            take(w, "min_period", cfg.wavelet.min_period);
            take(w, "max_period", cfg.wavelet.max_period);
            take(w, "scales", cfg.wavelet.scales);
            if (w.contains("boundary")) cfg.wavelet.boundary = wavelet::parse_boundary(w.at("boundary").get<std::string>());
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("invalid config value: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::UnknownName) fail(ErrorKind::Config, e.what());
        throw;
    }
}

const std::vector<std::string>& default_ahp_indicators() {
    static const std::vector<std::string> names{"momentum",
                                                "streak_len_p1",
                                                "score_diff",
                                                "serve_indicator",
                                                "psychological_factor",
                                                "unforced_error_ratio_p1",
                                                "distance_run_diff"};
    return names;
}

const std::vector<std::string>& default_ahp_cost_indicators() {
    static const std::vector<std::string> names{"unforced_error_ratio_p1", "distance_run_diff"};
    return names;
}

std::vector<ahp::Judgment> default_ahp_judgments() {
    // priorities in indicator order; ratios snapped to the nine-level scale
    static constexpr std::array<double, 7> priority{7.0, 5.0, 4.0, 3.0, 3.0, 2.0, 1.0};
    std::vector<ahp::Judgment> out;
    for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
            const double r = priority[static_cast<std::size_t>(i)] / priority[static_cast<std::size_t>(j)];
            const double v = r >= 1.0 ? std::clamp(std::round(r), 1.0, 9.0) : 1.0 / std::clamp(std::round(1.0 / r), 1.0, 9.0);
            out.push_back({i, j, v});
        }
    }
    return out;
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Schema:
    case ErrorKind::EmptyInput: return 2;
    case ErrorKind::Config:
    case ErrorKind::InvalidSpec:
    case ErrorKind::UnknownName: return 3;
    default: return 1;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Tennis match-flow analytics"};
    cli.require_subcommand(1);
    cli.fallthrough();

    std::string config_path, holdout, match, out_dir;
    std::uint64_t seed = 0;
    bool plots = true;
    std::vector<std::string> inputs;
    cli.add_option("--config", config_path, "JSON run configuration");
    auto* seed_opt = cli.add_option("--seed", seed, "seed for every stochastic step");
    auto* holdout_opt = cli.add_option("--holdout", holdout, "match id held out for evaluation");
    auto* match_opt = cli.add_option("--match", match, "match id for single-match analyses");
    auto* out_opt = cli.add_option("--out", out_dir, std::string("output directory (default $") + kOutputDirEnv + ")");
    auto* plots_opt = cli.add_flag("--plots,!--no-plots", plots, "write SVG plots");

    auto add_inputs = [&](CLI::App* sub) { sub->add_option("inputs", inputs, "point-by-point CSV files"); };

    auto* c_clean = cli.add_subcommand("clean", "clean inputs and report repairs");
    auto* c_train = cli.add_subcommand("train-eval", "train the point-outcome classifier and evaluate it");
    auto* c_mom = cli.add_subcommand("momentum", "momentum series with swing annotations");
    auto* c_analyze = cli.add_subcommand("analyze", "run one analysis");
    auto* c_report = cli.add_subcommand("report", "run every step for one match");
    for (auto* sub : {c_clean, c_train, c_mom, c_report}) add_inputs(sub);
    c_analyze->require_subcommand(1);
    c_analyze->fallthrough();

    auto* a_ahp = c_analyze->add_subcommand("ahp", "indicator weights, consistency and round ranking");
    auto* a_trend = c_analyze->add_subcommand("trend", "similarity and surface fit against win rate");
    auto* a_random = c_analyze->add_subcommand("random", "permutation test for randomness of runs");
    auto* a_sweep = c_analyze->add_subcommand("sweep", "grid sensitivity under serve contexts");
    auto* a_wavelet = c_analyze->add_subcommand("wavelet", "Morlet scalogram of momentum");
    for (auto* sub : {a_ahp, a_trend, a_random, a_sweep, a_wavelet}) {
        sub->fallthrough();
        add_inputs(sub);
    }

    std::string matrix_path, method, tx, ty, statistic, boundary;
    int permutations = 0;
    unsigned threads = 0;
    bool stratify = false;
    std::vector<std::string> axes;
    double tolerance = 0.0, omega0 = 0.0;
    int scale_count = 0;
    auto* o_matrix = a_ahp->add_option("--matrix", matrix_path, "judgment matrix CSV");
    auto* o_method = a_ahp->add_option("--method", method, "row_sum or geometric_mean");
    auto* o_tx = a_trend->add_option("--x", tx, "surface x indicator");
    auto* o_ty = a_trend->add_option("--y", ty, "surface y indicator");
    auto* o_perm = a_random->add_option("--permutations", permutations, "number of permutations");
    auto* o_stat = a_random->add_option("--statistic", statistic, "momentum_variance, max_streak or lag1_autocorr");
    auto* o_strat = a_random->add_flag("--stratify", stratify, "shuffle within server strata");
    auto* o_threads = a_random->add_option("--threads", threads, "worker threads");
    auto* o_axis = a_sweep->add_option("--axis", axes, "name:lo:hi:step (once or twice)");
    auto* o_tol = a_sweep->add_option("--tolerance", tolerance, "crossover tolerance");
    auto* o_omega = a_wavelet->add_option("--omega0", omega0, "Morlet centre frequency");
    auto* o_scales = a_wavelet->add_option("--scales", scale_count, "number of scales");
    auto* o_boundary = a_wavelet->add_option("--boundary", boundary, "reflect or zero_pad");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << cli.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        RunConfig cfg = default_config();
        if (!config_path.empty()) {
            std::string text;
            try {
                text = read_file(config_path);
            } catch (const Error& e) {
                fail(ErrorKind::Config, e.what());
            }
            json doc;
            try {
                doc = json::parse(text);
            } catch (const json::exception& e) {
                fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
            }
            apply_config(cfg, doc, fs::path(config_path).parent_path());
        }
        if (!inputs.empty()) cfg.inputs = inputs;
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (holdout_opt->count() > 0) cfg.holdout = holdout;
        if (match_opt->count() > 0) cfg.match = match;
        if (plots_opt->count() > 0) cfg.plots = plots;
        if (out_opt->count() > 0) cfg.output_dir = out_dir;
        if (cfg.output_dir.empty()) {
            const char* env = std::getenv(kOutputDirEnv);
            cfg.output_dir = env && *env ? env : "matchflow_out";
        }
        try {
            if (o_matrix->count() > 0) cfg.ahp_matrix_csv = matrix_path;
            if (o_method->count() > 0) cfg.ahp_method = ahp::parse_weight_method(method);
            if (o_tx->count() > 0) cfg.trend_x = tx;
            if (o_ty->count() > 0) cfg.trend_y = ty;
            if (o_perm->count() > 0) cfg.random.n_permutations = permutations;
            if (o_stat->count() > 0) cfg.random.statistic = trend::parse_statistic(statistic);
            if (o_strat->count() > 0) cfg.random.stratify_by_server = stratify;
            if (o_threads->count() > 0) cfg.random.threads = threads;
            if (o_axis->count() > 0) {
                cfg.sweep_axes.clear();
                for (const auto& a : axes) cfg.sweep_axes.push_back(parse_axis_spec(a));
            }
            if (o_tol->count() > 0) cfg.sweep_tolerance = tolerance;
            if (o_omega->count() > 0) cfg.wavelet.omega0 = omega0;
            if (o_scales->count() > 0) cfg.wavelet.scale_count = scale_count;
            if (o_boundary->count() > 0) cfg.wavelet.boundary = wavelet::parse_boundary(boundary);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::UnknownName) fail(ErrorKind::Config, e.what());
            throw;
        }
        cfg.momentum.validate();
        cfg.train.validate();
        cfg.wavelet.validate();

        const Output output(cfg.output_dir, out);
        const Corpus corpus = load_corpus(cfg);
        if (corpus.matches.empty()) fail(ErrorKind::EmptyInput, "no usable match in the input");

        if (c_clean->parsed()) {
            cmd_clean(corpus, output);
            return 0;
        }
        if (c_train->parsed()) {
            cmd_train_eval(corpus, cfg, output);
            return 0;
        }
        const MatchView view = view_of(corpus.matches[select_match(corpus, cfg)].timeline, cfg.momentum);
        if (c_mom->parsed()) {
            cmd_momentum(view, cfg, output);
        } else if (a_ahp->parsed()) {
            cmd_ahp(view, cfg, output);
        } else if (a_trend->parsed()) {
            cmd_trend(view, cfg, output);
        } else if (a_random->parsed()) {
            cmd_random(view, cfg, output);
        } else if (a_sweep->parsed()) {
            cmd_sweep(corpus, view, cfg, output);
        } else if (a_wavelet->parsed()) {
            cmd_wavelet(view, cfg, output);
        } else if (c_report->parsed()) {
            json doc = header("report");
            doc["match_id"] = view.timeline->match_id;
            doc["seed"] = cfg.seed;
            doc["sources"] = corpus.sources;
            doc["cleaning"] = cmd_clean(corpus, output);
            doc["classification"] = cmd_train_eval(corpus, cfg, output);
            doc["momentum"] = cmd_momentum(view, cfg, output);
            doc["ahp"] = cmd_ahp(view, cfg, output);
            doc["trend"] = cmd_trend(view, cfg, output);
            doc["randomness"] = cmd_random(view, cfg, output);
            doc["sweep"] = cmd_sweep(corpus, view, cfg, output);
            doc["wavelet"] = cmd_wavelet(view, cfg, output);
            output.write_json("report.json", doc);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace matchflow::app
