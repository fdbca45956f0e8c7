// co2cast command line: ingest, decompose, forecast, benchmark, schedule,
// savings, ratio-stats. Every run writes its outputs plus a manifest.json
// echoing the effective configuration; given the same manifest inputs the
// data outputs are byte-identical.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "co2cast/co2cast.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace co2cast;

namespace {

struct CommonOpts {
    std::string input;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1; // worker cap; the current pipeline runs single-threaded
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_input = true) {
    auto* in = cmd->add_option("--input", opts.input, "input CSV (timestamp,intensity)");
    if (needs_input) in->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "top-level RNG seed")->capture_default_str();
    cmd->add_option("--threads", opts.threads, "worker cap")->capture_default_str();
}

/// Flat key=value config file; keys mirror long option names without the
/// leading dashes. Values feed the parser before the user's argv so explicit
/// flags win.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::config_error, "cannot open config '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string entry = strip(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            raise(errc::config_error, "config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = strip(entry.substr(0, eq));
        const std::string value = strip(entry.substr(eq + 1));
        if (key.empty()) {
            raise(errc::config_error, "config line " + std::to_string(line_no) + ": empty key");
        }
        tokens.push_back("--" + key);
        if (!value.empty()) tokens.push_back(value);
    }
    return tokens;
}

json manifest_base(const std::string& subcommand, const CommonOpts& opts) {
    json m;
    m["subcommand"] = subcommand;
    m["version"] = k_version;
    m["seed"] = opts.seed;
    m["input"] = opts.input;
    m["output_dir"] = opts.out_dir;
    m["threads"] = opts.threads;
    m["parameters"] = json::object();
    return m;
}

void finish_manifest(json& manifest, const fs::path& out_dir,
                     std::chrono::steady_clock::time_point started) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    manifest["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    write_json((out_dir / "manifest.json").string(), manifest);
}

HourlySeries load_input(const CommonOpts& opts) {
    HourlySeries s = load_csv(opts.input);
    if (s.has_missing()) s = fill_gaps(s);
    return s;
}

// ---------------------------------------------------------------------------
// Model construction shared by the forecasting subcommands
// ---------------------------------------------------------------------------

struct ModelOpts {
    std::string model = "method1";
    std::string strategy = "recursive";
    std::string order = "auto"; // "p,d,q" or "auto"
    int lags = 24;
    int hidden = 12;
    int repeats = 20;
    int window = 4;
    int clusters = 3;
    std::string preset;
    std::size_t ensemble_size = 100;
    double noise_amplitude = 0.2;
};

void add_model_options(CLI::App* cmd, ModelOpts& opts, bool with_model_choice = true) {
    if (with_model_choice) {
        cmd->add_option("--model", opts.model, "arima|ffnn|psf|dpsf|method1|method2")
            ->capture_default_str();
    }
    cmd->add_option("--strategy", opts.strategy, "recursive|dirrec")->capture_default_str();
    cmd->add_option("--order", opts.order, "ARIMA order p,d,q or 'auto'")->capture_default_str();
    cmd->add_option("--lags", opts.lags, "FFNN lagged inputs")->capture_default_str();
    cmd->add_option("--hidden", opts.hidden, "FFNN hidden nodes")->capture_default_str();
    cmd->add_option("--repeats", opts.repeats, "FFNN networks averaged")->capture_default_str();
    cmd->add_option("--window", opts.window, "PSF pattern length W")->capture_default_str();
    cmd->add_option("--clusters", opts.clusters, "PSF cluster count K")->capture_default_str();
    cmd->add_option("--preset", opts.preset, "composite preset (france-2019)");
    cmd->add_option("--ensemble-size", opts.ensemble_size, "EEMD ensemble size M")
        ->capture_default_str();
    cmd->add_option("--noise-amplitude", opts.noise_amplitude, "EEMD noise fraction e")
        ->capture_default_str();
}

Strategy parse_strategy(const std::string& name) {
    if (name == "recursive") return Strategy::recursive;
    if (name == "dirrec") return Strategy::dirrec;
    raise(errc::config_error, "unknown strategy '" + name + "'");
}

ArimaSpec parse_order(const std::string& text) {
    ArimaSpec spec;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &spec.p, &spec.d, &spec.q) != 3) {
        raise(errc::config_error, "order must be p,d,q (got '" + text + "')");
    }
    return spec;
}

ModelSpec baseline_spec(const std::string& name, const ModelOpts& opts, std::uint64_t seed) {
    if (name == "arima") {
        if (opts.order == "auto") return AutoArimaSpec{};
        return parse_order(opts.order);
    }
    if (name == "ffnn") {
        FfnnSpec spec;
        spec.lags = opts.lags;
        spec.hidden = opts.hidden;
        spec.repeats = opts.repeats;
        spec.seed = derive_stream(seed, "cli-ffnn", 0);
        return spec;
    }
    if (name == "psf" || name == "dpsf") {
        PsfSpec spec;
        spec.window = opts.window;
        spec.clusters = opts.clusters;
        spec.seed = derive_stream(seed, "cli-psf", 0);
        if (name == "psf") return spec;
        return DpsfSpec{spec};
    }
    raise(errc::config_error, "unknown model '" + name + "'");
}

NamedMethod make_method(const std::string& name, const ModelOpts& opts, std::uint64_t seed) {
    NamedMethod method;
    method.name = name;
    method.strategy = parse_strategy(opts.strategy);
    if (name == "method1" || name == "method2") {
        CompositeSpec spec;
        spec.id = name == "method1" ? MethodId::method1 : MethodId::method2;
        if (!opts.preset.empty()) {
            if (opts.preset != "france-2019") {
                raise(errc::config_error, "unknown preset '" + opts.preset + "'");
            }
            spec.assignment = france_preset(spec.id);
        } else {
            spec.assignment = auto_assignment();
            if (spec.id == MethodId::method1) {
                // seasonal component defaults to the network family
                FfnnSpec seasonal;
                seasonal.lags = opts.lags > 0 ? opts.lags : 28;
                seasonal.hidden = opts.hidden;
                seasonal.repeats = opts.repeats;
                seasonal.seed = derive_stream(seed, "cli-method1-seasonal", 0);
                spec.assignment.models[0] = seasonal;
            }
        }
        if (spec.id == MethodId::method1 && !opts.preset.empty()) {
            // the preset's FFNN still needs a derived seed
            FfnnSpec seasonal = std::get<FfnnSpec>(spec.assignment.models[0]);
            seasonal.repeats = opts.repeats;
            seasonal.seed = derive_stream(seed, "cli-method1-seasonal", 0);
            spec.assignment.models[0] = seasonal;
        }
        spec.eemd_config.ensemble_size = opts.ensemble_size;
        spec.eemd_config.noise_amplitude = opts.noise_amplitude;
        spec.eemd_config.seed = derive_stream(seed, "cli-eemd", 0);
        method.method = spec;
        return method;
    }
    method.method = baseline_spec(name, opts, seed);
    return method;
}

json model_parameters(const std::string& name, const ModelOpts& opts) {
    json p;
    p["model"] = name;
    p["strategy"] = opts.strategy;
    if (name == "arima") p["order"] = opts.order;
    if (name == "ffnn" || name == "method1") {
        p["lags"] = opts.lags;
        p["hidden"] = opts.hidden;
        p["repeats"] = opts.repeats;
    }
    if (name == "psf" || name == "dpsf") {
        p["window"] = opts.window;
        p["clusters"] = opts.clusters;
    }
    if (name == "method1" || name == "method2") {
        p["preset"] = opts.preset;
        p["ensemble_size"] = opts.ensemble_size;
        p["noise_amplitude"] = opts.noise_amplitude;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_ingest(const CommonOpts& common, std::size_t max_gap) {
    const auto started = std::chrono::steady_clock::now();
    HourlySeries s = load_csv(common.input);
    s = fill_gaps(s, max_gap);
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    write_csv(s, (out / "clean.csv").string());
    json manifest = manifest_base("ingest", common);
    manifest["parameters"]["max_gap"] = max_gap;
    manifest["rows"] = s.size();
    finish_manifest(manifest, out, started);
    return 0;
}

int run_decompose(const CommonOpts& common, const std::string& method, std::size_t period,
                  std::size_t ensemble_size, double noise_amplitude) {
    const auto started = std::chrono::steady_clock::now();
    const HourlySeries s = load_input(common);
    const fs::path out(common.out_dir);
    fs::create_directories(out);
    json manifest = manifest_base("decompose", common);
    manifest["parameters"]["method"] = method;

    if (method == "classical") {
        const std::size_t p = period > 0 ? period : detect_period(s);
        const ClassicalDecomposition d = decompose_classical(s, p);
        manifest["parameters"]["period"] = p;
        std::vector<std::vector<std::string>> rows;
        rows.reserve(s.size());
        for (std::size_t t = 0; t < s.size(); ++t) {
            rows.push_back({csv_number(s.values[t]), csv_number(d.seasonal[t]),
                            csv_number(d.trend[t]), csv_number(d.random[t])});
        }
        write_table((out / "decomposition.csv").string(),
                    {"original", "seasonal", "trend", "random"}, rows);
    } else if (method == "eemd") {
        EemdConfig cfg;
        cfg.ensemble_size = ensemble_size;
        cfg.noise_amplitude = noise_amplitude;
        cfg.seed = derive_stream(common.seed, "cli-eemd", 0);
        manifest["parameters"]["ensemble_size"] = cfg.ensemble_size;
        manifest["parameters"]["noise_amplitude"] = cfg.noise_amplitude;
        const ImfSet set = eemd(s, cfg);
        std::vector<std::string> header;
        for (std::size_t k = 0; k < set.imfs.size(); ++k) {
            header.push_back("imf" + std::to_string(k + 1));
        }
        header.push_back("residual");
        std::vector<std::vector<std::string>> rows;
        rows.reserve(s.size());
        for (std::size_t t = 0; t < s.size(); ++t) {
            std::vector<std::string> row;
            for (const auto& imf : set.imfs) row.push_back(csv_number(imf[t]));
            row.push_back(csv_number(set.residual[t]));
            rows.push_back(std::move(row));
        }
        write_table((out / "imfs.csv").string(), header, rows);

        std::vector<std::vector<std::string>> split_rows;
        if (set.imfs.empty()) {
            for (std::size_t t = 0; t < s.size(); ++t) {
                split_rows.push_back({csv_number(0.0), csv_number(0.0), csv_number(set.residual[t])});
            }
            manifest["split_index"] = 0;
        } else {
            const FineToCoarseSplit split = fine_to_coarse(set);
            for (std::size_t t = 0; t < s.size(); ++t) {
                split_rows.push_back({csv_number(split.high_freq[t]), csv_number(split.low_freq[t]),
                                      csv_number(split.trend[t])});
            }
            manifest["split_index"] = split.split_index;
        }
        write_table((out / "split.csv").string(), {"high", "low", "trend"}, split_rows);
    } else {
        raise(errc::config_error, "unknown decomposition method '" + method + "'");
    }
    finish_manifest(manifest, out, started);
    return 0;
}

int run_forecast(const CommonOpts& common, const ModelOpts& model_opts, std::size_t horizon) {
    const auto started = std::chrono::steady_clock::now();
    const HourlySeries s = load_input(common);
    const NamedMethod method = make_method(model_opts.model, model_opts, common.seed);
    if (std::holds_alternative<PerfectForesightSpec>(method.method)) {
        raise(errc::config_error, "perfect foresight is only available inside evaluations");
    }
    const Forecast f = run_method(method, s, horizon);

    const fs::path out(common.out_dir);
    fs::create_directories(out);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t h = 0; h < f.values.size(); ++h) {
        rows.push_back({format_hour_timestamp(f.origin + 1 + static_cast<hour_t>(h)),
                        csv_number(f.values[h])});
    }
    write_table((out / "forecast.csv").string(), {"timestamp", "forecast"}, rows);

    json manifest = manifest_base("forecast", common);
    manifest["parameters"] = model_parameters(model_opts.model, model_opts);
    manifest["parameters"]["horizon"] = horizon;
    if (f.convergence_warning) manifest["warnings"] = {"model fit did not converge"};
    finish_manifest(manifest, out, started);
    return 0;
}

int run_benchmark_cmd(const CommonOpts& common, const ModelOpts& model_opts,
                      const std::string& methods_list, std::size_t patches, std::size_t patch_len,
                      std::size_t horizon, bool friedman, const std::string& baseline) {
    const auto started = std::chrono::steady_clock::now();
    const HourlySeries s = load_input(common);

    std::vector<NamedMethod> methods;
    std::stringstream split(methods_list);
    std::string name;
    while (std::getline(split, name, ',')) {
        if (!name.empty()) methods.push_back(make_method(name, model_opts, common.seed));
    }
    if (methods.empty()) raise(errc::config_error, "no methods given");

    const BenchmarkReport report = run_benchmark(s, methods, patches, patch_len, horizon, common.seed);

    const fs::path out(common.out_dir);
    fs::create_directories(out);
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : report.methods) {
        rows.push_back(
            {m.name, csv_number(m.mean.rmse), csv_number(m.mean.mae), csv_cell(m.mean.mape)});
    }
    write_table((out / "benchmark.csv").string(), {"method", "rmse", "mae", "mape"}, rows);

    json jr = to_json(report);
    if (friedman) {
        // treatments = methods, blocks = patches, on per-patch RMSE
        std::vector<std::vector<double>> matrix;
        for (const auto& m : report.methods) {
            std::vector<double> row;
            for (const auto& p : m.per_patch) row.push_back(p ? p->rmse : 0.0);
            matrix.push_back(std::move(row));
        }
        const FriedmanResult fr = friedman_test(matrix);
        jr["friedman"] = {{"statistic", fr.statistic},
                          {"p_value", fr.p_value},
                          {"treatments", fr.k},
                          {"blocks", fr.b}};
    }
    write_json((out / "benchmark.json").string(), jr);

    if (!baseline.empty()) {
        const auto improvements = improvement_table(report, baseline);
        std::vector<std::vector<std::string>> imp_rows;
        for (const auto& row : improvements) {
            imp_rows.push_back({row.method, csv_number(row.rmse_pct), csv_number(row.mae_pct),
                                csv_cell(row.mape_pct)});
        }
        write_table((out / "improvement.csv").string(),
                    {"method", "rmse_pct", "mae_pct", "mape_pct"}, imp_rows);
    }

    json manifest = manifest_base("benchmark", common);
    manifest["parameters"] = model_parameters("benchmark", model_opts);
    manifest["parameters"]["methods"] = methods_list;
    manifest["parameters"]["patches"] = patches;
    manifest["parameters"]["patch_len"] = patch_len;
    manifest["parameters"]["horizon"] = horizon;
    manifest["parameters"]["friedman"] = friedman;
    manifest["parameters"]["baseline"] = baseline;
    finish_manifest(manifest, out, started);
    return 0;
}

int run_schedule(const CommonOpts& common, const ModelOpts& model_opts, const std::string& date,
                 std::size_t duration, std::size_t train_len) {
    const auto started = std::chrono::steady_clock::now();
    const HourlySeries s = load_input(common);
    const hour_t issue = parse_hour_timestamp(date + "T12:00:00Z");
    if (issue < s.start_hour + static_cast<hour_t>(train_len)) {
        raise(errc::insufficient_span, "not enough history before " + date);
    }
    const auto issue_index = static_cast<std::size_t>(issue - s.start_hour);
    if (issue_index > s.size()) {
        raise(errc::insufficient_span, "series ends before " + date);
    }

    // Realized values are optional: scheduling works from the forecast alone.
    const HourlySeries train = slice(s, issue_index - train_len, train_len);
    const NamedMethod method = make_method(model_opts.model, model_opts, common.seed);
    std::optional<std::vector<double>> truth;
    if (issue_index + k_frame_hours <= s.size()) {
        truth.emplace(s.values.begin() + static_cast<std::ptrdiff_t>(issue_index),
                      s.values.begin() + static_cast<std::ptrdiff_t>(issue_index + k_frame_hours));
    }
    const Forecast f = run_method(method, train, k_frame_hours, truth ? &*truth : nullptr);
    const DayAheadFrame frame{issue, f.values};
    ScheduleResult result = schedule_flexible(frame, duration);
    if (truth) {
        const std::vector<double> window(truth->begin() + k_window_begin,
                                         truth->begin() + k_window_begin + k_window_hours);
        result = evaluate_schedule(result, window);
    }

    const fs::path out(common.out_dir);
    fs::create_directories(out);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t h = 0; h < k_window_hours; ++h) {
        const bool chosen = std::find(result.chosen_hours.begin(), result.chosen_hours.end(), h) !=
                            result.chosen_hours.end();
        const std::size_t frame_index = k_window_begin + h;
        std::string realized;
        if (truth) realized = csv_number((*truth)[frame_index]);
        rows.push_back({format_hour_timestamp(issue + static_cast<hour_t>(frame_index)),
                        csv_number(f.values[frame_index]), realized, chosen ? "1" : "0"});
    }
    write_table((out / "schedule.csv").string(), {"timestamp", "forecast", "realized", "chosen"}, rows);

    json js;
    js["issue_time"] = format_hour_timestamp(issue);
    js["duration"] = duration;
    js["chosen_hours"] = result.chosen_hours;
    js["forecast_mean"] = result.forecast_mean;
    if (result.realized_mean) js["realized_mean"] = *result.realized_mean;
    write_json((out / "schedule.json").string(), js);

    json manifest = manifest_base("schedule", common);
    manifest["parameters"] = model_parameters(model_opts.model, model_opts);
    manifest["parameters"]["date"] = date;
    manifest["parameters"]["duration"] = duration;
    manifest["parameters"]["train_len"] = train_len;
    finish_manifest(manifest, out, started);
    return 0;
}

std::vector<std::size_t> parse_durations(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream split(text);
    std::string part;
    while (std::getline(split, part, ',')) {
        const auto dots = part.find("..");
        if (dots != std::string::npos) {
            const std::size_t lo = std::stoul(part.substr(0, dots));
            const std::size_t hi = std::stoul(part.substr(dots + 2));
            for (std::size_t d = lo; d <= hi; ++d) out.push_back(d);
        } else if (!part.empty()) {
            out.push_back(std::stoul(part));
        }
    }
    return out;
}

int run_savings(const CommonOpts& common, const ModelOpts& model_opts, const std::string& durations,
                const std::string& from, const std::string& to, std::size_t train_len,
                const std::string& baseline_kind) {
    const auto started = std::chrono::steady_clock::now();
    HourlySeries s = load_input(common);
    if (!from.empty() || !to.empty()) {
        // Restrict evaluated days while keeping enough history for training.
        const hour_t lo = from.empty() ? s.start_hour
                                       : parse_hour_timestamp(from + "T00:00:00Z") -
                                             static_cast<hour_t>(train_len);
        const hour_t hi = to.empty()
                              ? s.hour_at(s.size() - 1)
                              : parse_hour_timestamp(to + "T12:00:00Z") + static_cast<hour_t>(k_frame_hours);
        const hour_t begin = std::max(lo, s.start_hour);
        const hour_t end = std::min(hi, s.hour_at(s.size() - 1));
        if (begin >= end) raise(errc::insufficient_span, "empty date range");
        s = slice(s, static_cast<std::size_t>(begin - s.start_hour),
                  static_cast<std::size_t>(end - begin) + 1);
    }
    const BaselineKind kind = baseline_kind == "block" ? BaselineKind::contiguous_block
                                                       : BaselineKind::hour_set;
    const NamedMethod method = make_method(model_opts.model, model_opts, common.seed);
    const SavingsReport report =
        annual_savings(s, method, parse_durations(durations), train_len, kind, common.seed);

    const fs::path out(common.out_dir);
    fs::create_directories(out);
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : report.rows) {
        rows.push_back({std::to_string(row.duration), csv_number(row.scheduled_mean),
                        csv_number(row.baseline_mean), csv_number(row.ratio)});
    }
    write_table((out / "savings.csv").string(), {"duration", "scheduled", "baseline", "ratio"}, rows);
    write_json((out / "savings.json").string(), to_json(report));

    json manifest = manifest_base("savings", common);
    manifest["parameters"] = model_parameters(model_opts.model, model_opts);
    manifest["parameters"]["durations"] = durations;
    manifest["parameters"]["from"] = from;
    manifest["parameters"]["to"] = to;
    manifest["parameters"]["train_len"] = train_len;
    manifest["parameters"]["baseline"] = baseline_kind;
    manifest["days"] = report.days;
    finish_manifest(manifest, out, started);
    return 0;
}

int run_ratio_stats(const CommonOpts& common, const ModelOpts& model_opts, std::size_t iterations,
                    std::size_t train_len) {
    const auto started = std::chrono::steady_clock::now();
    const HourlySeries s = load_input(common);
    const NamedMethod method = make_method(model_opts.model, model_opts, common.seed);
    const auto rows = ratio_stats(s, method, iterations, train_len, common.seed);

    const fs::path out(common.out_dir);
    fs::create_directories(out);
    std::vector<std::vector<std::string>> csv_rows;
    for (const auto& row : rows) {
        csv_rows.push_back({std::to_string(row.hour), csv_number(row.mean), csv_number(row.stddev),
                            csv_number(row.q1), csv_number(row.median), csv_number(row.q3)});
    }
    write_table((out / "ratio_stats.csv").string(), {"hour", "mean", "std", "q1", "median", "q3"},
                csv_rows);

    json manifest = manifest_base("ratio-stats", common);
    manifest["parameters"] = model_parameters(model_opts.model, model_opts);
    manifest["parameters"]["iterations"] = iterations;
    manifest["parameters"]["train_len"] = train_len;
    finish_manifest(manifest, out, started);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hourly CO2-intensity forecasting and day-ahead scheduling"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file (CLI flags override)");

    CommonOpts common;
    ModelOpts model_opts;

    // ingest
    std::size_t max_gap = 6;
    auto* ingest = app.add_subcommand("ingest", "load, gap-fill, and rewrite a CSV");
    add_common(ingest, common);
    ingest->add_option("--max-gap", max_gap, "longest missing run to interpolate")
        ->capture_default_str();

    // decompose
    std::string dec_method = "classical";
    std::size_t dec_period = 0;
    auto* decompose = app.add_subcommand("decompose", "emit decomposition components as CSV");
    add_common(decompose, common);
    decompose->add_option("--method", dec_method, "classical|eemd")->capture_default_str();
    decompose->add_option("--period", dec_period, "seasonal period (0 = detect)")
        ->capture_default_str();
    decompose->add_option("--ensemble-size", model_opts.ensemble_size, "EEMD ensemble size M")
        ->capture_default_str();
    decompose->add_option("--noise-amplitude", model_opts.noise_amplitude, "EEMD noise fraction e")
        ->capture_default_str();

    // forecast
    std::size_t horizon = 48;
    auto* forecast = app.add_subcommand("forecast", "forecast past the end of the input series");
    add_common(forecast, common);
    add_model_options(forecast, model_opts);
    forecast->add_option("--horizon", horizon, "steps ahead")->capture_default_str();

    // benchmark
    std::string methods_list = "arima,method1,method2";
    std::size_t patches = 25, patch_len = 1248, bench_horizon = 48;
    bool friedman = false;
    std::string baseline;
    auto* benchmark = app.add_subcommand("benchmark", "Monte-Carlo patch benchmark");
    add_common(benchmark, common);
    add_model_options(benchmark, model_opts, false);
    benchmark->add_option("--methods", methods_list, "comma list of methods")->capture_default_str();
    benchmark->add_option("--patches", patches, "number of Monte-Carlo patches")
        ->capture_default_str();
    benchmark->add_option("--patch-len", patch_len, "patch length (train + horizon)")
        ->capture_default_str();
    benchmark->add_option("--horizon", bench_horizon, "validation horizon")->capture_default_str();
    benchmark->add_flag("--friedman", friedman, "append a Friedman test over methods x patches");
    benchmark->add_option("--baseline", baseline, "emit improvement.csv against this method");

    // schedule
    std::string date;
    std::size_t duration = 4, train_len = 1200;
    auto* schedule = app.add_subcommand("schedule", "day-ahead flexible-consumption schedule");
    add_common(schedule, common);
    add_model_options(schedule, model_opts);
    schedule->add_option("--date", date, "issue day D (YYYY-MM-DD, frame issued at 12:00Z)")
        ->required();
    schedule->add_option("--duration", duration, "flexible consumption hours")
        ->capture_default_str();
    schedule->add_option("--train-len", train_len, "training window hours")->capture_default_str();

    // savings
    std::string durations = "1..24", from_date, to_date, baseline_kind = "set";
    auto* savings = app.add_subcommand("savings", "scheduled vs random-consumption emissions");
    add_common(savings, common);
    add_model_options(savings, model_opts);
    savings->add_option("--durations", durations, "list/range, e.g. 1..24 or 4,8,12")
        ->capture_default_str();
    savings->add_option("--from", from_date, "first issue day (YYYY-MM-DD)");
    savings->add_option("--to", to_date, "last issue day (YYYY-MM-DD)");
    savings->add_option("--train-len", train_len, "training window hours")->capture_default_str();
    savings->add_option("--baseline-kind", baseline_kind, "set|block random baseline")
        ->capture_default_str();

    // ratio-stats
    std::size_t iterations = 50;
    auto* ratio = app.add_subcommand("ratio-stats", "forecast/realized ratio per horizon hour");
    add_common(ratio, common);
    add_model_options(ratio, model_opts);
    ratio->add_option("--iterations", iterations, "Monte-Carlo forecast origins")
        ->capture_default_str();
    ratio->add_option("--train-len", train_len, "training window hours")->capture_default_str();

    for (CLI::App* sub : app.get_subcommands({})) {
        for (CLI::Option* opt : sub->get_options()) {
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }

    try {
        // Two-phase parse: pull --config (and the subcommand) first, then
        // re-parse with the config tokens ahead of the user's so explicit
        // flags take precedence.
        std::vector<std::string> args(argv + 1, argv + argc);
        std::string sub_name;
        std::vector<std::string> config_args;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (sub_name.empty() && !args[i].empty() && args[i][0] != '-') sub_name = args[i];
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty() && !sub_name.empty()) {
            const std::vector<std::string> extra = config_tokens(config_path);
            std::vector<std::string> merged;
            merged.push_back(sub_name);
            merged.insert(merged.end(), extra.begin(), extra.end());
            bool past_sub = false;
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (!past_sub && args[i] == sub_name) {
                    past_sub = true;
                    continue;
                }
                if (args[i] == "--config") {
                    ++i; // skip its value; the tokens are already merged
                    continue;
                }
                if (args[i].rfind("--config=", 0) == 0) continue;
                merged.push_back(args[i]);
            }
            args = std::move(merged);
        }
        std::vector<const char*> cargs;
        cargs.push_back("co2cast");
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());

        if (ingest->parsed()) return run_ingest(common, max_gap);
        if (decompose->parsed()) {
            return run_decompose(common, dec_method, dec_period, model_opts.ensemble_size,
                                 model_opts.noise_amplitude);
        }
        if (forecast->parsed()) return run_forecast(common, model_opts, horizon);
        if (benchmark->parsed()) {
            return run_benchmark_cmd(common, model_opts, methods_list, patches, patch_len,
                                     bench_horizon, friedman, baseline);
        }
        if (schedule->parsed()) return run_schedule(common, model_opts, date, duration, train_len);
        if (savings->parsed()) {
            return run_savings(common, model_opts, durations, from_date, to_date, train_len,
                               baseline_kind);
        }
        if (ratio->parsed()) return run_ratio_stats(common, model_opts, iterations, train_len);
        std::cerr << "UnknownSubcommand\n";
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
