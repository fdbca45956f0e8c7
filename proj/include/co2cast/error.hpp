#pragma once

#include <stdexcept>
#include <string>

namespace co2cast {

/// Error codes for contract violations across the library.
enum class errc {
    // CSV / series ingestion
    malformed_row,
    non_hourly_step,
    empty_file,
    gap_too_long,
    missing_at_boundary,
    out_of_range,
    length_mismatch,
    patch_too_long,
    // decomposition
    no_dominant_period,
    series_too_short,
    too_few_extrema,
    no_imfs,
    // model fitting
    non_convergence,
    degenerate_clustering,
    // evaluation / scheduling
    degenerate_input,
    unknown_baseline,
    zero_baseline,
    bad_duration,
    insufficient_span,
    // CLI / IO
    unknown_subcommand,
    config_error,
    io_error,
};

const char* errc_name(errc code) noexcept;

/// Exception carrying a machine-checkable error code plus a human message.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

inline const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::malformed_row: return "MalformedRow";
        case errc::non_hourly_step: return "NonHourlyStep";
        case errc::empty_file: return "EmptyFile";
        case errc::gap_too_long: return "GapTooLong";
        case errc::missing_at_boundary: return "MissingAtBoundary";
        case errc::out_of_range: return "OutOfRange";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::patch_too_long: return "PatchTooLong";
        case errc::no_dominant_period: return "NoDominantPeriod";
        case errc::series_too_short: return "SeriesTooShort";
        case errc::too_few_extrema: return "TooFewExtrema";
        case errc::no_imfs: return "NoImfs";
        case errc::non_convergence: return "NonConvergence";
        case errc::degenerate_clustering: return "DegenerateClustering";
        case errc::degenerate_input: return "DegenerateInput";
        case errc::unknown_baseline: return "UnknownBaseline";
        case errc::zero_baseline: return "ZeroBaseline";
        case errc::bad_duration: return "BadDuration";
        case errc::insufficient_span: return "InsufficientSpan";
        case errc::unknown_subcommand: return "UnknownSubcommand";
        case errc::config_error: return "ConfigError";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace co2cast
