#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfbound/trace.hpp"

namespace wfbound {

struct PrivacyReport {
    double r_star_lower = 0.0;
    std::size_t label_count = 0;
    double r_guess = 0.0;   // (L-1)/L
    double advantage = 0.0;
    double epsilon = 0.0;   // r_star_lower / r_guess, 1 = perfectly private
    std::string feature_schema;
    bool clamped = false;   // r_star_lower exceeded r_guess and was clamped
};

struct OverheadReport {
    double packet_overhead_pct = 0.0;  // median over traces
    double time_overhead_pct = 0.0;    // median over traces with finite overhead
    std::vector<double> per_trace_packet;
    std::vector<std::optional<double>> per_trace_time;  // nullopt = unbounded
};

/// Random-guessing error (L-1)/L under uniform labels.
double random_guess_error(std::size_t label_count);

/// Normalized improvement over random guessing, |R^G - r| / R^G.
double advantage(double r, std::size_t label_count);

/// Privacy parameter r_star / R^G; r_star above R^G clamps to 1.
double epsilon_privacy(double r_star, std::size_t label_count);

PrivacyReport make_privacy_report(double r_star, std::size_t label_count,
                                  std::string feature_schema);

/// (|defended| / |original| - 1) * 100.
double packet_overhead(const PacketSequence& p, const PacketSequence& p_def);

/// (duration(defended) / duration(original) - 1) * 100; zero-duration
/// originals yield 0 when the defended duration is also zero, otherwise
/// nullopt (unbounded, excluded from medians).
std::optional<double> time_overhead(const PacketSequence& p,
                                    const PacketSequence& p_def);

/// Median of an even-length list is the mean of the two central values.
double median(std::vector<double> values);

OverheadReport median_overheads(const std::vector<PacketSequence>& originals,
                                const std::vector<PacketSequence>& defendeds);

}  // namespace wfbound
