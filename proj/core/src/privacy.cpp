#include "wfbound/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfbound/error.hpp"

namespace wfbound {

double random_guess_error(std::size_t label_count) {
    if (label_count < 2) throw validation_error("random guessing needs L >= 2");
    const double l = static_cast<double>(label_count);
    return (l - 1.0) / l;
}

double advantage(double r, std::size_t label_count) {
    const double guess = random_guess_error(label_count);
    return std::abs(guess - r) / guess;
}

double epsilon_privacy(double r_star, std::size_t label_count) {
    const double guess = random_guess_error(label_count);
    if (r_star < 0.0) throw validation_error("r_star must be non-negative");
    return std::min(r_star, guess) / guess;
}

PrivacyReport make_privacy_report(double r_star, std::size_t label_count,
                                  std::string feature_schema) {
    PrivacyReport report;
    report.label_count = label_count;
    report.r_guess = random_guess_error(label_count);
    report.clamped = r_star > report.r_guess;
    report.r_star_lower = report.clamped ? report.r_guess : r_star;
    report.advantage = advantage(report.r_star_lower, label_count);
    report.epsilon = epsilon_privacy(report.r_star_lower, label_count);
    report.feature_schema = std::move(feature_schema);
    return report;
}

double packet_overhead(const PacketSequence& p, const PacketSequence& p_def) {
    return (static_cast<double>(p_def.size()) / static_cast<double>(p.size()) - 1.0) *
           100.0;
}

std::optional<double> time_overhead(const PacketSequence& p,
                                    const PacketSequence& p_def) {
    const double original = p.duration();
    const double defended = p_def.duration();
    if (original == 0.0) {
        if (defended == 0.0) return 0.0;
        return std::nullopt;  // unbounded
    }
    return (defended / original - 1.0) * 100.0;
}

double median(std::vector<double> values) {
    if (values.empty()) throw validation_error("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

OverheadReport median_overheads(const std::vector<PacketSequence>& originals,
                                const std::vector<PacketSequence>& defendeds) {
    if (originals.size() != defendeds.size())
        throw validation_error("originals/defendeds length mismatch");
    if (originals.empty()) throw validation_error("need at least one trace pair");
    OverheadReport report;
    report.per_trace_packet.reserve(originals.size());
    report.per_trace_time.reserve(originals.size());
    std::vector<double> finite_times;
    for (std::size_t i = 0; i < originals.size(); ++i) {
        report.per_trace_packet.push_back(packet_overhead(originals[i], defendeds[i]));
        const auto t = time_overhead(originals[i], defendeds[i]);
        report.per_trace_time.push_back(t);
        if (t) finite_times.push_back(*t);
    }
    report.packet_overhead_pct = median(report.per_trace_packet);
    report.time_overhead_pct =
        finite_times.empty() ? std::numeric_limits<double>::quiet_NaN()
                             : median(finite_times);
    return report;
}

}  // namespace wfbound
