#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wfbound/trace.hpp"

namespace wfbound {

/// Inter-arrival delay distribution for one padding state: (upper_edge,
/// mass) bins over seconds, edges strictly increasing, plus an optional
/// infinity bin. Sampling the infinity bin means "no timeout".
struct Histogram {
    std::vector<std::pair<double, double>> bins;
    double infinity_mass = 0.0;

    double total_mass() const;
    void validate() const;
};

/// Per-endpoint burst/gap histograms for the adaptive-padding defense.
struct HistogramConfig {
    Histogram client_burst;
    Histogram client_gap;
    Histogram server_burst;
    Histogram server_gap;
    std::uint32_t cell_size = kDefaultCellBytes;

    void validate() const;
};

HistogramConfig load_histogram_config(const std::filesystem::path& path);
void save_histogram_config(const HistogramConfig& config,
                           const std::filesystem::path& path);

/// Fits decile-binned burst/gap histograms from a dataset's empirical
/// same-direction inter-arrival gaps. Gaps at or below the per-direction
/// median feed the burst histogram, the rest the gap histogram.
HistogramConfig fit_histogram_config(const LabeledDataset& dataset,
                                     std::uint32_t cell_size = kDefaultCellBytes);

struct NoDefense {};

struct BufloParams {
    std::uint32_t d = kMtuBytes;  // fixed packet size
    double rho = 0.02;            // seconds between packets
    double tau = 10.0;            // minimum transmission time
};

struct TamarawParams {
    double rho_in = 0.012;
    double rho_out = 0.04;  // must exceed rho_in
    std::size_t pad_multiple = 100;
    std::uint32_t d = kMtuBytes;
};

struct DecoyParams {};

struct CsBufloParams {
    std::uint32_t d = kDefaultCellBytes;
    double rho_min = 0.002;
    double rho_max = 0.1;
};

struct WtfPadParams {
    HistogramConfig histograms;
};

struct DefenseSpec {
    std::variant<NoDefense, BufloParams, TamarawParams, DecoyParams, CsBufloParams,
                 WtfPadParams>
        params;
    std::uint64_t seed = 0;

    std::string name() const;
    bool is_probabilistic() const;
    void validate() const;
};

/// Everything apply() may need beyond the trace itself. Probabilistic
/// defenses draw from a stream derived from (spec.seed, trace_index), so
/// results do not depend on application order.
struct ApplyContext {
    const LabeledDataset* decoy_source = nullptr;
    std::optional<Label> own_label;  // excluded when picking a decoy page
    std::uint64_t trace_index = 0;
};

PacketSequence apply(const DefenseSpec& spec, const PacketSequence& p,
                     const ApplyContext& ctx = {});

/// Constant-rate defense: both directions send size-d packets at times
/// k*rho until at least tau has elapsed and each direction's real payload
/// is covered (one packet covers d real bytes).
PacketSequence buflo(const PacketSequence& p, std::uint32_t d, double rho, double tau);

/// Per-direction constant-rate defense; per-direction packet counts are
/// rounded up to the next multiple of pad_multiple.
PacketSequence tamaraw(const PacketSequence& p, double rho_in, double rho_out,
                       std::size_t pad_multiple, std::uint32_t d);

/// Time-ordered merge of the page's traffic with a background page's; on
/// equal times p's packet comes first.
PacketSequence decoy(const PacketSequence& p, const PacketSequence& q);

/// Rate-adaptive variant: per direction the rate is the clamped mean
/// inter-packet gap, emission stops at the input's last packet time, and
/// the emitted byte count is then padded up to the next power of two
/// (rounded up to whole packets). Deterministic; seed kept for interface
/// parity with the other probabilistic defenses.
PacketSequence cs_buflo(const PacketSequence& p, std::uint32_t d, double rho_min,
                        double rho_max, std::uint64_t seed);

/// Adaptive padding: per endpoint a (idle, burst, gap) machine injects
/// dummy cells when the sampled timeout expires before the next real
/// packet. Real packets are never delayed or dropped, and no dummy is
/// emitted past the input's last packet time.
PacketSequence wtf_pad(const PacketSequence& p, const HistogramConfig& histograms,
                       std::uint64_t seed);

}  // namespace wfbound
