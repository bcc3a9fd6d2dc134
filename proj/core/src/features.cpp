#include "wfbound/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "wfbound/parallel.hpp"

namespace wfbound {

namespace {

constexpr std::size_t kLlDim = 2 * kMtuBytes;                 // (direction, size) counts
constexpr std::size_t kVngBins = 100;                          // burst-size bins per direction
constexpr std::size_t kVngBinWidth = 512;                      // bytes
constexpr std::size_t kVngDim = 3 + 2 * kVngBins;
constexpr std::size_t kKnnFirstPackets = 20;
constexpr std::size_t kKnnOrderingCap = 300;                   // outgoing packets
constexpr std::size_t kKnnWindowCount = 100;
constexpr std::size_t kKnnWindowSize = 30;                     // packets per window
constexpr std::size_t kKnnDim = 4 + kKnnFirstPackets + 2 * kKnnOrderingCap +
                                kKnnWindowCount + 6;
constexpr std::size_t kCumulPoints = 100;
constexpr std::size_t kCumulDim = 4 + kCumulPoints;
constexpr std::size_t kKfpDim = 20;
constexpr std::size_t kKfpWindowSize = 20;                     // packets per window
constexpr std::size_t kKfpBuckets = 20;
constexpr std::size_t kKfpFirstPackets = 30;

/// Lengths (in packets) of maximal same-direction runs.
std::vector<std::size_t> burst_lengths(const PacketSequence& p) {
    std::vector<std::size_t> lengths;
    std::size_t run = 0;
    Direction dir = Direction::Outgoing;
    for (const Packet& pk : p) {
        if (run > 0 && pk.dir == dir) {
            ++run;
        } else {
            if (run > 0) lengths.push_back(run);
            dir = pk.dir;
            run = 1;
        }
    }
    lengths.push_back(run);
    return lengths;
}

/// Sums `items` into `buckets` equal-length chunks, zero-padding the tail.
std::vector<double> aggregate_into_buckets(const std::vector<double>& items,
                                           std::size_t buckets) {
    std::vector<double> out(buckets, 0.0);
    if (items.empty()) return out;
    const std::size_t chunks = (items.size() + buckets - 1) / buckets;
    for (std::size_t i = 0; i < items.size(); ++i) out[i / chunks] += items[i];
    return out;
}

/// Outgoing-packet counts in successive non-overlapping windows.
std::vector<double> outgoing_window_counts(const PacketSequence& p,
                                           std::size_t window) {
    const std::size_t windows = (p.size() + window - 1) / window;
    std::vector<double> counts(windows, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].dir == Direction::Outgoing) counts[i / window] += 1.0;
    }
    return counts;
}

}  // namespace

const char* schema_name(SchemaKind kind) {
    switch (kind) {
        case SchemaKind::LL: return "ll";
        case SchemaKind::VNGPP: return "vngpp";
        case SchemaKind::KNN: return "knn";
        case SchemaKind::CUMUL: return "cumul";
        case SchemaKind::KFP20: return "kfp20";
        case SchemaKind::FULLINFO: return "fullinfo";
    }
    return "unknown";
}

SchemaKind schema_from_name(std::string_view name) {
    if (name == "ll") return SchemaKind::LL;
    if (name == "vngpp" || name == "vng++") return SchemaKind::VNGPP;
    if (name == "knn" || name == "k-nn") return SchemaKind::KNN;
    if (name == "cumul") return SchemaKind::CUMUL;
    if (name == "kfp20" || name == "k-fp") return SchemaKind::KFP20;
    if (name == "fullinfo") return SchemaKind::FULLINFO;
    throw config_error("unknown feature schema: " + std::string(name));
}

std::size_t FeatureSchema::dimension() const {
    switch (kind) {
        case SchemaKind::LL: return kLlDim;
        case SchemaKind::VNGPP: return kVngDim;
        case SchemaKind::KNN: return kKnnDim;
        case SchemaKind::CUMUL: return kCumulDim;
        case SchemaKind::KFP20: return kKfpDim;
        case SchemaKind::FULLINFO: return 2 * max_len;
    }
    return 0;
}

void FeatureMatrix::add_row(std::span<const double> values, Label label) {
    if (values.size() != dim_)
        throw validation_error("feature vector length " + std::to_string(values.size()) +
                               " does not match schema dimension " + std::to_string(dim_));
    for (double v : values) {
        if (!std::isfinite(v)) throw validation_error("non-finite feature value");
    }
    values_.insert(values_.end(), values.begin(), values.end());
    labels_.push_back(std::move(label));
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
    FeatureMatrix out(schema_, dim_);
    for (std::size_t i : indices) out.add_row(row(i), labels_[i]);
    return out;
}

std::vector<double> extract_ll(const PacketSequence& p) {
    std::vector<double> v(kLlDim, 0.0);
    for (const Packet& pk : p) {
        const std::size_t base = pk.dir == Direction::Outgoing ? 0 : kMtuBytes;
        v[base + pk.size - 1] += 1.0;
    }
    return v;
}

std::vector<double> extract_vngpp(const PacketSequence& p) {
    std::vector<double> v(kVngDim, 0.0);
    const TraceSummary s = summarize(p);
    v[0] = s.duration;
    v[1] = static_cast<double>(s.bytes_out);  // uplink
    v[2] = static_cast<double>(s.bytes_in);   // downlink

    // Burst-size histogram: bytes per maximal same-direction run, binned at
    // kVngBinWidth, overflow in the last bin. Outgoing bins first.
    std::uint64_t run_bytes = 0;
    Direction dir = Direction::Outgoing;
    bool open = false;
    auto flush = [&] {
        const std::size_t bin =
            std::min<std::size_t>(run_bytes / kVngBinWidth, kVngBins - 1);
        const std::size_t base = dir == Direction::Outgoing ? 3 : 3 + kVngBins;
        v[base + bin] += 1.0;
    };
    for (const Packet& pk : p) {
        if (open && pk.dir == dir) {
            run_bytes += pk.size;
        } else {
            if (open) flush();
            dir = pk.dir;
            run_bytes = pk.size;
            open = true;
        }
    }
    flush();
    return v;
}

std::vector<double> extract_knn(const PacketSequence& p) {
    std::vector<double> v(kKnnDim, 0.0);
    const TraceSummary s = summarize(p);
    v[0] = static_cast<double>(p.size());
    v[1] = s.duration;
    v[2] = static_cast<double>(s.n_in);
    v[3] = static_cast<double>(s.n_out);

    std::size_t at = 4;
    for (std::size_t i = 0; i < kKnnFirstPackets && i < p.size(); ++i) {
        const double sz = static_cast<double>(p[i].size);
        v[at + i] = p[i].dir == Direction::Outgoing ? sz : -sz;
    }
    at += kKnnFirstPackets;

    // Packet ordering: for each of the first 300 outgoing packets, the number
    // of packets (and of incoming packets) that precede it.
    std::size_t seen_in = 0;
    std::size_t out_rank = 0;
    for (std::size_t i = 0; i < p.size() && out_rank < kKnnOrderingCap; ++i) {
        if (p[i].dir == Direction::Outgoing) {
            v[at + 2 * out_rank] = static_cast<double>(i);
            v[at + 2 * out_rank + 1] = static_cast<double>(seen_in);
            ++out_rank;
        } else {
            ++seen_in;
        }
    }
    at += 2 * kKnnOrderingCap;

    const std::vector<double> windows = outgoing_window_counts(p, kKnnWindowSize);
    for (std::size_t w = 0; w < kKnnWindowCount && w < windows.size(); ++w)
        v[at + w] = windows[w];
    at += kKnnWindowCount;

    const std::vector<std::size_t> bursts = burst_lengths(p);
    double sum = 0.0, max_len = 0.0, gt5 = 0.0, gt10 = 0.0, gt15 = 0.0;
    for (std::size_t len : bursts) {
        sum += static_cast<double>(len);
        max_len = std::max(max_len, static_cast<double>(len));
        if (len > 5) ++gt5;
        if (len > 10) ++gt10;
        if (len > 15) ++gt15;
    }
    v[at + 0] = static_cast<double>(bursts.size());
    v[at + 1] = sum / static_cast<double>(bursts.size());
    v[at + 2] = max_len;
    v[at + 3] = gt5;
    v[at + 4] = gt10;
    v[at + 5] = gt15;
    return v;
}

std::vector<double> extract_cumul(const PacketSequence& p) {
    std::vector<double> v(kCumulDim, 0.0);
    const TraceSummary s = summarize(p);
    v[0] = static_cast<double>(s.n_in);
    v[1] = static_cast<double>(s.n_out);
    v[2] = static_cast<double>(s.bytes_in);
    v[3] = static_cast<double>(s.bytes_out);

    // Cumulative signed-size curve, sampled at 100 equally spaced
    // packet-index positions over [1, m].
    std::vector<double> curve(p.size());
    double c = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        c += p[i].dir == Direction::Outgoing ? static_cast<double>(p[i].size)
                                             : -static_cast<double>(p[i].size);
        curve[i] = c;
    }
    const std::size_t m = curve.size();
    for (std::size_t k = 0; k < kCumulPoints; ++k) {
        if (m == 1) {
            v[4 + k] = curve[0];
            continue;
        }
        const double pos = static_cast<double>(k) * static_cast<double>(m - 1) /
                           static_cast<double>(kCumulPoints - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, m - 1);
        const double frac = pos - static_cast<double>(lo);
        v[4 + k] = curve[lo] + frac * (curve[hi] - curve[lo]);
    }
    return v;
}

std::vector<double> extract_kfp20(const PacketSequence& p) {
    std::vector<double> v(kKfpDim, 0.0);
    const TraceSummary s = summarize(p);
    const double n_total = static_cast<double>(p.size());

    // Outgoing packet ordering list: 0-based sequence index of each
    // outgoing packet.
    std::vector<double> ordering;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].dir == Direction::Outgoing) ordering.push_back(static_cast<double>(i));
    }
    double ord_mean = 0.0, ord_std = 0.0;
    if (!ordering.empty()) {
        for (double x : ordering) ord_mean += x;
        ord_mean /= static_cast<double>(ordering.size());
        for (double x : ordering) ord_std += (x - ord_mean) * (x - ord_mean);
        ord_std = std::sqrt(ord_std / static_cast<double>(ordering.size()));
    }

    const std::vector<double> concentration = outgoing_window_counts(p, kKfpWindowSize);
    const std::vector<double> alt_conc = aggregate_into_buckets(concentration, kKfpBuckets);

    // Packets per 1-second bin over [0, duration], re-aggregated the same way.
    std::vector<double> pps(static_cast<std::size_t>(p.duration()) + 1, 0.0);
    for (const Packet& pk : p) pps[static_cast<std::size_t>(pk.time)] += 1.0;
    const std::vector<double> alt_pps = aggregate_into_buckets(pps, kKfpBuckets);

    std::size_t in30 = 0, out30 = 0;
    for (std::size_t i = 0; i < p.size() && i < kKfpFirstPackets; ++i) {
        if (p[i].dir == Direction::Incoming) ++in30; else ++out30;
    }

    double alt_conc_sum = 0.0;
    for (double x : alt_conc) alt_conc_sum += x;
    double alt_pps_sum = 0.0;
    for (double x : alt_pps) alt_pps_sum += x;

    v[0] = static_cast<double>(s.n_in);                       // 1
    v[1] = static_cast<double>(s.n_out) / n_total;            // 2
    v[2] = static_cast<double>(s.n_in) / n_total;             // 3
    v[3] = ord_std;                                           // 4
    v[4] = static_cast<double>(s.n_out);                      // 5
    v[5] = alt_conc_sum;                                      // 6
    v[6] = ord_mean;                                          // 7
    v[7] = static_cast<double>(s.n_in + s.n_out) + n_total;   // 8
    v[8] = alt_pps_sum;                                       // 9
    v[9] = n_total;                                           // 10
    for (std::size_t b = 0; b < 8; ++b) v[10 + b] = alt_conc[b];  // 11-18
    v[18] = static_cast<double>(in30);                        // 19
    v[19] = static_cast<double>(out30);                       // 20
    return v;
}

std::vector<double> extract_fullinfo(const PacketSequence& p, std::size_t max_len) {
    if (p.size() > max_len)
        throw validation_error("trace has " + std::to_string(p.size()) +
                               " packets, more than max_len " + std::to_string(max_len));
    std::vector<double> v(2 * max_len, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        v[i] = p[i].time;
        const double sz = static_cast<double>(p[i].size);
        v[max_len + i] = p[i].dir == Direction::Outgoing ? sz : -sz;
    }
    return v;
}

std::vector<double> extract(const PacketSequence& p, const FeatureSchema& schema) {
    switch (schema.kind) {
        case SchemaKind::LL: return extract_ll(p);
        case SchemaKind::VNGPP: return extract_vngpp(p);
        case SchemaKind::KNN: return extract_knn(p);
        case SchemaKind::CUMUL: return extract_cumul(p);
        case SchemaKind::KFP20: return extract_kfp20(p);
        case SchemaKind::FULLINFO: return extract_fullinfo(p, schema.max_len);
    }
    throw config_error("unhandled schema");
}

FeatureMatrix extract_matrix(const LabeledDataset& dataset, FeatureSchema schema) {
    if (dataset.empty()) throw validation_error("cannot extract from an empty dataset");
    if (schema.kind == SchemaKind::FULLINFO && schema.max_len == 0) {
        for (const auto& e : dataset.entries())
            schema.max_len = std::max(schema.max_len, e.sequence.size());
    }
    const std::size_t n = dataset.size();
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        rows[i] = extract(dataset.entries()[i].sequence, schema);
    });
    FeatureMatrix m(schema, schema.dimension());
    for (std::size_t i = 0; i < n; ++i) m.add_row(rows[i], dataset.entries()[i].label);
    return m;
}

void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << "label";
    for (std::size_t j = 0; j < m.dim(); ++j)
        out << ',' << m.schema().name() << '_' << j;
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << m.label(i).display();
        for (double x : m.row(i)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
            out << ',';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
    if (!out) throw io_error("write failure on " + path.string());
}

}  // namespace wfbound
