#include "wfbound/lookup.hpp"

#include <charconv>
#include <cstring>
#include <map>
#include <unordered_map>

#include "wfbound/error.hpp"

namespace wfbound {

const char* observable_name(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::TotalTransmissionSize: return "total-size";
        case ObservableKind::PerDirectionCounts: return "direction-counts";
        case ObservableKind::ExactSequence: return "exact";
    }
    return "unknown";
}

ObservableKind observable_from_name(std::string_view name) {
    if (name == "total-size") return ObservableKind::TotalTransmissionSize;
    if (name == "direction-counts") return ObservableKind::PerDirectionCounts;
    if (name == "exact") return ObservableKind::ExactSequence;
    throw config_error("unknown observable: " + std::string(name));
}

namespace {

void append_bits(std::string& out, double value) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    char buf[20];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), bits, 16);
    out.append(buf, ptr);
}

}  // namespace

std::string observable_key(const PacketSequence& p, ObservableKind kind) {
    const TraceSummary s = summarize(p);
    switch (kind) {
        case ObservableKind::TotalTransmissionSize:
            return "S:" + std::to_string(s.bytes_in + s.bytes_out);
        case ObservableKind::PerDirectionCounts:
            return "C:" + std::to_string(s.n_in) + "," + std::to_string(s.n_out);
        case ObservableKind::ExactSequence: {
            std::string key = "E:";
            key.reserve(2 + p.size() * 24);
            for (const Packet& pk : p) {
                append_bits(key, pk.time);
                key.push_back(pk.dir == Direction::Outgoing ? '+' : '-');
                key += std::to_string(pk.size);
                key.push_back(';');
            }
            return key;
        }
    }
    throw config_error("unhandled observable");
}

double lookup_table_error(const LabeledDataset& dataset, ObservableKind kind) {
    if (dataset.empty()) throw validation_error("empty dataset");
    std::unordered_map<std::string, std::map<Label, std::size_t>> groups;
    for (const auto& entry : dataset.entries())
        ++groups[observable_key(entry.sequence, kind)][entry.label];
    std::size_t covered = 0;
    for (const auto& [key, counts] : groups) {
        std::size_t best = 0;
        for (const auto& [label, count] : counts) best = std::max(best, count);
        covered += best;
    }
    return 1.0 - static_cast<double>(covered) / static_cast<double>(dataset.size());
}

}  // namespace wfbound
