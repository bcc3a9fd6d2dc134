#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfbound/error.hpp"

namespace wfbound {

inline constexpr std::uint32_t kMtuBytes = 1500;
inline constexpr std::uint32_t kDefaultCellBytes = 512;

enum class Direction : std::uint8_t { Outgoing, Incoming };

struct Packet {
    double time = 0.0;           // seconds from the first packet of the trace
    std::uint32_t size = 0;      // bytes, in (0, kMtuBytes]
    Direction dir = Direction::Outgoing;

    friend bool operator==(const Packet&, const Packet&) = default;
};

/// One page load's traffic: a non-empty, time-ordered packet list with the
/// first packet at t = 0.
class PacketSequence {
public:
    /// Validates all invariants; throws validation_error on violation.
    explicit PacketSequence(std::vector<Packet> packets);

    /// Shifts times so the first packet is at 0, then validates.
    static PacketSequence normalized(std::vector<Packet> packets);

    const std::vector<Packet>& packets() const noexcept { return packets_; }
    std::size_t size() const noexcept { return packets_.size(); }
    const Packet& operator[](std::size_t i) const { return packets_[i]; }
    auto begin() const noexcept { return packets_.begin(); }
    auto end() const noexcept { return packets_.end(); }

    double duration() const noexcept { return packets_.back().time; }

    friend bool operator==(const PacketSequence&, const PacketSequence&) = default;

private:
    std::vector<Packet> packets_;
};

/// Either a monitored page id or the distinguished unmonitored symbol.
/// Monitored labels order lexicographically by page id; the unmonitored
/// symbol orders after every monitored label.
class Label {
public:
    Label() = default;  // the unmonitored symbol
    static Label monitored(std::string page_id) { return Label(std::move(page_id)); }
    static Label unmonitored() { return Label(); }

    bool is_unmonitored() const noexcept { return !page_.has_value(); }
    const std::string& page() const { return page_.value(); }

    /// Human-readable form; the unmonitored symbol renders as "*".
    std::string display() const { return page_.value_or("*"); }

    friend bool operator==(const Label&, const Label&) = default;
    friend std::strong_ordering operator<=>(const Label& a, const Label& b) {
        if (a.page_.has_value() != b.page_.has_value())
            return a.page_.has_value() ? std::strong_ordering::less
                                       : std::strong_ordering::greater;
        if (!a.page_.has_value()) return std::strong_ordering::equal;
        return *a.page_ <=> *b.page_;
    }

private:
    explicit Label(std::string page) : page_(std::move(page)) {}
    std::optional<std::string> page_;
};

struct DatasetEntry {
    PacketSequence sequence;
    Label label;
    std::string name;  // source file name when loaded from disk, else empty
};

class LabeledDataset {
public:
    LabeledDataset() = default;
    explicit LabeledDataset(std::vector<DatasetEntry> entries)
        : entries_(std::move(entries)) {}

    std::vector<DatasetEntry>& entries() noexcept { return entries_; }
    const std::vector<DatasetEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    std::set<Label> label_set() const;
    std::size_t page_count() const { return label_set().size(); }
    std::map<Label, std::size_t> instances_per_label() const;

private:
    std::vector<DatasetEntry> entries_;
};

struct TraceSummary {
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    double duration = 0.0;
};

/// Parses one trace in the tab-separated `time  signed_magnitude` format.
/// Magnitudes with |m| > 1 are byte sizes; |m| <= 1 means one cell of
/// cell_size bytes. Sign gives direction (+ outgoing, - incoming). Times are
/// shifted so the first packet is at 0.
PacketSequence parse_trace(const std::string& text,
                           std::uint32_t cell_size = kDefaultCellBytes);

/// Inverse of parse_trace with explicit byte sizes; the round trip
/// parse_trace(serialize_trace(p)) == p holds for every valid sequence.
std::string serialize_trace(const PacketSequence& p);

/// Loads every file in `directory` whose name matches `naming_rule`, a regex
/// with at least one capture group holding the page id (default
/// "<page>-<instance>"). Entries are ordered lexicographically by file name.
LabeledDataset load_dataset(const std::filesystem::path& directory,
                            const std::string& naming_rule = R"(^(.+)-([^-]+?)(\.[A-Za-z]+)?$)",
                            std::uint32_t cell_size = kDefaultCellBytes);

/// Binary direction string: '0' for outgoing, '1' for incoming.
std::string direction_string(const PacketSequence& p);

TraceSummary summarize(const PacketSequence& p);

}  // namespace wfbound
