#include "wfbound/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

namespace wfbound {

PacketSequence::PacketSequence(std::vector<Packet> packets)
    : packets_(std::move(packets)) {
    if (packets_.empty()) throw validation_error("packet sequence must be non-empty");
    if (packets_.front().time != 0.0)
        throw validation_error("first packet time must be 0 (got " +
                               std::to_string(packets_.front().time) + ")");
    double prev = 0.0;
    for (std::size_t i = 0; i < packets_.size(); ++i) {
        const Packet& pk = packets_[i];
        if (pk.time < prev)
            throw validation_error("packet times must be non-decreasing (index " +
                                   std::to_string(i) + ")");
        if (pk.size == 0 || pk.size > kMtuBytes)
            throw validation_error("packet size " + std::to_string(pk.size) +
                                   " outside (0, " + std::to_string(kMtuBytes) + "]");
        prev = pk.time;
    }
}

PacketSequence PacketSequence::normalized(std::vector<Packet> packets) {
    if (packets.empty()) throw validation_error("packet sequence must be non-empty");
    const double t0 = packets.front().time;
    if (t0 != 0.0) {
        for (Packet& pk : packets) pk.time -= t0;
        packets.front().time = 0.0;
    }
    return PacketSequence(std::move(packets));
}

std::set<Label> LabeledDataset::label_set() const {
    std::set<Label> labels;
    for (const auto& e : entries_) labels.insert(e.label);
    return labels;
}

std::map<Label, std::size_t> LabeledDataset::instances_per_label() const {
    std::map<Label, std::size_t> counts;
    for (const auto& e : entries_) ++counts[e.label];
    return counts;
}

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

PacketSequence parse_trace(const std::string& text, std::uint32_t cell_size) {
    if (cell_size == 0 || cell_size > kMtuBytes)
        throw config_error("cell_size must be in (0, 1500]");
    std::vector<Packet> packets;
    long line_no = 0;
    std::istringstream in(text);
    std::string line;
    double prev_time = -1.0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;  // blank line
        const auto sep = line.find_first_of(" \t", start);
        if (sep == std::string::npos)
            throw parse_error("expected `time<TAB>signed_magnitude`", line_no);
        const auto mag_start = line.find_first_not_of(" \t", sep);
        if (mag_start == std::string::npos)
            throw parse_error("missing signed magnitude", line_no);
        auto mag_end = line.find_last_not_of(" \t\r");
        double time = 0.0;
        double magnitude = 0.0;
        if (!parse_double(std::string_view(line).substr(start, sep - start), time))
            throw parse_error("malformed time", line_no);
        if (!parse_double(std::string_view(line).substr(mag_start, mag_end - mag_start + 1),
                          magnitude))
            throw parse_error("malformed signed magnitude", line_no);
        if (magnitude == 0.0) throw parse_error("zero magnitude", line_no);
        if (time < 0.0) throw parse_error("negative time", line_no);
        if (prev_time >= 0.0 && time < prev_time)
            throw validation_error("decreasing time at line " + std::to_string(line_no));
        prev_time = time;

        Packet pk;
        pk.time = time;
        pk.dir = magnitude > 0.0 ? Direction::Outgoing : Direction::Incoming;
        const double mag = std::abs(magnitude);
        pk.size = mag > 1.0 ? static_cast<std::uint32_t>(std::llround(mag)) : cell_size;
        if (pk.size == 0 || pk.size > kMtuBytes)
            throw parse_error("size " + std::to_string(pk.size) + " outside (0, 1500]",
                              line_no);
        packets.push_back(pk);
    }
    if (packets.empty()) throw parse_error("empty trace");
    return PacketSequence::normalized(std::move(packets));
}

std::string serialize_trace(const PacketSequence& p) {
    std::string out;
    out.reserve(p.size() * 16);
    for (const Packet& pk : p) {
        append_double(out, pk.time);
        out.push_back('\t');
        if (pk.dir == Direction::Incoming) out.push_back('-');
        out += std::to_string(pk.size);
        out.push_back('\n');
    }
    return out;
}

LabeledDataset load_dataset(const std::filesystem::path& directory,
                            const std::string& naming_rule, std::uint32_t cell_size) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(directory, ec))
        throw io_error("not a directory: " + directory.string());

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(directory, ec)) {
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    }
    if (ec) throw io_error("cannot list " + directory.string() + ": " + ec.message());
    std::sort(names.begin(), names.end());

    const std::regex rule(naming_rule);
    std::vector<DatasetEntry> entries;
    for (const std::string& name : names) {
        std::smatch match;
        if (!std::regex_match(name, match, rule) || match.size() < 2) continue;
        std::ifstream file(directory / name, std::ios::binary);
        if (!file) throw io_error("cannot read " + (directory / name).string());
        std::ostringstream content;
        content << file.rdbuf();
        if (file.bad()) throw io_error("read failure on " + (directory / name).string());
        try {
            entries.push_back(DatasetEntry{parse_trace(content.str(), cell_size),
                                           Label::monitored(match[1].str()), name});
        } catch (const error& e) {
            throw parse_error(name + ": " + e.what());
        }
    }
    if (entries.empty())
        throw io_error("no trace files matching naming rule in " + directory.string());
    return LabeledDataset(std::move(entries));
}

std::string direction_string(const PacketSequence& p) {
    std::string s;
    s.reserve(p.size());
    for (const Packet& pk : p) s.push_back(pk.dir == Direction::Outgoing ? '0' : '1');
    return s;
}

TraceSummary summarize(const PacketSequence& p) {
    TraceSummary s;
    for (const Packet& pk : p) {
        if (pk.dir == Direction::Incoming) {
            ++s.n_in;
            s.bytes_in += pk.size;
        } else {
            ++s.n_out;
            s.bytes_out += pk.size;
        }
    }
    s.duration = p.duration() - p.packets().front().time;
    return s;
}

}  // namespace wfbound
