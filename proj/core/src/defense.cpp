#include "wfbound/defense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "wfbound/rng.hpp"

namespace wfbound {

namespace {

constexpr double kScheduleSlack = 1e-9;  // absorbs FP noise in k*rho fenceposts

std::size_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::size_t>((a + b - 1) / b);
}

std::uint64_t next_pow2_at_least(std::uint64_t x) {
    std::uint64_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

void check_packet_size(std::uint32_t d) {
    if (d == 0 || d > kMtuBytes)
        throw config_error("defense packet size must be in (0, 1500]");
}

/// Packets of one direction scheduled at k*rho, k = 0..count-1.
void emit_schedule(std::vector<Packet>& out, std::size_t count, double rho,
                   std::uint32_t d, Direction dir) {
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(Packet{static_cast<double>(k) * rho, d, dir});
}

/// Merges two per-direction schedules into one time-ordered list; outgoing
/// wins ties so the merge is deterministic.
PacketSequence merge_directional(std::vector<Packet> outgoing,
                                 std::vector<Packet> incoming) {
    std::vector<Packet> merged;
    merged.reserve(outgoing.size() + incoming.size());
    std::size_t i = 0, j = 0;
    while (i < outgoing.size() || j < incoming.size()) {
        const bool take_out =
            j >= incoming.size() ||
            (i < outgoing.size() && outgoing[i].time <= incoming[j].time);
        merged.push_back(take_out ? outgoing[i++] : incoming[j++]);
    }
    return PacketSequence(std::move(merged));
}

nlohmann::json histogram_to_json(const Histogram& h) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& [edge, mass] : h.bins) bins.push_back({edge, mass});
    return {{"bins", bins}, {"infinity_mass", h.infinity_mass}};
}

Histogram histogram_from_json(const nlohmann::json& j) {
    Histogram h;
    for (const auto& bin : j.at("bins"))
        h.bins.emplace_back(bin.at(0).get<double>(), bin.at(1).get<double>());
    h.infinity_mass = j.value("infinity_mass", 0.0);
    return h;
}

/// One draw from the histogram; nullopt when the infinity bin is hit.
std::optional<double> sample_delay(const Histogram& h, Rng& rng) {
    const double total = h.total_mass();
    double r = rng.uniform() * total;
    double lower = 0.0;
    for (const auto& [edge, mass] : h.bins) {
        if (r < mass) return lower + (edge - lower) * (mass > 0.0 ? r / mass : 0.0);
        r -= mass;
        lower = edge;
    }
    return std::nullopt;
}

/// Decile-edge histogram over positive gaps. Falls back to a single broad
/// bin when there is not enough data to take quantiles.
Histogram deciles_of(std::vector<double> gaps) {
    Histogram h;
    gaps.erase(std::remove_if(gaps.begin(), gaps.end(),
                              [](double g) { return !(g > 0.0); }),
               gaps.end());
    std::sort(gaps.begin(), gaps.end());
    if (gaps.empty()) {
        h.bins.emplace_back(1.0, 1.0);
        return h;
    }
    double lower = 0.0;
    double pending = 0.0;  // mass of deciles whose edges collapsed together
    for (int q = 1; q <= 10; ++q) {
        const std::size_t idx =
            std::min(gaps.size() - 1, gaps.size() * static_cast<std::size_t>(q) / 10);
        const double edge = gaps[idx];
        pending += 0.1;
        if (edge > lower) {
            h.bins.emplace_back(edge, pending);
            pending = 0.0;
            lower = edge;
        }
    }
    if (h.bins.empty()) {
        h.bins.emplace_back(gaps.back() + 1e-6, 1.0);
    } else if (pending > 0.0) {
        h.bins.back().second += pending;
    }
    return h;
}

}  // namespace

double Histogram::total_mass() const {
    double total = infinity_mass;
    for (const auto& [edge, mass] : bins) total += mass;
    return total;
}

void Histogram::validate() const {
    double lower = 0.0;
    for (const auto& [edge, mass] : bins) {
        if (!(edge > lower)) throw config_error("histogram bin edges must increase");
        if (mass < 0.0) throw config_error("histogram masses must be non-negative");
        lower = edge;
    }
    if (infinity_mass < 0.0) throw config_error("histogram masses must be non-negative");
    if (!(total_mass() > 0.0)) throw config_error("histogram has zero total mass");
}

void HistogramConfig::validate() const {
    client_burst.validate();
    client_gap.validate();
    server_burst.validate();
    server_gap.validate();
    if (cell_size == 0 || cell_size > kMtuBytes)
        throw config_error("cell_size must be in (0, 1500]");
}

HistogramConfig load_histogram_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        HistogramConfig config;
        config.cell_size = j.value("cell_size", kDefaultCellBytes);
        config.client_burst = histogram_from_json(j.at("client").at("burst"));
        config.client_gap = histogram_from_json(j.at("client").at("gap"));
        config.server_burst = histogram_from_json(j.at("server").at("burst"));
        config.server_gap = histogram_from_json(j.at("server").at("gap"));
        config.validate();
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(path.string() + ": " + e.what());
    }
}

void save_histogram_config(const HistogramConfig& config,
                           const std::filesystem::path& path) {
    nlohmann::json j = {
        {"cell_size", config.cell_size},
        {"client",
         {{"burst", histogram_to_json(config.client_burst)},
          {"gap", histogram_to_json(config.client_gap)}}},
        {"server",
         {{"burst", histogram_to_json(config.server_burst)},
          {"gap", histogram_to_json(config.server_gap)}}},
    };
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

HistogramConfig fit_histogram_config(const LabeledDataset& dataset,
                                     std::uint32_t cell_size) {
    std::vector<double> gaps_out, gaps_in;
    for (const auto& entry : dataset.entries()) {
        double last_out = -1.0, last_in = -1.0;
        for (const Packet& pk : entry.sequence) {
            if (pk.dir == Direction::Outgoing) {
                if (last_out >= 0.0) gaps_out.push_back(pk.time - last_out);
                last_out = pk.time;
            } else {
                if (last_in >= 0.0) gaps_in.push_back(pk.time - last_in);
                last_in = pk.time;
            }
        }
    }
    auto split_fit = [](std::vector<double>& gaps) {
        std::sort(gaps.begin(), gaps.end());
        const std::size_t mid = gaps.size() / 2;
        std::vector<double> below(gaps.begin(), gaps.begin() + mid);
        std::vector<double> above(gaps.begin() + mid, gaps.end());
        return std::pair{deciles_of(std::move(below)), deciles_of(std::move(above))};
    };
    HistogramConfig config;
    config.cell_size = cell_size;
    auto [cb, cg] = split_fit(gaps_out);
    auto [sb, sg] = split_fit(gaps_in);
    config.client_burst = std::move(cb);
    config.client_gap = std::move(cg);
    config.server_burst = std::move(sb);
    config.server_gap = std::move(sg);
    config.validate();
    return config;
}

std::string DefenseSpec::name() const {
    struct Visitor {
        std::string operator()(const NoDefense&) const { return "none"; }
        std::string operator()(const BufloParams&) const { return "buflo"; }
        std::string operator()(const TamarawParams&) const { return "tamaraw"; }
        std::string operator()(const DecoyParams&) const { return "decoy"; }
        std::string operator()(const CsBufloParams&) const { return "csbuflo"; }
        std::string operator()(const WtfPadParams&) const { return "wtfpad"; }
    };
    return std::visit(Visitor{}, params);
}

bool DefenseSpec::is_probabilistic() const {
    return std::holds_alternative<DecoyParams>(params) ||
           std::holds_alternative<WtfPadParams>(params);
}

void DefenseSpec::validate() const {
    if (const auto* b = std::get_if<BufloParams>(&params)) {
        check_packet_size(b->d);
        if (!(b->rho > 0.0) || !(b->tau > 0.0))
            throw config_error("buflo rho and tau must be positive");
    } else if (const auto* t = std::get_if<TamarawParams>(&params)) {
        check_packet_size(t->d);
        if (!(t->rho_in > 0.0)) throw config_error("tamaraw rho_in must be positive");
        if (!(t->rho_out > t->rho_in))
            throw config_error("tamaraw requires rho_out > rho_in");
        if (t->pad_multiple < 1) throw config_error("tamaraw pad_multiple must be >= 1");
    } else if (const auto* c = std::get_if<CsBufloParams>(&params)) {
        check_packet_size(c->d);
        if (!(c->rho_min > 0.0) || !(c->rho_max >= c->rho_min))
            throw config_error("csbuflo requires 0 < rho_min <= rho_max");
    } else if (const auto* w = std::get_if<WtfPadParams>(&params)) {
        w->histograms.validate();
    }
}

PacketSequence buflo(const PacketSequence& p, std::uint32_t d, double rho, double tau) {
    check_packet_size(d);
    if (!(rho > 0.0) || !(tau > 0.0))
        throw config_error("buflo rho and tau must be positive");
    const TraceSummary s = summarize(p);
    const auto schedule_count =
        static_cast<std::size_t>(std::ceil(tau / rho - kScheduleSlack));
    const std::size_t count_out = std::max(schedule_count, ceil_div(s.bytes_out, d));
    const std::size_t count_in = std::max(schedule_count, ceil_div(s.bytes_in, d));
    std::vector<Packet> outgoing, incoming;
    emit_schedule(outgoing, count_out, rho, d, Direction::Outgoing);
    emit_schedule(incoming, count_in, rho, d, Direction::Incoming);
    return merge_directional(std::move(outgoing), std::move(incoming));
}

PacketSequence tamaraw(const PacketSequence& p, double rho_in, double rho_out,
                       std::size_t pad_multiple, std::uint32_t d) {
    check_packet_size(d);
    if (!(rho_in > 0.0) || !(rho_out > rho_in))
        throw config_error("tamaraw requires 0 < rho_in < rho_out");
    if (pad_multiple < 1) throw config_error("tamaraw pad_multiple must be >= 1");
    const TraceSummary s = summarize(p);
    auto padded_count = [pad_multiple](std::size_t real) {
        return (real + pad_multiple - 1) / pad_multiple * pad_multiple;
    };
    const std::size_t count_out = padded_count(ceil_div(s.bytes_out, d));
    const std::size_t count_in = padded_count(ceil_div(s.bytes_in, d));
    std::vector<Packet> outgoing, incoming;
    emit_schedule(outgoing, count_out, rho_out, d, Direction::Outgoing);
    emit_schedule(incoming, count_in, rho_in, d, Direction::Incoming);
    return merge_directional(std::move(outgoing), std::move(incoming));
}

PacketSequence decoy(const PacketSequence& p, const PacketSequence& q) {
    std::vector<Packet> merged;
    merged.reserve(p.size() + q.size());
    std::size_t i = 0, j = 0;
    while (i < p.size() || j < q.size()) {
        const bool take_p = j >= q.size() || (i < p.size() && p[i].time <= q[j].time);
        merged.push_back(take_p ? p[i++] : q[j++]);
    }
    return PacketSequence(std::move(merged));
}

PacketSequence cs_buflo(const PacketSequence& p, std::uint32_t d, double rho_min,
                        double rho_max, std::uint64_t /*seed*/) {
    check_packet_size(d);
    if (!(rho_min > 0.0) || !(rho_max >= rho_min))
        throw config_error("csbuflo requires 0 < rho_min <= rho_max");

    const double t_end = p.duration();
    auto direction_rate = [&](Direction dir) {
        double first = -1.0, last = -1.0;
        std::size_t count = 0;
        for (const Packet& pk : p) {
            if (pk.dir != dir) continue;
            if (count == 0) first = pk.time;
            last = pk.time;
            ++count;
        }
        if (count < 2) return rho_max;  // no observable gap: assume the slow end
        const double mean_gap = (last - first) / static_cast<double>(count - 1);
        return std::clamp(mean_gap, rho_min, rho_max);
    };

    auto build = [&](Direction dir) {
        const double rho = direction_rate(dir);
        // Send at k*rho while the page is still loading...
        const auto base =
            static_cast<std::size_t>(std::floor(t_end / rho + kScheduleSlack)) + 1;
        // ...then pad the emitted byte count up to the next power of two.
        const std::uint64_t target =
            next_pow2_at_least(static_cast<std::uint64_t>(base) * d);
        const std::size_t total = std::max(base, ceil_div(target, d));
        std::vector<Packet> out;
        emit_schedule(out, total, rho, d, dir);
        return out;
    };
    return merge_directional(build(Direction::Outgoing), build(Direction::Incoming));
}

PacketSequence wtf_pad(const PacketSequence& p, const HistogramConfig& histograms,
                       std::uint64_t seed) {
    histograms.validate();
    const double t_end = p.duration();

    auto run_endpoint = [&](Direction dir, const Histogram& burst, const Histogram& gap,
                            std::uint64_t stream) {
        std::vector<double> real_times;
        for (const Packet& pk : p)
            if (pk.dir == dir) real_times.push_back(pk.time);
        Rng rng(stream);
        std::vector<Packet> dummies;
        for (std::size_t i = 0; i < real_times.size(); ++i) {
            double t = real_times[i];
            const Histogram* hist = &burst;  // a real packet (re)enters burst
            const double next_real =
                i + 1 < real_times.size() ? real_times[i + 1] : t_end + 1.0;
            while (true) {
                const std::optional<double> delay = sample_delay(*hist, rng);
                if (!delay) break;  // infinity bin: idle until the next real packet
                const double expiry = t + *delay;
                if (next_real <= expiry) break;  // real traffic resumed in time
                if (expiry > t_end) break;       // page load is over
                dummies.push_back(Packet{expiry, histograms.cell_size, dir});
                t = expiry;
                hist = &gap;
            }
        }
        return dummies;
    };

    std::vector<Packet> all(p.packets());
    const std::vector<Packet> client = run_endpoint(
        Direction::Outgoing, histograms.client_burst, histograms.client_gap,
        derive_stream(seed, 0x636c69656e74ULL));
    const std::vector<Packet> server = run_endpoint(
        Direction::Incoming, histograms.server_burst, histograms.server_gap,
        derive_stream(seed, 0x736572766572ULL));
    all.insert(all.end(), client.begin(), client.end());
    all.insert(all.end(), server.begin(), server.end());
    std::stable_sort(all.begin(), all.end(),
                     [](const Packet& a, const Packet& b) { return a.time < b.time; });
    return PacketSequence(std::move(all));
}

PacketSequence apply(const DefenseSpec& spec, const PacketSequence& p,
                     const ApplyContext& ctx) {
    spec.validate();
    struct Visitor {
        const DefenseSpec& spec;
        const PacketSequence& p;
        const ApplyContext& ctx;

        PacketSequence operator()(const NoDefense&) const { return p; }
        PacketSequence operator()(const BufloParams& b) const {
            return buflo(p, b.d, b.rho, b.tau);
        }
        PacketSequence operator()(const TamarawParams& t) const {
            return tamaraw(p, t.rho_in, t.rho_out, t.pad_multiple, t.d);
        }
        PacketSequence operator()(const CsBufloParams& c) const {
            return cs_buflo(p, c.d, c.rho_min, c.rho_max,
                            derive_stream(spec.seed, ctx.trace_index));
        }
        PacketSequence operator()(const WtfPadParams& w) const {
            return wtf_pad(p, w.histograms, derive_stream(spec.seed, ctx.trace_index));
        }
        PacketSequence operator()(const DecoyParams&) const {
            if (ctx.decoy_source == nullptr || ctx.decoy_source->empty())
                throw config_error("decoy defense requires a decoy_source dataset");
            // Candidate pages: every label other than the trace's own.
            std::map<Label, std::vector<std::size_t>> by_label;
            for (std::size_t i = 0; i < ctx.decoy_source->size(); ++i) {
                const Label& label = ctx.decoy_source->entries()[i].label;
                if (ctx.own_label && label == *ctx.own_label) continue;
                by_label[label].push_back(i);
            }
            if (by_label.empty())
                throw config_error(
                    "decoy_source has no page different from the input's page");
            Rng rng(derive_stream(spec.seed, ctx.trace_index));
            auto page = by_label.begin();
            std::advance(page, static_cast<long>(rng.uniform_index(by_label.size())));
            const std::vector<std::size_t>& instances = page->second;
            const std::size_t pick = instances[rng.uniform_index(instances.size())];
            return decoy(p, ctx.decoy_source->entries()[pick].sequence);
        }
    };
    return std::visit(Visitor{spec, p, ctx}, spec.params);
}

}  // namespace wfbound
