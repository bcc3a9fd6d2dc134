#include "wfbound/report_io.hpp"

#include <json.hpp>

namespace wfbound {

namespace {

using nlohmann::json;

json bound_json(const BoundEstimate& est) {
    return json{{"r_nn", est.r_nn},
                {"r_star_lower", est.r_star_lower},
                {"label_count", est.label_count},
                {"n", est.n},
                {"folds", est.folds},
                {"metric", est.metric},
                {"schema", est.schema},
                {"seed", est.seed},
                {"per_fold_errors", est.per_fold_errors}};
}

json privacy_json(const PrivacyReport& r) {
    return json{{"r_star_lower", r.r_star_lower},
                {"label_count", r.label_count},
                {"r_guess", r.r_guess},
                {"advantage", r.advantage},
                {"epsilon", r.epsilon},
                {"feature_schema", r.feature_schema},
                {"clamped", r.clamped}};
}

json overhead_json(const OverheadReport& r) {
    json times = json::array();
    for (const auto& t : r.per_trace_time) {
        if (t)
            times.push_back(*t);
        else
            times.push_back(nullptr);  // unbounded overhead of a 0-duration trace
    }
    json out{{"packet_overhead_pct", r.packet_overhead_pct},
             {"per_trace_packet", r.per_trace_packet},
             {"per_trace_time", times}};
    if (std::isnan(r.time_overhead_pct))
        out["time_overhead_pct"] = nullptr;
    else
        out["time_overhead_pct"] = r.time_overhead_pct;
    return out;
}

}  // namespace

std::string to_json(const BoundEstimate& est, int indent) {
    return bound_json(est).dump(indent);
}

std::string to_json(const PrivacyReport& report, int indent) {
    return privacy_json(report).dump(indent);
}

std::string to_json(const OverheadReport& report, int indent) {
    return overhead_json(report).dump(indent);
}

std::string to_json(const ScenarioReport& report, std::uint64_t config_hash,
                    int indent) {
    json j{{"scenario", report.scenario},
           {"defense", report.defense},
           {"bound", bound_json(report.bound)},
           {"privacy", privacy_json(report.privacy)},
           {"overheads", overhead_json(report.overheads)},
           {"config_hash", config_hash},
           {"seed", report.bound.seed},
           {"schema", report.bound.schema},
           {"metric", report.bound.metric},
           {"folds", report.bound.folds}};
    if (report.one_vs_all) {
        json pages = json::array();
        for (const PageBound& pb : report.one_vs_all->per_page) {
            pages.push_back({{"page", pb.page.display()},
                             {"r_nn", pb.r_nn},
                             {"r_star_lower", pb.r_star_lower}});
        }
        j["one_vs_all"] = json{{"per_page", pages},
                               {"mean", report.one_vs_all->mean},
                               {"stddev", report.one_vs_all->stddev},
                               {"min", report.one_vs_all->min}};
    }
    return j.dump(indent);
}

}  // namespace wfbound
