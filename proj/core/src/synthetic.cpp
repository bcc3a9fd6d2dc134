#include "wfbound/synthetic.hpp"

#include <cstdio>

#include "wfbound/error.hpp"
#include "wfbound/rng.hpp"

namespace wfbound {

namespace {

std::string page_id(std::size_t i, std::size_t label_count) {
    int width = 1;
    for (std::size_t v = label_count - 1; v >= 10; v /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, i);
    return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (label_count < 2) throw validation_error("synthetic spec needs L >= 2");
    if (samples_per_label < 1) throw validation_error("samples_per_label must be >= 1");
    if (dimension < 1) throw validation_error("dimension must be >= 1");
    if (const auto* u = std::get_if<UniformOverlap>(&kind)) {
        if (label_count != 2)
            throw validation_error("UniformOverlap is defined for L = 2");
        if (u->shift < 0.0 || u->shift > 1.0)
            throw validation_error("UniformOverlap shift must lie in [0, 1]");
    }
    if (const auto* s = std::get_if<SeparatedClouds>(&kind)) {
        if (!(s->gap > 0.0)) throw validation_error("SeparatedClouds gap must be > 0");
    }
}

FeatureMatrix generate(const SyntheticSpec& spec) {
    spec.validate();
    // UniformOverlap's analytic error is the 1-D overlap computation.
    const std::size_t dim =
        std::holds_alternative<UniformOverlap>(spec.kind) ? 1 : spec.dimension;
    FeatureSchema schema;
    schema.custom_name = "synthetic";
    FeatureMatrix m(schema, dim);

    std::vector<double> row(dim);
    for (std::size_t label = 0; label < spec.label_count; ++label) {
        Rng rng(derive_stream(spec.seed, label));
        const Label page = Label::monitored(page_id(label, spec.label_count));
        for (std::size_t s = 0; s < spec.samples_per_label; ++s) {
            if (const auto* u = std::get_if<UniformOverlap>(&spec.kind)) {
                const double lo = label == 0 ? 0.0 : u->shift;
                row[0] = rng.uniform(lo, lo + 1.0);
            } else if (std::holds_alternative<IdenticalClasses>(spec.kind)) {
                for (double& x : row) x = rng.gaussian();
            } else {
                const auto& clouds = std::get<SeparatedClouds>(spec.kind);
                // Unit-width cube per class along the first axis; supports
                // of adjacent classes are exactly `gap` apart.
                const double center = static_cast<double>(label) * (1.0 + clouds.gap);
                for (double& x : row) x = rng.uniform(-0.5, 0.5);
                row[0] += center;
            }
            m.add_row(row, page);
        }
    }
    return m;
}

double analytic_bayes_error(const SyntheticSpec& spec) {
    spec.validate();
    if (const auto* u = std::get_if<UniformOverlap>(&spec.kind))
        return (1.0 - u->shift) / 2.0;
    if (std::holds_alternative<IdenticalClasses>(spec.kind))
        return (static_cast<double>(spec.label_count) - 1.0) /
               static_cast<double>(spec.label_count);
    return 0.0;  // separated supports
}

}  // namespace wfbound
