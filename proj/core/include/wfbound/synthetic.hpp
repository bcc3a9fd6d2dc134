#pragma once

#include <cstdint>
#include <variant>

#include "wfbound/features.hpp"

namespace wfbound {

/// Synthetic dataset families with analytically known Bayes error, used to
/// validate the estimator chain end to end.
struct UniformOverlap {
    double shift = 0.5;  // class 0 on [0,1], class 1 on [shift, shift+1]
};
struct IdenticalClasses {};
struct SeparatedClouds {
    double gap = 1.0;  // distance between adjacent class supports
};

struct SyntheticSpec {
    std::variant<UniformOverlap, IdenticalClasses, SeparatedClouds> kind;
    std::size_t label_count = 2;
    std::size_t samples_per_label = 100;
    std::uint64_t seed = 0;
    std::size_t dimension = 1;

    void validate() const;
};

/// Seeded i.i.d. samples with aligned labels (pages "00", "01", ...).
FeatureMatrix generate(const SyntheticSpec& spec);

/// Closed-form Bayes error of the generated distribution:
///   UniformOverlap shift s -> (1 - s) / 2
///   IdenticalClasses       -> (L - 1) / L
///   SeparatedClouds        -> 0
double analytic_bayes_error(const SyntheticSpec& spec);

}  // namespace wfbound
