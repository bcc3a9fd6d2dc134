#pragma once

#include <string>
#include <string_view>

#include "wfbound/trace.hpp"

namespace wfbound {

/// What the idealized lookup-table adversary is allowed to observe. The
/// restricted views keep the method usable on deterministic defenses:
/// against the constant-rate defense only the total transmission size
/// varies, against the per-direction one only the packet counts.
enum class ObservableKind { TotalTransmissionSize, PerDirectionCounts, ExactSequence };

const char* observable_name(ObservableKind kind);
ObservableKind observable_from_name(std::string_view name);

/// Canonical grouping key for one trace under the chosen observable.
/// ExactSequence encodes every (time, size, direction) triple bit-exactly.
std::string observable_key(const PacketSequence& p, ObservableKind kind);

/// Error of the lookup-table adversary: traces are grouped by observable
/// key, the adversary answers the majority label of each group (ties to the
/// smallest label), and the error is the fraction of traces not covered by
/// those majorities.
double lookup_table_error(const LabeledDataset& dataset, ObservableKind kind);

}  // namespace wfbound
