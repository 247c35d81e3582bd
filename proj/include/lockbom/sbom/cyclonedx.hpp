#pragma once

#include <string>
#include <string_view>

#include "lockbom/metrics/metrics.hpp"
#include "lockbom/sbom/document.hpp"

namespace lockbom::sbom {

// Deterministic CycloneDX JSON: UTF-8, LF, 2-space indent, fixed key
// order. Equal component sets produce byte-identical bytes.
std::string emit_cyclonedx(const SbomDocument& doc);

// Full document read-back (ours or third-party). Tolerates unknown
// members and any member order. Throws MalformedSbom / MissingVersion.
SbomDocument parse_sbom(std::string_view content);

// The comparison set the metrics module consumes: canonical
// (name, version) pairs. Names are normalized using the component's purl
// type when one is present.
metrics::PairSet ingest_sbom(std::string_view content);

// Lock-file ground truth projected to the same pair shape.
metrics::PairSet pair_set_of(const DependencySet& deps);
metrics::PairSet pair_set_of(const SbomDocument& doc);

} // namespace lockbom::sbom
