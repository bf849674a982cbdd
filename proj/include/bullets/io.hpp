#pragma once

/**
 * @file io.hpp
 * @brief JSON and CSV serialization: parameter files, diagram export, run
 *        manifests.
 *
 * Conventions, applied uniformly and documented in the README:
 *   - every exact value travels as a rational string "p/q" (or "p" for
 *     integers); floating-point numbers appear only in payloads explicitly
 *     marked `"floating": true`;
 *   - bullet ids and delay indices are 1-based in JSON (matching the usual
 *     pencil-and-paper numbering), 0-based in the C++ API;
 *   - object key order is fixed at construction, so serialized output is
 *     byte-stable for identical inputs.
 */

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bullets/engine.hpp"
#include "bullets/enumeration.hpp"
#include "bullets/models.hpp"
#include "bullets/scheme.hpp"

namespace bullets {

/// Insertion-ordered JSON: serialization order is the construction order.
using Json = nlohmann::ordered_json;

/// Tool version stamped into every run manifest.
inline constexpr char kToolVersion[] = "1.0.0";

/// Rational → "p/q" (or "p" when the denominator is 1).
Json rat_json(const Rat& value);

/// Reads a rational from a JSON value: a "p/q" string or an exact integer.
/// Throws Invalid naming `field` on any other shape.
Rat rat_from_json(const Json& value, const std::string& field);

/// {"speeds": ["1/3","1/2","2"], "delays": ["1","1"]} → Parameter.
/// Shape errors throw Invalid naming the offending field; semantic errors
/// come from Parameter::validate.
Parameter parameter_from_json(const Json& file);
Json parameter_json(const Parameter& p);

/// {"free_speeds": [...], "v_min": ..., "v_r": ..., "free_delays": [...],
///  "delta_star": ..., "s": ... (optional, default H),
///  "filter": "zero|nonneg|positive" (optional, default "nonneg")}
ConstrainedParameter constrained_from_json(const Json& file);
Json constrained_json(const ConstrainedParameter& cp);

/// Same file schema as Parameter but without the sortedness requirement:
/// the speeds array carries the impetuses.  The acceleration profile is not
/// part of the file; the caller sets it.
ImpetusProblem impetus_from_json(const Json& file);

/// Full diagram export: per-bullet {id, birth, speed, death, death_position,
/// partner} with 1-based ids, "inf" death for survivors, null partner for
/// unmatched bullets, plus the 1-based survivor list.
Json diagram_json(const Diagram& d);

/// Exact law → {"k": "p/q", ...} over the support, ascending k.
Json law_json(const SurvivorDistribution& q);

/// Enumeration table → {"total": "...", "count": {"k": "...", ...}} with all
/// counts as decimal strings (they exceed 2^53 well before the bounds do).
Json count_table_json(const CountTable& t);

/// Singularity witness → JSON with 1-based delay indices.
Json critical_pattern_json(const CriticalPattern& cp);

/// Every run emits one of these as the final line of standard output (JSON)
/// or a trailing '#' comment (CSV).  Identical manifests — same subcommand,
/// flags, seed, and parameter hash — imply byte-identical payloads above it;
/// only duration_seconds varies between such runs.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> flags; ///< resolved values, sorted by name
    std::uint64_t seed = 0;
    std::string parameter_hash = "none"; ///< content hash of the params file, or "none"
    std::string version = kToolVersion;
    double duration_seconds = 0.0;

    Json json() const;
};

/// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string content_hash(const std::string& text);

/// Whole-file read/write; throws Invalid naming the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Plot-ready series: header "j,survivors" then one row per prefix length.
std::string trajectory_csv(const std::vector<int>& series);

} // namespace bullets
