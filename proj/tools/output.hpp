#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

namespace bilt::app {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double v);

/// Serializes with every floating-point number at 17 significant digits.
/// Non-finite numbers are written as null.
void write_json(std::ostream& out, const Json& value, int indent = 2);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

/// UTC wall-clock time, ISO 8601.
std::string utc_timestamp();

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string seed;
    std::string version;
    std::string started;
    std::string finished;

    Json to_json() const;
    /// "# key: value" lines for CSV reports.
    void write_comments(std::ostream& out) const;
};

RunManifest make_manifest(std::string command, std::uint64_t config_hash, std::string seed);

} // namespace bilt::app
