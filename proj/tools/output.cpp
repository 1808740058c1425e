#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

namespace bilt::app {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_value(std::ostream& out, const Json& v, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << pad << Json(it.key()).dump() << ": ";
            write_value(out, it.value(), indent, depth + 1);
        }
        out << '\n' << close_pad << '}';
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            out << "[]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ",\n";
            out << pad;
            write_value(out, v[i], indent, depth + 1);
        }
        out << '\n' << close_pad << ']';
        return;
    }
    case Json::value_t::number_float: {
        const double d = v.get<double>();
        if (std::isfinite(d)) {
            out << format_double(d);
        } else {
            out << "null";
        }
        return;
    }
    default:
        out << v.dump();
    }
}

} // namespace

void write_json(std::ostream& out, const Json& value, int indent)
{
    write_value(out, value, indent, 0);
    out << '\n';
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h)
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json RunManifest::to_json() const
{
    Json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["version"] = version;
    j["started"] = started;
    j["finished"] = finished;
    return j;
}

void RunManifest::write_comments(std::ostream& out) const
{
    out << "# command: " << command << '\n';
    out << "# config_hash: " << config_hash << '\n';
    out << "# seed: " << seed << '\n';
    out << "# version: " << version << '\n';
    out << "# started: " << started << '\n';
    out << "# finished: " << finished << '\n';
}

RunManifest make_manifest(std::string command, std::uint64_t config_hash, std::string seed)
{
    RunManifest m;
    m.command = std::move(command);
    m.config_hash = "fnv1a64:" + hex64(config_hash);
    m.seed = std::move(seed);
    m.version = BILT_VERSION;
    m.started = utc_timestamp();
    return m;
}

} // namespace bilt::app
