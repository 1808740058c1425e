#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "bilt/error.hpp"

namespace bilt::app {

namespace {

const std::set<std::string>& setting_keys()
{
    static const std::set<std::string> keys{"n",      "n1",        "n2",   "p",     "model", "delta",    "prop",
                                            "block_size", "kernel", "bandwidth", "reps", "level", "seed", "fixed_mu2"};
    return keys;
}

struct Setting {
    Json value;
    std::string path;
};

using Settings = std::map<std::string, Setting>;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw InvalidArgument(path + ": " + what);
}

void merge_settings(Settings& into, const Json& obj, const std::string& path, bool allow_meta)
{
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (allow_meta && (key == "name" || key == "grid")) continue;
        if (!setting_keys().count(key)) fail(path + "." + key, "unknown setting");
        if (!it.value().is_primitive() || it.value().is_null()) fail(path + "." + key, "expected a scalar");
        into[key] = {it.value(), path + "." + key};
    }
}

int as_int(const Setting& s)
{
    if (!s.value.is_number_integer()) fail(s.path, "expected an integer");
    const auto v = s.value.get<long long>();
    if (v < -2147483647LL || v > 2147483647LL) fail(s.path, "out of range");
    return static_cast<int>(v);
}

double as_double(const Setting& s)
{
    if (!s.value.is_number()) fail(s.path, "expected a number");
    return s.value.get<double>();
}

std::string as_string(const Setting& s)
{
    if (!s.value.is_string()) fail(s.path, "expected a string");
    return s.value.get<std::string>();
}

SimulationConfig build(const std::string& name, const Settings& settings, const std::string& path)
{
    SimulationConfig c;
    c.experiment = name;
    double delta = 0.0;
    double prop = 1.0;
    for (const auto& [key, s] : settings) {
        try {
            if (key == "n") {
                c.n1 = c.n2 = as_int(s);
            } else if (key == "n1") {
                c.n1 = as_int(s);
            } else if (key == "n2") {
                c.n2 = as_int(s);
            } else if (key == "p") {
                c.p = as_int(s);
            } else if (key == "model") {
                c.model = CovarianceModel::parse(as_string(s));
            } else if (key == "delta") {
                delta = as_double(s);
            } else if (key == "prop") {
                prop = as_double(s);
            } else if (key == "block_size") {
                c.block_size = as_int(s);
            } else if (key == "kernel") {
                c.kernel.kind = parse_kernel_kind(as_string(s));
            } else if (key == "bandwidth") {
                c.kernel.bandwidth = as_int(s);
            } else if (key == "reps") {
                c.reps = as_int(s);
            } else if (key == "level") {
                c.level = as_double(s);
            } else if (key == "seed") {
                if (!s.value.is_number_unsigned()) fail(s.path, "expected a nonnegative integer");
                c.seed = s.value.get<std::uint64_t>();
            } else if (key == "fixed_mu2") {
                if (!s.value.is_boolean()) fail(s.path, "expected true or false");
                c.fixed_mu2 = s.value.get<bool>();
            }
        } catch (const InvalidArgument& e) {
            const std::string msg = e.what();
            if (msg.starts_with(s.path)) throw;
            fail(s.path, msg);
        }
    }
    c.signal = prop < 1.0 ? SignalSpec::sparse_sign_flip(delta, prop) : SignalSpec::sign_flip(delta);
    if (prop > 1.0) fail(settings.at("prop").path, "must lie in [0, 1]");
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        fail(path, e.what());
    }
    return c;
}

void expand_grid(const std::string& name, Settings base, const std::vector<std::pair<std::string, Json>>& axes,
                 std::size_t axis, const std::string& path, std::vector<SimulationConfig>& out)
{
    if (axis == axes.size()) {
        out.push_back(build(name, base, path));
        return;
    }
    const auto& [key, values] = axes[axis];
    for (std::size_t i = 0; i < values.size(); ++i) {
        base[key] = {values[i], path + ".grid." + key + "[" + std::to_string(i) + "]"};
        expand_grid(name, base, axes, axis + 1, path, out);
    }
}

} // namespace

std::vector<SimulationConfig> expand_configs(const Json& doc)
{
    if (!doc.is_object()) fail("$", "config must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() != "defaults" && it.key() != "experiments" && it.key() != "version") fail(it.key(), "unknown key");
    }
    if (doc.contains("version") && doc["version"] != 1) fail("version", "only version 1 is supported");

    Settings defaults;
    if (doc.contains("defaults")) merge_settings(defaults, doc["defaults"], "defaults", false);

    std::vector<SimulationConfig> out;
    if (!doc.contains("experiments")) {
        out.push_back(build("default", defaults, "defaults"));
        return out;
    }
    const Json& experiments = doc["experiments"];
    if (!experiments.is_array() || experiments.empty()) fail("experiments", "expected a nonempty array");

    for (std::size_t e = 0; e < experiments.size(); ++e) {
        const std::string path = "experiments[" + std::to_string(e) + "]";
        const Json& exp = experiments[e];
        Settings settings = defaults;
        merge_settings(settings, exp, path, true);
        std::string name = "experiment" + std::to_string(e + 1);
        if (exp.contains("name")) {
            if (!exp["name"].is_string()) fail(path + ".name", "expected a string");
            name = exp["name"].get<std::string>();
        }
        std::vector<std::pair<std::string, Json>> axes;
        if (exp.contains("grid")) {
            const Json& grid = exp["grid"];
            if (!grid.is_object()) fail(path + ".grid", "expected an object");
            for (auto it = grid.begin(); it != grid.end(); ++it) {
                const std::string key_path = path + ".grid." + it.key();
                if (!setting_keys().count(it.key())) fail(key_path, "unknown setting");
                if (!it.value().is_array() || it.value().empty()) fail(key_path, "expected a nonempty array");
                axes.emplace_back(it.key(), it.value());
            }
        }
        expand_grid(name, settings, axes, 0, path, out);
    }
    return out;
}

std::vector<SimulationConfig> load_configs(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
    return expand_configs(doc);
}

std::optional<std::uint64_t> resolve_seed_override(std::optional<std::uint64_t> flag)
{
    if (flag) return flag;
    const char* env = std::getenv("BILT_SEED");
    if (env == nullptr || *env == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw InvalidArgument("BILT_SEED: expected a nonnegative integer, got '" + std::string(env) + "'");
    return static_cast<std::uint64_t>(v);
}

} // namespace bilt::app
