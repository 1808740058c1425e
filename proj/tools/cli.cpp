#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bilt/bilt_test.hpp"
#include "bilt/blockstats.hpp"
#include "bilt/error.hpp"
#include "bilt/matvar.hpp"
#include "bilt/simharness.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "output.hpp"

namespace bilt::app {

namespace {

constexpr int kExitError = 1;
constexpr int kExitReject = 2;

constexpr const char* kReportFormat = "bilt-simulate-report v1";
constexpr const char* kReportHeader =
    "experiment,n1,n2,p,b,model,rho,delta,prop,kernel,L,reps,seed,rejection_rate,se,wall_time,error";

std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const DimensionTooLarge*>(&e)) return "DimensionTooLarge";
    if (dynamic_cast<const SingularBlockCovariance*>(&e)) return "SingularBlockCovariance";
    if (dynamic_cast<const InsufficientSampleSize*>(&e)) return "InsufficientSampleSize";
    if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
    if (dynamic_cast<const ShapeMismatch*>(&e)) return "ShapeMismatch";
    if (dynamic_cast<const LagTooLarge*>(&e)) return "LagTooLarge";
    if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
    return "Error";
}

std::string join_command(int argc, const char* const* argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::string file_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct KernelOptions {
    std::string kernel = "parzen";
    int bandwidth = 5;
    double level = 0.05;

    KernelSpec spec() const { return {parse_kernel_kind(kernel), bandwidth}; }

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--kernel", kernel, "Lag window: parzen, truncated or qs")->capture_default_str();
        cmd->add_option("--bandwidth,-L", bandwidth, "Kernel bandwidth L")->capture_default_str();
        cmd->add_option("--level", level, "Test level")->capture_default_str();
    }

    std::string canonical() const
    {
        return "kernel=" + to_string(spec().kind) + "|L=" + std::to_string(bandwidth) + "|level=" + format_double(level);
    }
};

void put_bilt(Json& j, const BiltResult& r, const KernelSpec& spec)
{
    j["statistic"] = r.t_bilt;
    j["K"] = r.k;
    j["centering"] = r.centering;
    j["z"] = r.z;
    j["tau_sq"] = r.tau_sq_hat;
    j["tau_floored"] = r.tau_floored;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["level"] = r.level;
    j["kernel"] = to_string(spec.kind);
    j["L"] = spec.bandwidth;
}

// test ---------------------------------------------------------------------

struct TestOptions {
    std::string method = "bilt";
    int block_size = 2;
    std::string x_path;
    std::string y_path;
    std::string data_path;
    KernelOptions kernel;
    bool exit_on_reject = false;
};

int cmd_test(const TestOptions& o, const std::string& command, std::ostream& out)
{
    if (o.method != "bilt" && o.method != "dlrt" && o.method != "hotelling") {
        throw InvalidArgument("--method: expected bilt, dlrt or hotelling, got '" + o.method + "'");
    }
    const bool two_files = !o.x_path.empty() || !o.y_path.empty();
    if (two_files && !o.data_path.empty()) throw InvalidArgument("give either --x/--y or --data, not both");
    if (two_files && (o.x_path.empty() || o.y_path.empty())) throw InvalidArgument("--x and --y must be given together");
    if (!two_files && o.data_path.empty()) throw InvalidArgument("no input: give --x and --y, or --data");

    Eigen::MatrixXd x, y;
    std::string input_bytes;
    if (two_files) {
        const CsvTable tx = read_csv(o.x_path);
        const CsvTable ty = read_csv(o.y_path);
        if (tx.header.size() != ty.header.size()) {
            throw ShapeMismatch("groups differ in dimension: " + o.x_path + " has " + std::to_string(tx.header.size()) +
                                " columns, " + o.y_path + " has " + std::to_string(ty.header.size()));
        }
        std::vector<std::size_t> rx(tx.rows.size()), ry(ty.rows.size());
        for (std::size_t i = 0; i < rx.size(); ++i) rx[i] = i;
        for (std::size_t i = 0; i < ry.size(); ++i) ry[i] = i;
        x = numeric_matrix(tx, rx);
        y = numeric_matrix(ty, ry);
        input_bytes = file_bytes(o.x_path) + '\0' + file_bytes(o.y_path);
    } else {
        GroupedData g = split_by_group(read_csv(o.data_path));
        x = std::move(g.x);
        y = std::move(g.y);
        input_bytes = file_bytes(o.data_path);
    }
    const TwoSampleData data(std::move(x), std::move(y));

    Json j;
    bool reject = false;
    std::string canonical;
    if (o.method == "hotelling") {
        if (!(o.kernel.level > 0.0 && o.kernel.level < 1.0)) throw InvalidArgument("--level: must lie in (0, 1)");
        const HotellingResult h = hotelling_t2(data);
        reject = h.p_value <= o.kernel.level;
        j["statistic"] = h.t2;
        j["f"] = h.f_stat;
        j["df1"] = h.df1;
        j["df2"] = h.df2;
        j["p_value"] = h.p_value;
        j["reject"] = reject;
        j["level"] = o.kernel.level;
        canonical = "test|hotelling|level=" + format_double(o.kernel.level);
    } else {
        const int b = o.method == "dlrt" ? 1 : o.block_size;
        if (b < 1) throw InvalidArgument("--block-size: must be positive");
        const KernelSpec spec = o.kernel.spec();
        const BiltResult r = bilt_test(data, BlockPartition::fixed(data.dim(), b), spec, o.kernel.level);
        reject = r.reject;
        j["block_size"] = b;
        put_bilt(j, r, spec);
        canonical = "test|bilt|b=" + std::to_string(b) + "|" + o.kernel.canonical();
    }
    j["n1"] = data.n1();
    j["n2"] = data.n2();
    j["p"] = data.dim();

    RunManifest m = make_manifest(command, fnv1a(input_bytes, fnv1a(canonical)), "none");
    m.finished = utc_timestamp();
    j["manifest"] = m.to_json();
    write_json(out, j);
    return o.exit_on_reject && reject ? kExitReject : 0;
}

// simulate -----------------------------------------------------------------

struct SimulateOptions {
    std::string config_path;
    std::string output_path;
    int parallelism = 1;
    std::optional<std::uint64_t> seed;
    std::string dump_z;
};

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + '"';
}

void write_row(std::ostream& out, const SimulationConfig& c, const SweepEntry& e)
{
    out << csv_field(c.experiment) << ',' << c.n1 << ',' << c.n2 << ',' << c.p << ',' << c.block_size << ','
        << csv_field(c.model.label()) << ',' << format_double(c.model.rho) << ',' << format_double(c.signal.delta)
        << ',' << format_double(c.signal.kind == SignalSpec::Kind::SparseSignFlip ? c.signal.prop : 1.0) << ','
        << to_string(c.kernel.kind) << ',' << c.kernel.bandwidth << ',' << c.reps << ',' << c.seed << ',';
    if (e.ok()) {
        out << format_double(e.report->rejection_rate) << ',' << format_double(e.report->standard_error) << ','
            << format_double(e.report->wall_time) << ',';
    } else {
        out << ",,," << csv_field(e.error);
    }
    out << '\n';
}

int cmd_simulate(const SimulateOptions& o, const std::string& command, std::ostream& out, std::ostream& err)
{
    if (o.parallelism < 1) throw InvalidArgument("--parallelism: must be at least 1");
    std::vector<SimulationConfig> configs = load_configs(o.config_path);
    const std::optional<std::uint64_t> seed = resolve_seed_override(o.seed);
    if (seed) {
        for (auto& c : configs) c.seed = *seed;
    }
    if (!o.dump_z.empty()) {
        std::filesystem::create_directories(o.dump_z);
        for (auto& c : configs) c.keep_z = true;
    }

    const std::string seed_text = seed ? std::to_string(*seed) : "per-config";
    RunManifest m = make_manifest(command, fnv1a(file_bytes(o.config_path), fnv1a("simulate|seed=" + seed_text)), seed_text);

    std::vector<SweepEntry> entries;
    entries.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<SweepEntry> one = sweep({configs[i]}, o.parallelism);
        if (!one.front().ok()) err << "warning: config " << i + 1 << " (" << configs[i].experiment << "): " << one.front().error << '\n';
        entries.push_back(std::move(one.front()));
    }
    m.finished = utc_timestamp();

    std::ofstream file;
    if (!o.output_path.empty()) {
        file.open(o.output_path);
        if (!file) throw InvalidArgument("cannot write '" + o.output_path + "'");
    }
    std::ostream& dest = o.output_path.empty() ? out : file;
    dest << "# " << kReportFormat << '\n';
    m.write_comments(dest);
    dest << kReportHeader << '\n';
    for (std::size_t i = 0; i < configs.size(); ++i) write_row(dest, configs[i], entries[i]);

    if (!o.dump_z.empty()) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (!entries[i].ok()) continue;
            char name[32];
            std::snprintf(name, sizeof name, "z_%04zu.txt", i + 1);
            std::ofstream z(std::filesystem::path(o.dump_z) / name);
            if (!z) throw InvalidArgument("cannot write z dump in '" + o.dump_z + "'");
            z << "# " << configs[i].experiment << ' ' << configs[i].model.label() << " p=" << configs[i].p
              << " b=" << configs[i].effective_partition().max_size() << '\n';
            for (double v : entries[i].report->z_samples) z << format_double(v) << '\n';
        }
    }
    return 0;
}

// power --------------------------------------------------------------------

struct PowerOptions {
    std::vector<double> delta;
    std::optional<double> delta_sq_norm;
    std::optional<int> k;
    double tau = 0.0;
    double level = 0.05;
    std::optional<double> sweep_max;
    int sweep_steps = 10;
};

int cmd_power(const PowerOptions& o, const std::string& command, std::ostream& out)
{
    if (o.delta.empty() == !o.delta_sq_norm.has_value()) throw InvalidArgument("give exactly one of --delta and --delta-sq-norm");
    double sum = 0.0;
    int k = 0;
    if (!o.delta.empty()) {
        for (double d : o.delta) {
            if (!(d >= 0.0)) throw InvalidArgument("--delta: block noncentralities must be nonnegative");
            sum += d;
        }
        k = o.k.value_or(static_cast<int>(o.delta.size()));
        if (k < static_cast<int>(o.delta.size())) throw InvalidArgument("--K: fewer blocks than --delta entries");
    } else {
        if (!o.k) throw InvalidArgument("--K is required with --delta-sq-norm");
        sum = *o.delta_sq_norm;
        k = *o.k;
    }
    if (!(o.tau > 0.0)) throw InvalidArgument("--tau: must be positive");

    Json j;
    j["delta_sq_norm"] = sum;
    j["K"] = k;
    j["tau"] = o.tau;
    j["level"] = o.level;
    j["power"] = theoretical_power_from_sum(sum, k, o.tau, o.level);
    std::string canonical = "power|sum=" + format_double(sum) + "|K=" + std::to_string(k) + "|tau=" + format_double(o.tau) +
                            "|level=" + format_double(o.level);
    if (o.sweep_max) {
        if (!(*o.sweep_max >= 0.0)) throw InvalidArgument("--sweep-max: must be nonnegative");
        if (o.sweep_steps < 2) throw InvalidArgument("--sweep-steps: must be at least 2");
        Json rows = Json::array();
        for (int i = 0; i < o.sweep_steps; ++i) {
            const double s = *o.sweep_max * i / (o.sweep_steps - 1);
            rows.push_back({{"delta_sq_norm", s}, {"power", theoretical_power_from_sum(s, k, o.tau, o.level)}});
        }
        j["sweep"] = rows;
        canonical += "|sweep=" + format_double(*o.sweep_max) + "/" + std::to_string(o.sweep_steps);
    }
    RunManifest m = make_manifest(command, fnv1a(canonical), "none");
    m.finished = utc_timestamp();
    j["manifest"] = m.to_json();
    write_json(out, j);
    return 0;
}

// matrix-test --------------------------------------------------------------

struct MatrixOptions {
    std::string data_path;
    std::optional<int> rows;
    int cols_per_block = 1;
    std::optional<int> truncate_cols;
    KernelOptions kernel;
    bool exit_on_reject = false;
};

struct Subject {
    std::string group;
    std::map<std::pair<long long, long long>, double> cells;
    int first_line = 0;
};

int cmd_matrix_test(const MatrixOptions& o, const std::string& command, std::ostream& out, std::ostream& err)
{
    const CsvTable t = read_csv(o.data_path);
    const char* names[] = {"subject_id", "group", "row_index", "col_index", "value"};
    int col[5];
    for (int i = 0; i < 5; ++i) {
        col[i] = t.column(names[i]);
        if (col[i] < 0) throw InvalidArgument(o.data_path + ": missing column '" + std::string(names[i]) + "'");
    }

    std::vector<std::string> order;
    std::map<std::string, Subject> subjects;
    long long max_row = 0, max_col = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& id = t.rows[r][static_cast<std::size_t>(col[0])];
        const std::string& group = t.rows[r][static_cast<std::size_t>(col[1])];
        const long long ri = integer_cell(t, r, static_cast<std::size_t>(col[2]));
        const long long ci = integer_cell(t, r, static_cast<std::size_t>(col[3]));
        const double v = numeric_cell(t, r, static_cast<std::size_t>(col[4]));
        const std::string at = o.data_path + ": line " + std::to_string(t.line_numbers[r]);
        if (ri < 1 || ci < 1) throw InvalidArgument(at + ": row_index and col_index are 1-based");
        auto [it, fresh] = subjects.try_emplace(id);
        Subject& s = it->second;
        if (fresh) {
            s.group = group;
            s.first_line = t.line_numbers[r];
            order.push_back(id);
        } else if (s.group != group) {
            throw InvalidArgument(at + ": subject '" + id + "' appears in groups '" + s.group + "' and '" + group + "'");
        }
        if (!s.cells.emplace(std::make_pair(ri, ci), v).second) {
            throw InvalidArgument(at + ": duplicate entry (" + std::to_string(ri) + ", " + std::to_string(ci) + ") for subject '" + id + "'");
        }
        max_row = std::max(max_row, ri);
        max_col = std::max(max_col, ci);
    }
    if (subjects.empty()) throw InvalidArgument(o.data_path + ": no data rows");

    const long long rows = o.rows.value_or(static_cast<int>(max_row));
    if (rows < 1) throw InvalidArgument("--rows: must be positive");
    if (max_row > rows) throw InvalidArgument("row_index " + std::to_string(max_row) + " exceeds --rows " + std::to_string(rows));
    for (const auto& id : order) {
        const Subject& s = subjects.at(id);
        if (static_cast<long long>(s.cells.size()) != rows * max_col) {
            throw InvalidArgument("subject '" + id + "' (first seen on line " + std::to_string(s.first_line) + ") has " +
                                  std::to_string(s.cells.size()) + " of " + std::to_string(rows * max_col) +
                                  " grid entries");
        }
    }

    std::map<std::string, std::vector<Eigen::MatrixXd>> groups;
    long long cols = max_col;
    if (o.truncate_cols) {
        if (*o.truncate_cols < 1 || *o.truncate_cols > max_col) {
            throw InvalidArgument("--truncate-cols: must lie in [1, " + std::to_string(max_col) + "]");
        }
        cols = *o.truncate_cols;
    }
    for (const auto& id : order) {
        const Subject& s = subjects.at(id);
        Eigen::MatrixXd m(rows, cols);
        for (long long i = 1; i <= rows; ++i) {
            for (long long c = 1; c <= cols; ++c) m(i - 1, c - 1) = s.cells.at({i, c});
        }
        groups[s.group].push_back(std::move(m));
    }
    if (groups.size() != 2) {
        throw InvalidArgument(o.data_path + ": column 'group' must hold exactly two labels, found " + std::to_string(groups.size()));
    }

    MatrixLayout layout{static_cast<int>(rows), static_cast<int>(cols), o.cols_per_block};
    layout.validate();
    if (auto w = layout_warning(layout)) err << "warning: " << *w << '\n';

    const auto& g1 = groups.begin()->second;
    const auto& g2 = std::next(groups.begin())->second;
    const KernelSpec spec = o.kernel.spec();
    const BiltResult r = matrix_two_sample_test(g1, g2, layout, spec, o.kernel.level);

    Json j;
    j["block_size"] = layout.block_size();
    put_bilt(j, r, spec);
    j["n1"] = static_cast<int>(g1.size());
    j["n2"] = static_cast<int>(g2.size());
    j["p"] = layout.dim();
    j["rows"] = layout.rows;
    j["cols"] = layout.cols;
    j["cols_per_block"] = layout.cols_per_block;
    j["groups"] = {groups.begin()->first, std::next(groups.begin())->first};
    const std::string canonical = "matrix-test|rows=" + std::to_string(layout.rows) + "|cols=" + std::to_string(layout.cols) +
                                  "|c=" + std::to_string(layout.cols_per_block) + "|" + o.kernel.canonical();
    RunManifest m = make_manifest(command, fnv1a(file_bytes(o.data_path), fnv1a(canonical)), "none");
    m.finished = utc_timestamp();
    j["manifest"] = m.to_json();
    write_json(out, j);
    return o.exit_on_reject && r.reject ? kExitReject : 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Block independent likelihood ratio tests for high-dimensional two-sample means", "bilt"};
    app.set_version_flag("--version", BILT_VERSION);
    app.require_subcommand(1);

    TestOptions test;
    auto* test_cmd = app.add_subcommand("test", "Test equality of two group means");
    test_cmd->add_option("--method", test.method, "bilt, dlrt or hotelling")->capture_default_str();
    test_cmd->add_option("--block-size,-b", test.block_size, "BILT block size")->capture_default_str();
    test_cmd->add_option("--x", test.x_path, "CSV of group 1 observations");
    test_cmd->add_option("--y", test.y_path, "CSV of group 2 observations");
    test_cmd->add_option("--data", test.data_path, "Single CSV with a 'group' column");
    test.kernel.add_to(test_cmd);
    test_cmd->add_flag("--exit-on-reject", test.exit_on_reject, "Exit with status 2 when the test rejects");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run Monte Carlo campaigns from a config file");
    sim_cmd->add_option("config,--config", sim.config_path, "JSON config file")->required();
    sim_cmd->add_option("--output,-o", sim.output_path, "CSV report path (default: standard output)");
    sim_cmd->add_option("--parallelism,-j", sim.parallelism, "Worker threads")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Seed for every config; overrides BILT_SEED");
    sim_cmd->add_option("--dump-z", sim.dump_z, "Directory for standardized statistics, one file per config");

    PowerOptions pow;
    auto* pow_cmd = app.add_subcommand("power", "Asymptotic power of the level-q test");
    pow_cmd->add_option("--delta", pow.delta, "Per-block noncentralities, comma separated")->delimiter(',');
    pow_cmd->add_option("--delta-sq-norm", pow.delta_sq_norm, "Sum of the block noncentralities");
    pow_cmd->add_option("--K", pow.k, "Number of blocks");
    pow_cmd->add_option("--tau", pow.tau, "Long-run standard deviation tau")->required();
    pow_cmd->add_option("--level", pow.level, "Test level")->capture_default_str();
    pow_cmd->add_option("--sweep-max", pow.sweep_max, "Also tabulate power on [0, max]");
    pow_cmd->add_option("--sweep-steps", pow.sweep_steps, "Points in the sweep")->capture_default_str();

    MatrixOptions mat;
    auto* mat_cmd = app.add_subcommand("matrix-test", "Test matrix-valued observations in long format");
    mat_cmd->add_option("--data", mat.data_path, "CSV: subject_id, group, row_index, col_index, value")->required();
    mat_cmd->add_option("--rows", mat.rows, "Rows per matrix (default: largest row_index)");
    mat_cmd->add_option("--cols-per-block", mat.cols_per_block, "Columns per block")->capture_default_str();
    mat_cmd->add_option("--truncate-cols", mat.truncate_cols, "Keep only the first M columns");
    mat.kernel.add_to(mat_cmd);
    mat_cmd->add_flag("--exit-on-reject", mat.exit_on_reject, "Exit with status 2 when the test rejects");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitError;
    }

    const std::string command = join_command(argc, argv);
    try {
        if (*test_cmd) return cmd_test(test, command, out);
        if (*sim_cmd) return cmd_simulate(sim, command, out, err);
        if (*pow_cmd) return cmd_power(pow, command, out);
        if (*mat_cmd) return cmd_matrix_test(mat, command, out, err);
    } catch (const std::exception& e) {
        err << "error: " << error_kind(e) << ": " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

} // namespace bilt::app
