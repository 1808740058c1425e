#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bilt/bilt_test.hpp"
#include "bilt/error.hpp"
#include "bilt/covgen.hpp"

namespace bilt {

/// One Monte Carlo experiment.
struct SimulationConfig {
    std::string experiment = "default";
    int n1 = 50;
    int n2 = 50;
    int p = 500;
    CovarianceModel model;
    SignalSpec signal;
    int block_size = 2;
    /// Explicit partition; overrides block_size when set.
    std::optional<BlockPartition> partition;
    KernelSpec kernel;
    int reps = 3000;
    double level = 0.05;
    std::uint64_t seed = 20240601;
    /// Draw mu2 once per campaign instead of once per replication.
    bool fixed_mu2 = false;
    /// Keep every standardized statistic in the report.
    bool keep_z = false;

    BlockPartition effective_partition() const;

    /// Throws InvalidArgument describing the first offending field.
    void validate() const;
};

struct ReplicationOutcome {
    double z = 0.0;
    double p_value = 1.0;
    bool reject = false;
    bool tau_floored = false;
};

struct SimulationReport {
    SimulationConfig config;
    int reps = 0;
    int rejections = 0;
    double rejection_rate = 0.0;
    double standard_error = 0.0;
    int tau_floored = 0;
    std::vector<double> z_samples;
    double wall_time = 0.0;
};

/// Replication i failed; the message names the index.
class ReplicationError : public Error {
public:
    ReplicationError(int rep_index, const std::string& what)
        : Error("replication " + std::to_string(rep_index) + ": " + what), rep_index_(rep_index) {}

    int rep_index() const noexcept { return rep_index_; }

private:
    int rep_index_;
};

/// Per-configuration state shared read-only by all replications: the
/// realized covariance factor, the partition, and an optional fixed mu2.
class Campaign {
public:
    explicit Campaign(SimulationConfig config);

    const SimulationConfig& config() const { return config_; }
    const Eigen::MatrixXd& sigma() const { return covariance_.sigma; }
    const CholeskyFactor& factor() const { return covariance_.factor; }

    /// Fully determined by (seed, rep_index); thread-safe.
    ReplicationOutcome replicate(int rep_index) const;

    /// Data of one replication, as seen by replicate().
    TwoSampleData replicate_data(int rep_index) const;

private:
    SimulationConfig config_;
    BlockPartition partition_;
    RealizedCovariance covariance_;
    std::optional<Eigen::VectorXd> fixed_mu2_;
};

ReplicationOutcome run_replication(const SimulationConfig& config, int rep_index);

/// Runs config.reps replications on `parallelism` threads.  The payload is
/// identical for every parallelism.  Throws ReplicationError for the
/// lowest failing replication index.
SimulationReport run_campaign(const SimulationConfig& config, int parallelism = 1);

struct SweepEntry {
    std::optional<SimulationReport> report;
    std::string error;

    bool ok() const { return report.has_value(); }
};

/// One entry per config, in order.  A failing config records its error and
/// does not abort the others.
std::vector<SweepEntry> sweep(const std::vector<SimulationConfig>& configs, int parallelism = 1);

/// Standardized statistics of `reps` null replications.  Requires a null
/// signal.
std::vector<double> null_distribution_sample(const SimulationConfig& config, int reps, int parallelism = 1);

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and N(0, 1).
double ks_distance_to_normal(std::vector<double> samples);

} // namespace bilt
