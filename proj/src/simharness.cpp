#include "bilt/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <cmath>
#include <thread>

#include "bilt/error.hpp"
#include "bilt/specfun.hpp"

namespace bilt {

BlockPartition SimulationConfig::effective_partition() const
{
    if (partition) return *partition;
    return BlockPartition::fixed(p, block_size);
}

void SimulationConfig::validate() const
{
    if (n1 < 2) throw InvalidArgument("n1: must be at least 2");
    if (n2 < 2) throw InvalidArgument("n2: must be at least 2");
    if (p < 1) throw InvalidArgument("p: must be positive");
    if (!partition && block_size < 1) throw InvalidArgument("block_size: must be positive");
    if (reps < 1) throw InvalidArgument("reps: must be at least 1");
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level: must lie in (0, 1)");
    if (kernel.bandwidth < 1) throw InvalidArgument("kernel.bandwidth: must be at least 1");
    const BlockPartition part = effective_partition();
    if (part.total() != p) throw InvalidArgument("partition: covers " + std::to_string(part.total()) + " of p = " + std::to_string(p));
    if (n1 + n2 < part.max_size() + 3) {
        throw InvalidArgument("n1 + n2: must be at least the largest block size + 3");
    }
    try {
        model.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("model: ") + e.what());
    }
    try {
        signal.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("signal: ") + e.what());
    }
}

namespace {

SimulationConfig validated(SimulationConfig config)
{
    config.validate();
    return config;
}

RealizedCovariance realize_for(const SimulationConfig& config)
{
    PhiloxStream stream(config.seed, kCovarianceStream);
    return realize_covariance(config.model, config.p, stream);
}

} // namespace

Campaign::Campaign(SimulationConfig config)
    : config_(validated(std::move(config))),
      partition_(config_.effective_partition()),
      covariance_(realize_for(config_))
{
    if (config_.fixed_mu2) {
        PhiloxStream stream(config_.seed, kFixedSignalStream);
        fixed_mu2_ = make_mu2(config_.signal, config_.p, stream);
    }
}

TwoSampleData Campaign::replicate_data(int rep_index) const
{
    PhiloxStream stream(config_.seed, static_cast<std::uint64_t>(rep_index));
    const Eigen::VectorXd mu2 = fixed_mu2_ ? *fixed_mu2_ : make_mu2(config_.signal, config_.p, stream);
    const Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(config_.p);
    Eigen::MatrixXd x = sample_gaussian(mu1, covariance_.factor, config_.n1, stream);
    Eigen::MatrixXd y = sample_gaussian(mu2, covariance_.factor, config_.n2, stream);
    return TwoSampleData(std::move(x), std::move(y));
}

ReplicationOutcome Campaign::replicate(int rep_index) const
{
    try {
        const BiltResult r = bilt_test(replicate_data(rep_index), partition_, config_.kernel, config_.level);
        return {r.z, r.p_value, r.reject, r.tau_floored};
    } catch (const ReplicationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ReplicationError(rep_index, e.what());
    }
}

ReplicationOutcome run_replication(const SimulationConfig& config, int rep_index)
{
    return Campaign(config).replicate(rep_index);
}

SimulationReport run_campaign(const SimulationConfig& config, int parallelism)
{
    if (parallelism < 1) throw InvalidArgument("parallelism must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const Campaign campaign(config);
    const int reps = campaign.config().reps;

    std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(reps));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < reps; i = next.fetch_add(1)) {
            try {
                outcomes[i] = campaign.replicate(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int threads = std::min(parallelism, reps);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }

    SimulationReport report;
    report.config = campaign.config();
    report.reps = reps;
    for (const auto& o : outcomes) {
        report.rejections += o.reject ? 1 : 0;
        report.tau_floored += o.tau_floored ? 1 : 0;
    }
    report.rejection_rate = static_cast<double>(report.rejections) / reps;
    report.standard_error = std::sqrt(report.rejection_rate * (1.0 - report.rejection_rate) / reps);
    if (report.config.keep_z) {
        report.z_samples.reserve(outcomes.size());
        for (const auto& o : outcomes) report.z_samples.push_back(o.z);
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<SweepEntry> sweep(const std::vector<SimulationConfig>& configs, int parallelism)
{
    if (configs.empty()) throw InvalidArgument("sweep needs at least one configuration");
    std::vector<SweepEntry> out;
    out.reserve(configs.size());
    for (const auto& c : configs) {
        SweepEntry entry;
        try {
            entry.report = run_campaign(c, parallelism);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<double> null_distribution_sample(const SimulationConfig& config, int reps, int parallelism)
{
    if (!config.signal.is_null()) throw InvalidArgument("null_distribution_sample needs a null signal (delta = 0)");
    SimulationConfig c = config;
    c.reps = reps;
    c.keep_z = true;
    return run_campaign(c, parallelism).z_samples;
}

double ks_distance_to_normal(std::vector<double> samples)
{
    if (samples.empty()) throw InvalidArgument("KS distance needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = specfun::normal_cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

} // namespace bilt
