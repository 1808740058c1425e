#include "bilt/covgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "bilt/error.hpp"
#include "linalg.hpp"

namespace bilt {
namespace {

std::string format_rho(double rho)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", rho);
    return buf;
}

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

Eigen::MatrixXd base_correlation(const CovarianceModel& model, int p)
{
    using Kind = CovarianceModel::Kind;
    if (model.kind == Kind::Custom) {
        if (model.custom.rows() != p || model.custom.cols() != p) {
            throw ShapeMismatch("custom covariance is " + std::to_string(model.custom.rows()) + "x" +
                                std::to_string(model.custom.cols()) + ", expected " + std::to_string(p) + "x" +
                                std::to_string(p));
        }
        return model.custom;
    }
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) {
            if (i == j) continue;
            const int gap = std::abs(i - j);
            switch (model.kind) {
            case Kind::Ar: r(i, j) = std::pow(model.rho, gap); break;
            case Kind::BlockDiag:
                if (i / model.width == j / model.width) r(i, j) = model.rho;
                break;
            case Kind::Band:
                if (gap <= model.width) r(i, j) = model.rho;
                break;
            default: break;
            }
        }
    }
    return r;
}

Eigen::VectorXd draw_hetero_variances(int p, PhiloxStream& rng)
{
    std::normal_distribution<double> normal;
    Eigen::VectorXd d(p);
    for (int i = 0; i < p; ++i) {
        double chi2 = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double z = normal(rng);
            chi2 += z * z;
        }
        d[i] = chi2 / 5.0;
    }
    return d;
}

int matrix_bandwidth(const Eigen::MatrixXd& m)
{
    int w = 0;
    for (int j = 0; j < m.cols(); ++j) {
        for (int i = j + 1 + w; i < m.rows(); ++i) {
            if (m(i, j) != 0.0 || m(j, i) != 0.0) w = i - j;
        }
    }
    return w;
}

} // namespace

CovarianceModel CovarianceModel::ind()
{
    return {};
}

CovarianceModel CovarianceModel::ar(double rho)
{
    CovarianceModel m;
    m.kind = Kind::Ar;
    m.rho = rho;
    return m;
}

CovarianceModel CovarianceModel::block_diag(double rho, int block)
{
    CovarianceModel m;
    m.kind = Kind::BlockDiag;
    m.rho = rho;
    m.width = block;
    return m;
}

CovarianceModel CovarianceModel::band(double rho, int bandwidth)
{
    CovarianceModel m;
    m.kind = Kind::Band;
    m.rho = rho;
    m.width = bandwidth;
    return m;
}

CovarianceModel CovarianceModel::from_matrix(Eigen::MatrixXd sigma)
{
    CovarianceModel m;
    m.kind = Kind::Custom;
    m.custom = std::move(sigma);
    return m;
}

void CovarianceModel::validate() const
{
    switch (kind) {
    case Kind::Ind: break;
    case Kind::Ar:
        if (!(std::abs(rho) < 1.0)) throw InvalidArgument("AR model needs |rho| < 1");
        break;
    case Kind::BlockDiag:
        if (width < 1) throw InvalidArgument("block-diagonal model needs block size >= 1");
        if (!(rho < 1.0) || (width > 1 && !(rho > -1.0 / (width - 1)))) {
            throw InvalidArgument("block-diagonal model needs rho in (-1/(blk-1), 1)");
        }
        break;
    case Kind::Band:
        if (width < 0) throw InvalidArgument("band model needs bandwidth >= 0");
        if (!(std::abs(rho) < 1.0)) throw InvalidArgument("band model needs |rho| < 1");
        break;
    case Kind::Custom: {
        if (custom.rows() != custom.cols() || custom.rows() == 0) {
            throw InvalidArgument("custom covariance must be a nonempty square matrix");
        }
        if (!custom.allFinite()) throw InvalidArgument("custom covariance has non-finite entries");
        const double scale = custom.cwiseAbs().maxCoeff();
        if ((custom - custom.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw InvalidArgument("custom covariance is not symmetric");
        }
        break;
    }
    }
}

std::string CovarianceModel::label() const
{
    std::string base;
    switch (kind) {
    case Kind::Ind: base = "IND"; break;
    case Kind::Ar: base = "AR_" + format_rho(rho); break;
    case Kind::BlockDiag: base = width == 4 ? "BD_" + format_rho(rho) : "BD" + std::to_string(width) + "_" + format_rho(rho); break;
    case Kind::Band: base = width == 4 ? "BAND_" + format_rho(rho) : "BAND" + std::to_string(width) + "_" + format_rho(rho); break;
    case Kind::Custom: base = "CUSTOM"; break;
    }
    return hetero_diag ? base + "_HET" : base;
}

CovarianceModel CovarianceModel::parse(const std::string& label)
{
    std::string s = upper(label);
    bool hetero = false;
    if (s.size() > 4 && s.ends_with("_HET")) {
        hetero = true;
        s.resize(s.size() - 4);
    }
    CovarianceModel m;
    const auto split = s.find('_');
    const std::string head = s.substr(0, split);
    auto parse_rho = [&]() {
        if (split == std::string::npos) throw InvalidArgument("covariance label '" + label + "' lacks a rho value");
        try {
            std::size_t used = 0;
            const std::string tail = s.substr(split + 1);
            const double v = std::stod(tail, &used);
            if (used != tail.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw InvalidArgument("covariance label '" + label + "' has a malformed rho value");
        }
    };
    auto parse_width = [&](std::string_view prefix, int fallback) {
        const std::string digits = head.substr(prefix.size());
        if (digits.empty()) return fallback;
        if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw InvalidArgument("unknown covariance label '" + label + "'");
        }
        return std::stoi(digits);
    };

    if (head == "IND" && split == std::string::npos) {
        m = ind();
    } else if (head == "AR") {
        m = ar(parse_rho());
    } else if (head.starts_with("BAND")) {
        m = band(parse_rho(), parse_width("BAND", 4));
    } else if (head.starts_with("BD")) {
        m = block_diag(parse_rho(), parse_width("BD", 4));
    } else {
        throw InvalidArgument("unknown covariance label '" + label + "' (expected IND, AR_r, BD_r or BAND_r)");
    }
    m.hetero_diag = hetero;
    m.validate();
    return m;
}

CholeskyFactor CholeskyFactor::from_sigma(const Eigen::MatrixXd& sigma)
{
    const int p = static_cast<int>(sigma.rows());
    if (p == 0 || sigma.cols() != p) throw InvalidArgument("covariance must be a nonempty square matrix");

    CholeskyFactor f;
    f.p_ = p;
    const int w = matrix_bandwidth(sigma);
    if (4 * w >= p) {
        const auto llt = detail::checked_cholesky(sigma);
        if (!llt) throw NotPositiveDefinite("covariance matrix is not positive definite");
        f.storage_ = Storage::Dense;
        f.bandwidth_ = p - 1;
        f.dense_ = llt->matrixL();
        return f;
    }

    // Band Cholesky: the factor of a band matrix keeps the same band.
    const double max_diag = sigma.diagonal().cwiseAbs().maxCoeff();
    f.storage_ = Storage::Banded;
    f.bandwidth_ = w;
    f.band_.setZero(p, w + 1);
    auto at = [&](int i, int j) -> double& { return f.band_(i, j - i + w); };
    for (int i = 0; i < p; ++i) {
        const int lo = std::max(0, i - w);
        for (int j = lo; j <= i; ++j) {
            double s = sigma(i, j);
            for (int k = std::max(lo, j - w); k < j; ++k) s -= at(i, k) * at(j, k);
            if (j == i) {
                if (!(s > detail::kPivotTolerance * max_diag)) {
                    throw NotPositiveDefinite("covariance matrix is not positive definite (pivot " +
                                              std::to_string(i) + ")");
                }
                at(i, i) = std::sqrt(s);
            } else {
                at(i, j) = s / at(j, j);
            }
        }
    }
    return f;
}

CholeskyFactor CholeskyFactor::autoregressive(int p, double rho, Eigen::VectorXd scale)
{
    if (p < 1) throw InvalidArgument("dimension must be positive");
    if (!(std::abs(rho) < 1.0)) throw NotPositiveDefinite("AR correlation needs |rho| < 1");
    if (scale.size() != p) throw ShapeMismatch("AR factor scale has wrong length");
    CholeskyFactor f;
    f.storage_ = Storage::Ar1;
    f.p_ = p;
    f.bandwidth_ = p - 1;
    f.rho_ = rho;
    f.scale_ = std::move(scale);
    return f;
}

void CholeskyFactor::apply(const double* z, double* out) const
{
    switch (storage_) {
    case Storage::Dense:
        Eigen::Map<Eigen::VectorXd>(out, p_).noalias() =
            dense_.triangularView<Eigen::Lower>() * Eigen::Map<const Eigen::VectorXd>(z, p_);
        return;
    case Storage::Banded:
        for (int i = 0; i < p_; ++i) {
            const int lo = std::max(0, i - bandwidth_);
            double acc = 0.0;
            for (int j = lo; j <= i; ++j) acc += band_(i, j - i + bandwidth_) * z[j];
            out[i] = acc;
        }
        return;
    case Storage::Ar1: {
        const double innovation = std::sqrt(1.0 - rho_ * rho_);
        double state = z[0];
        out[0] = scale_[0] * state;
        for (int i = 1; i < p_; ++i) {
            state = rho_ * state + innovation * z[i];
            out[i] = scale_[i] * state;
        }
        return;
    }
    }
}

Eigen::MatrixXd CholeskyFactor::dense() const
{
    Eigen::MatrixXd l(p_, p_);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p_);
    Eigen::VectorXd col(p_);
    for (int j = 0; j < p_; ++j) {
        e[j] = 1.0;
        apply(e.data(), col.data());
        l.col(j) = col;
        e[j] = 0.0;
    }
    return l;
}

Eigen::MatrixXd realize_sigma(const CovarianceModel& model, int p, PhiloxStream& rng)
{
    return realize_covariance(model, p, rng).sigma;
}

RealizedCovariance realize_covariance(const CovarianceModel& model, int p, PhiloxStream& rng)
{
    if (p < 1) throw InvalidArgument("dimension must be positive");
    model.validate();

    Eigen::MatrixXd sigma = base_correlation(model, p);
    Eigen::VectorXd sd = Eigen::VectorXd::Ones(p);
    if (model.hetero_diag) {
        sd = draw_hetero_variances(p, rng).cwiseSqrt();
        sigma = sd.asDiagonal() * sigma * sd.asDiagonal();
    }

    if (model.kind == CovarianceModel::Kind::Ar) {
        auto factor = CholeskyFactor::autoregressive(p, model.rho, std::move(sd));
        return {std::move(sigma), std::move(factor)};
    }
    auto factor = CholeskyFactor::from_sigma(sigma);
    return {std::move(sigma), std::move(factor)};
}

Eigen::MatrixXd sample_gaussian(const Eigen::VectorXd& mean, const CholeskyFactor& factor, int n, PhiloxStream& rng)
{
    const int p = factor.dim();
    if (mean.size() != p) throw ShapeMismatch("mean length does not match the covariance factor");
    if (n < 0) throw InvalidArgument("sample size must be nonnegative");

    std::normal_distribution<double> normal;
    Eigen::MatrixXd out(n, p);
    Eigen::VectorXd z(p);
    Eigen::VectorXd row(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = normal(rng);
        factor.apply(z.data(), row.data());
        out.row(i) = (row + mean).transpose();
    }
    return out;
}

SignalSpec SignalSpec::sign_flip(double delta)
{
    return {Kind::SignFlip, delta, 1.0};
}

SignalSpec SignalSpec::sparse_sign_flip(double delta, double prop)
{
    return {Kind::SparseSignFlip, delta, prop};
}

void SignalSpec::validate() const
{
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("signal delta must be finite and >= 0");
    if (!(prop >= 0.0 && prop <= 1.0)) throw InvalidArgument("non-null proportion must lie in [0, 1]");
}

Eigen::VectorXd make_mu2(const SignalSpec& spec, int p, PhiloxStream& rng)
{
    if (p < 1) throw InvalidArgument("dimension must be positive");
    spec.validate();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    if (spec.delta == 0.0) return mu;

    const double magnitude = spec.delta / std::sqrt(static_cast<double>(p));
    auto signed_value = [&]() { return (rng() >> 63) != 0 ? magnitude : -magnitude; };

    if (spec.kind == SignalSpec::Kind::SignFlip) {
        for (int j = 0; j < p; ++j) mu[j] = signed_value();
        return mu;
    }

    const auto support = static_cast<int>(std::llround(spec.prop * p));
    std::vector<int> index(static_cast<std::size_t>(p));
    std::iota(index.begin(), index.end(), 0);
    for (int i = 0; i < support; ++i) {
        std::uniform_int_distribution<int> pick(i, p - 1);
        std::swap(index[i], index[pick(rng)]);
        mu[index[i]] = signed_value();
    }
    return mu;
}

} // namespace bilt
