#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilt/rng.hpp"

namespace bilt {

/// Generative description of a population covariance matrix.
struct CovarianceModel {
    enum class Kind { Ind, Ar, BlockDiag, Band, Custom };

    Kind kind = Kind::Ind;
    double rho = 0.0;
    int width = 4; ///< block size for BlockDiag, bandwidth for Band
    Eigen::MatrixXd custom;
    /// Rescale the diagonal by independent chi^2_5 / 5 draws, keeping the
    /// base model as the correlation matrix.
    bool hetero_diag = false;

    static CovarianceModel ind();
    static CovarianceModel ar(double rho);
    static CovarianceModel block_diag(double rho, int block = 4);
    static CovarianceModel band(double rho, int bandwidth = 4);
    static CovarianceModel from_matrix(Eigen::MatrixXd sigma);

    /// Checks parameter ranges; throws InvalidArgument.
    void validate() const;

    /// Short label such as "IND", "AR_0.6", "BD_0.3", "BAND_0.3", "CUSTOM",
    /// with an "_HET" suffix for heteroscedastic diagonals.
    std::string label() const;

    /// Inverse of label() for the built-in kinds.
    static CovarianceModel parse(const std::string& label);
};

/// Lower-triangular L with L L' = Sigma, stored in the cheapest exact form:
/// dense, banded, or the first-order autoregressive recursion.
class CholeskyFactor {
public:
    /// Dense Cholesky of an SPD matrix, compressed to band storage when the
    /// factor has exact zeros outside a narrow band.  Throws
    /// NotPositiveDefinite.
    static CholeskyFactor from_sigma(const Eigen::MatrixXd& sigma);

    /// Closed-form factor of the AR(1) correlation rho^{|i-j|}, scaled by
    /// `scale` (the standard deviations) row-wise.
    static CholeskyFactor autoregressive(int p, double rho, Eigen::VectorXd scale);

    int dim() const { return p_; }

    /// Band half-width of L (p - 1 for dense storage).
    int bandwidth() const { return bandwidth_; }

    /// out = L z.
    void apply(const double* z, double* out) const;

    Eigen::MatrixXd dense() const;

private:
    enum class Storage { Dense, Banded, Ar1 };

    Storage storage_ = Storage::Dense;
    int p_ = 0;
    int bandwidth_ = 0;
    Eigen::MatrixXd dense_;
    /// Banded rows: band_(i, j) holds L(i, i - bandwidth + j).
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> band_;
    double rho_ = 0.0;
    Eigen::VectorXd scale_;
};

struct RealizedCovariance {
    Eigen::MatrixXd sigma;
    CholeskyFactor factor;
};

/// Dense Sigma for the model.  Heteroscedastic diagonals draw chi^2_5/5
/// scales from `rng`.  Throws NotPositiveDefinite when the realized matrix
/// does not factor.
Eigen::MatrixXd realize_sigma(const CovarianceModel& model, int p, PhiloxStream& rng);

/// realize_sigma plus the matching factor.
RealizedCovariance realize_covariance(const CovarianceModel& model, int p, PhiloxStream& rng);

/// n rows drawn i.i.d. from N_p(mean, L L').
Eigen::MatrixXd sample_gaussian(const Eigen::VectorXd& mean, const CholeskyFactor& factor, int n,
                                PhiloxStream& rng);

/// Mean-vector generation scheme for the second group.
struct SignalSpec {
    enum class Kind { SignFlip, SparseSignFlip };

    Kind kind = Kind::SignFlip;
    double delta = 0.0;
    double prop = 1.0;

    static SignalSpec sign_flip(double delta);
    static SignalSpec sparse_sign_flip(double delta, double prop);

    void validate() const;
    bool is_null() const { return delta == 0.0 || (kind == Kind::SparseSignFlip && prop == 0.0); }
};

/// Random second-group mean: entries +-delta/sqrt(p) with equal probability
/// on a support of size round(prop * p) (all of 1..p for SignFlip).
Eigen::VectorXd make_mu2(const SignalSpec& spec, int p, PhiloxStream& rng);

} // namespace bilt
