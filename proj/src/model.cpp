#include "blockggm/model.hpp"

#include <cmath>
#include <string>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

void Hyperparameters::validate(int p) const {
    if (tie_prob < 0.0 || tie_prob > 1.0)
        throw input_error("hyperparameters: tie probability must lie in [0,1]");
    if (s2_beta <= 0.0 || s2_theta <= 0.0)
        throw input_error("hyperparameters: effect variances must be positive");
    if (a_nu <= 0.0 || b_nu <= 0.0 || a_alpha <= 0.0 || b_alpha <= 0.0)
        throw input_error("hyperparameters: gamma hyperparameters must be positive");
    if (a_rho <= 0.0 || b_rho <= 0.0)
        throw input_error("hyperparameters: beta hyperparameters must be positive");
    if (gwish_df <= 2.0)
        throw input_error("hyperparameters: G-Wishart degrees of freedom must exceed 2");
    if (gwish_rate.size() != 0) {
        if (gwish_rate.rows() != p || gwish_rate.cols() != p)
            throw input_error("hyperparameters: G-Wishart rate matrix must be " +
                              std::to_string(p) + "x" + std::to_string(p));
        if (!gwish_rate.isApprox(gwish_rate.transpose(), 1e-12))
            throw input_error("hyperparameters: G-Wishart rate matrix must be symmetric");
    }
}

DataMatrix::DataMatrix(Eigen::MatrixXd y) : y_(std::move(y)) {
    if (y_.cols() < 1) throw input_error("data: need at least one column");
    for (int i = 0; i < y_.rows(); ++i)
        for (int j = 0; j < y_.cols(); ++j)
            if (!std::isfinite(y_(i, j)))
                throw input_error("data: non-finite value at row " +
                                  std::to_string(i + 1) + ", column " +
                                  std::to_string(j + 1));
    yty_ = y_.transpose() * y_;
    /* exact symmetry so downstream symmetry checks never trip on round-off */
    yty_ = 0.5 * (yty_ + yty_.transpose()).eval();
}

DataMatrix DataMatrix::empty(int p) {
    return DataMatrix(Eigen::MatrixXd(0, p));
}

double compute_mu(int i, int j, const Partition& z, const BlockParams& params) {
    double mu = params.theta(i) + params.theta(j);
    if (z.same_block(i, j)) mu += params.beta_star[z.label(i)];
    return mu;
}

double edge_probability(double mu) { return norm_cdf(mu); }

double log_edge_probability(double mu) { return log_norm_cdf(mu); }

double log_edge_absent(double mu) { return log_norm_cdf(-mu); }

double gaussian_loglik(const DataMatrix& data, const Eigen::MatrixXd& omega) {
    const int p = data.cols();
    const int n = data.rows();
    if (omega.rows() != p || omega.cols() != p)
        throw input_error("gaussian_loglik: precision matrix must be " +
                          std::to_string(p) + "x" + std::to_string(p));
    if (n == 0) return 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    if (llt.info() != Eigen::Success)
        throw numeric_error("gaussian_loglik: precision matrix is not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < p; ++i) logdet += std::log(llt.matrixL()(i, i));
    logdet *= 2.0;
    const double trace = (omega.array() * data.gram().array()).sum();
    return -0.5 * n * p * kLogTwoPi + 0.5 * n * logdet - 0.5 * trace;
}

}  // namespace blockggm
