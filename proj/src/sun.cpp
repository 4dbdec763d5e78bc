#include "blockggm/sun.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

SunSampler::SunSampler(const DataMatrix& data, const Hyperparameters& hyper,
                       SunOptions options)
    : hyper_(hyper),
      options_(options),
      state_(data.cols()),
      u_(data.gram()),
      n_(data.rows()) {
    const int p = data.cols();
    hyper_.validate(p);
    if (n_ < p)
        throw input_error("SunSampler: needs n >= p rows for an invertible Gram matrix");
    Eigen::LLT<Eigen::MatrixXd> llt(u_);
    if (llt.info() != Eigen::Success)
        throw input_error("SunSampler: Gram matrix is not positive definite");
    u_inv_ = llt.solve(Eigen::MatrixXd::Identity(p, p));
    delta_ = static_cast<double>(std::max(p, n_));
}

double SunSampler::log_partition_weight(const Partition& z) const {
    const int p = z.size();
    /* |D(z)| factors over blocks: the determinant of each principal
       submatrix of U^{-1}. */
    double logdet_d = 0.0;
    for (int k = 0; k < z.block_count(); ++k) {
        std::vector<int> members;
        for (int i = 0; i < p; ++i)
            if (z.label(i) == k) members.push_back(i);
        const int m = static_cast<int>(members.size());
        Eigen::MatrixXd block(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                block(a, b) = u_inv_(members[a], members[b]);
        Eigen::LLT<Eigen::MatrixXd> llt(block);
        if (llt.info() != Eigen::Success) return kNegInf;
        for (int a = 0; a < m; ++a)
            logdet_d += 2.0 * std::log(llt.matrixL()(a, a));
    }

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (z.same_block(i, j)) d(i, j) = u_inv_(i, j);
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p) + d * u_;
    /* D(z) and U are positive definite, so det(I + D U) > 0. */
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    double logdet_m = 0.0;
    for (int i = 0; i < p; ++i)
        logdet_m += std::log(std::fabs(lu.matrixLU()(i, i)));

    return 0.5 * n_ * logdet_d - 0.5 * (n_ + delta_) * logdet_m;
}

void SunSampler::sweep(Rng& rng) {
    const int p = state_.z.size();
    if (options_.update_z) {
        for (int i = 0; i < p; ++i) {
            std::vector<int> counts = state_.z.block_sizes();
            const int old = state_.z.label(i);
            --counts[old];
            const int n_blocks = static_cast<int>(counts.size());

            const std::vector<double> pred = crp_predictive(counts, state_.nu);
            std::vector<double> logw(pred.size());
            /* Evaluate every candidate on a scratch copy so rejected labels
               leave the chain state untouched. */
            Partition cand = state_.z;
            for (int k = 0; k <= n_blocks; ++k) {
                if (pred[k] == 0.0) {
                    logw[k] = kNegInf;
                    continue;
                }
                /* Moving a lone member to a fresh block recreates the same
                   set partition. */
                const bool stays = k == old || (k == n_blocks && counts[old] == 0);
                if (stays) {
                    logw[k] = std::log(pred[k]) + log_partition_weight(state_.z);
                    continue;
                }
                cand.assign(i, k == n_blocks ? cand.block_count() : k);
                logw[k] = std::log(pred[k]) + log_partition_weight(cand);
                cand = state_.z;
            }
            const int pick = sample_categorical_log(
                rng, logw.data(), static_cast<int>(logw.size()));
            if (pick == old || (pick == n_blocks && counts[old] == 0)) continue;
            state_.z.assign(i, pick == n_blocks ? state_.z.block_count() : pick);
        }
    }
    if (options_.update_nu)
        state_.nu = update_concentration(rng, state_.nu, state_.z.block_count(),
                                         p, hyper_.a_nu, hyper_.b_nu);
}

}  // namespace blockggm
