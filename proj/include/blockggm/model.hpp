#pragma once

#include <vector>

#include <Eigen/Dense>

#include "blockggm/graph.hpp"
#include "blockggm/partition.hpp"

namespace blockggm {

/* Model hyperparameters shared by the samplers.  Defaults follow the
   reference configuration used throughout the tests. */
struct Hyperparameters {
    double tie_prob = 0.5;    // prior probability that a group effect is tied to baseline
    double s2_beta = 1.0;     // variance of the block-effect base measure
    double s2_theta = 1.0;    // variance of the popularity-effect base measure
    double a_nu = 2.0;        // Gamma(a,b) hyperprior on the block concentration
    double b_nu = 2.0;
    double a_alpha = 2.0;     // Gamma(a,b) hyperprior on the popularity concentration
    double b_alpha = 2.0;
    double a_rho = 1.0;       // Beta(a,b) prior on the between-block edge probability
    double b_rho = 1.0;
    double gwish_df = 3.0;    // G-Wishart degrees of freedom (delta > 2)
    /* G-Wishart rate matrix; empty means identity. */
    Eigen::MatrixXd gwish_rate;

    void validate(int p) const;
};

/* n x p data matrix with the p x p Gram matrix Y'Y cached.  n = 0 is legal
   (prior-only runs); NaN or infinite entries are rejected with their
   position. */
class DataMatrix {
public:
    explicit DataMatrix(Eigen::MatrixXd y);
    static DataMatrix empty(int p);

    int rows() const { return static_cast<int>(y_.rows()); }
    int cols() const { return static_cast<int>(y_.cols()); }
    const Eigen::MatrixXd& values() const { return y_; }
    const Eigen::MatrixXd& gram() const { return yty_; }

private:
    Eigen::MatrixXd y_;
    Eigen::MatrixXd yty_;
};

/* Node-level parameters of the probit edge model: one block effect per
   partition block, one popularity effect per popularity cluster. */
struct BlockParams {
    std::vector<double> beta_star;   // indexed by block label of z
    std::vector<double> theta_star;  // indexed by cluster label of c
    Partition c;                     // popularity cluster assignments
    double alpha = 1.0;              // popularity-cluster concentration

    double theta(int i) const { return theta_star[c.label(i)]; }
};

/* Probit mean for pair (i,j): theta_i + theta_j + beta*_{z_i} [z_i = z_j]. */
double compute_mu(int i, int j, const Partition& z, const BlockParams& params);

/* Edge inclusion probability Phi(mu) and its stable log forms. */
double edge_probability(double mu);
double log_edge_probability(double mu);      // log Phi(mu)
double log_edge_absent(double mu);           // log(1 - Phi(mu))

/* Log density of n i.i.d. N(0, Omega^{-1}) rows:
   -(n p / 2) log(2 pi) + (n/2) log|Omega| - tr(Omega Y'Y)/2.
   Throws numeric_error when Omega is not positive definite. */
double gaussian_loglik(const DataMatrix& data, const Eigen::MatrixXd& omega);

}  // namespace blockggm
