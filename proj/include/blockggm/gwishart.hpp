#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blockggm/graph.hpp"
#include "blockggm/model.hpp"
#include "blockggm/rng.hpp"

namespace blockggm {

/* Parameters of the G-Wishart law with density proportional to
   |K|^{(df-2)/2} exp(-tr(rate K)/2) over precision matrices K that are
   positive definite with K_ij = 0 for every non-edge (i,j). */
struct GWishartParams {
    double df = 3.0;            // must exceed 2
    Eigen::MatrixXd rate;       // empty means identity
    int completion_max_sweeps = 5000;
    /* Relative residual demanded of the completion fixed point (both
       constraint sets).  1e-6 keeps the Laplace value accurate to ~1e-7
       while converging several times faster than tighter settings; the
       approximation error of the Laplace method itself (~1e-1) dwarfs it. */
    double completion_tol = 1e-6;
};

struct LogNormConst {
    double value = 0.0;
    enum class Method { exact_complete, laplace } method = Method::laplace;
};

/* Closed-form log normalizing constant for the complete graph:
   ((df+p-1) p / 2) log 2 + log Gamma_p((df+p-1)/2) - ((df+p-1)/2) log|rate|. */
double log_norm_complete(int p, const GWishartParams& params);

/* Mode of the density over the constrained cone: K_hat with
   (df-2) K_hat^{-1} matching the rate matrix on diagonal and edge positions
   and K_hat zero elsewhere.  Found by cyclic completion of rate/(df-2)
   (Lenkoski, 2013); throws numeric_error if the iteration fails to meet the
   residual tolerance within the sweep cap. */
Eigen::MatrixXd gwishart_mode(const Graph& g, const GWishartParams& params);

/* Laplace approximation to the log normalizing constant with a diagonal
   Hessian.  Two regimes:

   - diagonal rate matrix: the expansion is carried out in the triangular
     (Cholesky) parameterization of K, where the mode has closed form (all
     free off-diagonal entries vanish) and the approximation error on a
     complete graph is exactly the Stirling error of the multivariate gamma
     function (about 0.055 for p=1 at df=3, growing slowly with p);

   - general rate matrix: the expansion is carried out at the constrained
     precision-space mode (Moghaddam et al., 2009), whose accuracy improves
     with the degrees of freedom and is intended for data-updated parameters
     where df is large.

   Both regimes factorize exactly over disconnected components. */
LogNormConst log_norm_laplace(const Graph& g, const GWishartParams& params);

/* Dispatch: exact closed form when the graph is complete, otherwise the
   Laplace approximation. */
LogNormConst log_norm(const Graph& g, const GWishartParams& params);

/* log p(Y | G) under Y rows i.i.d. N(0, K^{-1}), K ~ GWishart(df, rate):
   the ratio of posterior (df+n, rate + Y'Y) to prior normalizing constants
   minus (n p / 2) log(2 pi).  Exactly zero when n = 0. */
double log_marginal_likelihood(const DataMatrix& data, const Graph& g,
                               const GWishartParams& prior);

/* Draw from the G-Wishart law by block Gibbs over columns, initialized at
   the constrained mode.  Every draw has exact zeros on non-edges. */
Eigen::MatrixXd sample_gwishart(Rng& rng, const Graph& g,
                                const GWishartParams& params,
                                int n_sweeps = 20);

/* One Metropolis-Hastings toggle of edge (i,j): accepts with probability
   min{1, exp(dlog p(Y|G) + s * prior_log_odds)} where s is +1 when adding
   and -1 when removing.  Returns whether the flip was accepted. */
bool edge_flip_update(Rng& rng, Graph& g, int i, int j, double prior_log_odds,
                      const DataMatrix& data, const GWishartParams& prior);

/* Draws Omega | G, Y from the conjugate posterior update (df + n,
   rate + Y'Y) and returns log p(Y | Omega); used for likelihood traces and
   harmonic-mean marginal estimates. */
double posterior_loglik_draw(Rng& rng, const DataMatrix& data, const Graph& g,
                             const GWishartParams& prior, int n_sweeps = 10);

/* Incremental marginal-likelihood evaluator used inside the samplers.
   Keeps the completed covariances of the current graph so that proposals
   differing by a few edges re-converge in a handful of sweeps instead of
   from scratch.  propose() leaves the candidate pending until accept() or
   reject(); values agree with log_marginal_likelihood up to completion
   tolerance. */
class MarginalWorker {
public:
    MarginalWorker(const DataMatrix& data, Graph g, const GWishartParams& prior);

    const Graph& graph() const { return g_; }
    double log_ml() const { return cur_; }

    double propose(const std::vector<std::pair<int, int>>& toggles);
    void accept();
    void reject();

    /* Replace the graph outright (used after externally decided moves). */
    void reset_graph(Graph g);

private:
    double evaluate(const Graph& g, Eigen::MatrixXd* w_post_io,
                    Eigen::MatrixXd* w_prior_io) const;

    const DataMatrix* data_;
    GWishartParams prior_;
    GWishartParams post_;
    bool prior_diag_ = true;
    bool trivial_ = false;  // n == 0: marginal ratio is identically zero
    double log2pi_term_ = 0.0;

    Graph g_;
    Eigen::MatrixXd w_post_, w_prior_;
    double cur_ = 0.0;

    bool pending_ = false;
    std::vector<std::pair<int, int>> pending_toggles_;
    Eigen::MatrixXd w_post_cand_, w_prior_cand_;
    double cand_ = 0.0;
};

}  // namespace blockggm
