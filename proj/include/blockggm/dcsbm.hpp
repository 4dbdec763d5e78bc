#pragma once

#include <Eigen/Dense>

#include "blockggm/graph.hpp"
#include "blockggm/gwishart.hpp"
#include "blockggm/model.hpp"
#include "blockggm/partition.hpp"
#include "blockggm/rng.hpp"

namespace blockggm {

/* Full state of the degree-corrected stochastic blockmodel chain.
   params.beta_star is indexed by the block labels of z, params.theta_star by
   the popularity clusters params.c; zeta holds the probit latent variables
   (symmetric, diagonal unused). */
struct DcsbmState {
    Graph graph;
    Partition z;
    BlockParams params;
    double nu = 1.0;
    Eigen::MatrixXd zeta;

    explicit DcsbmState(int p);
};

/* Per-step switches so tests can pin any subset of the state.  Disabled
   steps leave the corresponding coordinates untouched. */
struct DcsbmOptions {
    bool update_graph = true;
    bool update_latents = true;
    bool update_beta_star = true;
    bool update_theta_star = true;
    bool update_blocks = true;
    bool update_popularity = true;
    bool update_nu = true;
    bool update_alpha = true;
};

/* Individual conditional updates (Albert & Chib 1993 latent scheme for the
   probit likelihood; Neal 2000-style collapsed label moves). */
void dcsbm_sample_latents(DcsbmState& state, Rng& rng);
void dcsbm_update_beta_star(DcsbmState& state, const Hyperparameters& hyper,
                            Rng& rng);
void dcsbm_update_theta_star(DcsbmState& state, const Hyperparameters& hyper,
                             Rng& rng);
void dcsbm_update_block_labels(DcsbmState& state, const Hyperparameters& hyper,
                               Rng& rng);
void dcsbm_update_popularity_labels(DcsbmState& state,
                                    const Hyperparameters& hyper, Rng& rng);

/* One chain of the degree-corrected stochastic blockmodel: single-edge
   Metropolis-Hastings on the graph against the G-Wishart marginal
   likelihood, probit latent refresh, conjugate block/popularity effect
   draws, collapsed label scans, and Escobar-West concentration updates. */
class DcsbmSampler {
public:
    DcsbmSampler(const DataMatrix& data, const Hyperparameters& hyper,
                 DcsbmOptions options = {});

    DcsbmState& state() { return state_; }
    const DcsbmState& state() const { return state_; }
    const Hyperparameters& hyper() const { return hyper_; }

    /* Replaces the graph and rebuilds the marginal-likelihood cache. */
    void set_graph(Graph g);

    void sweep(Rng& rng);

    /* Draws Omega | G, Y from the conjugate update of the G-Wishart prior
       and returns log p(Y | Omega); used for likelihood traces and
       harmonic-mean marginal estimates. */
    double sample_loglik(Rng& rng, int n_gibbs_sweeps = 10);

    double log_marginal() const { return worker_.log_ml(); }

private:
    void update_graph(Rng& rng);

    const DataMatrix* data_;
    Hyperparameters hyper_;
    DcsbmOptions options_;
    DcsbmState state_;
    MarginalWorker worker_;
};

}  // namespace blockggm
