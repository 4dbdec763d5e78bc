#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "blockggm/graph.hpp"
#include "blockggm/gwishart.hpp"
#include "blockggm/model.hpp"
#include "blockggm/partition.hpp"
#include "blockggm/rng.hpp"

namespace blockggm {

/* Joint state for q condition-specific graphs.  Group 0 is the baseline;
   genealogy indicator g[x][i] = 1 ties node i of group x to the baseline,
   forcing zs[x][i] = zs[0][i] (and hence the same block effect).  Block
   labels are global across groups: beta_star has one entry per label in
   use, and a label is in use iff it appears in the pooled label multiset
   (all baseline labels plus every untied group label). */
struct MultiState {
    std::vector<Graph> graphs;                  // q graphs on p nodes
    std::vector<std::vector<int>> zs;           // q x p global block labels
    std::vector<std::vector<std::uint8_t>> g;   // q x p ties; g[0][i] == 1
    std::vector<double> beta_star;              // one shared effect per label
    Partition c;                                // popularity clusters
    std::vector<double> theta_star;             // indexed by c
    double nu = 1.0;                            // block concentration
    double alpha = 1.0;                         // popularity concentration
    std::vector<Eigen::MatrixXd> zetas;         // q probit latent fields

    MultiState(int q, int p);

    int n_groups() const { return static_cast<int>(graphs.size()); }
    int order() const { return graphs.empty() ? 0 : graphs[0].order(); }
    int n_labels() const { return static_cast<int>(beta_star.size()); }
    double theta(int i) const { return theta_star[c.label(i)]; }

    /* Label counts pooled over the baseline and the untied entries; the
       conditioning sets of the label updates are these counts with at most
       one entry removed. */
    std::vector<int> pooled_counts() const;

    /* p' = p + #untied entries: the number of free labels. */
    int pooled_total() const;

    /* Probit mean for pair (i,j) in group x. */
    double mu(int x, int i, int j) const;
};

/* Structural soundness: baseline all tied, tie implies matching labels,
   labels within range, and every label pooled at least once. */
bool multi_state_consistent(const MultiState& state);

/* Per-step switches so tests can pin any subset of the state. */
struct MultiOptions {
    bool update_graphs = true;
    bool update_latents = true;
    bool update_beta_star = true;
    bool update_theta_star = true;
    bool update_baseline = true;
    bool update_popularity = true;
    bool update_genealogy = true;
    bool update_nu = true;
    bool update_alpha = true;
};

/* Joint chain over q graphs with shared popularity effects and dependent
   block structures.  One sweep runs: per-group single-edge graph moves
   against the G-Wishart marginal, per-group latent refreshes, conjugate
   draws of the shared block and popularity effects (the latter with the
   q-scaled precision), the baseline label scan (tied copies move in
   lockstep), the popularity scan, the genealogy updates, and Escobar-West
   concentration draws with p' free labels for nu and p items for alpha. */
class MultiSampler {
public:
    MultiSampler(const std::vector<DataMatrix>& data,
                 const Hyperparameters& hyper, MultiOptions options = {});

    MultiState& state() { return state_; }
    const MultiState& state() const { return state_; }
    const Hyperparameters& hyper() const { return hyper_; }

    void sweep(Rng& rng);

    /* Draws Omega_x | G_x, Y_x for every group from the conjugate update
       and returns the total log p(Y | Omega). */
    double sample_loglik(Rng& rng, int n_gibbs_sweeps = 10);

    /* Sum over groups of log p(Y_x | G_x). */
    double log_marginal() const;

private:
    void update_graphs(Rng& rng);
    void update_latents(Rng& rng);
    void update_beta_star(Rng& rng);
    void update_theta_star(Rng& rng);
    void update_baseline_labels(Rng& rng);
    void update_popularity_labels(Rng& rng);
    void update_genealogy(Rng& rng, int x, int i);

    /* Moves one label entry (the baseline entry drags its tied copies) to
       `target` (n_labels() means a fresh label seeded with fresh_beta) and
       compacts the label space if the old label left the pooled set. */
    void apply_label_move(bool baseline, int x, int i, int target,
                          double fresh_beta);

    const std::vector<DataMatrix>* data_;
    Hyperparameters hyper_;
    MultiOptions options_;
    MultiState state_;
    std::vector<MarginalWorker> workers_;
};

}  // namespace blockggm
