#pragma once

#include <vector>

#include "blockggm/rng.hpp"

namespace blockggm {

/* Set partition of items 0..p-1 into blocks labelled 0..K-1.  Labels are
   kept contiguous at all times: when a block empties, the highest label is
   swapped into the vacated slot.  Because samplers attach per-block
   parameter vectors, every mutation reports which label (if any) was
   relocated so companion arrays can mirror the move. */
class Partition {
public:
    /* Result of assign(), describing what a companion per-block array must
       do to stay aligned, in this order: if `opened`, append an entry for
       the new block; then, if `vacated >= 0`, the block with that label
       emptied — copy entry `moved_from` onto `vacated` (when moved_from >= 0)
       and drop the last entry. */
    struct Mutation {
        int vacated = -1;
        int moved_from = -1;
        bool opened = false;
    };

    static Partition singletons(int p);
    static Partition single_block(int p);
    /* Validates and relabels arbitrary input labels into canonical
       (first-appearance) order. */
    static Partition from_labels(const std::vector<int>& labels);

    int size() const { return static_cast<int>(labels_.size()); }
    int block_count() const { return static_cast<int>(counts_.size()); }
    int label(int i) const { return labels_[i]; }
    int block_size(int k) const { return counts_[k]; }
    const std::vector<int>& block_sizes() const { return counts_; }
    bool same_block(int i, int j) const { return labels_[i] == labels_[j]; }

    /* Moves item i to block `k` (0 <= k < K) or to a fresh block (k == K). */
    Mutation assign(int i, int k);

    /* Labels relabelled in order of first appearance; equal keys iff the
       two objects describe the same set partition. */
    std::vector<int> canonical_key() const;

    bool equals_as_set_partition(const Partition& other) const {
        return canonical_key() == other.canonical_key();
    }

    const std::vector<int>& labels() const { return labels_; }

private:
    Partition() = default;

    std::vector<int> labels_;
    std::vector<int> counts_;
};

/* Chinese restaurant process allocation probabilities given the current
   block sizes: K+1 entries, existing blocks proportional to their counts
   and a new block proportional to the concentration.  Sums to one.  A zero
   count yields probability zero; label scans rely on this when they
   decrement the scanned item's own block in place. */
std::vector<double> crp_predictive(const std::vector<int>& counts,
                                   double concentration);

/* Same formula applied to counts pooled across groups (the baseline
   partition plus every untied group-level label). */
std::vector<double> multi_crp_predictive(const std::vector<int>& pooled_counts,
                                         double concentration);

/* One auxiliary-variable Gibbs update for a Dirichlet-process concentration
   parameter with a Gamma(a,b) prior (Escobar & West, 1995): draw
   t ~ Beta(nu+1, m), then nu from a two-component gamma mixture whose odds
   for the first component are (a+K-1) / (m*(b-log t)). */
double update_concentration(Rng& rng, double nu, int n_blocks, int n_items,
                            double a, double b);

/* log CRP prior mass of a partition with the given block sizes:
   log [ nu^K * prod_k (n_k-1)! / prod_{i=0}^{p-1} (nu+i) ]. */
double log_prior_partition(const std::vector<int>& block_sizes, double nu);
double log_prior_partition(const Partition& z, double nu);

/* Prior mass of a partition with the concentration integrated out against
   its Gamma(a,b) hyperprior.  Gauss-Legendre quadrature on u = nu/(1+nu),
   panels halved until successive estimates agree to 1e-8 relative. */
double prior_partition_marginal(const Partition& z, double a, double b);

}  // namespace blockggm
