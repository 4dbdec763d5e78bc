#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "blockggm/graph.hpp"
#include "blockggm/gwishart.hpp"
#include "blockggm/model.hpp"
#include "blockggm/partition.hpp"
#include "blockggm/rng.hpp"

namespace blockggm {

/* State of the clique-within-blocks chain: nodes sharing a block are fully
   connected, and only between-block ("free") pairs carry Bernoulli(rho)
   edges.  The samplers maintain the clique constraint as an invariant. */
struct SicsState {
    Graph graph;
    Partition z;
    double rho = 0.5;
    double nu = 1.0;

    explicit SicsState(int p) : graph(p), z(Partition::singletons(p)) {}
};

/* Per-step switches so tests can pin any subset of the state. */
struct SicsOptions {
    bool update_rho = true;
    bool update_graph = true;   // single free-edge move
    bool update_joint = true;   // joint (z_i, graph) scan
    bool update_nu = true;
};

/* Number of within-block pairs sum_k n_k (n_k - 1) / 2; all of these are
   forced edges, so graph.edge_count() minus this counts the free edges. */
int within_pair_count(const Partition& z);

/* Whether every within-block pair is an edge. */
bool clique_constraint_holds(const Graph& g, const Partition& z);

/* Conjugate Beta update of the free-edge inclusion probability given the
   between-block edge counts. */
void sics_update_rho(SicsState& state, const Hyperparameters& hyper, Rng& rng);

/* One chain of the clique-constrained block model: Beta update for rho, a
   boundary-corrected single-edge Metropolis move over the free pairs, a
   joint Metropolis-within-Gibbs scan of (z_i, graph) with the graph part
   proposed from its conditional prior so that only the allocation
   predictive and the marginal-likelihood ratio survive in the acceptance
   probability, and an Escobar-West concentration update. */
class SicsSampler {
public:
    SicsSampler(const DataMatrix& data, const Hyperparameters& hyper,
                SicsOptions options = {});

    SicsState& state() { return state_; }
    const SicsState& state() const { return state_; }
    const Hyperparameters& hyper() const { return hyper_; }

    /* Replaces the partition, forces the implied within-block edges, and
       rebuilds the marginal-likelihood cache. */
    void set_partition(const Partition& z);

    /* Replaces partition and graph together; the graph must already
       satisfy the clique constraint. */
    void set_state(Graph g, const Partition& z);

    void sweep(Rng& rng);

    /* Draws Omega | G, Y from the conjugate update of the G-Wishart prior
       and returns log p(Y | Omega). */
    double sample_loglik(Rng& rng, int n_gibbs_sweeps = 10);

    double log_marginal() const { return worker_.log_ml(); }

private:
    void free_edge_update(Rng& rng);
    void joint_update(Rng& rng, int i);

    /* Marginal log-likelihood of the graph reached by `toggles`, served
       from the per-sweep cache when possible.  On a cache miss the worker
       is left holding the proposal and `worker_pending` is set. */
    double eval_toggles(const std::vector<std::pair<int, int>>& toggles,
                        bool& worker_pending);
    void commit(const std::vector<std::pair<int, int>>& toggles,
                bool worker_pending);
    void abandon(bool worker_pending);

    const DataMatrix* data_;
    Hyperparameters hyper_;
    SicsOptions options_;
    SicsState state_;
    MarginalWorker worker_;
    std::map<std::vector<std::uint64_t>, double> sweep_cache_;
};

}  // namespace blockggm
