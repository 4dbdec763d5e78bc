#include "blockggm/sics.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "blockggm/common.hpp"

namespace blockggm {

int within_pair_count(const Partition& z) {
    int n = 0;
    for (int n_k : z.block_sizes()) n += n_k * (n_k - 1) / 2;
    return n;
}

bool clique_constraint_holds(const Graph& g, const Partition& z) {
    const int p = z.size();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (z.same_block(i, j) && !g.has_edge(i, j)) return false;
    return true;
}

void sics_update_rho(SicsState& state, const Hyperparameters& hyper, Rng& rng) {
    const int p = state.z.size();
    const int n_beta = within_pair_count(state.z);
    const int n_free = p * (p - 1) / 2 - n_beta;
    const int present = state.graph.edge_count() - n_beta;
    state.rho = rbeta(rng, hyper.a_rho + present,
                      hyper.b_rho + (n_free - present));
}

SicsSampler::SicsSampler(const DataMatrix& data, const Hyperparameters& hyper,
                         SicsOptions options)
    : data_(&data),
      hyper_(hyper),
      options_(options),
      state_(data.cols()),
      worker_(data, Graph(data.cols()),
              GWishartParams{hyper.gwish_df, hyper.gwish_rate}) {
    hyper_.validate(data.cols());
}

void SicsSampler::set_partition(const Partition& z) {
    if (z.size() != state_.graph.order())
        throw input_error("SicsSampler: partition size does not match graph");
    Graph g = state_.graph;
    const int p = z.size();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (z.same_block(i, j)) g.set_edge(i, j, true);
    state_.z = z;
    state_.graph = g;
    worker_.reset_graph(std::move(g));
}

void SicsSampler::set_state(Graph g, const Partition& z) {
    if (z.size() != g.order() || g.order() != state_.graph.order())
        throw input_error("SicsSampler: state dimensions do not match data");
    if (!clique_constraint_holds(g, z))
        throw input_error("SicsSampler: graph misses a within-block edge");
    state_.z = z;
    state_.graph = g;
    worker_.reset_graph(std::move(g));
}

double SicsSampler::eval_toggles(const std::vector<std::pair<int, int>>& toggles,
                                 bool& worker_pending) {
    worker_pending = false;
    if (toggles.empty()) return worker_.log_ml();
    Graph cand = state_.graph;
    for (const auto& [i, j] : toggles) cand.toggle_edge(i, j);
    std::vector<std::uint64_t> key = cand.pack_bits();
    const auto it = sweep_cache_.find(key);
    if (it != sweep_cache_.end()) return it->second;
    const double val = worker_.propose(toggles);
    worker_pending = true;
    sweep_cache_.emplace(std::move(key), val);
    return val;
}

void SicsSampler::commit(const std::vector<std::pair<int, int>>& toggles,
                         bool worker_pending) {
    if (toggles.empty()) return;
    if (!worker_pending) worker_.propose(toggles);
    worker_.accept();
    state_.graph = worker_.graph();
}

void SicsSampler::abandon(bool worker_pending) {
    if (worker_pending) worker_.reject();
}

/* Single-edge Metropolis move over the free (between-block) pairs.  The
   proposal picks uniformly among candidate pairs, forcing an addition when
   no free edge is present and a removal when all free pairs are filled, and
   flipping a fair coin in the interior; the acceptance ratio carries the
   resulting pick probabilities, which reduces to the familiar
   (p(p-1) - 2|E|) / (2(|E~| - n^beta)) form away from the boundaries. */
void SicsSampler::free_edge_update(Rng& rng) {
    const Partition& z = state_.z;
    const int p = z.size();
    const int n_beta = within_pair_count(z);
    const int n_free = p * (p - 1) / 2 - n_beta;
    if (n_free == 0) return;
    const int f = state_.graph.edge_count() - n_beta;

    bool adding;
    if (f == 0)
        adding = true;
    else if (f == n_free)
        adding = false;
    else
        adding = rbernoulli(rng, 0.5);

    std::vector<std::pair<int, int>> pool;
    pool.reserve(adding ? n_free - f : f);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (!z.same_block(i, j) && state_.graph.has_edge(i, j) != adding)
                pool.emplace_back(i, j);

    const std::vector<std::pair<int, int>> toggles{
        pool[runif_int(rng, 0, static_cast<int>(pool.size()) - 1)]};

    const auto log_pick_prob = [n_free](int f_cur, bool add) {
        const int set_size = add ? n_free - f_cur : f_cur;
        const bool forced = f_cur == 0 || f_cur == n_free;
        return (forced ? 0.0 : std::log(0.5)) - std::log(set_size);
    };
    const int f_cand = adding ? f + 1 : f - 1;
    const double log_r =
        log_pick_prob(f_cand, !adding) - log_pick_prob(f, adding);

    bool pending = false;
    const double cand_lml = eval_toggles(toggles, pending);
    if (std::log(runif(rng)) < log_r + cand_lml - worker_.log_ml())
        commit(toggles, pending);
    else
        abandon(pending);
}

/* Joint Metropolis-within-Gibbs update of (z_i, graph): z~_i is uniform
   over the blocks of z without i plus a fresh one, and the graph proposal
   follows the conditional prior -- edges into the proposed block are
   forced, edges into the abandoned block are redrawn Bernoulli(rho), and a
   node staying put redraws its free edges instead.  Because the graph part
   is prior-driven, the acceptance ratio is the allocation predictive ratio
   times the marginal-likelihood ratio. */
void SicsSampler::joint_update(Rng& rng, int i) {
    Partition& z = state_.z;
    const int p = z.size();
    std::vector<int> counts = z.block_sizes();
    const int old = z.label(i);
    --counts[old];
    const int n_blocks = static_cast<int>(counts.size());

    std::vector<int> existing;
    existing.reserve(n_blocks);
    for (int k = 0; k < n_blocks; ++k)
        if (counts[k] > 0) existing.push_back(k);
    const int n_existing = static_cast<int>(existing.size());

    const int pick = runif_int(rng, 0, n_existing);
    const bool to_new = pick == n_existing;
    const int cand = to_new ? -1 : existing[pick];
    const bool stay = to_new ? counts[old] == 0 : cand == old;

    const double pred_num = to_new ? state_.nu : counts[cand];
    const double pred_den = counts[old] > 0 ? counts[old] : state_.nu;

    std::vector<std::pair<int, int>> toggles;
    if (stay) {
        for (int j = 0; j < p; ++j) {
            if (j == i || z.label(j) == old) continue;
            if (rbernoulli(rng, state_.rho) != state_.graph.has_edge(i, j))
                toggles.emplace_back(i, j);
        }
    } else {
        for (int j = 0; j < p; ++j) {
            if (j == i) continue;
            if (!to_new && z.label(j) == cand) {
                if (!state_.graph.has_edge(i, j)) toggles.emplace_back(i, j);
            } else if (z.label(j) == old) {
                if (rbernoulli(rng, state_.rho) != state_.graph.has_edge(i, j))
                    toggles.emplace_back(i, j);
            }
        }
    }

    bool pending = false;
    const double cand_lml = eval_toggles(toggles, pending);
    const double log_r = std::log(pred_num) - std::log(pred_den) + cand_lml -
                         worker_.log_ml();
    if (std::log(runif(rng)) < log_r) {
        commit(toggles, pending);
        if (!stay) z.assign(i, to_new ? z.block_count() : cand);
    } else {
        abandon(pending);
    }
}

void SicsSampler::sweep(Rng& rng) {
    sweep_cache_.clear();
    const int p = state_.graph.order();
    if (options_.update_rho) sics_update_rho(state_, hyper_, rng);
    if (options_.update_graph) free_edge_update(rng);
    if (options_.update_joint)
        for (int i = 0; i < p; ++i) joint_update(rng, i);
    if (options_.update_nu)
        state_.nu = update_concentration(rng, state_.nu, state_.z.block_count(),
                                         p, hyper_.a_nu, hyper_.b_nu);
    if (!clique_constraint_holds(state_.graph, state_.z))
        throw numeric_error("SicsSampler: clique constraint violated");
}

double SicsSampler::sample_loglik(Rng& rng, int n_gibbs_sweeps) {
    return posterior_loglik_draw(rng, *data_, state_.graph,
                                 GWishartParams{hyper_.gwish_df, hyper_.gwish_rate},
                                 n_gibbs_sweeps);
}

}  // namespace blockggm
