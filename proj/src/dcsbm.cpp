#include "blockggm/dcsbm.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/* zeta with the block effect removed: zeta_ij - 1[z_i = z_j] beta*_{z_i}. */
double zeta_minus_beta(const DcsbmState& s, int i, int j) {
    double v = s.zeta(i, j);
    if (s.z.same_block(i, j)) v -= s.params.beta_star[s.z.label(i)];
    return v;
}

/* Applies a Partition::Mutation to the per-block value array tied to it. */
void mirror_mutation(std::vector<double>& values, const Partition::Mutation& mut,
                     double opened_value) {
    if (mut.opened) values.push_back(opened_value);
    if (mut.vacated >= 0) {
        if (mut.moved_from >= 0) values[mut.vacated] = values[mut.moved_from];
        values.pop_back();
    }
}

}  // namespace

DcsbmState::DcsbmState(int p)
    : graph(p),
      z(Partition::singletons(p)),
      params{std::vector<double>(static_cast<std::size_t>(p), 0.0),
             std::vector<double>(static_cast<std::size_t>(p), 0.0),
             Partition::singletons(p), 1.0},
      zeta(Eigen::MatrixXd::Zero(p, p)) {}

void dcsbm_sample_latents(DcsbmState& s, Rng& rng) {
    const int p = s.graph.order();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double mu = compute_mu(i, j, s.z, s.params);
            const double draw = s.graph.has_edge(i, j)
                                    ? rtruncnorm_lower(rng, mu, 0.0)
                                    : rtruncnorm_upper(rng, mu, 0.0);
            s.zeta(i, j) = s.zeta(j, i) = draw;
        }
}

void dcsbm_update_beta_star(DcsbmState& s, const Hyperparameters& h, Rng& rng) {
    const int p = s.graph.order();
    const int n_blocks = s.z.block_count();
    std::vector<double> resid_sum(n_blocks, 0.0);
    std::vector<int> pair_count(n_blocks, 0);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            if (!s.z.same_block(i, j)) continue;
            const int k = s.z.label(i);
            resid_sum[k] += s.zeta(i, j) - s.params.theta(i) - s.params.theta(j);
            ++pair_count[k];
        }
    for (int k = 0; k < n_blocks; ++k) {
        const double var = 1.0 / (1.0 / h.s2_beta + pair_count[k]);
        s.params.beta_star[k] = rnorm(rng, var * resid_sum[k], std::sqrt(var));
    }
}

void dcsbm_update_theta_star(DcsbmState& s, const Hyperparameters& h, Rng& rng) {
    const int p = s.graph.order();
    const int n_clusters = s.params.c.block_count();
    for (int m = 0; m < n_clusters; ++m) {
        double linear = 0.0;
        int within_pairs = 0;
        const int n_m = s.params.c.block_size(m);
        for (int i = 0; i < p; ++i) {
            if (s.params.c.label(i) != m) continue;
            for (int j = i + 1; j < p; ++j)
                if (s.params.c.label(j) == m) {
                    linear += 2.0 * zeta_minus_beta(s, i, j);
                    ++within_pairs;
                }
            for (int j = 0; j < p; ++j)
                if (s.params.c.label(j) != m)
                    linear += zeta_minus_beta(s, i, j) - s.params.theta(j);
        }
        const double var =
            1.0 / (1.0 / h.s2_theta + 4.0 * within_pairs + n_m * (p - n_m));
        s.params.theta_star[m] = rnorm(rng, var * linear, std::sqrt(var));
    }
}

void dcsbm_update_block_labels(DcsbmState& s, const Hyperparameters& h,
                               Rng& rng) {
    const int p = s.graph.order();
    for (int i = 0; i < p; ++i) {
        std::vector<int> counts = s.z.block_sizes();
        const int old = s.z.label(i);
        --counts[old];
        const int n_blocks = static_cast<int>(counts.size());

        const std::vector<double> pred = crp_predictive(counts, s.nu);
        std::vector<double> logw(pred.size());
        const double theta_i = s.params.theta(i);
        for (int k = 0; k <= n_blocks; ++k) {
            if (pred[k] == 0.0) {
                logw[k] = kNegInf;
                continue;
            }
            double lw = std::log(pred[k]);
            for (int j = 0; j < p; ++j) {
                if (j == i) continue;
                double mu = theta_i + s.params.theta(j);
                if (k < n_blocks && s.z.label(j) == k)
                    mu += s.params.beta_star[k];
                lw += s.graph.has_edge(i, j) ? log_edge_probability(mu)
                                             : log_edge_absent(mu);
            }
            logw[k] = lw;
        }

        const int pick =
            sample_categorical_log(rng, logw.data(), static_cast<int>(logw.size()));
        if (pick == old) continue;
        if (pick == n_blocks && counts[old] == 0) {
            /* i stays alone in its block: only the block effect is renewed */
            s.params.beta_star[old] = rnorm(rng, 0.0, std::sqrt(h.s2_beta));
            continue;
        }
        const double fresh = rnorm(rng, 0.0, std::sqrt(h.s2_beta));
        const Partition::Mutation mut = s.z.assign(i, pick);
        mirror_mutation(s.params.beta_star, mut, fresh);
    }
}

void dcsbm_update_popularity_labels(DcsbmState& s, const Hyperparameters& h,
                                    Rng& rng) {
    const int p = s.graph.order();
    Partition& c = s.params.c;
    std::vector<double>& theta_star = s.params.theta_star;
    const double sigma_c2 = 1.0 / (p - 1 + 1.0 / h.s2_theta);

    for (int i = 0; i < p; ++i) {
        std::vector<int> counts = c.block_sizes();
        const int old = c.label(i);
        --counts[old];
        const int n_clusters = static_cast<int>(counts.size());

        double resid = 0.0;
        for (int j = 0; j < p; ++j)
            if (j != i) resid += zeta_minus_beta(s, i, j) - s.params.theta(j);

        const std::vector<double> pred = crp_predictive(counts, s.params.alpha);
        std::vector<double> logw(pred.size());
        for (int m = 0; m < n_clusters; ++m) {
            logw[m] = pred[m] == 0.0
                          ? kNegInf
                          : std::log(pred[m]) + theta_star[m] * resid -
                                0.5 * (p - 1) * theta_star[m] * theta_star[m];
        }
        const double mu_c = sigma_c2 * resid;
        logw[n_clusters] = std::log(pred[n_clusters]) +
                           0.5 * std::log(sigma_c2 / h.s2_theta) +
                           0.5 * mu_c * mu_c / sigma_c2;

        const int pick =
            sample_categorical_log(rng, logw.data(), static_cast<int>(logw.size()));
        if (pick == old) continue;
        if (pick == n_clusters && counts[old] == 0) {
            theta_star[old] = rnorm(rng, mu_c, std::sqrt(sigma_c2));
            continue;
        }
        const double fresh = rnorm(rng, mu_c, std::sqrt(sigma_c2));
        const Partition::Mutation mut = c.assign(i, pick);
        mirror_mutation(theta_star, mut, fresh);
    }
}

DcsbmSampler::DcsbmSampler(const DataMatrix& data, const Hyperparameters& hyper,
                           DcsbmOptions options)
    : data_(&data),
      hyper_(hyper),
      options_(options),
      state_(data.cols()),
      worker_(data, Graph(data.cols()),
              GWishartParams{hyper.gwish_df, hyper.gwish_rate}) {
    hyper_.validate(data.cols());
}

void DcsbmSampler::set_graph(Graph g) {
    state_.graph = g;
    worker_.reset_graph(std::move(g));
}

void DcsbmSampler::update_graph(Rng& rng) {
    const int p = state_.graph.order();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double mu = compute_mu(i, j, state_.z, state_.params);
            const double prior_log_odds =
                log_edge_probability(mu) - log_edge_absent(mu);
            const bool adding = !worker_.graph().has_edge(i, j);
            const double cand = worker_.propose({{i, j}});
            const double log_r = cand - worker_.log_ml() +
                                 (adding ? prior_log_odds : -prior_log_odds);
            if (std::log(runif(rng)) < log_r)
                worker_.accept();
            else
                worker_.reject();
        }
    state_.graph = worker_.graph();
}

void DcsbmSampler::sweep(Rng& rng) {
    const int p = state_.graph.order();
    if (options_.update_graph) update_graph(rng);
    if (options_.update_latents) dcsbm_sample_latents(state_, rng);
    if (options_.update_beta_star) dcsbm_update_beta_star(state_, hyper_, rng);
    if (options_.update_theta_star) dcsbm_update_theta_star(state_, hyper_, rng);
    if (options_.update_blocks) dcsbm_update_block_labels(state_, hyper_, rng);
    if (options_.update_popularity)
        dcsbm_update_popularity_labels(state_, hyper_, rng);
    if (options_.update_nu)
        state_.nu = update_concentration(rng, state_.nu, state_.z.block_count(),
                                         p, hyper_.a_nu, hyper_.b_nu);
    if (options_.update_alpha)
        state_.params.alpha =
            update_concentration(rng, state_.params.alpha,
                                 state_.params.c.block_count(), p,
                                 hyper_.a_alpha, hyper_.b_alpha);
}

double DcsbmSampler::sample_loglik(Rng& rng, int n_gibbs_sweeps) {
    return posterior_loglik_draw(rng, *data_, state_.graph,
                                 GWishartParams{hyper_.gwish_df, hyper_.gwish_rate},
                                 n_gibbs_sweeps);
}

}  // namespace blockggm
