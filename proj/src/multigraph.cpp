#include "blockggm/multigraph.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/* Applies a Partition::Mutation to the per-block value array tied to it. */
void mirror_mutation(std::vector<double>& values, const Partition::Mutation& mut,
                     double opened_value) {
    if (mut.opened) values.push_back(opened_value);
    if (mut.vacated >= 0) {
        if (mut.moved_from >= 0) values[mut.vacated] = values[mut.moved_from];
        values.pop_back();
    }
}

/* zeta with the block effect removed for group x. */
double zeta_minus_beta(const MultiState& s, int x, int i, int j) {
    double v = s.zetas[x](i, j);
    if (s.zs[x][i] == s.zs[x][j]) v -= s.beta_star[s.zs[x][i]];
    return v;
}

}  // namespace

MultiState::MultiState(int q, int p)
    : graphs(static_cast<std::size_t>(q), Graph(p)),
      zs(static_cast<std::size_t>(q), std::vector<int>(p)),
      g(static_cast<std::size_t>(q),
        std::vector<std::uint8_t>(static_cast<std::size_t>(p), 1)),
      beta_star(static_cast<std::size_t>(p), 0.0),
      c(Partition::singletons(p)),
      theta_star(static_cast<std::size_t>(p), 0.0),
      zetas(static_cast<std::size_t>(q), Eigen::MatrixXd::Zero(p, p)) {
    if (q < 1) throw input_error("MultiState: need at least one group");
    for (auto& zx : zs) std::iota(zx.begin(), zx.end(), 0);
}

std::vector<int> MultiState::pooled_counts() const {
    std::vector<int> counts(beta_star.size(), 0);
    const int p = order();
    for (int i = 0; i < p; ++i) ++counts[zs[0][i]];
    for (int x = 1; x < n_groups(); ++x)
        for (int i = 0; i < p; ++i)
            if (!g[x][i]) ++counts[zs[x][i]];
    return counts;
}

int MultiState::pooled_total() const {
    int total = order();
    for (int x = 1; x < n_groups(); ++x)
        for (int i = 0; i < order(); ++i)
            if (!g[x][i]) ++total;
    return total;
}

double MultiState::mu(int x, int i, int j) const {
    double m = theta(i) + theta(j);
    if (zs[x][i] == zs[x][j]) m += beta_star[zs[x][i]];
    return m;
}

bool multi_state_consistent(const MultiState& state) {
    const int q = state.n_groups();
    const int p = state.order();
    const int n_labels = state.n_labels();
    for (int i = 0; i < p; ++i)
        if (!state.g[0][i]) return false;
    for (int x = 0; x < q; ++x)
        for (int i = 0; i < p; ++i) {
            if (state.zs[x][i] < 0 || state.zs[x][i] >= n_labels) return false;
            if (state.g[x][i] && state.zs[x][i] != state.zs[0][i]) return false;
        }
    for (int count : state.pooled_counts())
        if (count <= 0) return false;
    if (static_cast<int>(state.theta_star.size()) != state.c.block_count())
        return false;
    return true;
}

MultiSampler::MultiSampler(const std::vector<DataMatrix>& data,
                           const Hyperparameters& hyper, MultiOptions options)
    : data_(&data),
      hyper_(hyper),
      options_(options),
      state_(static_cast<int>(data.size()),
             data.empty() ? 0 : data.front().cols()) {
    if (data.empty()) throw input_error("MultiSampler: need at least one group");
    const int p = data.front().cols();
    hyper_.validate(p);
    workers_.reserve(data.size());
    for (const DataMatrix& d : data) {
        if (d.cols() != p)
            throw input_error("MultiSampler: groups disagree on dimension");
        workers_.emplace_back(d, Graph(p),
                              GWishartParams{hyper.gwish_df, hyper.gwish_rate});
    }
}

void MultiSampler::apply_label_move(bool baseline, int x, int i, int target,
                                    double fresh_beta) {
    const int n_labels = state_.n_labels();
    if (target == n_labels) state_.beta_star.push_back(fresh_beta);
    const int old = state_.zs[baseline ? 0 : x][i];
    if (baseline) {
        for (int y = 0; y < state_.n_groups(); ++y)
            if (state_.g[y][i]) state_.zs[y][i] = target;
    } else {
        state_.zs[x][i] = target;
    }
    const std::vector<int> pooled = state_.pooled_counts();
    if (pooled[old] == 0) {
        const int last = state_.n_labels() - 1;
        if (old != last) {
            for (auto& zx : state_.zs)
                for (int& lab : zx)
                    if (lab == last) lab = old;
            state_.beta_star[old] = state_.beta_star[last];
        }
        state_.beta_star.pop_back();
    }
}

void MultiSampler::update_graphs(Rng& rng) {
    const int p = state_.order();
    for (int x = 0; x < state_.n_groups(); ++x) {
        MarginalWorker& worker = workers_[x];
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                const double mu = state_.mu(x, i, j);
                const double prior_log_odds =
                    log_edge_probability(mu) - log_edge_absent(mu);
                const bool adding = !worker.graph().has_edge(i, j);
                const double cand = worker.propose({{i, j}});
                const double log_r = cand - worker.log_ml() +
                                     (adding ? prior_log_odds : -prior_log_odds);
                if (std::log(runif(rng)) < log_r)
                    worker.accept();
                else
                    worker.reject();
            }
        state_.graphs[x] = worker.graph();
    }
}

void MultiSampler::update_latents(Rng& rng) {
    const int p = state_.order();
    for (int x = 0; x < state_.n_groups(); ++x)
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                const double mu = state_.mu(x, i, j);
                const double draw = state_.graphs[x].has_edge(i, j)
                                        ? rtruncnorm_lower(rng, mu, 0.0)
                                        : rtruncnorm_upper(rng, mu, 0.0);
                state_.zetas[x](i, j) = state_.zetas[x](j, i) = draw;
            }
}

void MultiSampler::update_beta_star(Rng& rng) {
    const int p = state_.order();
    const int n_labels = state_.n_labels();
    std::vector<double> resid_sum(n_labels, 0.0);
    std::vector<int> pair_count(n_labels, 0);
    for (int x = 0; x < state_.n_groups(); ++x)
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                if (state_.zs[x][i] != state_.zs[x][j]) continue;
                const int k = state_.zs[x][i];
                resid_sum[k] +=
                    state_.zetas[x](i, j) - state_.theta(i) - state_.theta(j);
                ++pair_count[k];
            }
    for (int k = 0; k < n_labels; ++k) {
        const double var = 1.0 / (1.0 / hyper_.s2_beta + pair_count[k]);
        state_.beta_star[k] = rnorm(rng, var * resid_sum[k], std::sqrt(var));
    }
}

void MultiSampler::update_theta_star(Rng& rng) {
    const int p = state_.order();
    const int q = state_.n_groups();
    const int n_clusters = state_.c.block_count();
    for (int m = 0; m < n_clusters; ++m) {
        double linear = 0.0;
        int within_pairs = 0;
        const int n_m = state_.c.block_size(m);
        for (int i = 0; i < p; ++i) {
            if (state_.c.label(i) != m) continue;
            for (int j = i + 1; j < p; ++j)
                if (state_.c.label(j) == m) {
                    ++within_pairs;
                    for (int x = 0; x < q; ++x)
                        linear += 2.0 * zeta_minus_beta(state_, x, i, j);
                }
            for (int j = 0; j < p; ++j)
                if (state_.c.label(j) != m)
                    for (int x = 0; x < q; ++x)
                        linear +=
                            zeta_minus_beta(state_, x, i, j) - state_.theta(j);
        }
        const double var = 1.0 / (1.0 / hyper_.s2_theta +
                                  4.0 * q * within_pairs + q * n_m * (p - n_m));
        state_.theta_star[m] = rnorm(rng, var * linear, std::sqrt(var));
    }
}

void MultiSampler::update_baseline_labels(Rng& rng) {
    const int p = state_.order();
    for (int i = 0; i < p; ++i) {
        std::vector<int> counts = state_.pooled_counts();
        const int old = state_.zs[0][i];
        --counts[old];  // tied copies of z_1i are not pooled
        const int n_labels = state_.n_labels();

        const std::vector<double> pred = crp_predictive(counts, state_.nu);
        std::vector<double> logw(pred.size());
        const double theta_i = state_.theta(i);
        for (int k = 0; k <= n_labels; ++k) {
            if (pred[k] == 0.0) {
                logw[k] = kNegInf;
                continue;
            }
            double lw = std::log(pred[k]);
            for (int x = 0; x < state_.n_groups(); ++x) {
                if (!state_.g[x][i]) continue;
                for (int j = 0; j < p; ++j) {
                    if (j == i) continue;
                    double mu = theta_i + state_.theta(j);
                    if (k < n_labels && state_.zs[x][j] == k)
                        mu += state_.beta_star[k];
                    lw += state_.graphs[x].has_edge(i, j)
                              ? log_edge_probability(mu)
                              : log_edge_absent(mu);
                }
            }
            logw[k] = lw;
        }

        const int pick = sample_categorical_log(rng, logw.data(),
                                                static_cast<int>(logw.size()));
        if (pick == old) continue;
        if (pick == n_labels && counts[old] == 0) {
            /* the label stays a pooled singleton: renew its effect only */
            state_.beta_star[old] = rnorm(rng, 0.0, std::sqrt(hyper_.s2_beta));
            continue;
        }
        const double fresh = rnorm(rng, 0.0, std::sqrt(hyper_.s2_beta));
        apply_label_move(true, 0, i, pick, fresh);
    }
}

void MultiSampler::update_popularity_labels(Rng& rng) {
    const int p = state_.order();
    const int q = state_.n_groups();
    Partition& c = state_.c;
    std::vector<double>& theta_star = state_.theta_star;
    const double sigma_c2 = 1.0 / (q * (p - 1) + 1.0 / hyper_.s2_theta);

    for (int i = 0; i < p; ++i) {
        std::vector<int> counts = c.block_sizes();
        const int old = c.label(i);
        --counts[old];
        const int n_clusters = static_cast<int>(counts.size());

        double resid = 0.0;
        for (int x = 0; x < q; ++x)
            for (int j = 0; j < p; ++j)
                if (j != i)
                    resid += zeta_minus_beta(state_, x, i, j) - state_.theta(j);

        const std::vector<double> pred = crp_predictive(counts, state_.alpha);
        std::vector<double> logw(pred.size());
        for (int m = 0; m < n_clusters; ++m) {
            logw[m] = pred[m] == 0.0
                          ? kNegInf
                          : std::log(pred[m]) + theta_star[m] * resid -
                                0.5 * q * (p - 1) * theta_star[m] * theta_star[m];
        }
        const double mu_c = sigma_c2 * resid;
        logw[n_clusters] = std::log(pred[n_clusters]) +
                           0.5 * std::log(sigma_c2 / hyper_.s2_theta) +
                           0.5 * mu_c * mu_c / sigma_c2;

        const int pick = sample_categorical_log(rng, logw.data(),
                                                static_cast<int>(logw.size()));
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

void MultiSampler::update_genealogy(Rng& rng, int x, int i) {
    const int p = state_.order();
    std::vector<int> counts = state_.pooled_counts();
    const bool was_untied = !state_.g[x][i];
    const int old = state_.zs[x][i];
    if (was_untied) --counts[old];  // remove own contribution iff pooled
    const int n_labels = state_.n_labels();

    const std::vector<double> pred = crp_predictive(counts, state_.nu);

    /* Group-x edge log likelihood of node i under each candidate label;
       index n_labels is the fresh label (no block effect). */
    std::vector<double> loglik(n_labels + 1);
    const double theta_i = state_.theta(i);
    for (int k = 0; k <= n_labels; ++k) {
        double ll = 0.0;
        for (int j = 0; j < p; ++j) {
            if (j == i) continue;
            double mu = theta_i + state_.theta(j);
            if (k < n_labels && state_.zs[x][j] == k) mu += state_.beta_star[k];
            ll += state_.graphs[x].has_edge(i, j) ? log_edge_probability(mu)
                                                  : log_edge_absent(mu);
        }
        loglik[k] = ll;
    }

    std::vector<double> logw(n_labels + 1);
    for (int k = 0; k <= n_labels; ++k)
        logw[k] = pred[k] == 0.0 ? kNegInf : std::log(pred[k]) + loglik[k];

    const int tied_label = state_.zs[0][i];
    const double log_num = std::log(hyper_.tie_prob) + loglik[tied_label];
    const double log_den = std::log1p(-hyper_.tie_prob) +
                           log_sum_exp(logw.data(), n_labels + 1);
    const double p_tie = 1.0 / (1.0 + std::exp(log_den - log_num));

    if (runif(rng) < p_tie) {
        state_.g[x][i] = 1;
        if (old != tied_label || was_untied)
            apply_label_move(false, x, i, tied_label, 0.0);
        return;
    }

    state_.g[x][i] = 0;
    const int pick =
        sample_categorical_log(rng, logw.data(), n_labels + 1);
    if (pick == old && was_untied) return;
    if (pick == n_labels && was_untied && counts[old] == 0) {
        /* the entry stays a pooled singleton: renew its effect only */
        state_.beta_star[old] = rnorm(rng, 0.0, std::sqrt(hyper_.s2_beta));
        return;
    }
    const double fresh = rnorm(rng, 0.0, std::sqrt(hyper_.s2_beta));
    if (pick != old) {
        apply_label_move(false, x, i, pick, fresh);
    }
}

void MultiSampler::sweep(Rng& rng) {
    const int p = state_.order();
    if (options_.update_graphs) update_graphs(rng);
    if (options_.update_latents) update_latents(rng);
    if (options_.update_beta_star) update_beta_star(rng);
    if (options_.update_theta_star) update_theta_star(rng);
    if (options_.update_baseline) update_baseline_labels(rng);
    if (options_.update_popularity) update_popularity_labels(rng);
    if (options_.update_genealogy)
        for (int x = 1; x < state_.n_groups(); ++x)
            for (int i = 0; i < p; ++i) update_genealogy(rng, x, i);
    if (options_.update_nu)
        state_.nu =
            update_concentration(rng, state_.nu, state_.n_labels(),
                                 state_.pooled_total(), hyper_.a_nu, hyper_.b_nu);
    if (options_.update_alpha)
        state_.alpha =
            update_concentration(rng, state_.alpha, state_.c.block_count(), p,
                                 hyper_.a_alpha, hyper_.b_alpha);
    if (!multi_state_consistent(state_))
        throw numeric_error("MultiSampler: state invariants violated");
}

double MultiSampler::sample_loglik(Rng& rng, int n_gibbs_sweeps) {
    double total = 0.0;
    for (int x = 0; x < state_.n_groups(); ++x)
        total += posterior_loglik_draw(
            rng, (*data_)[x], state_.graphs[x],
            GWishartParams{hyper_.gwish_df, hyper_.gwish_rate}, n_gibbs_sweeps);
    return total;
}

double MultiSampler::log_marginal() const {
    double total = 0.0;
    for (const MarginalWorker& worker : workers_) total += worker.log_ml();
    return total;
}

}  // namespace blockggm
