#include "blockggm/posterior.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {

void check_samples(const std::vector<std::vector<int>>& samples) {
    if (samples.empty())
        throw input_error("similarity_matrix: need at least one sample");
    const std::size_t p = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != p)
            throw input_error("similarity_matrix: samples disagree on length");
}

}  // namespace

Eigen::MatrixXd similarity_matrix(const std::vector<std::vector<int>>& samples) {
    check_samples(samples);
    const int p = static_cast<int>(samples.front().size());
    Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(p, p);
    for (const auto& z : samples)
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j)
                if (z[i] == z[j]) {
                    sim(i, j) += 1.0;
                    if (i != j) sim(j, i) += 1.0;
                }
    sim /= static_cast<double>(samples.size());
    return sim;
}

Eigen::MatrixXd cross_similarity_matrix(
    const std::vector<std::vector<int>>& first,
    const std::vector<std::vector<int>>& second) {
    check_samples(first);
    check_samples(second);
    if (first.size() != second.size() ||
        first.front().size() != second.front().size())
        throw input_error("cross_similarity_matrix: sample logs do not align");
    const int p = static_cast<int>(first.front().size());
    Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t t = 0; t < first.size(); ++t)
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                if (first[t][i] == second[t][j]) sim(i, j) += 1.0;
    sim /= static_cast<double>(first.size());
    return sim;
}

double binder_loss(const Partition& z, const Eigen::MatrixXd& similarity) {
    const int p = z.size();
    if (similarity.rows() != p || similarity.cols() != p)
        throw input_error("binder_loss: matrix does not match partition size");
    double loss = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double ind = z.same_block(i, j) ? 1.0 : 0.0;
            loss += std::fabs(ind - similarity(i, j));
        }
    return loss;
}

Partition binder_estimate(const std::vector<std::vector<int>>& samples,
                          const Eigen::MatrixXd& similarity) {
    check_samples(samples);
    std::map<std::vector<int>, double> seen;
    std::vector<int> best_key;
    double best_loss = 0.0;
    for (const auto& labels : samples) {
        const Partition z = Partition::from_labels(labels);
        std::vector<int> key = z.canonical_key();
        if (seen.count(key)) continue;
        const double loss = binder_loss(z, similarity);
        seen.emplace(std::move(key), loss);
        if (best_key.empty() || loss < best_loss) {
            best_key = z.canonical_key();
            best_loss = loss;
        }
    }
    return Partition::from_labels(best_key);
}

double rand_index(const Partition& a, const Partition& b) {
    const int p = a.size();
    if (b.size() != p) throw input_error("rand_index: partition sizes differ");
    if (p < 2) return 1.0;
    long agree = 0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (a.same_block(i, j) == b.same_block(i, j)) ++agree;
    return static_cast<double>(agree) / (0.5 * p * (p - 1));
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
    const int p = a.size();
    if (b.size() != p)
        throw input_error("adjusted_rand_index: partition sizes differ");
    const int ka = a.block_count(), kb = b.block_count();
    std::vector<std::vector<long>> table(ka, std::vector<long>(kb, 0));
    for (int i = 0; i < p; ++i) ++table[a.label(i)][b.label(i)];
    auto choose2 = [](long n) { return 0.5 * n * (n - 1); };
    double sum_cells = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) sum_cells += choose2(table[i][j]);
    for (int n_k : a.block_sizes()) sum_a += choose2(n_k);
    for (int n_k : b.block_sizes()) sum_b += choose2(n_k);
    const double total = choose2(p);
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both trivial partitions
    return (sum_cells - expected) / (max_index - expected);
}

Graph median_probability_graph(const Eigen::MatrixXd& edge_probs) {
    if (edge_probs.rows() != edge_probs.cols())
        throw input_error("median_probability_graph: matrix must be square");
    const int p = static_cast<int>(edge_probs.rows());
    Graph g(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (edge_probs(i, j) > 0.5) g.set_edge(i, j, true);
    return g;
}

double savage_dickey_bf(const std::vector<std::vector<int>>& samples,
                        const Partition& z_star, double a_nu, double b_nu) {
    check_samples(samples);
    const double prior = prior_partition_marginal(z_star, a_nu, b_nu);
    if (prior < 1e-12)
        throw input_error(
            "savage_dickey_bf: p(z*) too small for a stable density ratio");
    const std::vector<int> target = z_star.canonical_key();
    long hits = 0;
    for (const auto& labels : samples)
        if (Partition::from_labels(labels).canonical_key() == target) ++hits;
    return static_cast<double>(hits) / samples.size() / prior;
}

double harmonic_mean_log_ml(const std::vector<double>& loglik) {
    if (loglik.empty())
        throw input_error("harmonic_mean_log_ml: need at least one sample");
    std::vector<double> neg(loglik.size());
    for (std::size_t t = 0; t < loglik.size(); ++t) neg[t] = -loglik[t];
    return -(log_sum_exp(neg.data(), static_cast<int>(neg.size())) -
             std::log(static_cast<double>(neg.size())));
}

}  // namespace blockggm
