#include "blockggm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "blockggm/common.hpp"

namespace blockggm {

Partition Partition::singletons(int p) {
    if (p < 1) throw input_error("Partition: need at least one item");
    Partition z;
    z.labels_.resize(p);
    for (int i = 0; i < p; ++i) z.labels_[i] = i;
    z.counts_.assign(p, 1);
    return z;
}

Partition Partition::single_block(int p) {
    if (p < 1) throw input_error("Partition: need at least one item");
    Partition z;
    z.labels_.assign(p, 0);
    z.counts_.assign(1, p);
    return z;
}

Partition Partition::from_labels(const std::vector<int>& labels) {
    if (labels.empty()) throw input_error("Partition: need at least one item");
    Partition z;
    z.labels_.resize(labels.size());
    std::vector<int> remap;
    std::vector<int> seen;  // original label values, in order of appearance
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int raw = labels[i];
        auto it = std::find(seen.begin(), seen.end(), raw);
        int k;
        if (it == seen.end()) {
            k = static_cast<int>(seen.size());
            seen.push_back(raw);
            z.counts_.push_back(0);
        } else {
            k = static_cast<int>(it - seen.begin());
        }
        z.labels_[i] = k;
        ++z.counts_[k];
    }
    return z;
}

Partition::Mutation Partition::assign(int i, int k) {
    if (i < 0 || i >= size())
        throw input_error("Partition: item index out of range");
    const int K = block_count();
    if (k < 0 || k > K)
        throw input_error("Partition: target label " + std::to_string(k) +
                          " out of range (K=" + std::to_string(K) + ")");
    Mutation mut;
    const int old = labels_[i];
    if (k == old) return mut;
    if (k == K) {
        counts_.push_back(0);
        mut.opened = true;
    }
    labels_[i] = k;
    ++counts_[k];
    if (--counts_[old] == 0) {
        const int last = block_count() - 1;
        mut.vacated = old;
        if (old != last) {
            /* relocate the highest label into the hole to stay contiguous */
            mut.moved_from = last;
            for (int& l : labels_)
                if (l == last) l = old;
            counts_[old] = counts_[last];
        }
        counts_.pop_back();
    }
    return mut;
}

std::vector<int> Partition::canonical_key() const {
    std::vector<int> key(labels_.size());
    std::vector<int> remap(block_count(), -1);
    int next = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        int& m = remap[labels_[i]];
        if (m < 0) m = next++;
        key[i] = m;
    }
    return key;
}

std::vector<double> crp_predictive(const std::vector<int>& counts,
                                   double concentration) {
    if (concentration <= 0.0)
        throw input_error("crp_predictive: concentration must be positive");
    double total = concentration;
    for (int c : counts) {
        if (c < 0) throw input_error("crp_predictive: block counts must be nonnegative");
        total += c;
    }
    std::vector<double> probs(counts.size() + 1);
    for (std::size_t k = 0; k < counts.size(); ++k) probs[k] = counts[k] / total;
    probs.back() = concentration / total;
    return probs;
}

std::vector<double> multi_crp_predictive(const std::vector<int>& pooled_counts,
                                         double concentration) {
    return crp_predictive(pooled_counts, concentration);
}

double update_concentration(Rng& rng, double nu, int n_blocks, int n_items,
                            double a, double b) {
    if (nu <= 0.0 || a <= 0.0 || b <= 0.0)
        throw input_error("update_concentration: nu, a, b must be positive");
    if (n_blocks < 1 || n_items < n_blocks)
        throw input_error("update_concentration: need 1 <= K <= m");
    if (n_items == 0) return rgamma(rng, a, b);
    const double t = rbeta(rng, nu + 1.0, static_cast<double>(n_items));
    const double rate = b - std::log(t);
    const double odds = (a + n_blocks - 1.0) / (n_items * rate);
    const double pi1 = odds / (1.0 + odds);
    const double shape = runif(rng) < pi1 ? a + n_blocks : a + n_blocks - 1.0;
    return rgamma(rng, shape, rate);
}

double log_prior_partition(const std::vector<int>& block_sizes, double nu) {
    if (nu <= 0.0) throw input_error("log_prior_partition: concentration must be positive");
    int p = 0;
    double lp = 0.0;
    for (int n_k : block_sizes) {
        if (n_k <= 0) throw input_error("log_prior_partition: block sizes must be positive");
        p += n_k;
        lp += std::lgamma(static_cast<double>(n_k));
    }
    lp += block_sizes.size() * std::log(nu);
    lp -= std::lgamma(nu + p) - std::lgamma(nu);
    return lp;
}

double log_prior_partition(const Partition& z, double nu) {
    return log_prior_partition(z.block_sizes(), nu);
}

namespace {

/* Gauss-Legendre nodes/weights on [-1,1] via the Golub-Welsch eigenvalue
   method on the Jacobi matrix. */
struct GaussLegendre {
    Eigen::VectorXd nodes, weights;
    explicit GaussLegendre(int n) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const double beta = i / std::sqrt(4.0 * i * i - 1.0);
            J(i, i - 1) = J(i - 1, i) = beta;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        nodes = es.eigenvalues();
        weights.resize(n);
        for (int i = 0; i < n; ++i) {
            const double v0 = es.eigenvectors()(0, i);
            weights[i] = 2.0 * v0 * v0;
        }
    }
};

}  // namespace

double prior_partition_marginal(const Partition& z, double a, double b) {
    if (a <= 0.0 || b <= 0.0)
        throw input_error("prior_partition_marginal: gamma hyperparameters must be positive");
    static const GaussLegendre gl(256);
    const std::vector<int>& sizes = z.block_sizes();
    const double log_gamma_norm = a * std::log(b) - std::lgamma(a);

    /* integrate over u = nu/(1+nu) in (0,1); nu = u/(1-u), dnu = du/(1-u)^2 */
    auto integrate = [&](int n_panels) {
        double total = 0.0;
        for (int panel = 0; panel < n_panels; ++panel) {
            const double lo = static_cast<double>(panel) / n_panels;
            const double half = 0.5 / n_panels;
            for (int q = 0; q < gl.nodes.size(); ++q) {
                const double u = lo + half * (gl.nodes[q] + 1.0);
                const double nu = u / (1.0 - u);
                const double log_jac = -2.0 * std::log1p(-u);
                const double log_f = log_prior_partition(sizes, nu) +
                                     log_gamma_norm + (a - 1.0) * std::log(nu) -
                                     b * nu + log_jac;
                total += half * gl.weights[q] * std::exp(log_f);
            }
        }
        return total;
    };

    double prev = integrate(1);
    for (int n_panels = 2; n_panels <= 64; n_panels *= 2) {
        const double cur = integrate(n_panels);
        if (std::abs(cur - prev) <= 1e-8 * std::max(std::abs(cur), 1e-300))
            return cur;
        prev = cur;
    }
    throw numeric_error("prior_partition_marginal: quadrature failed to reach 1e-8 relative tolerance");
}

}  // namespace blockggm
