#pragma once

#include <vector>

#include <Eigen/Dense>

#include "blockggm/graph.hpp"
#include "blockggm/partition.hpp"

namespace blockggm {

/* p x p matrix of co-clustering frequencies: entry (i,j) is the fraction
   of samples with z_i = z_j.  Symmetric with unit diagonal. */
Eigen::MatrixXd similarity_matrix(const std::vector<std::vector<int>>& samples);

/* Cross-group variant: entry (i,j) is the fraction of samples in which the
   first group's label of node i equals the second group's label of node j
   (labels are shared across groups in the multiple-graph model). */
Eigen::MatrixXd cross_similarity_matrix(
    const std::vector<std::vector<int>>& first,
    const std::vector<std::vector<int>>& second);

/* Binder loss of a partition against a co-clustering matrix with equal
   misclassification costs: sum_{i<j} |1[z_i = z_j] - similarity_ij|. */
double binder_loss(const Partition& z, const Eigen::MatrixXd& similarity);

/* The sampled partition minimizing the Binder loss, with the search
   restricted to the distinct sampled set partitions and ties broken by
   earliest occurrence. */
Partition binder_estimate(const std::vector<std::vector<int>>& samples,
                          const Eigen::MatrixXd& similarity);

/* Fraction of node pairs on which the two partitions agree (co-clustered
   in both or separated in both). */
double rand_index(const Partition& a, const Partition& b);

/* Hubert-Arabie chance-corrected version; 1 for identical partitions, near
   0 for independent ones. */
double adjusted_rand_index(const Partition& a, const Partition& b);

/* Graph with an edge wherever the posterior inclusion probability strictly
   exceeds one half (Barbieri & Berger, 2004). */
Graph median_probability_graph(const Eigen::MatrixXd& edge_probs);

/* Savage-Dickey estimate of the Bayes factor in favour of the partition
   z_star: the posterior frequency of z_star among the samples over its
   prior mass under the CRP with Gamma(a,b) concentration.  Refuses inputs
   whose prior mass is below 1e-12, where the ratio is too unstable to
   report. */
double savage_dickey_bf(const std::vector<std::vector<int>>& samples,
                        const Partition& z_star, double a_nu, double b_nu);

/* Harmonic-mean estimate of a log marginal likelihood from log-likelihood
   samples: -[logsumexp(-l_t) - log T], computed in log space (Newton &
   Raftery, 1994). */
double harmonic_mean_log_ml(const std::vector<double>& loglik);

}  // namespace blockggm
