#include "blockggm/gwishart.hpp"

#include <cmath>
#include <string>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kLog2 = 0.6931471805599453094;
constexpr double kLogPi = 1.1447298858494001741;

Eigen::MatrixXd materialize_rate(int p, const GWishartParams& params) {
    if (params.df <= 2.0)
        throw input_error("gwishart: degrees of freedom must exceed 2");
    if (params.rate.size() == 0) return Eigen::MatrixXd::Identity(p, p);
    if (params.rate.rows() != p || params.rate.cols() != p)
        throw input_error("gwishart: rate matrix must be " + std::to_string(p) +
                          "x" + std::to_string(p));
    if (!params.rate.isApprox(params.rate.transpose(), 1e-12))
        throw input_error("gwishart: rate matrix must be symmetric");
    return params.rate;
}

bool is_diagonal(const Eigen::MatrixXd& m) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != 0.0) return false;
    return true;
}

double log_det_spd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw numeric_error(std::string(what) + ": matrix is not positive definite");
    double out = 0.0;
    for (int i = 0; i < m.rows(); ++i) out += std::log(llt.matrixL()(i, i));
    return 2.0 * out;
}

struct Completion {
    Eigen::MatrixXd w;         // completed covariance
    Eigen::MatrixXd k;         // its inverse (off-pattern entries ~0, not forced)
    double logdet_w = 0.0;
};

/* Cyclic covariance completion (Lenkoski, 2013): returns W positive
   definite with W matching `sigma` on diagonal and edge positions and
   W^{-1} zero on non-edges.  Convergence requires both constraint families
   to hold: the free entries of W match sigma and the non-edge entries of
   W^{-1} vanish — checking only the former can pass long before the fixed
   point is reached.  `warm` may hold the completion of a nearby graph to
   shorten convergence. */
Completion complete_covariance(const Graph& g, const Eigen::MatrixXd& sigma,
                               const GWishartParams& params,
                               const Eigen::MatrixXd* warm) {
    const int p = g.order();
    Completion out;

    auto finish = [&](Eigen::MatrixXd w) -> bool {
        Eigen::LLT<Eigen::MatrixXd> llt(w);
        if (llt.info() != Eigen::Success)
            throw numeric_error("gwishart completion: iterate lost positive definiteness");
        Eigen::MatrixXd k = llt.solve(Eigen::MatrixXd::Identity(p, p));
        double k_scale = k.diagonal().cwiseAbs().maxCoeff();
        double zero_resid = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (!g.has_edge(i, j))
                    zero_resid = std::max(zero_resid, std::abs(k(i, j)));
        if (zero_resid > params.completion_tol * std::max(k_scale, 1e-12))
            return false;
        out.w = std::move(w);
        out.k = std::move(k);
        out.logdet_w = 0.0;
        for (int i = 0; i < p; ++i) out.logdet_w += std::log(llt.matrixL()(i, i));
        out.logdet_w *= 2.0;
        return true;
    };

    if (g.is_complete()) {
        if (!finish(sigma))
            throw numeric_error("gwishart completion: rate matrix not positive definite");
        return out;
    }

    Eigen::MatrixXd w = (warm != nullptr && warm->rows() == p) ? *warm : sigma;
    if (warm != nullptr && warm->rows() == p) {
        /* the diagonal is always a free position; re-pin it in case the
           caller's warm start came from different parameters */
        w.diagonal() = sigma.diagonal();
    }

    const auto edges = g.edges();
    const double scale = sigma.cwiseAbs().maxCoeff();
    const double tol = params.completion_tol * std::max(scale, 1e-12);

    std::vector<std::vector<int>> nbrs(p);
    for (int j = 0; j < p; ++j) nbrs[j] = g.neighbors(j);

    /* The authoritative convergence test (`finish`, which inverts the
       iterate) costs a Cholesky factorization, so it is only attempted once
       the cheap per-sweep movement of the iterate has fallen below the
       tolerance; after a failed attempt the gate tightens geometrically. */
    Eigen::MatrixXd w_prev;
    double gate = 256.0 * tol;
    Eigen::VectorXd beta, col;
    Eigen::MatrixXd wnn, snj;
    for (int sweep = 0; sweep < params.completion_max_sweeps; ++sweep) {
        w_prev = w;
        for (int j = 0; j < p; ++j) {
            const std::vector<int>& nb = nbrs[j];
            if (nb.empty()) {
                const double wjj = w(j, j);
                w.col(j).setZero();
                w.row(j).setZero();
                w(j, j) = wjj;
                continue;
            }
            const int d = static_cast<int>(nb.size());
            wnn.resize(d, d);
            snj.resize(d, 1);
            for (int a = 0; a < d; ++a) {
                snj(a, 0) = sigma(nb[a], j);
                for (int b = 0; b < d; ++b) wnn(a, b) = w(nb[a], nb[b]);
            }
            Eigen::LLT<Eigen::MatrixXd> llt(wnn);
            if (llt.info() != Eigen::Success)
                throw numeric_error("gwishart completion: neighbour block lost positive definiteness");
            beta = llt.solve(snj);
            col.noalias() = w(Eigen::all, nb) * beta;
            const double wjj = w(j, j);
            w.col(j) = col;
            w.row(j) = col.transpose();
            w(j, j) = wjj;
        }
        double resid = 0.0;
        for (const auto& [i, j] : edges)
            resid = std::max(resid, std::abs(w(i, j) - sigma(i, j)));
        const double step = (w - w_prev).cwiseAbs().maxCoeff();
        if (resid <= tol && step <= gate) {
            if (finish(w)) return out;
            gate = 0.25 * step;
        }
    }
    throw numeric_error(
        "gwishart completion: no convergence after " +
        std::to_string(params.completion_max_sweeps) + " sweeps (p=" +
        std::to_string(p) + ", edges=" + std::to_string(g.edge_count()) + ")");
}

/* Laplace value in the triangular parameterization for a diagonal rate
   matrix.  Writing K = Phi' Phi with Phi upper triangular and taking logs
   of the diagonal as coordinates, the mode has every free off-diagonal
   coordinate equal to zero, the completion terms vanish to second order,
   and the node-wise Gaussian integrals give the closed form below
   (fd = forward degree, deg = full degree of the node). */
double laplace_diag_rate(const Graph& g, double df,
                         const Eigen::VectorXd& rate_diag) {
    double val = 0.0;
    for (int i = 0; i < g.order(); ++i) {
        const double fd = g.forward_degree(i);
        const double deg = g.degree(i);
        if (rate_diag[i] <= 0.0)
            throw numeric_error("gwishart: rate matrix is not positive definite");
        val += 0.5 * (df + 2.0 * fd) * kLog2 + 0.5 * fd * kLogPi +
               stirling_lgamma(0.5 * (df + fd)) -
               0.5 * (df + deg) * std::log(rate_diag[i]);
    }
    return val;
}

/* Laplace value at the precision-space mode given its completed covariance:
   h(K_hat) + (m/2) log(2 pi) - (1/2) sum log h_f over the m = p + |E| free
   coordinates, with h_ii = ((df-2)/2) W_ii^2 and
   h_ij = (df-2)(W_ii W_jj + W_ij^2).  tr(rate K_hat) = p (df-2) at the mode. */
double laplace_from_completion(const Graph& g, double df, const Completion& c) {
    const int p = g.order();
    const Eigen::MatrixXd& w = c.w;
    const double h_mode = -0.5 * (df - 2.0) * c.logdet_w - 0.5 * p * (df - 2.0);
    const int m = p + g.edge_count();
    double sum_log_h = p * std::log(0.5 * (df - 2.0));
    for (int i = 0; i < p; ++i) sum_log_h += 2.0 * std::log(w(i, i));
    for (const auto& [i, j] : g.edges())
        sum_log_h += std::log(df - 2.0) +
                     std::log(w(i, i) * w(j, j) + w(i, j) * w(i, j));
    return h_mode + 0.5 * m * kLogTwoPi - 0.5 * sum_log_h;
}

}  // namespace

double log_norm_complete(int p, const GWishartParams& params) {
    const Eigen::MatrixXd rate = materialize_rate(p, params);
    const double a = 0.5 * (params.df + p - 1);
    return a * p * kLog2 + lmvgamma(p, a) - a * log_det_spd(rate, "log_norm_complete");
}

Eigen::MatrixXd gwishart_mode(const Graph& g, const GWishartParams& params) {
    const int p = g.order();
    const Eigen::MatrixXd rate = materialize_rate(p, params);
    const Eigen::MatrixXd sigma = rate / (params.df - 2.0);
    Completion c = complete_covariance(g, sigma, params, nullptr);
    Eigen::MatrixXd k = std::move(c.k);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (!g.has_edge(i, j)) k(i, j) = k(j, i) = 0.0;
    return k;
}

LogNormConst log_norm_laplace(const Graph& g, const GWishartParams& params) {
    const int p = g.order();
    const Eigen::MatrixXd rate = materialize_rate(p, params);
    if (is_diagonal(rate))
        return {laplace_diag_rate(g, params.df, rate.diagonal()),
                LogNormConst::Method::laplace};
    const Eigen::MatrixXd sigma = rate / (params.df - 2.0);
    const Completion c = complete_covariance(g, sigma, params, nullptr);
    return {laplace_from_completion(g, params.df, c),
            LogNormConst::Method::laplace};
}

LogNormConst log_norm(const Graph& g, const GWishartParams& params) {
    if (g.is_complete())
        return {log_norm_complete(g.order(), params),
                LogNormConst::Method::exact_complete};
    return log_norm_laplace(g, params);
}

double log_marginal_likelihood(const DataMatrix& data, const Graph& g,
                               const GWishartParams& prior) {
    const int p = g.order();
    if (data.cols() != p)
        throw input_error("log_marginal_likelihood: data has " +
                          std::to_string(data.cols()) + " columns but the graph has " +
                          std::to_string(p) + " nodes");
    const int n = data.rows();
    if (n == 0) return 0.0;
    GWishartParams post = prior;
    post.df = prior.df + n;
    post.rate = materialize_rate(p, prior) + data.gram();
    return log_norm(g, post).value - log_norm(g, prior).value -
           0.5 * n * p * kLogTwoPi;
}

Eigen::MatrixXd sample_gwishart(Rng& rng, const Graph& g,
                                const GWishartParams& params, int n_sweeps) {
    const int p = g.order();
    const Eigen::MatrixXd rate = materialize_rate(p, params);
    Eigen::MatrixXd k = gwishart_mode(g, params);

    std::vector<std::vector<int>> nbrs(p);
    for (int j = 0; j < p; ++j) nbrs[j] = g.neighbors(j);
    std::vector<int> rest_idx(p - 1);

    for (int sweep = 0; sweep < n_sweeps; ++sweep) {
        for (int j = 0; j < p; ++j) {
            const std::vector<int>& nb = nbrs[j];
            if (nb.empty()) {
                k(j, j) = rgamma(rng, 0.5 * params.df, 0.5 * rate(j, j));
                continue;
            }
            int t = 0;
            for (int i = 0; i < p; ++i)
                if (i != j) rest_idx[t++] = i;

            /* conditional of column j given the rest: the residual
               s = K_jj - k_N' A^{-1} k_N is Gamma(df/2, rate_jj/2) and the
               neighbour entries are Gaussian with precision rate_jj * B,
               B = (A^{-1})[N,N], A = K with row/column j removed */
            Eigen::MatrixXd a(p - 1, p - 1);
            for (int r = 0; r < p - 1; ++r)
                for (int c = 0; c < p - 1; ++c)
                    a(r, c) = k(rest_idx[r], rest_idx[c]);
            Eigen::LLT<Eigen::MatrixXd> llt_a(a);
            if (llt_a.info() != Eigen::Success)
                throw numeric_error("sample_gwishart: conditioning block lost positive definiteness");

            const int d = static_cast<int>(nb.size());
            Eigen::MatrixXd e_n = Eigen::MatrixXd::Zero(p - 1, d);
            std::vector<int> nb_pos(d);
            for (int a_i = 0; a_i < d; ++a_i) {
                const int pos = nb[a_i] < j ? nb[a_i] : nb[a_i] - 1;
                nb_pos[a_i] = pos;
                e_n(pos, a_i) = 1.0;
            }
            const Eigen::MatrixXd a_inv_cols = llt_a.solve(e_n);
            Eigen::MatrixXd b(d, d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) b(r, c) = a_inv_cols(nb_pos[r], c);
            b = 0.5 * (b + b.transpose());
            Eigen::LLT<Eigen::MatrixXd> llt_b(b);
            if (llt_b.info() != Eigen::Success)
                throw numeric_error("sample_gwishart: conditional covariance block not positive definite");

            Eigen::VectorXd d_nj(d);
            for (int r = 0; r < d; ++r) d_nj[r] = rate(nb[r], j);
            const double djj = rate(j, j);
            const Eigen::VectorXd mean = -llt_b.solve(d_nj) / djj;

            Eigen::VectorXd z(d);
            for (int r = 0; r < d; ++r) z[r] = rnorm(rng);
            /* B = L L'; covariance (djj B)^{-1} has factor L^{-T}/sqrt(djj) */
            const Eigen::VectorXd k_n =
                mean + llt_b.matrixL().transpose().solve(z) / std::sqrt(djj);

            const double s = rgamma(rng, 0.5 * params.df, 0.5 * djj);
            const Eigen::VectorXd bk = llt_b.matrixL().transpose() * k_n;
            const double quad = bk.squaredNorm();

            for (int i = 0; i < p; ++i)
                if (i != j) k(i, j) = k(j, i) = 0.0;
            for (int r = 0; r < d; ++r) k(nb[r], j) = k(j, nb[r]) = k_n[r];
            k(j, j) = s + quad;
        }
    }
    return k;
}

bool edge_flip_update(Rng& rng, Graph& g, int i, int j, double prior_log_odds,
                      const DataMatrix& data, const GWishartParams& prior) {
    const bool adding = !g.has_edge(i, j);
    const double cur = log_marginal_likelihood(data, g, prior);
    Graph cand = g;
    cand.toggle_edge(i, j);
    const double prop = log_marginal_likelihood(data, cand, prior);
    const double log_r = (prop - cur) + (adding ? prior_log_odds : -prior_log_odds);
    if (std::log(runif(rng)) < log_r) {
        g = cand;
        return true;
    }
    return false;
}

double posterior_loglik_draw(Rng& rng, const DataMatrix& data, const Graph& g,
                             const GWishartParams& prior, int n_sweeps) {
    GWishartParams post = prior;
    post.df += data.rows();
    if (post.rate.size() == 0)
        post.rate = Eigen::MatrixXd::Identity(g.order(), g.order());
    post.rate += data.gram();
    return gaussian_loglik(data, sample_gwishart(rng, g, post, n_sweeps));
}

MarginalWorker::MarginalWorker(const DataMatrix& data, Graph g,
                               const GWishartParams& prior)
    : data_(&data), prior_(prior), g_(std::move(g)) {
    const int p = g_.order();
    if (data.cols() != p)
        throw input_error("MarginalWorker: data/graph dimension mismatch");
    prior_.rate = materialize_rate(p, prior);
    prior_diag_ = is_diagonal(prior_.rate);
    const int n = data.rows();
    trivial_ = (n == 0);
    if (trivial_) {
        cur_ = 0.0;
        return;
    }
    post_ = prior_;
    post_.df = prior_.df + n;
    post_.rate = prior_.rate + data.gram();
    log2pi_term_ = -0.5 * static_cast<double>(n) * p * kLogTwoPi;
    cur_ = evaluate(g_, &w_post_, &w_prior_);
}

double MarginalWorker::evaluate(const Graph& g, Eigen::MatrixXd* w_post_io,
                                Eigen::MatrixXd* w_prior_io) const {
    /* posterior-side constant (data-updated parameters, dense rate) */
    double post_val;
    if (g.is_complete()) {
        post_val = log_norm_complete(g.order(), post_);
        *w_post_io = post_.rate / (post_.df - 2.0);
    } else {
        const Eigen::MatrixXd sigma = post_.rate / (post_.df - 2.0);
        Completion c = complete_covariance(g, sigma, post_,
                                           w_post_.size() ? &w_post_ : nullptr);
        post_val = laplace_from_completion(g, post_.df, c);
        *w_post_io = std::move(c.w);
    }
    /* prior-side constant */
    double prior_val;
    if (g.is_complete()) {
        prior_val = log_norm_complete(g.order(), prior_);
        if (!prior_diag_) *w_prior_io = prior_.rate / (prior_.df - 2.0);
    } else if (prior_diag_) {
        prior_val = laplace_diag_rate(g, prior_.df, prior_.rate.diagonal());
    } else {
        const Eigen::MatrixXd sigma = prior_.rate / (prior_.df - 2.0);
        Completion c = complete_covariance(g, sigma, prior_,
                                           w_prior_.size() ? &w_prior_ : nullptr);
        prior_val = laplace_from_completion(g, prior_.df, c);
        *w_prior_io = std::move(c.w);
    }
    return post_val - prior_val + log2pi_term_;
}

double MarginalWorker::propose(const std::vector<std::pair<int, int>>& toggles) {
    if (pending_)
        throw input_error("MarginalWorker: previous proposal still pending");
    pending_ = true;
    pending_toggles_ = toggles;
    if (trivial_) {
        cand_ = 0.0;
        return cand_;
    }
    for (const auto& [i, j] : toggles) g_.toggle_edge(i, j);
    w_post_cand_ = w_post_;
    w_prior_cand_ = w_prior_;
    cand_ = evaluate(g_, &w_post_cand_, &w_prior_cand_);
    for (const auto& [i, j] : pending_toggles_) g_.toggle_edge(i, j);
    return cand_;
}

void MarginalWorker::accept() {
    if (!pending_) throw input_error("MarginalWorker: no pending proposal");
    for (const auto& [i, j] : pending_toggles_) g_.toggle_edge(i, j);
    if (!trivial_) {
        w_post_ = std::move(w_post_cand_);
        w_prior_ = std::move(w_prior_cand_);
        cur_ = cand_;
    }
    pending_ = false;
}

void MarginalWorker::reject() {
    if (!pending_) throw input_error("MarginalWorker: no pending proposal");
    pending_ = false;
}

void MarginalWorker::reset_graph(Graph g) {
    if (pending_) throw input_error("MarginalWorker: proposal pending");
    g_ = std::move(g);
    if (!trivial_) {
        w_post_.resize(0, 0);
        w_prior_.resize(0, 0);
        cur_ = evaluate(g_, &w_post_, &w_prior_);
    }
}

}  // namespace blockggm
