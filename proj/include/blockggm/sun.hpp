#pragma once

#include <Eigen/Dense>

#include "blockggm/model.hpp"
#include "blockggm/partition.hpp"
#include "blockggm/rng.hpp"

namespace blockggm {

/* State of the blocked-Wishart baseline chain: only the partition and its
   concentration move; the data enter through cached Gram quantities. */
struct SunState {
    Partition z;
    double nu = 1.0;

    explicit SunState(int p) : z(Partition::singletons(p)) {}
};

struct SunOptions {
    bool update_z = true;
    bool update_nu = true;
};

/* Baseline comparison model: Omega | z ~ Wishart(D(z), delta') where D(z)
   masks U^{-1} = (Y'Y)^{-1} to the blocks of z, so the partition weight
   has the closed form (n/2) log|D(z)| - ((n+delta')/2) log|I + D(z) U|.
   Inference is a collapsed Gibbs scan over labels against the Chinese
   restaurant process prior, plus an Escobar-West concentration update.
   Requires n >= p so that U is invertible; delta' = max(p, n). */
class SunSampler {
public:
    SunSampler(const DataMatrix& data, const Hyperparameters& hyper,
               SunOptions options = {});

    SunState& state() { return state_; }
    const SunState& state() const { return state_; }
    const Hyperparameters& hyper() const { return hyper_; }

    /* (n/2) log|D(z)| - ((n+delta')/2) log|I + D(z) U| with |D(z)| computed
       blockwise; -infinity if a masked block fails to be positive
       definite. */
    double log_partition_weight(const Partition& z) const;

    void sweep(Rng& rng);

private:
    Hyperparameters hyper_;
    SunOptions options_;
    SunState state_;
    Eigen::MatrixXd u_;
    Eigen::MatrixXd u_inv_;
    int n_;
    double delta_;
};

}  // namespace blockggm
