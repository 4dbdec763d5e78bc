#include <cmath>
#include <string>

#include <doctest.h>

#include "blockggm/common.hpp"
#include "blockggm/model.hpp"
#include "blockggm/rng.hpp"
#include "blockggm/special.hpp"
#include "oracles.hpp"

using namespace blockggm;

namespace {
constexpr double kLog2Pi = 1.8378770664093453;

BlockParams make_params(std::vector<double> beta, std::vector<double> theta,
                        Partition c) {
    return BlockParams{std::move(beta), std::move(theta), std::move(c), 1.0};
}
}  // namespace

TEST_SUITE("model") {

TEST_CASE("compute_mu plug-in cases") {
    SUBCASE("shared block adds its effect") {
        const Partition z = Partition::single_block(2);
        const auto params =
            make_params({1.0}, {0.0, 0.0}, Partition::singletons(2));
        CHECK(compute_mu(0, 1, z, params) == doctest::Approx(1.0));
    }

    SUBCASE("different blocks drop the effect") {
        const Partition z = Partition::singletons(2);
        const auto params =
            make_params({3.0, 3.0}, {0.5, -0.5}, Partition::singletons(2));
        CHECK(compute_mu(0, 1, z, params) == doctest::Approx(0.0));
    }

    SUBCASE("popularity and block effects combine") {
        const Partition z = Partition::from_labels({0, 0, 1});
        const auto params =
            make_params({2.0, 5.0}, {1.0}, Partition::single_block(3));
        CHECK(compute_mu(0, 1, z, params) == doctest::Approx(4.0));
        CHECK(compute_mu(0, 2, z, params) == doctest::Approx(2.0));
        CHECK(compute_mu(1, 2, z, params) == doctest::Approx(2.0));
    }

    SUBCASE("symmetry") {
        Rng rng(3);
        const Partition z = Partition::from_labels({0, 1, 0, 2, 1});
        auto params = make_params({0.3, -1.2, 0.7}, {0.1, -0.4, 0.9},
                                  Partition::from_labels({0, 1, 2, 0, 1}));
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j)
                CHECK(compute_mu(i, j, z, params) ==
                      doctest::Approx(compute_mu(j, i, z, params)));
    }
}

TEST_CASE("edge probability log forms") {
    for (double mu : {-3.0, -0.7, 0.0, 1.2, 4.0}) {
        CHECK(edge_probability(mu) == doctest::Approx(norm_cdf(mu)));
        CHECK(std::exp(log_edge_probability(mu)) ==
              doctest::Approx(edge_probability(mu)).epsilon(1e-12));
        CHECK(std::exp(log_edge_absent(mu)) ==
              doctest::Approx(1.0 - edge_probability(mu)).epsilon(1e-12));
    }
    /* the ratio pinned by the no-edge case at beta* = 3 versus 0 */
    const double factor =
        std::exp(log_edge_absent(3.0) - log_edge_absent(0.0));
    CHECK(factor == doctest::Approx(0.00270).epsilon(2e-3));
}

TEST_CASE("gaussian_loglik closed forms") {
    SUBCASE("one standard normal observation at zero") {
        Eigen::MatrixXd y(1, 1);
        y << 0.0;
        const Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(1, 1);
        CHECK(gaussian_loglik(DataMatrix(y), omega) ==
              doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-14));
    }

    SUBCASE("two unit observations") {
        Eigen::MatrixXd y(2, 1);
        y << 1.0, -1.0;
        const Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(1, 1);
        CHECK(gaussian_loglik(DataMatrix(y), omega) ==
              doctest::Approx(-kLog2Pi - 1.0).epsilon(1e-14));
    }

    SUBCASE("3x3 case against a row-by-row density oracle") {
        Eigen::MatrixXd omega(3, 3);
        omega << 2.0, 0.5, 0.0, 0.5, 1.5, -0.3, 0.0, -0.3, 1.0;
        Eigen::MatrixXd y(4, 3);
        y << 0.3, -1.0, 0.8, 1.2, 0.4, -0.5, -0.7, 0.1, 0.0, 0.2, 2.0, -1.1;
        const Eigen::MatrixXd sigma = omega.inverse();
        const double logdet = std::log(omega.determinant());
        double oracle = 0.0;
        for (int r = 0; r < 4; ++r) {
            const Eigen::VectorXd row = y.row(r).transpose();
            oracle += -0.5 * 3 * kLog2Pi + 0.5 * logdet -
                      0.5 * row.dot(omega * row);
        }
        CHECK(gaussian_loglik(DataMatrix(y), omega) ==
              doctest::Approx(oracle).epsilon(1e-12));

        /* permuting rows leaves the value unchanged */
        Eigen::MatrixXd yp(4, 3);
        yp << y.row(2), y.row(0), y.row(3), y.row(1);
        CHECK(gaussian_loglik(DataMatrix(yp), omega) ==
              doctest::Approx(gaussian_loglik(DataMatrix(y), omega))
                  .epsilon(1e-13));
    }

    SUBCASE("rejects non positive definite precision") {
        Eigen::MatrixXd y(2, 2);
        y << 1.0, 0.0, 0.0, 1.0;
        Eigen::MatrixXd omega(2, 2);
        omega << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(gaussian_loglik(DataMatrix(y), omega), numeric_error);
    }
}

TEST_CASE("DataMatrix validates entries with position context") {
    Eigen::MatrixXd y(3, 2);
    y << 1.0, 2.0, 3.0, std::nan(""), 5.0, 6.0;
    try {
        DataMatrix d(y);
        FAIL("expected input_error");
    } catch (const input_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
    }

    Eigen::MatrixXd inf(1, 1);
    inf << std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DataMatrix{inf}, input_error);

    /* n = 0 is the prior-only configuration */
    const DataMatrix empty = DataMatrix::empty(4);
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 4);
    CHECK(empty.gram().isZero(0.0));
}

TEST_CASE("gram cache matches Y'Y") {
    Eigen::MatrixXd y(5, 3);
    Rng rng(8);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) y(i, j) = rnorm(rng);
    const DataMatrix d(y);
    CHECK((d.gram() - y.transpose() * y).norm() < 1e-12);
    CHECK((d.gram() - d.gram().transpose()).norm() == 0.0);
}

TEST_CASE("hyperparameter validation") {
    Hyperparameters h;
    CHECK_NOTHROW(h.validate(5));
    h.tie_prob = 1.5;
    CHECK_THROWS_AS(h.validate(5), input_error);
    h = Hyperparameters{};
    h.gwish_df = 2.0;
    CHECK_THROWS_AS(h.validate(5), input_error);
    h = Hyperparameters{};
    h.s2_beta = 0.0;
    CHECK_THROWS_AS(h.validate(5), input_error);
    h = Hyperparameters{};
    h.a_nu = -1.0;
    CHECK_THROWS_AS(h.validate(5), input_error);
    h = Hyperparameters{};
    h.gwish_rate = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(h.validate(5), input_error);  // dimension mismatch
    h.gwish_rate = Eigen::MatrixXd::Identity(5, 5);
    CHECK_NOTHROW(h.validate(5));
}

}  // TEST_SUITE
