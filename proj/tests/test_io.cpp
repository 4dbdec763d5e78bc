#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "blockggm/common.hpp"
#include "blockggm/io.hpp"
#include "blockggm/special.hpp"

using namespace blockggm;

namespace {
struct TempFile {
    std::string path;

    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() /
                ("blockggm_test_" + name))
                   .string();
    }
    ~TempFile() { std::remove(path.c_str()); }

    void write(const std::string& text) const {
        std::ofstream out(path);
        out << text;
    }
};

std::string check_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const input_error& e) {
        return e.what();
    }
    return "";
}
}  // namespace

TEST_SUITE("io") {

TEST_CASE("csv round trip preserves every bit") {
    Eigen::MatrixXd m(3, 2);
    m << 0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, M_PI, -0.0;
    TempFile file("roundtrip.csv");
    write_csv_matrix(file.path, m);
    const Eigen::MatrixXd back = read_csv_matrix(file.path);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) CHECK(back(i, j) == m(i, j));
}

TEST_CASE("csv header detection") {
    TempFile file("header.csv");
    file.write("x,y\n1,2\n3,4\n");
    const Eigen::MatrixXd m = read_csv_matrix(file.path);
    REQUIRE(m.rows() == 2);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 1) == 4.0);

    /* an all-numeric first line is data, not a header */
    TempFile plain("plain.csv");
    plain.write("1,2\n3,4\n");
    CHECK(read_csv_matrix(plain.path).rows() == 2);
}

TEST_CASE("csv errors name the offending position") {
    TempFile bad("bad.csv");
    bad.write("1,2\n3,oops\n");
    const std::string parse_msg =
        check_message([&] { read_csv_matrix(bad.path); });
    CHECK(parse_msg.find("line 2") != std::string::npos);
    CHECK(parse_msg.find("column 2") != std::string::npos);
    CHECK(parse_msg.find("cannot parse") != std::string::npos);

    TempFile ragged("ragged.csv");
    ragged.write("1,2,3\n4,5\n");
    const std::string ragged_msg =
        check_message([&] { read_csv_matrix(ragged.path); });
    CHECK(ragged_msg.find("has 2 fields, expected 3") != std::string::npos);

    TempFile empty("empty.csv");
    empty.write("# nothing here\n");
    CHECK(check_message([&] { read_csv_matrix(empty.path); })
              .find("no numeric rows") != std::string::npos);

    CHECK_THROWS_AS(read_csv_matrix("/nonexistent/path/x.csv"), input_error);
}

TEST_CASE("config files parse key = value pairs") {
    TempFile file("run.cfg");
    file.write(
        "# comment line\n"
        "iterations = 100\n"
        "\n"
        "model= sics\n"
        "  seed   =  7  \n"
        "model = dcsbm\n");  // later duplicate wins
    const auto cfg = read_config_file(file.path);
    CHECK(cfg.at("iterations") == "100");
    CHECK(cfg.at("model") == "dcsbm");
    CHECK(cfg.at("seed") == "7");
    CHECK(cfg.size() == 3);

    TempFile bad("bad.cfg");
    bad.write("just some words\n");
    CHECK(check_message([&] { read_config_file(bad.path); })
              .find("expected key = value") != std::string::npos);
}

TEST_CASE("quantile normalization maps ranks to normal quantiles") {
    const std::vector<double> out = quantile_normalize({5.0, 1.0, 9.0});
    /* ranks 2,1,3 of 3 map to quantiles at 0.5, 1/6, 5/6 */
    CHECK(out[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(norm_quantile(1.0 / 6.0)).epsilon(1e-9));
    CHECK(out[2] == doctest::Approx(norm_quantile(5.0 / 6.0)).epsilon(1e-9));
    CHECK(out[1] == doctest::Approx(-0.9674216).epsilon(1e-6));
    CHECK(out[2] == doctest::Approx(0.9674216).epsilon(1e-6));

    /* antisymmetric for symmetric inputs */
    const std::vector<double> sym = quantile_normalize({-3, -1, 0, 1, 3});
    for (int i = 0; i < 5; ++i)
        CHECK(sym[i] == doctest::Approx(-sym[4 - i]).epsilon(1e-12));

    /* ties share the average rank */
    const std::vector<double> tied = quantile_normalize({2.0, 2.0});
    CHECK(tied[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tied[1] == doctest::Approx(0.0).epsilon(1e-12));

    const std::vector<double> flat = quantile_normalize({4.0, 4.0, 4.0});
    for (double v : flat) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("column-wise normalization treats columns independently") {
    Eigen::MatrixXd y(3, 2);
    y << 5, 10, 1, 30, 9, 20;
    const Eigen::MatrixXd q = quantile_normalize_columns(y);
    const std::vector<double> col0 = quantile_normalize({5, 1, 9});
    const std::vector<double> col1 = quantile_normalize({10, 30, 20});
    for (int i = 0; i < 3; ++i) {
        CHECK(q(i, 0) == doctest::Approx(col0[i]).epsilon(1e-12));
        CHECK(q(i, 1) == doctest::Approx(col1[i]).epsilon(1e-12));
    }
}

TEST_CASE("karate club network") {
    const Graph g = karate_graph();
    CHECK(g.order() == 34);
    CHECK(g.edge_count() == 78);
    CHECK(g.degree(0) == 16);   // the instructor
    CHECK(g.degree(33) == 17);  // the club president
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(0, 33));

    const std::vector<int>& f = karate_factions();
    REQUIRE(f.size() == 34);
    int side_one = 0;
    for (int v : f) {
        CHECK((v == 0 || v == 1));
        side_one += v;
    }
    CHECK(side_one == 17);
    CHECK(f[0] == 0);
    CHECK(f[33] == 1);
}

TEST_CASE("format_double round trips exactly") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(std::stod(format_double(1e-300)) == 1e-300);
}

}  // TEST_SUITE
