#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blockggm/graph.hpp"

namespace blockggm {

/* Reads a comma-separated numeric matrix: rows are observations, columns
   variables.  A first line containing any non-numeric token is treated as
   a header and skipped.  Ragged rows or unparsable fields raise input
   errors naming the row and column. */
Eigen::MatrixXd read_csv_matrix(const std::string& path);

/* Writes a matrix as CSV with full round-trip precision (%.17g). */
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);

/* Shortest exact decimal rendering used across all artifacts. */
std::string format_double(double v);

/* Parses a `key = value` file: one pair per line, '#' starts a comment,
   blank lines ignored.  Later duplicates override earlier ones. */
std::map<std::string, std::string> read_config_file(const std::string& path);

/* Maps the value of rank r (average ranks on ties) to the standard normal
   quantile at (r - 0.5) / n, making the column marginally Gaussian. */
std::vector<double> quantile_normalize(const std::vector<double>& column);

/* Column-wise quantile normalization of a data matrix. */
Eigen::MatrixXd quantile_normalize_columns(const Eigen::MatrixXd& y);

/* Zachary's karate club friendship network: 34 members, 78 edges
   (Zachary, 1977). */
Graph karate_graph();

/* Faction that each member sided with after the club split: 0 for the
   instructor's group (Mr Hi), 1 for the officers' (John A). */
const std::vector<int>& karate_factions();

}  // namespace blockggm
