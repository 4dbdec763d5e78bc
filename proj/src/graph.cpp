#include "blockggm/graph.hpp"

#include <string>

#include "blockggm/common.hpp"

namespace blockggm {

Graph::Graph(int p) : p_(p), n_edges_(0) {
    if (p < 1) throw input_error("Graph: need at least one node");
    adj_.assign(static_cast<std::size_t>(p) * p, 0);
    degree_.assign(p, 0);
    fwd_degree_.assign(p, 0);
}

Graph Graph::complete(int p) {
    Graph g(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) g.set_edge(i, j, true);
    return g;
}

int Graph::check_node(int i) const {
    if (i < 0 || i >= p_)
        throw input_error("Graph: node index " + std::to_string(i) +
                          " out of range for p=" + std::to_string(p_));
    return i;
}

void Graph::check_pair(int i, int j) const {
    check_node(i);
    check_node(j);
    if (i == j)
        throw input_error("Graph: self loop at node " + std::to_string(i) +
                          " is not allowed");
}

void Graph::set_edge(int i, int j, bool present) {
    check_pair(i, j);
    std::uint8_t& a = adj_[static_cast<std::size_t>(i) * p_ + j];
    if (a == static_cast<std::uint8_t>(present)) return;
    a = static_cast<std::uint8_t>(present);
    adj_[static_cast<std::size_t>(j) * p_ + i] = a;
    const int d = present ? 1 : -1;
    n_edges_ += d;
    degree_[i] += d;
    degree_[j] += d;
    fwd_degree_[std::min(i, j)] += d;
}

std::vector<int> Graph::neighbors(int i) const {
    check_node(i);
    std::vector<int> out;
    out.reserve(degree_[i]);
    const std::uint8_t* row = &adj_[static_cast<std::size_t>(i) * p_];
    for (int j = 0; j < p_; ++j)
        if (row[j]) out.push_back(j);
    return out;
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(n_edges_);
    for (int i = 0; i < p_; ++i) {
        const std::uint8_t* row = &adj_[static_cast<std::size_t>(i) * p_];
        for (int j = i + 1; j < p_; ++j)
            if (row[j]) out.emplace_back(i, j);
    }
    return out;
}

std::vector<std::uint64_t> Graph::pack_bits() const {
    std::vector<std::uint64_t> out((static_cast<std::size_t>(p_) * (p_ - 1) / 2 + 63) / 64, 0);
    std::size_t bit = 0;
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j, ++bit)
            if (adj_[static_cast<std::size_t>(i) * p_ + j])
                out[bit / 64] |= (std::uint64_t{1} << (bit % 64));
    return out;
}

}  // namespace blockggm
