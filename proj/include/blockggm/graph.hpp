#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace blockggm {

/* Simple undirected graph on nodes 0..p-1, dense adjacency storage.
   No self loops.  Degree and forward-degree (#{j > i : (i,j) present})
   counts are maintained incrementally since the samplers toggle edges
   millions of times. */
class Graph {
public:
    explicit Graph(int p);
    static Graph complete(int p);

    int order() const { return p_; }
    int edge_count() const { return n_edges_; }

    bool has_edge(int i, int j) const {
        check_pair(i, j);
        return adj_[static_cast<std::size_t>(i) * p_ + j] != 0;
    }

    void set_edge(int i, int j, bool present);
    void toggle_edge(int i, int j) { set_edge(i, j, !has_edge(i, j)); }

    int degree(int i) const { return degree_[check_node(i)]; }

    /* #{j > i : (i,j) in E}; the node ordering is the natural 0..p-1. */
    int forward_degree(int i) const { return fwd_degree_[check_node(i)]; }

    std::vector<int> neighbors(int i) const;
    std::vector<std::pair<int, int>> edges() const;  // sorted, i < j

    bool is_complete() const { return 2 * n_edges_ == p_ * (p_ - 1); }
    bool is_empty() const { return n_edges_ == 0; }

    /* Packed adjacency bits of the upper triangle; exact cache/equality key. */
    std::vector<std::uint64_t> pack_bits() const;

    bool operator==(const Graph& other) const {
        return p_ == other.p_ && adj_ == other.adj_;
    }

private:
    int check_node(int i) const;
    void check_pair(int i, int j) const;

    int p_;
    int n_edges_;
    std::vector<std::uint8_t> adj_;
    std::vector<int> degree_;
    std::vector<int> fwd_degree_;
};

}  // namespace blockggm
