#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mmsb/errors.hpp"

namespace mmsb {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

using Rng = std::mt19937_64;

// Sorted list of node ids acting as one block of a node partition.
using NodeSet = std::vector<int>;

// pos[v] = position of node v inside `set`, or -1 when v is not a member.
std::vector<int> position_index(const NodeSet& set, int n);

// Adjacency matrix with one bit per entry; rows are packed into 64-bit
// words so n in the tens of thousands stays in the hundreds of MB.
class Graph {
 public:
  Graph() = default;
  Graph(int n, bool directed);

  int nodes() const { return n_; }
  bool directed() const { return directed_; }
  int words_per_row() const { return words_; }

  bool edge(int u, int v) const {
    return (bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] >>
            (v & 63)) & 1u;
  }
  // Mirrors the edge for undirected graphs. Self loops are rejected.
  void set_edge(int u, int v, bool value = true);

  const std::uint64_t* row(int u) const {
    return bits_.data() + static_cast<std::size_t>(u) * words_;
  }

  // Calls f(v) for every out-neighbor v of u, ascending.
  template <class F>
  void for_neighbors(int u, F&& f) const {
    const std::uint64_t* r = row(u);
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = r[w];
      while (bits) {
        int b = __builtin_ctzll(bits);
        f((w << 6) + b);
        bits &= bits - 1;
      }
    }
  }

  std::size_t edge_count() const;
  double density() const;  // edges / (n*(n-1)), counting ordered pairs

  // Zero diagonal always; symmetry when undirected.
  void validate() const;

  static Graph from_dense(const MatrixXi& adj, bool directed);

 private:
  int n_ = 0;
  bool directed_ = true;
  int words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Dense double copy of the block G[rows, cols].
MatrixXd dense_block(const Graph& g, const NodeSet& rows, const NodeSet& cols);

// Community memberships, one simplex column per node.
struct MembershipMatrix {
  MatrixXd pi;  // k x n

  int communities() const { return static_cast<int>(pi.rows()); }
  int nodes() const { return static_cast<int>(pi.cols()); }
  void validate(double tol = 1e-12) const;
};

// Model parameters. `alpha` holds Dirichlet concentrations when alpha0 > 0;
// in the block-model limit alpha0 == 0 it holds the community prior (a
// probability vector), since the concentrations themselves vanish.
struct MmsbModel {
  int k = 0;
  int n = 0;
  double alpha0 = 0.0;
  VectorXd alpha;
  MatrixXd P;  // k x k connectivity
  bool directed = true;

  VectorXd alpha_hat() const;
  void validate() const;
};

// Homogeneous connectivity P = q 11^T + (p-q) I with a uniform prior.
std::pair<MatrixXd, VectorXd> make_homogeneous(int k, double p, double q);

}  // namespace mmsb
