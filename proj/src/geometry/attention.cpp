// SPDX-License-Identifier: Apache-2.0
#include "b2dr/geometry/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>
#include <span>
#include <string>

#include "b2dr/common/error.hpp"
#include "b2dr/kernels/kernels.hpp"

namespace b2dr {
namespace {

void check_shapes(const TokenMatrix& h_cur, const TokenMatrix& pe_cur, const TokenMatrix& h_ref,
                  const TokenMatrix& pe_ref) {
  if (h_cur.rows() < 1 || h_ref.rows() < 1) throw ShapeError("attention needs at least one query and key");
  const auto d = h_cur.cols();
  if (pe_cur.rows() != h_cur.rows() || pe_cur.cols() != d || h_ref.cols() != d ||
      pe_ref.rows() != h_ref.rows() || pe_ref.cols() != d) {
    throw ShapeError("attention dimension mismatch: queries " + std::to_string(h_cur.rows()) + "x" +
                     std::to_string(d) + ", keys " + std::to_string(h_ref.rows()) + "x" +
                     std::to_string(h_ref.cols()));
  }
}

std::span<const double> row(const TokenMatrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Rank of every key row under lexicographic (key, value) order. Reductions
// run in (score, rank) order so a joint permutation of keys and values leaves
// every rounding step unchanged.
std::vector<Eigen::Index> canonical_rank(const TokenMatrix& keys, const TokenMatrix& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(keys.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < keys.cols(); ++c)
      if (keys(a, c) != keys(b, c)) return keys(a, c) < keys(b, c);
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      if (values(a, c) != values(b, c)) return values(a, c) < values(b, c);
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  std::vector<Eigen::Index> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    // Identical rows share a rank; their order cannot affect any sum.
    const bool tie = r > 0 && !less(order[r - 1], order[r]);
    rank[static_cast<std::size_t>(order[r])] = tie ? rank[static_cast<std::size_t>(order[r - 1])]
                                                   : static_cast<Eigen::Index>(r);
  }
  return rank;
}

struct AttentionPass {
  TokenMatrix weights;
  std::vector<std::vector<Eigen::Index>> order;  // per query, keys in reduction order
};

AttentionPass attend(const TokenMatrix& h_cur, const TokenMatrix& pe_cur, const TokenMatrix& h_ref,
                     const TokenMatrix& pe_ref) {
  check_shapes(h_cur, pe_cur, h_ref, pe_ref);
  const auto& k = kernels::active();
  const TokenMatrix q = h_cur + pe_cur;
  const TokenMatrix keys = h_ref + pe_ref;
  const std::vector<Eigen::Index> rank = canonical_rank(keys, h_ref);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  AttentionPass pass{TokenMatrix(q.rows(), keys.rows()), {}};
  pass.order.resize(static_cast<std::size_t>(q.rows()));
  TokenMatrix& w = pass.weights;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double max_score = -INFINITY;
    for (Eigen::Index j = 0; j < keys.rows(); ++j) {
      const double s = k.dot(row(q, i), row(keys, j)) * scale;
      w(i, j) = s;
      max_score = std::max(max_score, s);
    }
    auto& ord = pass.order[static_cast<std::size_t>(i)];
    ord.resize(static_cast<std::size_t>(keys.rows()));
    std::iota(ord.begin(), ord.end(), Eigen::Index{0});
    std::sort(ord.begin(), ord.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (w(i, a) != w(i, b)) return w(i, a) < w(i, b);
      return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });
    double total = 0.0;
    for (Eigen::Index j : ord) {
      w(i, j) = std::exp(w(i, j) - max_score);
      total += w(i, j);
    }
    w.row(i) /= total;
  }
  return pass;
}

}  // namespace

TokenMatrix attention_weights(const TokenMatrix& h_cur, const TokenMatrix& pe_cur,
                              const TokenMatrix& h_ref, const TokenMatrix& pe_ref) {
  return attend(h_cur, pe_cur, h_ref, pe_ref).weights;
}

TokenMatrix reference_cross_attention(const TokenMatrix& h_cur, const TokenMatrix& pe_cur,
                                      const TokenMatrix& h_ref, const TokenMatrix& pe_ref) {
  const AttentionPass pass = attend(h_cur, pe_cur, h_ref, pe_ref);
  const auto& k = kernels::active();
  const std::size_t d = static_cast<std::size_t>(h_ref.cols());
  TokenMatrix out = TokenMatrix::Zero(h_cur.rows(), h_ref.cols());
  std::vector<const double*> rows(static_cast<std::size_t>(h_ref.rows()));
  std::vector<double> weights(rows.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto& ord = pass.order[static_cast<std::size_t>(i)];
    for (std::size_t r = 0; r < ord.size(); ++r) {
      rows[r] = h_ref.data() + ord[r] * h_ref.cols();
      weights[r] = pass.weights(i, ord[r]);
    }
    k.weighted_row_sum(std::span<double>(out.data() + i * out.cols(), d), rows, weights);
  }
  return out;
}

}  // namespace b2dr
