#include "hmmcr/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

void checkCorrelation(const Matrix& c) {
  if (c.rows() != c.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "correlation matrix must be square");
  }
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (!std::isfinite(c(i, j)) || std::abs(c(i, j)) > 1.0 + 1e-9) {
        throw Error(ErrorKind::InvalidArgument, "correlation entries must lie in [-1, 1]");
      }
    }
  }
}

struct Dendrogram {
  std::vector<MergeStep> merges;
};

Dendrogram build(const Matrix& corr) {
  checkCorrelation(corr);
  const auto n = static_cast<std::size_t>(corr.rows());
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  auto dist = [&](std::size_t a, std::size_t b) {
    return 1.0 - std::min(1.0, std::abs(corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))));
  };
  // cluster-level complete-linkage distances
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) d[a][b] = dist(a, b);
  std::vector<bool> alive(n, true);

  Dendrogram out;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        if (d[a][b] < best) {
          best = d[a][b];
          ba = a;
          bb = b;
        }
      }
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(clusters[ba].begin(), clusters[ba].end());
    clusters[bb].clear();
    alive[bb] = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == ba) continue;
      d[ba][c] = d[c][ba] = std::max(d[ba][c], d[bb][c]);
    }
    out.merges.push_back({clusters[ba], best});
  }
  return out;
}

std::vector<std::vector<std::size_t>> cut(const Dendrogram& tree, std::size_t n, double h) {
  std::vector<std::vector<std::size_t>> blocks;
  if (n == 0) return blocks;
  if (h >= 1.0) {
    blocks.emplace_back();
    for (std::size_t i = 0; i < n; ++i) blocks.back().push_back(i);
    return blocks;
  }
  // union-find over the merges below the cut
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& m : tree.merges) {
    if (!(m.height < h)) break;
    for (std::size_t j = 1; j < m.members.size(); ++j) {
      parent[find(m.members[j])] = find(m.members[0]);
    }
  }
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == n) {
      slot[r] = blocks.size();
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

}  // namespace

std::vector<MergeStep> completeLinkage(const Matrix& correlation) {
  return build(correlation).merges;
}

std::vector<std::vector<std::size_t>> cutPartition(const Matrix& correlation, double cutHeight) {
  return cut(build(correlation), static_cast<std::size_t>(correlation.rows()), cutHeight);
}

std::vector<BlockingCandidate> candidatePartitions(const Matrix& correlation,
                                                   std::span<const double> heights) {
  const Dendrogram tree = build(correlation);
  std::vector<BlockingCandidate> out;
  for (double h : heights) {
    if (!(h >= 0.0)) throw Error(ErrorKind::InvalidArgument, "cut heights must be >= 0");
    out.push_back({cut(tree, static_cast<std::size_t>(correlation.rows()), h), h, 0.0});
  }
  return out;
}

std::vector<double> defaultCutHeights() {
  std::vector<double> h;
  for (int i = 0; i <= 10; ++i) h.push_back(i / 10.0);
  return h;
}

}  // namespace hmmcr
