#pragma once

#include <span>
#include <vector>

#include "hmmcr/hmm.hpp"

namespace hmmcr {

struct BlockingCandidate {
  std::vector<std::vector<std::size_t>> partition;
  double sourceCutHeight = 0.0;
  /// Filled in by autoBlock after the evaluation chain; 0 until then.
  double measuredMinEsps = 0.0;
};

/// One agglomeration step: the cluster formed and the height it formed at.
struct MergeStep {
  std::vector<std::size_t> members;
  double height = 0.0;
};

/// Complete-linkage clustering on distance 1 - |rho|. Returns the merges in
/// order of increasing height; each entry lists the members of the new
/// cluster.
std::vector<MergeStep> completeLinkage(const Matrix& correlation);

/// Partition obtained by applying every merge with height strictly below
/// `cutHeight`. A cut at 1 or above gives a single block. Blocks are sorted
/// internally and by their first index.
std::vector<std::vector<std::size_t>> cutPartition(const Matrix& correlation, double cutHeight);

/// One candidate per height, in the order given. Duplicates are kept so the
/// caller can see which heights produced the same partition.
std::vector<BlockingCandidate> candidatePartitions(const Matrix& correlation,
                                                   std::span<const double> heights);

/// {0, 0.1, ..., 1.0}
std::vector<double> defaultCutHeights();

}  // namespace hmmcr
