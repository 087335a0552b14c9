#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmmcr/hmm.hpp"

namespace hmmcr {

/// Raw capture histories. Codes are file symbols in [0, alphabetSize):
/// 0 means "not seen", 1..alphabetSize-1 are the observable classes.
/// `firstOccasion` of each history is its first non-zero symbol.
struct CaptureDataset {
  std::vector<ObservationHistory> histories;
  /// 1-based source line of each history (0 when not read from text).
  std::vector<int> lineNumbers;
  int numOccasions = 0;
  int alphabetSize = 0;

  std::size_t size() const { return histories.size(); }
};

/// Unique histories with multiplicities, in order of first appearance.
struct ReducedDataset {
  std::vector<ObservationHistory> uniqueHistories;
  std::vector<std::int64_t> multiplicities;
  std::int64_t originalCount = 0;
  int numOccasions = 0;
  int alphabetSize = 0;

  std::size_t size() const { return uniqueHistories.size(); }
  double compressionFactor() const {
    return static_cast<double>(originalCount) / static_cast<double>(uniqueHistories.size());
  }
};

/// Contents of a data file: either one history per line, or reduced lines
/// carrying a `: count` multiplicity suffix.
struct DataFile {
  enum class Kind { Full, Reduced };
  Kind kind = Kind::Full;
  CaptureDataset full;     // populated when kind == Full
  ReducedDataset reduced;  // populated for both kinds
};

/// Parses one history per line: single-digit codes, optionally separated by
/// whitespace. Blank lines and lines starting with '#' are skipped. Throws
/// ParseError on ragged lines, out-of-alphabet codes, histories with no
/// sighting, reduced-format lines, or input without histories.
CaptureDataset parseDataset(std::istream& in, int alphabetSize);
CaptureDataset parseDataset(const std::string& text, int alphabetSize);

/// Accepts plain and reduced lines (`1 0 1 : 25`). Files with at least one
/// multiplicity suffix are reported as Kind::Reduced.
DataFile parseDataFile(std::istream& in, int alphabetSize);
DataFile readDataFile(const std::string& path, int alphabetSize);

/// Writes one history per line with codes as adjacent digits.
void writeDataset(std::ostream& out, const CaptureDataset& dataset);
/// Writes `codes : count` lines.
void writeReducedDataset(std::ostream& out, const ReducedDataset& reduced);

/// Collapses identical (codes, firstOccasion) histories.
ReducedDataset reduce(const CaptureDataset& dataset);

/// Repeats each unique history by its multiplicity.
CaptureDataset expand(const ReducedDataset& reduced);

/// Index of the first non-zero code, or -1.
int firstSighting(const std::vector<int>& codes);

}  // namespace hmmcr
