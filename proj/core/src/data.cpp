#include "hmmcr/data.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

struct ParsedLine {
  std::vector<int> codes;
  std::int64_t count = 1;
  bool hasCount = false;
};

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

ParsedLine parseLine(const std::string& raw, int lineNo, int alphabetSize) {
  ParsedLine out;
  std::string body = raw;
  const auto colon = raw.find(':');
  if (colon != std::string::npos) {
    body = raw.substr(0, colon);
    const std::string countText = trim(raw.substr(colon + 1));
    if (countText.empty()) throw ParseError(lineNo, "missing multiplicity after ':'");
    std::int64_t count = 0;
    for (char ch : countText) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) {
        throw ParseError(lineNo, "multiplicity '" + countText + "' is not a positive integer");
      }
      count = count * 10 + (ch - '0');
    }
    if (count <= 0) throw ParseError(lineNo, "multiplicity must be positive");
    out.count = count;
    out.hasCount = true;
  }
  for (char ch : body) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw ParseError(lineNo, std::string("unexpected character '") + ch + "'");
    }
    const int code = ch - '0';
    if (code >= alphabetSize) {
      throw ParseError(lineNo, "code " + std::to_string(code) + " outside alphabet of size " +
                                   std::to_string(alphabetSize));
    }
    out.codes.push_back(code);
  }
  if (out.codes.empty()) throw ParseError(lineNo, "line has no observation codes");
  return out;
}

struct HistoryKeyLess {
  bool operator()(const ObservationHistory& a, const ObservationHistory& b) const {
    if (a.firstOccasion != b.firstOccasion) return a.firstOccasion < b.firstOccasion;
    return a.codes < b.codes;
  }
};

void writeCodes(std::ostream& out, const ObservationHistory& h) {
  for (int c : h.codes) out << static_cast<char>('0' + c);
}

}  // namespace

int firstSighting(const std::vector<int>& codes) {
  for (std::size_t t = 0; t < codes.size(); ++t) {
    if (codes[t] != 0) return static_cast<int>(t);
  }
  return -1;
}

DataFile parseDataFile(std::istream& in, int alphabetSize) {
  if (alphabetSize < 2 || alphabetSize > 10) {
    throw Error(ErrorKind::InvalidArgument, "alphabet size must be in [2, 10]");
  }
  DataFile file;
  file.reduced.alphabetSize = alphabetSize;
  file.full.alphabetSize = alphabetSize;
  std::string raw;
  int lineNo = 0;
  int k = -1;
  std::vector<int> lines;
  while (std::getline(in, raw)) {
    ++lineNo;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    ParsedLine parsed = parseLine(line, lineNo, alphabetSize);
    if (k < 0) {
      k = static_cast<int>(parsed.codes.size());
    } else if (static_cast<int>(parsed.codes.size()) != k) {
      throw ParseError(lineNo, "history has " + std::to_string(parsed.codes.size()) +
                                   " occasions, expected " + std::to_string(k));
    }
    const int first = firstSighting(parsed.codes);
    if (first < 0) throw ParseError(lineNo, "history has no sighting");
    if (parsed.hasCount) file.kind = DataFile::Kind::Reduced;
    file.reduced.uniqueHistories.push_back({std::move(parsed.codes), first});
    file.reduced.multiplicities.push_back(parsed.count);
    file.reduced.originalCount += parsed.count;
    lines.push_back(lineNo);
  }
  if (k < 0) throw ParseError(lineNo == 0 ? 1 : lineNo, "input contains no histories");
  file.reduced.numOccasions = k;
  file.full.numOccasions = k;

  if (file.kind == DataFile::Kind::Full) {
    file.full.histories = file.reduced.uniqueHistories;
    file.full.lineNumbers = std::move(lines);
    file.reduced = reduce(file.full);
  } else {
    // Reduced files may still repeat a history; merge so uniqueness holds.
    file.reduced = reduce(expand(file.reduced));
  }
  return file;
}

CaptureDataset parseDataset(std::istream& in, int alphabetSize) {
  DataFile file = parseDataFile(in, alphabetSize);
  if (file.kind == DataFile::Kind::Reduced) {
    throw Error(ErrorKind::Parse, "input is in reduced (history : count) format");
  }
  return std::move(file.full);
}

CaptureDataset parseDataset(const std::string& text, int alphabetSize) {
  std::istringstream in(text);
  return parseDataset(in, alphabetSize);
}

DataFile readDataFile(const std::string& path, int alphabetSize) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open data file '" + path + "'");
  return parseDataFile(in, alphabetSize);
}

void writeDataset(std::ostream& out, const CaptureDataset& dataset) {
  for (const auto& h : dataset.histories) {
    writeCodes(out, h);
    out << '\n';
  }
}

void writeReducedDataset(std::ostream& out, const ReducedDataset& reduced) {
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    writeCodes(out, reduced.uniqueHistories[j]);
    out << " : " << reduced.multiplicities[j] << '\n';
  }
}

ReducedDataset reduce(const CaptureDataset& dataset) {
  ReducedDataset out;
  out.numOccasions = dataset.numOccasions;
  out.alphabetSize = dataset.alphabetSize;
  out.originalCount = static_cast<std::int64_t>(dataset.size());
  std::map<ObservationHistory, std::size_t, HistoryKeyLess> index;
  for (const auto& h : dataset.histories) {
    auto [it, inserted] = index.try_emplace(h, out.uniqueHistories.size());
    if (inserted) {
      out.uniqueHistories.push_back(h);
      out.multiplicities.push_back(1);
    } else {
      ++out.multiplicities[it->second];
    }
  }
  return out;
}

CaptureDataset expand(const ReducedDataset& reduced) {
  CaptureDataset out;
  out.numOccasions = reduced.numOccasions;
  out.alphabetSize = reduced.alphabetSize;
  out.histories.reserve(static_cast<std::size_t>(reduced.originalCount));
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    for (std::int64_t r = 0; r < reduced.multiplicities[j]; ++r) {
      out.histories.push_back(reduced.uniqueHistories[j]);
    }
  }
  out.lineNumbers.assign(out.histories.size(), 0);
  return out;
}

}  // namespace hmmcr
