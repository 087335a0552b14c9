#include "hmmcr/chain_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

using Json = nlohmann::json;

std::string formatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Names like psi[1,2] need quoting.
std::string csvField(const std::string& text) {
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

Json schemeJson(const SamplerScheme& scheme, const std::vector<std::string>& names) {
  Json blocks = Json::array();
  Json blockNames = Json::array();
  for (const auto& b : scheme.blocks) {
    blocks.push_back(b);
    Json n = Json::array();
    for (std::size_t j : b) n.push_back(j < names.size() ? names[j] : std::to_string(j));
    blockNames.push_back(n);
  }
  return Json{{"blocks", blocks},
              {"names", blockNames},
              {"latent_sampling", scheme.latentSampling},
              {"adaptation",
               {{"enabled", scheme.adaptation.enabled},
                {"interval", scheme.adaptation.interval},
                {"univariate_target", scheme.adaptation.univariateTarget},
                {"block_target", scheme.adaptation.blockTarget}}}};
}

SamplerScheme schemeFromJson(const Json& doc) {
  SamplerScheme s;
  s.blocks = doc.at("blocks").get<std::vector<std::vector<std::size_t>>>();
  s.latentSampling = doc.value("latent_sampling", false);
  if (doc.contains("adaptation")) {
    const auto& a = doc.at("adaptation");
    s.adaptation.enabled = a.value("enabled", true);
    s.adaptation.interval = a.value("interval", 200);
    s.adaptation.univariateTarget = a.value("univariate_target", 0.44);
    s.adaptation.blockTarget = a.value("block_target", 0.234);
  }
  return s;
}

}  // namespace

void writeChainCsv(std::ostream& out, const ChainOutput& chain) {
  for (std::size_t j = 0; j < chain.names.size(); ++j) {
    if (j) out << ',';
    out << csvField(chain.names[j]);
  }
  out << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < chain.samples.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < chain.samples.cols(); ++j) {
      if (j) line += ',';
      line += formatDouble(chain.samples(i, j));
    }
    line += '\n';
    out << line;
  }
}

void writeChainMeta(std::ostream& out, const ChainOutput& chain,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  Json doc;
  doc["seed"] = chain.seed;
  doc["iterations"] = chain.iterations();
  doc["runtime_seconds"] = chain.runtimeSeconds;
  doc["runtime_ms"] = std::round(chain.runtimeSeconds * 1000.0);
  doc["acceptance_rates"] = chain.acceptanceRates;
  doc["latent_count"] = chain.latentCount;
  doc["work"] = chain.work;
  doc["scheme"] = schemeJson(chain.scheme, chain.names);
  for (const auto& [k, v] : extra) doc[k] = v;
  out << doc.dump(2) << '\n';
}

ChainOutput readChain(std::istream& csv, std::istream& meta) {
  ChainOutput chain;
  std::string line;
  if (!std::getline(csv, line)) throw Error(ErrorKind::Parse, "chain CSV is empty");
  chain.names = splitCsv(line);
  std::vector<double> values;
  std::size_t rows = 0;
  int lineNo = 1;
  while (std::getline(csv, line)) {
    ++lineNo;
    if (line.empty()) continue;
    const auto cells = splitCsv(line);
    if (cells.size() != chain.names.size()) {
      throw ParseError(lineNo, "chain row has " + std::to_string(cells.size()) + " values");
    }
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) throw ParseError(lineNo, "bad value '" + c + "'");
      values.push_back(v);
    }
    ++rows;
  }
  chain.samples.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(chain.names.size()));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < chain.names.size(); ++j) {
      chain.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          values[i * chain.names.size() + j];
    }
  }
  try {
    const Json doc = Json::parse(meta);
    chain.seed = doc.at("seed").get<std::uint64_t>();
    chain.runtimeSeconds = doc.at("runtime_seconds").get<double>();
    chain.acceptanceRates = doc.at("acceptance_rates").get<std::vector<double>>();
    chain.latentCount = doc.value("latent_count", std::size_t{0});
    chain.work = doc.value("work", 0.0);
    chain.scheme = schemeFromJson(doc.at("scheme"));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("chain metadata: ") + e.what());
  }
  return chain;
}

ChainOutput readChain(const std::string& csvPath, const std::string& metaPath) {
  std::ifstream csv(csvPath);
  if (!csv) throw Error(ErrorKind::Io, "cannot open '" + csvPath + "'");
  std::ifstream meta(metaPath);
  if (!meta) throw Error(ErrorKind::Io, "cannot open '" + metaPath + "'");
  return readChain(csv, meta);
}

std::string readMetaField(const std::string& metaPath, const std::string& key) {
  std::ifstream meta(metaPath);
  if (!meta) throw Error(ErrorKind::Io, "cannot open '" + metaPath + "'");
  try {
    const Json doc = Json::parse(meta);
    if (!doc.contains(key) || !doc.at(key).is_string()) return {};
    return doc.at(key).get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("chain metadata: ") + e.what());
  }
}

void writeScheme(std::ostream& out, const SamplerScheme& scheme,
                 const std::vector<std::string>& names) {
  out << schemeJson(scheme, names).dump(2) << '\n';
}

SamplerScheme readScheme(std::istream& in, std::size_t dimension) {
  SamplerScheme s;
  try {
    s = schemeFromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("scheme file: ") + e.what());
  }
  s.validate(dimension);
  return s;
}

SamplerScheme readScheme(const std::string& path, std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scheme file '" + path + "'");
  return readScheme(in, dimension);
}

}  // namespace hmmcr
