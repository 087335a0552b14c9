#pragma once

#include <iosfwd>
#include <string>

#include "hmmcr/mcmc.hpp"

namespace hmmcr {

/// Header of parameter names, then one row per iteration. Values use 17
/// significant digits so a read-back chain is bit-identical.
void writeChainCsv(std::ostream& out, const ChainOutput& chain);

/// Sidecar with seed, runtime, acceptance rates, scheme and any extra
/// string fields (model, strategy, ...).
void writeChainMeta(std::ostream& out, const ChainOutput& chain,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Rebuilds a ChainOutput from the two files written above.
ChainOutput readChain(std::istream& csv, std::istream& meta);
ChainOutput readChain(const std::string& csvPath, const std::string& metaPath);

/// Reads one string field from a meta sidecar ("" when absent).
std::string readMetaField(const std::string& metaPath, const std::string& key);

/// JSON scheme file: {"blocks": [[...]], "names": [[...]], "latent_sampling": bool,
/// "adaptation": {...}}. Blocks hold 0-based parameter indices.
void writeScheme(std::ostream& out, const SamplerScheme& scheme,
                 const std::vector<std::string>& names);
SamplerScheme readScheme(std::istream& in, std::size_t dimension);
SamplerScheme readScheme(const std::string& path, std::size_t dimension);

}  // namespace hmmcr
