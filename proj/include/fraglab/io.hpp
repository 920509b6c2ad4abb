#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fraglab/sparse.hpp"

namespace fraglab {

std::uint64_t fnv1a64(std::string_view data);

// shortest round-trippable-ish numeric formatting used by every CSV column
std::string format_g(double v);

// engine version baked in at configure time (git describe)
std::string version_string();

// Collects named data files under one directory and writes manifest.json
// recording the resolved config, seed, engine version, wall time, and a
// checksum per output. Data outputs are byte-stable for a fixed config and
// seed; the manifest itself carries the wall time.
class ArtifactWriter {
  public:
    ArtifactWriter(std::filesystem::path dir, std::string command, nlohmann::json config);
    ~ArtifactWriter();

    void write(const std::string& name, const std::string& content);
    void finish(double wall_ms);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "row col re im" per nonzero, plus a JSON metadata sidecar string.
std::string operator_to_coo(const SparseOperator& op);
std::string operator_metadata(const SparseOperator& op);

}  // namespace fraglab
