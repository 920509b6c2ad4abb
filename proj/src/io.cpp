#include "fraglab/io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fraglab/types.hpp"

#ifndef FRAGLAB_VERSION
#define FRAGLAB_VERSION "unversioned"
#endif

namespace fraglab {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string version_string() { return FRAGLAB_VERSION; }

struct ArtifactWriter::Impl {
    std::filesystem::path dir;
    nlohmann::json manifest;
    bool finished = false;
};

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, std::string command,
                               nlohmann::json config)
    : impl_(new Impl) {
    impl_->dir = std::move(dir);
    std::error_code ec;
    std::filesystem::create_directories(impl_->dir, ec);
    if (ec) throw ConfigError("ArtifactWriter: cannot create " + impl_->dir.string());
    impl_->manifest["command"] = std::move(command);
    impl_->manifest["config"] = std::move(config);
    impl_->manifest["engine_version"] = version_string();
    impl_->manifest["outputs"] = nlohmann::json::array();
}

ArtifactWriter::~ArtifactWriter() = default;

void ArtifactWriter::write(const std::string& name, const std::string& content) {
    const auto path = impl_->dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("ArtifactWriter: cannot open " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw ConfigError("ArtifactWriter: short write to " + path.string());
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    impl_->manifest["outputs"].push_back(
        {{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex}});
}

void ArtifactWriter::finish(double wall_ms) {
    if (impl_->finished) return;
    impl_->manifest["wall_ms"] = wall_ms;
    const auto path = impl_->dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("ArtifactWriter: cannot open " + path.string());
    out << impl_->manifest.dump(2) << "\n";
    impl_->finished = true;
}

std::string operator_to_coo(const SparseOperator& op) {
    std::string out;
    out.reserve(op.nnz() * 32);
    const auto& rp = op.row_ptr();
    const auto& col = op.col();
    const auto& val = op.val();
    for (std::size_t r = 0; r < op.dim(); ++r)
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
            out += std::to_string(r);
            out += ' ';
            out += std::to_string(col[p]);
            out += ' ';
            out += format_g(val[p]);
            out += " 0\n";  // matrices are real in this engine
        }
    return out;
}

std::string operator_metadata(const SparseOperator& op) {
    nlohmann::json meta;
    meta["dim"] = op.dim();
    meta["nnz"] = op.nnz();
    meta["hermitian"] = op.hermitian();
    meta["format"] = "row col re im";
    return meta.dump(2) + "\n";
}

}  // namespace fraglab
