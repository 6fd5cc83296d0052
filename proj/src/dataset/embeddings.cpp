#include "epc/dataset/embeddings.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "epc/core/text.hpp"

namespace epc::dataset {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[off + i]) << (8 * i);
    return v;
}

} // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> data,
                                 std::optional<FeatureChannel> channel)
    : ids_(std::move(ids)), dim_(dim), data_(std::move(data)), channel_(channel) {
    if (data_.size() != ids_.size() * dim_)
        throw EmbeddingFormatError(EmbeddingFormatError::Kind::IdCountMismatch,
                                   "embedding data size does not match ids x dim");
    for (const float v : data_)
        if (!std::isfinite(v))
            throw EmbeddingFormatError(EmbeddingFormatError::Kind::NonFinite, "embedding contains non-finite value");
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (!index_.emplace(ids_[i], i).second) throw DataError("duplicate embedding id '" + ids_[i] + "'");
}

std::optional<std::size_t> EmbeddingMatrix::find(const std::string& id) const {
    if (const auto it = index_.find(id); it != index_.end()) return it->second;
    return std::nullopt;
}

std::vector<std::uint8_t> encode_emb1(std::uint32_t rows, std::uint32_t dim, std::span<const float> values) {
    if (values.size() != static_cast<std::size_t>(rows) * dim)
        throw InvalidArgument("encode_emb1: value count does not match rows x dim");
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    out.reserve(kHeaderBytes + 4 * values.size());
    put_u32(out, rows);
    put_u32(out, dim);
    for (const float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Emb1Blob decode_emb1(std::span<const std::uint8_t> bytes) {
    using Kind = EmbeddingFormatError::Kind;
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw EmbeddingFormatError(Kind::BadMagic, "not an EMB1 file (magic mismatch)");
    if (bytes.size() < kHeaderBytes) throw EmbeddingFormatError(Kind::Truncated, "EMB1 header truncated");
    Emb1Blob blob;
    blob.rows = get_u32(bytes, 4);
    blob.dim = get_u32(bytes, 8);
    const std::size_t expected = kHeaderBytes + 4ULL * blob.rows * blob.dim;
    if (bytes.size() < expected)
        throw EmbeddingFormatError(Kind::Truncated, "EMB1 payload truncated: header declares " +
                                                        std::to_string(blob.rows) + "x" + std::to_string(blob.dim) +
                                                        " values, file holds " +
                                                        std::to_string((bytes.size() - kHeaderBytes) / 4));
    if (bytes.size() > expected) throw EmbeddingFormatError(Kind::TrailingBytes, "EMB1 file has trailing bytes");
    blob.values.resize(static_cast<std::size_t>(blob.rows) * blob.dim);
    for (std::size_t i = 0; i < blob.values.size(); ++i)
        blob.values[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
    return blob;
}

void write_emb1_file(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t dim,
                     std::span<const float> values) {
    const auto bytes = encode_emb1(rows, dim, values);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw EmbeddingFormatError(EmbeddingFormatError::Kind::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw EmbeddingFormatError(EmbeddingFormatError::Kind::Io, "write failed: " + path.string());
}

Emb1Blob read_emb1_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmbeddingFormatError(EmbeddingFormatError::Kind::Io, "cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_emb1(bytes);
    } catch (const EmbeddingFormatError& e) {
        throw EmbeddingFormatError(e.kind(), path.string() + ": " + e.what());
    }
}

std::filesystem::path ids_path_for(const std::filesystem::path& blob_path) {
    auto p = blob_path;
    p.replace_extension(".ids.csv");
    return p;
}

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
    write_emb1_file(path, static_cast<std::uint32_t>(matrix.rows()), static_cast<std::uint32_t>(matrix.dim()),
                    matrix.data());
    std::string ids;
    for (const auto& id : matrix.ids()) {
        if (id.find_first_of("\r\n") != std::string::npos) throw InvalidArgument("embedding id contains a newline");
        ids += id;
        ids += '\n';
    }
    write_text_file(ids_path_for(path), ids);
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path, std::optional<FeatureChannel> channel) {
    auto blob = read_emb1_file(path);
    const auto ids_path = ids_path_for(path);
    if (!std::filesystem::exists(ids_path))
        throw EmbeddingFormatError(EmbeddingFormatError::Kind::Io, "missing id file " + ids_path.string());
    auto ids = read_lines(ids_path);
    if (ids.size() != blob.rows)
        throw EmbeddingFormatError(EmbeddingFormatError::Kind::IdCountMismatch,
                                   path.string() + ": " + std::to_string(blob.rows) + " rows but " +
                                       std::to_string(ids.size()) + " ids");
    return EmbeddingMatrix(std::move(ids), blob.dim, std::move(blob.values), channel);
}

} // namespace epc::dataset
