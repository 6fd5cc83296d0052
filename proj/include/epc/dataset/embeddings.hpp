#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "epc/core/error.hpp"
#include "epc/dataset/channel.hpp"

namespace epc::dataset {

// N x D float32 embedding matrix with one id per row.
//
// On disk (EMB1): the 4 bytes "EMB1", u32 LE row count, u32 LE dim, then
// count*dim IEEE-754 float32 LE values row-major. Ids live in a companion
// "<stem>.ids.csv" next to the blob, one id per line, line i <-> row i.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> data,
                    std::optional<FeatureChannel> channel = std::nullopt);

    std::size_t rows() const { return ids_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<std::string>& ids() const { return ids_; }
    std::span<const float> data() const { return data_; }
    std::span<const float> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }
    std::optional<FeatureChannel> channel() const { return channel_; }
    void set_channel(FeatureChannel c) { channel_ = c; }

    // Row index of `id`, if present.
    std::optional<std::size_t> find(const std::string& id) const;

    friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
        return a.ids_ == b.ids_ && a.dim_ == b.dim_ && a.data_ == b.data_;
    }

private:
    std::vector<std::string> ids_;
    std::size_t dim_ = 0;
    std::vector<float> data_;
    std::optional<FeatureChannel> channel_;
    std::unordered_map<std::string, std::size_t> index_;
};

class EmbeddingFormatError : public DataError {
public:
    enum class Kind { BadMagic, Truncated, TrailingBytes, IdCountMismatch, NonFinite, Io };
    EmbeddingFormatError(Kind kind, const std::string& message) : DataError(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct Emb1Blob {
    std::uint32_t rows = 0;
    std::uint32_t dim = 0;
    std::vector<float> values;
};

std::vector<std::uint8_t> encode_emb1(std::uint32_t rows, std::uint32_t dim, std::span<const float> values);
Emb1Blob decode_emb1(std::span<const std::uint8_t> bytes);

void write_emb1_file(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t dim,
                     std::span<const float> values);
Emb1Blob read_emb1_file(const std::filesystem::path& path);

// "<dir>/<stem>.ids.csv" for "<dir>/<stem>.<ext>".
std::filesystem::path ids_path_for(const std::filesystem::path& blob_path);

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path,
                                std::optional<FeatureChannel> channel = std::nullopt);

} // namespace epc::dataset
