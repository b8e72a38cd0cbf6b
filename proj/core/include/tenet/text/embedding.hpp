#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tenet {

enum class EmbeddingSource { hash, table };

std::string_view to_string(EmbeddingSource s);

struct EmbeddingVec {
  Eigen::VectorXd values;
  EmbeddingSource source = EmbeddingSource::hash;

  int dim() const { return static_cast<int>(values.size()); }
};

// Signed decimal literals in textual order ("(0.800, -0.800)" -> 0.8, -0.8).
std::vector<double> extract_numeric_literals(std::string_view text);

// Lowercase alphanumeric word tokens with numeric literals removed.
std::vector<std::string> word_tokens(std::string_view text);

// Trims and collapses internal whitespace runs to one space.
std::string normalize_whitespace(std::string_view text);

// Frozen text encoder interface.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual EmbeddingVec embed(std::string_view text) const = 0;
  virtual int dim() const = 0;
  virtual EmbeddingSource source() const = 0;
  // Identifies the provider and its contents; stored in checkpoints.
  virtual std::string fingerprint() const = 0;
};

// Feature-hash embedder. Word tokens are hashed with two signed hash functions
// into the first dim-16 entries, which are then L2-normalized. Up to two
// numeric literals are written into 8 dedicated entries each as
// (v/4, sin v, cos v, sin 2v, cos 2v, sin 4v, cos 4v, 1).
class HashEmbedder final : public TextEncoder {
 public:
  static constexpr int kNumericSlots = 2;
  static constexpr int kSlotWidth = 8;
  static constexpr int kNumericDims = kNumericSlots * kSlotWidth;

  explicit HashEmbedder(int dim = 256);

  EmbeddingVec embed(std::string_view text) const override;
  int dim() const override { return dim_; }
  int word_dims() const { return dim_ - kNumericDims; }
  EmbeddingSource source() const override { return EmbeddingSource::hash; }
  std::string fingerprint() const override;

 private:
  int dim_;
};

// Exact-match lookup table of precomputed embeddings (whitespace-normalized keys).
class EmbeddingTable final : public TextEncoder {
 public:
  struct Record {
    std::string text;
    std::vector<double> embedding;
  };

  // Builds from records; throws LoadError on inconsistent dimensions or
  // conflicting duplicates.
  explicit EmbeddingTable(std::span<const Record> records);

  // Newline-delimited JSON: a header {"format": "tenet-embedding-table",
  // "version": 1, "dim": N} followed by {"text": ..., "embedding": [...]} lines.
  static EmbeddingTable load(const std::filesystem::path& path);
  static void save(const std::filesystem::path& path, std::span<const Record> records);

  EmbeddingVec embed(std::string_view text) const override;
  int dim() const override { return dim_; }
  EmbeddingSource source() const override { return EmbeddingSource::table; }
  std::string fingerprint() const override;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Eigen::VectorXd> entries_;
  int dim_ = 0;
  std::uint64_t content_hash_ = 0;
};

// Throws ConfigError if two distinct texts map to the same embedding.
void require_injective(std::span<const std::string> texts, const TextEncoder& encoder);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace tenet
