#include "tenet/text/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"

namespace tenet {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

struct Scan {
  std::vector<std::string> words;
  std::vector<double> numbers;
};

// Numeric literal: optional '-' then digits, optionally '.' digits. A literal
// must not be glued to a preceding letter or digit.
Scan scan(std::string_view text) {
  Scan out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.words.push_back(std::move(word));
    word.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const bool starts_number =
        word.empty() && (is_digit(c) || (c == '-' && i + 1 < text.size() && is_digit(text[i + 1])));
    if (starts_number) {
      std::size_t j = i + (c == '-' ? 1 : 0);
      while (j < text.size() && is_digit(text[j])) ++j;
      if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
        ++j;
        while (j < text.size() && is_digit(text[j])) ++j;
      }
      const std::string lit(text.substr(i, j - i));
      out.numbers.push_back(std::strtod(lit.c_str(), nullptr));
      i = j;
      continue;
    }
    if (is_alnum(c)) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      flush();
    }
    ++i;
  }
  flush();
  return out;
}

std::uint64_t token_hash(std::string_view token, std::uint64_t salt) {
  std::uint64_t h = io::fnv1a64(token, 0xcbf29ce484222325ULL ^ salt);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

std::string_view to_string(EmbeddingSource s) { return s == EmbeddingSource::hash ? "hash" : "table"; }

std::vector<double> extract_numeric_literals(std::string_view text) { return scan(text).numbers; }

std::vector<std::string> word_tokens(std::string_view text) { return scan(text).words; }

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

HashEmbedder::HashEmbedder(int dim) : dim_(dim) {
  if (dim < 2 * kNumericDims) throw ConfigError("hash embedder dimension must be at least 32");
}

EmbeddingVec HashEmbedder::embed(std::string_view text) const {
  const Scan s = scan(text);
  if (s.words.empty() && s.numbers.empty()) throw InputError("cannot embed empty text");
  EmbeddingVec out;
  out.source = EmbeddingSource::hash;
  out.values = Eigen::VectorXd::Zero(dim_);
  const auto wd = static_cast<std::uint64_t>(word_dims());
  for (const auto& w : s.words) {
    for (std::uint64_t salt : {0x1234567ULL, 0x89abcdefULL}) {
      const std::uint64_t h = token_hash(w, salt);
      const auto idx = static_cast<Eigen::Index>(h % wd);
      out.values[idx] += (h >> 63) != 0 ? -1.0 : 1.0;
    }
  }
  auto words = out.values.head(word_dims());
  const double n = words.norm();
  if (n > 0.0) words /= n;
  for (std::size_t k = 0; k < s.numbers.size() && k < kNumericSlots; ++k) {
    const double v = s.numbers[k];
    const auto base = static_cast<Eigen::Index>(word_dims() + static_cast<int>(k) * kSlotWidth);
    out.values.segment(base, kSlotWidth) << v / 4.0, std::sin(v), std::cos(v), std::sin(2 * v),
        std::cos(2 * v), std::sin(4 * v), std::cos(4 * v), 1.0;
  }
  return out;
}

std::string HashEmbedder::fingerprint() const { return "hash-v1:" + std::to_string(dim_); }

EmbeddingTable::EmbeddingTable(std::span<const Record> records) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : records) {
    if (r.embedding.empty()) throw LoadError("embedding for '" + r.text + "' is empty");
    if (dim_ == 0) dim_ = static_cast<int>(r.embedding.size());
    if (static_cast<int>(r.embedding.size()) != dim_) {
      throw LoadError("embedding for '" + r.text + "' has dimension " + std::to_string(r.embedding.size()) +
                      ", expected " + std::to_string(dim_));
    }
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(r.embedding.data(), dim_);
    if (!v.allFinite()) throw LoadError("embedding for '" + r.text + "' is not finite");
    std::string key = normalize_whitespace(r.text);
    auto [it, inserted] = entries_.emplace(key, v);
    if (!inserted) {
      if (!(it->second.array() == v.array()).all()) {
        throw LoadError("conflicting duplicate embeddings for '" + key + "'");
      }
      continue;
    }
    h = io::fnv1a64(key, h);
    h = io::fnv1a64(std::string_view(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size()), h);
  }
  content_hash_ = h;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open embedding table " + path.string());
  std::string line;
  std::vector<Record> records;
  int header_dim = -1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_whitespace(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (header_dim < 0) {
      if (!j.contains("version") || !j.contains("dim")) {
        throw LoadError(path.string() + ": first record must be a header with version and dim");
      }
      if (j.at("version").get<int>() != 1) throw LoadError("unsupported embedding table version");
      header_dim = j.at("dim").get<int>();
      continue;
    }
    try {
      records.push_back({j.at("text").get<std::string>(), j.at("embedding").get<std::vector<double>>()});
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (static_cast<int>(records.back().embedding.size()) != header_dim) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": dimension " +
                      std::to_string(records.back().embedding.size()) + " does not match header dim " +
                      std::to_string(header_dim));
    }
  }
  if (header_dim < 0) throw LoadError(path.string() + ": missing header record");
  if (records.empty()) throw LoadError(path.string() + ": table has no entries");
  return EmbeddingTable(records);
}

void EmbeddingTable::save(const std::filesystem::path& path, std::span<const Record> records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t dim = records.empty() ? 0 : records.front().embedding.size();
  out << nlohmann::json{{"format", "tenet-embedding-table"}, {"version", 1}, {"dim", dim}}.dump() << "\n";
  for (const auto& r : records) {
    out << nlohmann::json{{"text", r.text}, {"embedding", r.embedding}}.dump() << "\n";
  }
}

EmbeddingVec EmbeddingTable::embed(std::string_view text) const {
  const std::string key = normalize_whitespace(text);
  auto it = entries_.find(key);
  if (it == entries_.end()) throw LookupError("no embedding for text '" + key + "'");
  return {it->second, EmbeddingSource::table};
}

std::string EmbeddingTable::fingerprint() const {
  return "table:" + std::to_string(dim_) + ":" + io::hex64(content_hash_);
}

void require_injective(std::span<const std::string> texts, const TextEncoder& encoder) {
  std::map<std::vector<double>, std::string> seen;
  for (const auto& t : texts) {
    const EmbeddingVec e = encoder.embed(t);
    std::vector<double> key(e.values.data(), e.values.data() + e.values.size());
    auto [it, inserted] = seen.emplace(std::move(key), t);
    if (!inserted && it->second != t) {
      throw ConfigError("embedding collision between '" + it->second + "' and '" + t + "'");
    }
  }
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double d = a.norm() * b.norm();
  return d > 0.0 ? a.dot(b) / d : 0.0;
}

}  // namespace tenet
