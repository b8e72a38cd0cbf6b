#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tenet::io {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// Hash of the canonical (sorted-key, compact) dump of a JSON value.
std::string config_hash(const nlohmann::json& j);

// Little-endian primitive writers/readers. Readers throw LoadError on EOF.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
void write_f64s(std::ostream& out, std::span<const double> v);
void write_bytes(std::ostream& out, std::string_view bytes);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
void read_f64s(std::istream& in, std::span<double> out);
std::string read_bytes(std::istream& in, std::size_t n);

// Magic + version check for binary containers.
void write_magic(std::ostream& out, std::string_view magic, std::uint32_t version);
std::uint32_t read_magic(std::istream& in, std::string_view magic);

std::string read_file(const std::string& path);

}  // namespace tenet::io
