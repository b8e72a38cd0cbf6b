#include "tenet/model/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"

namespace tenet {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "TNCK";
constexpr std::uint32_t kVersion = 1;

bool same_bits(const ndiff::Vec& a, const ndiff::Vec& b) {
  return a.size() == b.size() &&
         std::equal(a.data(), a.data() + a.size(), b.data(), [](double x, double y) {
           return std::memcmp(&x, &y, sizeof x) == 0;
         });
}

}  // namespace

bool Checkpoint::operator==(const Checkpoint& o) const {
  if (!(model.config() == o.model.config()) || meta != o.meta || step != o.step) return false;
  for (std::size_t i = 0; i < model.blocks().size(); ++i) {
    if (!same_bits(model.blocks()[i].params.values(), o.model.blocks()[i].params.values())) return false;
  }
  if (adam.has_value() != o.adam.has_value()) return false;
  if (adam) {
    for (std::size_t i = 0; i < adam->size(); ++i) {
      const auto& a = (*adam)[i];
      const auto& b = (*o.adam)[i];
      if (a.step != b.step || !same_bits(a.m, b.m) || !same_bits(a.v, b.v)) return false;
    }
  }
  return true;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
  const auto& blocks = ckpt.model.blocks();
  if (ckpt.adam && ckpt.adam->size() != blocks.size()) throw ShapeError("one Adam state per block required");
  nlohmann::json layout = nlohmann::json::array();
  for (const auto& b : blocks) layout.push_back({{"name", b.name}, {"size", b.params.size()}});
  const nlohmann::json header = {{"model", ckpt.model.config().to_json()},
                                 {"meta", ckpt.meta},
                                 {"step", ckpt.step},
                                 {"blocks", layout},
                                 {"adam", ckpt.adam.has_value()}};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + tmp.string());
    io::write_magic(out, kMagic, kVersion);
    const std::string h = header.dump();
    io::write_u64(out, h.size());
    io::write_bytes(out, h);
    for (const auto& b : blocks) io::write_f64s(out, {b.params.values().data(), b.params.size()});
    if (ckpt.adam) {
      for (const auto& s : *ckpt.adam) {
        io::write_u64(out, static_cast<std::uint64_t>(s.step));
        io::write_f64s(out, {s.m.data(), static_cast<std::size_t>(s.m.size())});
        io::write_f64s(out, {s.v.data(), static_cast<std::size_t>(s.v.size())});
      }
    }
    if (!out.flush()) throw ConfigError("failed writing checkpoint " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint load_checkpoint(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifactError("no checkpoint at " + path.string());
  std::istringstream in(io::read_file(path.string()));
  const auto version = io::read_magic(in, kMagic);
  if (version != kVersion) throw LoadError(path.string() + ": unsupported checkpoint version");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(io::read_bytes(in, io::read_u64(in)));
    const auto config = ModelConfig::from_json(header.at("model"));
    std::vector<Block> blocks;
    for (const auto& entry : header.at("blocks")) {
      const auto name = entry.at("name").get<std::string>();
      const auto size = entry.at("size").get<std::size_t>();
      ndiff::Vec v(static_cast<Eigen::Index>(size));
      io::read_f64s(in, {v.data(), size});
      ndiff::Manifest m;
      if (name == "g") m = g_manifest(config);
      else if (name == "h") m = h_manifest(config);
      else if (name == "traj") m = traj_manifest(config);
      else if (name == "policy") m = config.kind == ModelKind::prompt_concat ? concat_policy_manifest(config)
                                                                             : policy_manifest(config);
      else throw LoadError("unknown block '" + name + "'");
      blocks.push_back({name, ndiff::ParamVec(std::move(m), std::move(v))});
    }
    Checkpoint ckpt{TenetModel(config, std::move(blocks)), header.at("meta"), header.at("step").get<std::int64_t>(),
                    std::nullopt};
    if (header.at("adam").get<bool>()) {
      std::vector<ndiff::AdamState> states;
      for (const auto& b : ckpt.model.blocks()) {
        auto s = ndiff::AdamState::zeros(b.params.size());
        s.step = static_cast<std::int64_t>(io::read_u64(in));
        io::read_f64s(in, {s.m.data(), b.params.size()});
        io::read_f64s(in, {s.v.data(), b.params.size()});
        states.push_back(std::move(s));
      }
      ckpt.adam = std::move(states);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw LoadError("trailing bytes");
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": malformed checkpoint header: " + e.what());
  } catch (const ShapeError& e) {
    throw LoadError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(path.string() + ": " + e.what());
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace tenet
