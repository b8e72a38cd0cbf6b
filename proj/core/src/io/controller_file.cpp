#include "tenet/io/controller_file.hpp"

#include <fstream>
#include <sstream>

#include "tenet/error.hpp"
#include "tenet/io/binary.hpp"

namespace tenet::io {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "TNCT";
constexpr std::uint32_t kVersion = 1;

}  // namespace

nlohmann::json manifest_to_json(const ndiff::Manifest& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& l : m) {
    out.push_back({{"name", l.name}, {"in", l.in}, {"out", l.out}, {"activation", ndiff::to_string(l.activation)}});
  }
  return out;
}

ndiff::Manifest manifest_from_json(const nlohmann::json& j) {
  ndiff::Manifest m;
  for (const auto& l : j) {
    m.push_back({l.at("name").get<std::string>(), l.at("in").get<int>(), l.at("out").get<int>(),
                 ndiff::activation_from_string(l.at("activation").get<std::string>())});
  }
  ndiff::check_manifest(m);
  return m;
}

void save_controller(const ControllerFile& c, const fs::path& path) {
  c.params.validate();
  const nlohmann::json header = {
      {"manifest", manifest_to_json(c.params.manifest())}, {"size", c.params.size()}, {"info", c.info}};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write controller file " + path.string());
  write_magic(out, kMagic, kVersion);
  const std::string h = header.dump();
  write_u64(out, h.size());
  write_bytes(out, h);
  write_f64s(out, {c.params.values().data(), c.params.size()});
  if (!out.flush()) throw ConfigError("failed writing controller file " + path.string());
}

ControllerFile load_controller(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifactError("no controller file at " + path.string());
  std::istringstream in(read_file(path.string()));
  try {
    if (read_magic(in, kMagic) != kVersion) throw LoadError("unsupported controller file version");
    const auto header = nlohmann::json::parse(read_bytes(in, read_u64(in)));
    auto manifest = manifest_from_json(header.at("manifest"));
    const auto size = header.at("size").get<std::size_t>();
    if (size != ndiff::count_params(manifest)) throw LoadError("size does not match the manifest");
    ndiff::Vec v(static_cast<Eigen::Index>(size));
    read_f64s(in, {v.data(), size});
    if (in.peek() != std::char_traits<char>::eof()) throw LoadError("trailing bytes");
    return {ndiff::ParamVec(std::move(manifest), std::move(v)), header.at("info")};
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": malformed controller header: " + e.what());
  } catch (const Error& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace tenet::io
