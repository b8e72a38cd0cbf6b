#include <cstdio>
#include <fstream>
#include <sstream>

#include "tenet/data/dataset.hpp"
#include "tenet/io/binary.hpp"

namespace tenet {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTrajMagic = "TNTR";
constexpr std::uint32_t kTrajVersion = 1;
constexpr int kManifestVersion = 1;

std::string stem(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << s;
}

void write_trajectories(const fs::path& p, const TaskData& td) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  const auto sd = static_cast<std::uint32_t>(td.task.state_dim());
  const auto ad = static_cast<std::uint32_t>(td.task.action_dim());
  io::write_magic(out, kTrajMagic, kTrajVersion);
  io::write_u32(out, sd);
  io::write_u32(out, ad);
  io::write_u32(out, static_cast<std::uint32_t>(td.trajectories.size()));
  for (const auto& tr : td.trajectories) {
    io::write_u64(out, tr.seed);
    io::write_u32(out, static_cast<std::uint32_t>(tr.transitions.size()));
    for (const auto& t : tr.transitions) {
      io::write_f64s(out, t.state);
      io::write_f64s(out, t.action);
      io::write_f64(out, t.reward);
      io::write_f64s(out, t.next_state);
    }
  }
}

std::vector<Trajectory> read_trajectories(const fs::path& p, const TaskSpec& task, int expected_k) {
  std::istringstream in(io::read_file(p.string()));
  const auto version = io::read_magic(in, kTrajMagic);
  if (version != kTrajVersion) throw LoadError(p.string() + ": unsupported version " + std::to_string(version));
  const auto sd = io::read_u32(in);
  const auto ad = io::read_u32(in);
  const auto k = io::read_u32(in);
  if (static_cast<int>(sd) != task.state_dim() || static_cast<int>(ad) != task.action_dim()) {
    throw LoadError(p.string() + ": dimensions do not match task " + task.id);
  }
  if (static_cast<int>(k) != expected_k) throw LoadError(p.string() + ": trajectory count mismatch");
  std::vector<Trajectory> out(k);
  for (auto& tr : out) {
    tr.task_id = task.id;
    tr.seed = io::read_u64(in);
    const auto steps = io::read_u32(in);
    if (steps == 0 || static_cast<int>(steps) > task.horizon) {
      throw LoadError(p.string() + ": bad trajectory length");
    }
    tr.transitions.resize(steps);
    for (auto& t : tr.transitions) {
      t.state.resize(sd);
      t.action.resize(ad);
      t.next_state.resize(sd);
      io::read_f64s(in, t.state);
      io::read_f64s(in, t.action);
      t.reward = io::read_f64(in);
      io::read_f64s(in, t.next_state);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw LoadError(p.string() + ": trailing bytes");
  return out;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::istringstream in(io::read_file(p.string()));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

void save_dataset(const OfflineDataset& dataset, const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) throw ConfigError(dir.string() + " exists and is not empty (use force to overwrite)");
    fs::remove_all(dir);
  }
  fs::create_directories(dir / "tasks");
  nlohmann::json files = nlohmann::json::array();
  nlohmann::json registry = nlohmann::json::array();
  for (std::size_t i = 0; i < dataset.tasks.size(); ++i) {
    const auto& td = dataset.tasks[i];
    const auto base = stem(i);
    write_trajectories(dir / "tasks" / (base + ".bin"), td);
    nlohmann::json desc = nlohmann::json::object();
    for (const auto& [level, lines] : td.descriptions) {
      std::string body;
      for (const auto& l : lines) {
        if (l.find('\n') != std::string::npos) throw ConfigError("description contains a newline");
        body += l + "\n";
      }
      const std::string name = base + "." + std::string(to_string(level)) + ".txt";
      write_text(dir / "tasks" / name, body);
      desc[std::string(to_string(level))] = name;
    }
    registry.push_back(to_json(td.task));
    files.push_back({{"task_id", td.task.id}, {"trajectories", base + ".bin"}, {"descriptions", desc}});
  }
  const nlohmann::json manifest = {{"format", "tenet-dataset"},
                                   {"version", kManifestVersion},
                                   {"suite", dataset.suite},
                                   {"options", dataset.options.to_json()},
                                   {"provenance", dataset.provenance},
                                   {"registry", registry},
                                   {"files", files},
                                   {"hash", dataset.hash()}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

OfflineDataset load_dataset(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw MissingArtifactError("no dataset manifest at " + manifest_path.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(io::read_file(manifest_path.string()));
    if (m.at("format") != "tenet-dataset") throw LoadError("not a dataset manifest");
    if (m.at("version") != kManifestVersion) throw LoadError("unsupported dataset version");
    OfflineDataset ds;
    ds.suite = m.at("suite").get<std::string>();
    const auto& o = m.at("options");
    ds.options.trajectories_per_task = o.at("K");
    ds.options.descriptions_per_level = o.at("M");
    ds.options.levels.clear();
    for (const auto& l : o.at("levels")) ds.options.levels.push_back(level_from_string(l.get<std::string>()));
    ds.options.seed = o.at("seed");
    ds.options.gate_rollouts = o.at("gate_rollouts");
    ds.options.gate_threshold = o.at("gate_threshold");
    ds.provenance = m.at("provenance");
    const auto& registry = m.at("registry");
    const auto& files = m.at("files");
    if (registry.size() != files.size() || registry.empty()) throw LoadError("registry and files disagree");
    for (std::size_t i = 0; i < registry.size(); ++i) {
      TaskData td;
      td.task = task_from_json(registry[i]);
      validate(td.task);
      const auto& f = files[i];
      if (f.at("task_id") != td.task.id) throw LoadError("file table out of order at " + td.task.id);
      td.trajectories = read_trajectories(dir / "tasks" / f.at("trajectories").get<std::string>(), td.task,
                                          ds.options.trajectories_per_task);
      for (Level level : ds.options.levels) {
        const auto name = f.at("descriptions").at(std::string(to_string(level))).get<std::string>();
        auto lines = read_lines(dir / "tasks" / name);
        if (static_cast<int>(lines.size()) != ds.options.descriptions_per_level) {
          throw LoadError(name + ": expected " + std::to_string(ds.options.descriptions_per_level) + " lines");
        }
        td.descriptions[level] = std::move(lines);
      }
      ds.tasks.push_back(std::move(td));
    }
    if (m.at("hash") != ds.hash()) throw LoadError("dataset hash mismatch");
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(dir.string() + ": malformed manifest: " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(dir.string() + ": " + e.what());
  }
}

}  // namespace tenet
