#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "temp_dir.hpp"
#include "tenet/envs/descriptions.hpp"
#include "tenet/envs/registry.hpp"
#include "tenet/error.hpp"
#include "tenet/text/embedding.hpp"

using namespace tenet;

TEST_CASE("embedding is deterministic and word features are normalized") {
  const HashEmbedder e(256);
  const auto a = e.embed("move forward at 1.200 m/s");
  const auto b = e.embed("move forward at 1.200 m/s");
  CHECK(a.values == b.values);
  CHECK(a.dim() == 256);
  CHECK(a.values.head(e.word_dims()).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("numeric channels carry the literal, word block ignores it") {
  const HashEmbedder e(256);
  const auto a = e.embed("move forward 1.200 m/s");
  const auto b = e.embed("move forward 1.800 m/s");
  const int w = e.word_dims();
  CHECK(a.values.head(w) == b.values.head(w));
  CHECK(std::abs(b.values[w] - a.values[w]) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(a.values[w + 1] == doctest::Approx(std::sin(1.2)));
  CHECK(a.values[w + 2] == doctest::Approx(std::cos(1.2)));
  CHECK(a.values[w + 7] == 1.0);
  // The second slot stays empty with a single literal.
  CHECK(a.values.tail(HashEmbedder::kSlotWidth).isZero());
}

TEST_CASE("word block is order invariant, numeric block is order covariant") {
  const HashEmbedder e(128);
  const int w = e.word_dims();
  const auto a = e.embed("go to 0.300 then 0.700 quickly");
  const auto b = e.embed("quickly then go to 0.700 0.300");
  CHECK(a.values.head(w).isApprox(b.values.head(w), 1e-15));
  CHECK(a.values.segment(w, 8) == b.values.segment(w + 8, 8));
  CHECK(a.values.segment(w + 8, 8) == b.values.segment(w, 8));
}

TEST_CASE("empty text is an input error") {
  const HashEmbedder e(64);
  CHECK_THROWS_AS(e.embed(""), InputError);
  CHECK_THROWS_AS(e.embed("   "), InputError);
}

TEST_CASE("too small a dimension is rejected") { CHECK_THROWS_AS(HashEmbedder(16), ConfigError); }

TEST_CASE("numeric literal extraction") {
  CHECK(extract_numeric_literals("target velocity 1.200 m/s") == std::vector<double>{1.2});
  CHECK(extract_numeric_literals("go to (0.800, -0.800)") == std::vector<double>{0.8, -0.8});
  CHECK(extract_numeric_literals("no numbers here").empty());
}

TEST_CASE("every VelTrack description contains its target exactly once") {
  for (const auto& task : task_registry("veltrack", 40, 0)) {
    for (Level l : {Level::L0, Level::L1, Level::L2}) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto nums = extract_numeric_literals(sample_description(task, l, s));
        const double target = task.params[0];
        const auto hits = std::count_if(nums.begin(), nums.end(), [&](double v) {
          return std::abs(v - target) < 5e-4;
        });
        CHECK(hits == 1);
      }
    }
  }
}

TEST_CASE("paraphrases stay closer than different behaviors") {
  const HashEmbedder e(256);
  const auto tasks = task_registry("switchworld10", 10, 0);
  double same = 0.0;
  double cross = 0.0;
  int n_same = 0;
  int n_cross = 0;
  for (const auto& t : tasks) {
    const auto l0 = e.embed(canonical_description(t)).values;
    same += cosine(l0, e.embed(sample_description(t, Level::L1, 3)).values);
    ++n_same;
    for (const auto& u : tasks) {
      if (u.behavior == t.behavior) continue;
      cross += cosine(l0, e.embed(canonical_description(u)).values);
      ++n_cross;
    }
  }
  CHECK(same / n_same > cross / n_cross);
}

TEST_CASE("hash embedder is injective on canonical descriptions") {
  const HashEmbedder e(256);
  for (const char* suite : {"switchworld10", "switchworld50", "veltrack"}) {
    std::vector<std::string> texts;
    for (const auto& t : task_registry(suite, suite == std::string("veltrack") ? 40 : 0, 1)) {
      texts.push_back(canonical_description(t));
    }
    CHECK_NOTHROW(require_injective(texts, e));
  }
  std::vector<std::string> dup{"go left", "left go"};
  CHECK_THROWS_AS(require_injective(dup, e), ConfigError);
}

TEST_CASE("embedding table lookups") {
  const std::vector<EmbeddingTable::Record> records{{"move forward", {0.25, -1.5, 3.0}}};
  const EmbeddingTable table(records);
  CHECK(table.dim() == 3);
  const auto v = table.embed("move forward").values;
  CHECK(v[0] == 0.25);
  CHECK(v[1] == -1.5);
  CHECK(v[2] == 3.0);
  CHECK(table.embed("  move   forward \n").values == v);
  CHECK(table.embed("move forward").source == EmbeddingSource::table);
}

TEST_CASE("embedding table misses name the text") {
  const auto tasks = task_registry("switchworld10", 10, 0);
  std::vector<EmbeddingTable::Record> records;
  for (const auto& t : tasks) records.push_back({canonical_description(t), std::vector<double>(4, 1.0)});
  const EmbeddingTable table(records);
  const auto l2 = sample_description(tasks[0], Level::L2, 1);
  try {
    (void)table.embed(l2);
    FAIL("lookup should miss");
  } catch (const LookupError& e) {
    CHECK(std::string(e.what()).find(normalize_whitespace(l2)) != std::string::npos);
  }
}

TEST_CASE("embedding table load errors") {
  const std::vector<EmbeddingTable::Record> ragged{{"a", {1.0, 2.0}}, {"b", {1.0}}};
  CHECK_THROWS_AS(EmbeddingTable{ragged}, LoadError);
  const std::vector<EmbeddingTable::Record> conflict{{"a", {1.0}}, {" a", {2.0}}};
  CHECK_THROWS_AS(EmbeddingTable{conflict}, LoadError);
  const std::vector<EmbeddingTable::Record> agree{{"a", {1.0}}, {"a ", {1.0}}};
  CHECK(EmbeddingTable{agree}.size() == 1);
}

TEST_CASE("embedding table file round trip") {
  testing::TempDir dir("table");
  const std::vector<EmbeddingTable::Record> records{{"first text", {0.1, 0.2}}, {"second text", {-0.3, 1e-300}}};
  EmbeddingTable::save(dir / "t.jsonl", records);
  const auto table = EmbeddingTable::load(dir / "t.jsonl");
  CHECK(table.size() == 2);
  CHECK(table.embed("second text").values[1] == 1e-300);
  CHECK(table.fingerprint() == EmbeddingTable(records).fingerprint());
  CHECK_THROWS_AS(EmbeddingTable::load(dir / "missing.jsonl"), MissingArtifactError);
}
