#include "tenet/envs/descriptions.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <vector>

#include "tenet/error.hpp"
#include "tenet/rng.hpp"

namespace tenet {

namespace {

// Verb phrase and parameter phrase alternatives per behavior. The canonical
// wording is deliberately absent so an L1 sample never reproduces L0.
struct PhraseTable {
  std::vector<std::string_view> verbs;
  std::vector<std::string_view> objects;  // "{0}" / "{1}" are parameter slots
};

const PhraseTable& table_for(const TaskSpec& t) {
  static const PhraseTable velocity{
      {"go ahead", "travel forward", "run straight ahead", "head onward", "drive forward"},
      {"at a speed of {0} m/s", "with a desired velocity of {0} m/s", "holding a pace of {0} m/s",
       "keeping the forward speed at {0} m/s", "maintaining {0} m/s"}};
  static const PhraseTable goal{
      {"go to", "navigate to", "head for", "travel to", "drive toward"},
      {"the target at ({0}, {1})", "the point ({0}, {1})", "position ({0}, {1})",
       "the location ({0}, {1})", "coordinates ({0}, {1})"}};
  static const PhraseTable waypoint{
      {"go to", "arrive at", "get to", "navigate to", "head to"},
      {"the marker at ({0}, {1})", "the checkpoint at ({0}, {1})", "the flag at ({0}, {1})",
       "the waypoint located at ({0}, {1})", "the beacon at ({0}, {1})"}};
  static const PhraseTable hold{
      {"stay", "remain", "keep still", "stand by", "wait"},
      {"at the center ({0}, {1})", "at the starting point ({0}, {1})", "near the origin ({0}, {1})",
       "at the home spot ({0}, {1})", "around the zero point ({0}, {1})"}};
  static const PhraseTable oscillate{
      {"swing back and forth", "move back and forth", "sway side to side", "shuttle left and right",
       "bounce between both sides"},
      {"along the x axis with amplitude {0}", "horizontally with an amplitude of {0}",
       "on the horizontal axis reaching {0}", "across the x direction out to {0}",
       "sideways with a swing size of {0}"}};
  switch (t.behavior) {
    case Behavior::track_velocity: return velocity;
    case Behavior::reach: return t.family == Family::point_goal_2d ? goal : waypoint;
    case Behavior::hold_origin: return hold;
    case Behavior::oscillate_x: return oscillate;
  }
  return goal;
}

constexpr std::array<std::string_view, 12> kDistractors{
    "the sky is overcast today",
    "the lab lights are dimmed",
    "someone left a cup on the table",
    "the battery indicator looks fine",
    "ignore the humming fan",
    "the floor was cleaned this morning",
    "a colleague is running another experiment",
    "the camera feed is not needed",
    "there is music playing in the background",
    "the operator is taking notes",
    "the door on the left is closed",
    "nobody else is in the room",
};

std::string fill(std::string_view pattern, const std::vector<double>& params) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{' && i + 2 < pattern.size() && pattern[i + 2] == '}') {
      const auto k = static_cast<std::size_t>(pattern[i + 1] - '0');
      out += format_param(params.at(k));
      i += 2;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string canonical(const TaskSpec& t) {
  switch (t.behavior) {
    case Behavior::track_velocity:
      return fill("Move forward with target velocity {0} m/s.", t.params);
    case Behavior::reach:
      return t.family == Family::point_goal_2d ? fill("Move to the goal at ({0}, {1}).", t.params)
                                               : fill("Reach the waypoint at ({0}, {1}).", t.params);
    case Behavior::hold_origin:
      return fill("Hold position at the origin ({0}, {1}).", t.params);
    case Behavior::oscillate_x:
      return fill("Oscillate along the x axis with amplitude {0}.", t.params);
  }
  return {};
}

// Sentence without the final period.
std::string paraphrase_body(const TaskSpec& t, Rng& rng) {
  const auto& table = table_for(t);
  const std::string verb(table.verbs[rng.below(table.verbs.size())]);
  const std::string object = fill(table.objects[rng.below(table.objects.size())], t.params);
  if (rng.below(2) == 0) return capitalize(verb + " " + object);
  return capitalize(object + ", " + verb);
}

}  // namespace

std::string_view to_string(Level l) {
  switch (l) {
    case Level::L0: return "L0";
    case Level::L1: return "L1";
    case Level::L2: return "L2";
  }
  return "L0";
}

Level level_from_string(std::string_view s) {
  if (s == "L0") return Level::L0;
  if (s == "L1") return Level::L1;
  if (s == "L2") return Level::L2;
  throw ConfigError("unknown paraphrase level '" + std::string(s) + "'");
}

std::string format_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string sample_description(const TaskSpec& task, Level level, std::uint64_t seed) {
  if (level == Level::L0) return canonical(task);
  Rng rng(Rng::derive(seed, {task.descriptor_seed, static_cast<std::uint64_t>(level)}));
  std::string body = paraphrase_body(task, rng);
  if (level == Level::L1) return body + ".";
  const std::size_t i = rng.below(kDistractors.size());
  std::size_t j = rng.below(kDistractors.size() - 1);
  if (j >= i) ++j;
  const std::string d1(kDistractors[i]);
  const std::string d2(kDistractors[j]);
  std::string lowered = body;
  lowered[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lowered[0])));
  switch (rng.below(3)) {
    case 0:
      return capitalize(d1) + "; meanwhile, " + lowered + ". Also, " + d2 + ".";
    case 1:
      return "Note that " + d1 + ". " + body + ", and " + d2 + ".";
    default:
      return capitalize(d1) + ", so please " + lowered + " while " + d2 + ".";
  }
}

}  // namespace tenet
