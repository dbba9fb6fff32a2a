#include "intentgate/judge.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <regex>

#include <json.hpp>

#include "intentgate/config.hpp"

namespace intentgate {

void JudgeWeights::validate() const {
  if (w_sem < 0.0 || w_logic < 0.0 || w_style < 0.0)
    fail(Errc::config, "judge weights must be >= 0");
  if (std::abs(w_sem + w_logic + w_style - 1.0) > 1e-9)
    fail(Errc::config, "judge weights must sum to 1");
}

JudgeWeights JudgeWeights::from_config(const Config& cfg) {
  JudgeWeights w;
  w.w_sem = cfg.get_double("judge.w_sem", w.w_sem);
  w.w_logic = cfg.get_double("judge.w_logic", w.w_logic);
  w.w_style = cfg.get_double("judge.w_style", w.w_style);
  w.validate();
  return w;
}

std::string build_eval_prompt(const BehaviorWindow& window, const std::string& query) {
  if (window.empty()) fail(Errc::empty_window, "eval prompt requires a non-empty window");
  if (query.empty()) fail(Errc::data, "eval prompt requires a non-empty candidate query");

  std::string out = "Given a user behavior sequence ";
  out += render_behavior_sequence(window.events);
  out += " and a candidate search query \"";
  out += query;
  out +=
      "\", rate the query on three aspects:\n"
      "- Semantic Consistency: the query matches the intent implied by the behavior sequence.\n"
      "- Logical Coherence: the query is a plausible next step after these events.\n"
      "- Expression Quality: the query reads naturally and avoids template boilerplate.\n"
      "Return three scores in [0,1] as JSON: {\"sem\": s1, \"logic\": s2, \"style\": s3}.";
  return out;
}

namespace {

std::optional<std::array<double, 3>> scores_from_json(const std::string& raw) {
  auto j = nlohmann::json::parse(raw, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  const nlohmann::json* obj = &j;
  if (j.is_object() && j.contains("scores") && j["scores"].is_object()) obj = &j["scores"];
  if (!obj->is_object()) return std::nullopt;
  if (!obj->contains("sem") || !obj->contains("logic") || !obj->contains("style"))
    return std::nullopt;
  const auto& s = (*obj)["sem"];
  const auto& l = (*obj)["logic"];
  const auto& t = (*obj)["style"];
  if (!s.is_number() || !l.is_number() || !t.is_number()) return std::nullopt;
  return std::array<double, 3>{s.get<double>(), l.get<double>(), t.get<double>()};
}

}  // namespace

JudgeScores parse_scores(const std::string& raw) {
  std::array<double, 3> v{};
  if (auto from_json = scores_from_json(raw)) {
    v = *from_json;
  } else {
    // Fall back to the first three decimal literals in the raw text.
    static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
    std::size_t found = 0;
    for (auto it = std::sregex_iterator(raw.begin(), raw.end(), number);
         it != std::sregex_iterator() && found < 3; ++it)
      v[found++] = std::stod(it->str());
    if (found < 3)
      fail(Errc::parse_failure, "judge response held " + std::to_string(found) +
                                    " score(s), expected 3: " + raw);
  }
  for (double x : v)
    if (x < 0.0 || x > 1.0)
      fail(Errc::range_violation,
           "judge score " + std::to_string(x) + " lies outside [0,1]");
  return {v[0], v[1], v[2]};
}

double aggregate(const JudgeScores& scores, const JudgeWeights& weights) {
  weights.validate();
  return weights.w_sem * scores.sem + weights.w_logic * scores.logic +
         weights.w_style * scores.style;
}

}  // namespace intentgate
