#pragma once

#include <string>

#include "intentgate/behavior.hpp"

namespace intentgate {

class Config;

struct JudgeScores {
  double sem = 0.0;
  double logic = 0.0;
  double style = 0.0;
};

struct JudgeWeights {
  double w_sem = 1.0 / 3.0;
  double w_logic = 1.0 / 3.0;
  double w_style = 1.0 / 3.0;

  void validate() const;  // non-negative, sum to 1 within 1e-9
  static JudgeWeights from_config(const Config& cfg);
};

// Evaluation prompt asking for three criterion scores in [0,1]:
// Semantic Consistency, Logical Coherence, Expression Quality.
std::string build_eval_prompt(const BehaviorWindow& window, const std::string& query);

// Accepts a JSON object with sem/logic/style (possibly nested under
// "scores"); otherwise falls back to the first three decimal literals in the
// raw text. Fewer than three numbers is a parse failure; any score outside
// [0,1] is a range violation (never clamped).
JudgeScores parse_scores(const std::string& raw);

double aggregate(const JudgeScores& scores, const JudgeWeights& weights = {});

}  // namespace intentgate
