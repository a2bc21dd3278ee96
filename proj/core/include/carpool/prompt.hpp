#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carpool/assignment.hpp"
#include "carpool/instance.hpp"

namespace carpool {

namespace assets {
extern const std::string_view kPromptTemplate;
extern const std::string_view kModelLatex;
}  // namespace assets

/// A previous solution shown to the proposer.
struct Exemplar {
  Assignment solution;
  double gap = 0.0;
  double objective = 0.0;
};

/// Builds an exemplar with its objective computed from `inst`.
Exemplar make_exemplar(const DispatchInstance& inst, Assignment solution, double gap);

struct PromptBundle {
  std::string full_text;
  std::string instance_id;
  DispatchInstance instance;
  std::vector<Exemplar> exemplars;

  /// FNV-1a of full_text, 16 hex digits.
  std::string hash() const;
};

/// Template slots: {{MODEL_LATEX}}, {{EMPTY_VEHICLES}}, {{ONE_ORDER_VEHICLES}},
/// {{USERS}}, {{EXEMPLARS}}. Nothing else in the template is touched.
struct PromptTemplate {
  std::string text{assets::kPromptTemplate};
  std::string model_latex{assets::kModelLatex};

  static PromptTemplate from_files(const std::string& template_path, const std::string& latex_path);
};

/// Coordinates print with two decimals (round-half-even on the binary
/// value, as printf does); an empty section is just its header line.
/// Throws RenderError when an exemplar is infeasible for `inst` or its
/// objective disagrees with the instance.
PromptBundle render_prompt(const DispatchInstance& inst, const std::vector<Exemplar>& exemplars,
                           const PromptTemplate& tmpl = {});

/// The "one of solutions starts: ... one of solutions ends" block.
std::string render_exemplar_block(const Exemplar& exemplar);

/// "1.0", "0.25", "0.1235": at least one decimal, at most four.
std::string format_gap(double gap);
/// Two decimals, never "-0.00".
std::string format_fixed2(double value);

struct ParsedSolution {
  Assignment assignment;
  std::vector<std::string> raw_lines;
};

/// Extracts the last x/y/z group from free text. A group is a run of x:, y:,
/// z: and blank lines; any other line, or a repeated letter, starts a new
/// one. A missing line means an empty set. Throws ParseError when no group
/// exists or a token is malformed, BoundsError when an index exceeds `inst`.
ParsedSolution parse_solution(std::string_view text, const DispatchInstance& inst);

nlohmann::json sidecar_json(const PromptBundle& bundle);

/// Writes `<stem>.txt` (the prompt) and `<stem>.json` (the sidecar).
void write_prompt_files(const PromptBundle& bundle, const std::string& stem);

}  // namespace carpool
