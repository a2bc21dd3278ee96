#include "carpool/prompt.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "carpool/errors.hpp"
#include "carpool/random.hpp"

namespace carpool {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string rtrim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

void replace_slot(std::string& text, std::string_view slot, const std::string& value) {
  const auto pos = text.find(slot);
  if (pos == std::string::npos) throw ConfigError("prompt template lacks slot " + std::string(slot));
  text.replace(pos, slot.size(), value);
}

std::string render_points(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += " (" + std::to_string(i) + ") (" + format_fixed2(pts[i].x) + ", " + format_fixed2(pts[i].y) + "),";
  }
  return out;
}

std::string_view trim_left(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return s;
}

// Returns the letter when `line` looks like "x: ...", "y: ..." or "z: ...".
std::optional<char> solution_line_kind(std::string_view line, std::string_view& body) {
  line = trim_left(line);
  if (line.empty() || (line[0] != 'x' && line[0] != 'y' && line[0] != 'z')) return std::nullopt;
  std::string_view rest = trim_left(line.substr(1));
  if (rest.empty() || rest[0] != ':') return std::nullopt;
  body = rest.substr(1);
  return line[0];
}

}  // namespace

Exemplar make_exemplar(const DispatchInstance& inst, Assignment solution, double gap) {
  const double objective = evaluate_objective(inst, solution);
  return Exemplar{std::move(solution), gap, objective};
}

std::string PromptBundle::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(full_text)));
  return buf;
}

PromptTemplate PromptTemplate::from_files(const std::string& template_path, const std::string& latex_path) {
  return PromptTemplate{read_file(template_path), read_file(latex_path)};
}

std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string format_gap(double gap) {
  char buf[64];
  if (gap == std::round(gap)) {
    std::snprintf(buf, sizeof buf, "%.1f", gap);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.4f", gap);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string render_exemplar_block(const Exemplar& exemplar) {
  std::string out = "one of solutions starts:\n";
  out += format_solution_lines(exemplar.solution);
  out += "gap: " + format_gap(exemplar.gap) + ", objective value: " + format_fixed2(exemplar.objective) + "\n";
  out += "one of solutions ends\n";
  return out;
}

PromptBundle render_prompt(const DispatchInstance& inst, const std::vector<Exemplar>& exemplars,
                           const PromptTemplate& tmpl) {
  for (std::size_t e = 0; e < exemplars.size(); ++e) {
    const auto report = validate(inst, exemplars[e].solution);
    if (!report.feasible()) {
      throw RenderError("exemplar " + std::to_string(e) + " invalid for instance " + inst.id + ": " +
                        report.violations.front().detail);
    }
    const double actual = evaluate_objective(inst, exemplars[e].solution);
    if (std::abs(actual - exemplars[e].objective) > 1e-6 * std::max(1.0, std::abs(actual))) {
      throw RenderError("exemplar " + std::to_string(e) + " objective " +
                        std::to_string(exemplars[e].objective) + " disagrees with instance (" +
                        std::to_string(actual) + ")");
    }
  }

  std::string text = tmpl.text;
  replace_slot(text, "{{MODEL_LATEX}}", rtrim(tmpl.model_latex));
  replace_slot(text, "{{EMPTY_VEHICLES}}", render_points(inst.empty_vehicles));
  replace_slot(text, "{{ONE_ORDER_VEHICLES}}", render_points(inst.one_order_vehicles));
  replace_slot(text, "{{USERS}}", render_points(inst.users));
  std::string blocks;
  for (const auto& ex : exemplars) blocks += "\n" + render_exemplar_block(ex);
  // The slot sits on its own line; with no exemplars that line disappears.
  if (blocks.empty()) replace_slot(text, "{{EXEMPLARS}}\n", "");
  else replace_slot(text, "{{EXEMPLARS}}\n", blocks);

  return PromptBundle{std::move(text), inst.id, inst, exemplars};
}

ParsedSolution parse_solution(std::string_view text, const DispatchInstance& inst) {
  using Group = std::map<char, std::string>;
  std::vector<Group> groups;
  Group current;
  auto close = [&] {
    if (!current.empty()) groups.push_back(std::move(current));
    current.clear();
  };

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view body;
    if (auto kind = solution_line_kind(line, body)) {
      if (current.count(*kind)) close();
      current[*kind] = line;
    } else if (trim_left(line).empty()) {
      continue;
    } else {
      close();
    }
  }
  close();
  if (groups.empty()) throw ParseError("no x/y/z solution lines found");

  ParsedSolution parsed;
  for (const auto& [kind, raw] : groups.back()) {
    std::string_view body;
    solution_line_kind(raw, body);
    const LineKind lk = kind == 'x' ? LineKind::kX : kind == 'y' ? LineKind::kY : LineKind::kZ;
    try {
      parse_tuple_list(body, lk, parsed.assignment);
    } catch (const ParseError& e) {
      throw ParseError(std::string(1, kind) + " line: " + e.what());
    }
    parsed.raw_lines.push_back(raw);
  }

  auto check = [](std::size_t idx, std::size_t size, const char* what) {
    if (idx >= size) {
      throw BoundsError(std::string(what) + " index " + std::to_string(idx) + " out of range (have " +
                        std::to_string(size) + ")");
    }
  };
  for (const auto& [i, j] : parsed.assignment.x) {
    check(i, inst.m(), "EMPTY");
    check(j, inst.p(), "USER");
  }
  for (const auto& [i, j, k] : parsed.assignment.y) {
    check(i, inst.m(), "EMPTY");
    check(j, inst.p(), "USER");
    check(k, inst.p(), "USER");
  }
  for (const auto& [i, j] : parsed.assignment.z) {
    check(i, inst.n(), "ONE_REQUEST");
    check(j, inst.p(), "USER");
  }
  return parsed;
}

nlohmann::json sidecar_json(const PromptBundle& bundle) {
  auto exemplars = nlohmann::json::array();
  for (const auto& ex : bundle.exemplars) {
    exemplars.push_back({{"solution", ex.solution}, {"gap", ex.gap}, {"objective", ex.objective}});
  }
  return nlohmann::json{{"instance_id", bundle.instance_id},
                        {"instance", bundle.instance},
                        {"prompt_hash", bundle.hash()},
                        {"exemplars", std::move(exemplars)}};
}

void write_prompt_files(const PromptBundle& bundle, const std::string& stem) {
  {
    std::ofstream txt(stem + ".txt", std::ios::binary);
    if (!txt) throw ConfigError("cannot write " + stem + ".txt");
    txt << bundle.full_text;
  }
  std::ofstream js(stem + ".json", std::ios::binary);
  if (!js) throw ConfigError("cannot write " + stem + ".json");
  js << sidecar_json(bundle).dump(2) << '\n';
}

}  // namespace carpool
