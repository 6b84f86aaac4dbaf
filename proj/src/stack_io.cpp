#include "sltime/stack_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sltime/error.hpp"

namespace sltime {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw ValidationError(where + ": missing numeric field '" + key + "'");
  return it->get<double>();
}

Layer layer_from(const json& j, const std::string& where, bool width_required) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  // the lead has no width of its own; keep the placeholder StackSpec uses
  Layer l = width_required ? Layer{} : StackSpec{}.outside;
  if (width_required || j.contains("width_nm")) l.width = number(j, "width_nm", where);
  l.potential = number(j, "V_meV", where);
  l.mass_ratio = number(j, "mass_ratio", where);
  return l;
}

CellSpec cell_from(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  auto it = j.find("layers");
  if (it == j.end() || !it->is_array()) throw ValidationError(where + ": missing 'layers' array");
  CellSpec c;
  for (std::size_t i = 0; i < it->size(); ++i)
    c.layers.push_back(layer_from((*it)[i], where + ".layers[" + std::to_string(i) + "]", true));
  if (auto s = j.find("symmetric"); s != j.end()) {
    if (!s->is_boolean()) throw ValidationError(where + ": 'symmetric' must be true or false");
    c.symmetric = s->get<bool>();
  }
  return c;
}

std::optional<CellSpec> optional_cell(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return cell_from(*it, key);
}

json layer_json(const Layer& l) {
  return json{{"width_nm", l.width}, {"V_meV", l.potential}, {"mass_ratio", l.mass_ratio}};
}

json cell_json(const CellSpec& c) {
  json layers = json::array();
  for (const auto& l : c.layers) layers.push_back(layer_json(l));
  return json{{"layers", layers}, {"symmetric", c.symmetric}};
}

}  // namespace

StackSpec parse_stack(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("stack JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("stack JSON: top level must be an object");
  StackSpec s;
  if (auto it = j.find("outside"); it != j.end() && !it->is_null()) s.outside = layer_from(*it, "outside", false);
  if (!j.contains("core")) throw ValidationError("stack JSON: missing 'core'");
  s.core = cell_from(j["core"], "core");
  if (auto it = j.find("replicas"); it != j.end()) {
    if (!it->is_number_integer()) throw ValidationError("stack JSON: 'replicas' must be an integer");
    s.replicas = it->get<int>();
  }
  s.left_arc = optional_cell(j, "left_arc");
  s.right_arc = optional_cell(j, "right_arc");
  validate_stack(s);
  return s;
}

StackSpec load_stack(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stack file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_stack(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string stack_to_json(const StackSpec& stack, int indent) {
  json j;
  j["outside"] = json{{"V_meV", stack.outside.potential}, {"mass_ratio", stack.outside.mass_ratio}};
  j["core"] = cell_json(stack.core);
  j["replicas"] = stack.replicas;
  j["left_arc"] = stack.left_arc ? cell_json(*stack.left_arc) : json(nullptr);
  j["right_arc"] = stack.right_arc ? cell_json(*stack.right_arc) : json(nullptr);
  return j.dump(indent);
}

void save_stack(const StackSpec& stack, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write stack file '" + path + "'");
  out << stack_to_json(stack) << '\n';
}

}  // namespace sltime
