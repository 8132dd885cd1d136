#include "restrictlab/form_io.hpp"

#include <fstream>
#include <sstream>

namespace restrictlab {

using nlohmann::json;

namespace {

BigInt coefficient_from_json(const json& c) {
  if (c.is_string()) return parse_bigint(c.get<std::string>());
  if (c.is_number_integer()) return BigInt(c.get<std::int64_t>());
  throw InputError("term coefficient must be a decimal string or an integer");
}

std::vector<MonomialTerm> terms_from_json(const json& j, std::size_t arity) {
  if (!j.contains("terms") || !j["terms"].is_array()) throw InputError("form record needs a \"terms\" array");
  std::vector<MonomialTerm> terms;
  for (const auto& t : j["terms"]) {
    if (!t.contains("coeff") || !t.contains("exps")) throw InputError("term needs \"coeff\" and \"exps\"");
    MonomialTerm term;
    term.coefficient = coefficient_from_json(t["coeff"]);
    for (const auto& e : t["exps"]) {
      if (!e.is_number_integer() || e.get<long long>() < 0) throw InputError("exponents must be non-negative integers");
      term.exponents.push_back(e.get<unsigned>());
    }
    if (term.exponents.size() != arity) throw InputError("term exponent vector does not match arity");
    terms.push_back(std::move(term));
  }
  return terms;
}

std::size_t arity_from_json(const json& j) {
  if (!j.contains("arity") || !j["arity"].is_number_integer() || j["arity"].get<long long>() <= 0)
    throw InputError("record needs a positive integer \"arity\"");
  return j["arity"].get<std::size_t>();
}

IntegerForm form_with_arity(const json& j, std::size_t arity) {
  IntegerForm f(arity, terms_from_json(j, arity));
  if (j.contains("degree") && j["degree"].get<unsigned>() != f.degree())
    throw InputError("declared degree " + j["degree"].dump() + " does not match terms");
  return f;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

IntegerForm form_from_json(const json& j) {
  std::size_t arity = arity_from_json(j);
  if (j.contains("arity") && j.contains("terms")) return form_with_arity(j, arity);
  throw InputError("form record needs \"arity\" and \"terms\"");
}

json form_to_json(const IntegerForm& form) {
  json terms = json::array();
  for (const auto& t : form.terms()) terms.push_back({{"coeff", to_string(t.coefficient)}, {"exps", t.exponents}});
  return {{"arity", form.arity()}, {"degree", form.degree()}, {"terms", terms}};
}

GradedSystem system_from_json(const json& j) {
  std::size_t arity = arity_from_json(j);
  if (!j.contains("blocks") || !j["blocks"].is_object()) throw InputError("system record needs a \"blocks\" object");
  std::map<unsigned, std::vector<IntegerForm>> blocks;
  for (const auto& [key, forms] : j["blocks"].items()) {
    unsigned deg;
    try {
      deg = static_cast<unsigned>(std::stoul(key));
    } catch (const std::exception&) {
      throw InputError("block key must be a degree, got \"" + key + "\"");
    }
    auto& block = blocks[deg];
    for (const auto& f : forms) {
      if (f.contains("arity") && arity_from_json(f) != arity) throw InputError("block form arity mismatch");
      block.push_back(form_with_arity(f, arity));
    }
  }
  return GradedSystem(arity, std::move(blocks));
}

json system_to_json(const GradedSystem& system) {
  json blocks = json::object();
  for (const auto& [deg, forms] : system.blocks()) {
    json arr = json::array();
    for (const auto& f : forms) arr.push_back(form_to_json(f));
    blocks[std::to_string(deg)] = arr;
  }
  return {{"arity", system.arity()}, {"blocks", blocks}};
}

std::string serialize_form(const IntegerForm& form) { return form_to_json(form).dump(2) + "\n"; }

std::string serialize_system(const GradedSystem& system) { return system_to_json(system).dump(2) + "\n"; }

FormOrSystem parse_form_or_system(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) throw InputError("top-level JSON value must be an object");
  if (j.contains("blocks")) return system_from_json(j);
  return form_from_json(j);
}

FormOrSystem load_form_or_system(const std::filesystem::path& path) { return parse_form_or_system(read_file(path)); }

IntegerForm load_form(const std::filesystem::path& path) {
  auto v = load_form_or_system(path);
  if (auto* f = std::get_if<IntegerForm>(&v)) return *f;
  throw InputError(path.string() + " holds a system, a single form was expected");
}

GradedSystem load_system(const std::filesystem::path& path) {
  auto v = load_form_or_system(path);
  if (auto* s = std::get_if<GradedSystem>(&v)) return *s;
  // a single form of degree >= 2 is read as a one-block system
  auto& f = std::get<IntegerForm>(v);
  return GradedSystem(f.arity(), {{f.degree(), {f}}});
}

}  // namespace restrictlab
