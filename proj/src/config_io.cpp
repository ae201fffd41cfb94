#include "clustertail/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clustertail/error.hpp"

namespace clustertail {

using nlohmann::json;

namespace {

double number(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw Error(ErrorKind::ConfigFormat, std::string("law is missing numeric field '") + key + "'");
  }
  return obj.at(key).get<double>();
}

OffspringLaw parse_law(const json& obj) {
  if (!obj.is_object() || !obj.contains("family") || !obj.at("family").is_string()) {
    throw Error(ErrorKind::ConfigFormat, "law must be an object with a 'family' string");
  }
  const std::string family = obj.at("family").get<std::string>();
  try {
    if (family == "zeta_tail") {
      if (obj.contains("mean")) return OffspringLaw::zeta_tail_with_mean(number(obj, "alpha"), number(obj, "mean"));
      return OffspringLaw::zeta_tail(number(obj, "alpha"), number(obj, "p"));
    }
    if (family == "mixed_poisson") {
      return OffspringLaw::mixed_poisson(number(obj, "alpha"), number(obj, "p"), number(obj, "x_m"),
                                         number(obj, "phi"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw Error(ErrorKind::ConfigFormat, e.what());
    throw;
  }
  throw Error(ErrorKind::ConfigFormat, "unknown law family '" + family + "'");
}

}  // namespace

LawMatrix parse_laws_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigFormat, std::string("model config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("d") || !doc.at("d").is_number_integer() || !doc.contains("offspring")) {
    throw Error(ErrorKind::ConfigFormat, "model config needs integer 'd' and array 'offspring'");
  }
  const int d = doc.at("d").get<int>();
  const json& rows = doc.at("offspring");
  if (d < 1 || d > kMaxDim || !rows.is_array() || static_cast<int>(rows.size()) != d) {
    throw Error(ErrorKind::ConfigFormat, "'offspring' must be a d x d array with 1 <= d <= 16");
  }
  LawMatrix laws(d);
  for (int j = 0; j < d; ++j) {
    if (!rows[j].is_array() || static_cast<int>(rows[j].size()) != d) {
      throw Error(ErrorKind::ConfigFormat, "'offspring' row " + std::to_string(j) + " must have d entries");
    }
    for (int i = 0; i < d; ++i) laws[j].push_back(parse_law(rows[j][i]));
  }
  return laws;
}

std::string laws_to_json(const LawMatrix& laws) {
  json doc;
  doc["d"] = laws.size();
  json rows = json::array();
  for (const auto& row : laws) {
    json r = json::array();
    for (const auto& law : row) {
      json l;
      l["family"] = to_string(law.family());
      l["alpha"] = law.alpha();
      l["p"] = law.activity();
      if (law.family() == Family::MixedPoisson) {
        l["x_m"] = law.pareto_scale();
        l["phi"] = law.fertility();
      }
      r.push_back(l);
    }
    rows.push_back(r);
  }
  doc["offspring"] = rows;
  return doc.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigFormat, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ModelConfig load_model_file(const std::string& path, Strictness strictness) {
  return ModelConfig::create(parse_laws_json(read_file(path)), strictness);
}

LawMatrix reference_r2_laws() {
  return {
      {OffspringLaw::zeta_tail_with_mean(1.6, 0.4), OffspringLaw::zeta_tail_with_mean(3.4, 0.1)},
      {OffspringLaw::zeta_tail_with_mean(2.9, 0.15), OffspringLaw::zeta_tail_with_mean(2.2, 0.35)},
  };
}

LawMatrix counterexample_laws() {
  return {
      {OffspringLaw::zeta_tail_with_mean(2.2, 0.4), OffspringLaw::zeta_tail_with_mean(5.0, 0.1)},
      {OffspringLaw::zeta_tail_with_mean(2.6, 0.15), OffspringLaw::zeta_tail_with_mean(5.4, 0.35)},
  };
}

}  // namespace clustertail
