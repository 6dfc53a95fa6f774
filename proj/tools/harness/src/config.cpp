#include "tscaledgd/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tsgd::harness {

using nlohmann::json;

const char* to_string(Problem p) noexcept {
  switch (p) {
    case Problem::kRpca: return "rpca";
    case Problem::kCompletion: return "completion";
    case Problem::kFactorization: return "factorization";
  }
  return "unknown";
}

Problem parse_problem(std::string_view name) {
  if (name == "rpca") return Problem::kRpca;
  if (name == "completion" || name == "complete") return Problem::kCompletion;
  if (name == "factorization" || name == "factorize") return Problem::kFactorization;
  throw ConfigError("problem", "unknown problem '" + std::string(name) + "'");
}

namespace {

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

Index as_index(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<Index>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

// Accepts a scalar or an array and calls `each(element, element_path)`.
template <typename F>
void for_each_item(const json& v, const std::string& path, F each) {
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(path, "list must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) each(v[i], path + "[" + std::to_string(i) + "]");
  } else {
    each(v, path);
  }
}

double as_snr(const json& v, const std::string& path) {
  if (v.is_null()) return kNoNoise;
  if (v.is_string() && (v == "inf" || v == "none")) return kNoNoise;
  return as_number(v, path);
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "top level must be an object");

  ExperimentConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "problem") {
      cfg.problem = parse_problem(as_string(v, key));
    } else if (key == "methods") {
      cfg.methods.clear();
      for_each_item(v, key, [&](const json& e, const std::string& p) {
        try {
          cfg.methods.push_back(parse_method(as_string(e, p)));
        } catch (const Error& err) {
          throw ConfigError(p, err.what());
        }
      });
    } else if (key == "dims") {
      if (!v.is_array() || v.size() != 3) throw ConfigError(key, "expected [n1, n2, n3]");
      cfg.n1 = as_index(v[0], "dims[0]");
      cfg.n2 = as_index(v[1], "dims[1]");
      cfg.n3 = as_index(v[2], "dims[2]");
    } else if (key == "n") {
      cfg.n1 = cfg.n2 = cfg.n3 = as_index(v, key);
    } else if (key == "rank") {
      cfg.rank = as_index(v, key);
    } else if (key == "transform" || key == "transforms") {
      cfg.transforms.clear();
      for_each_item(v, key, [&](const json& e, const std::string& p) {
        try {
          cfg.transforms.push_back(parse_transform_kind(as_string(e, p)));
        } catch (const Error& err) {
          throw ConfigError(p, err.what());
        }
      });
    } else if (key == "kappa" || key == "kappas") {
      cfg.kappas.clear();
      for_each_item(v, key, [&](const json& e, const std::string& p) { cfg.kappas.push_back(as_number(e, p)); });
    } else if (key == "alpha") {
      cfg.alpha = as_number(v, key);
    } else if (key == "p") {
      cfg.p = as_number(v, key);
    } else if (key == "snr_db") {
      cfg.snr_db.clear();
      for_each_item(v, key, [&](const json& e, const std::string& p) { cfg.snr_db.push_back(as_snr(e, p)); });
    } else if (key == "eta" || key == "etas") {
      cfg.etas.clear();
      for_each_item(v, key, [&](const json& e, const std::string& p) { cfg.etas.push_back(as_number(e, p)); });
    } else if (key == "max_iters") {
      cfg.max_iters = as_index(v, key);
    } else if (key == "rel_tol") {
      cfg.rel_tol = as_number(v, key);
    } else if (key == "schedule") {
      if (!v.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [sk, sv] : v.items()) {
        const std::string p = "schedule." + sk;
        if (sk == "zeta0") cfg.schedule.zeta0 = as_number(sv, p);
        else if (sk == "zeta1") cfg.schedule.zeta1 = as_number(sv, p);
        else if (sk == "rho") cfg.schedule.rho = as_number(sv, p);
        else throw ConfigError(p, "unknown key");
      }
    } else if (key == "varsigma") {
      if (v.is_null()) cfg.varsigma.reset();
      else cfg.varsigma = as_number(v, key);
    } else if (key == "init_radius") {
      cfg.init_radius = as_number(v, key);
    } else if (key == "seed" || key == "seeds") {
      cfg.seeds.clear();
      for_each_item(v, key, [&](const json& e, const std::string& p) {
        if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0)) {
          throw ConfigError(p, "expected a non-negative integer");
        }
        cfg.seeds.push_back(e.get<std::uint64_t>());
      });
    } else if (key == "output_dir") {
      cfg.output_dir = as_string(v, key);
    } else if (key == "timing") {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
      cfg.timing = v.get<bool>();
    } else if (key == "description") {
      // free-form note
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("methods", "list must not be empty");
  if (n1 < 1 || n2 < 1 || n3 < 1) throw ConfigError("dims", "all dimensions must be >= 1");
  if (rank < 1 || rank > std::min(n1, n2)) throw ConfigError("rank", "must lie in [1, min(n1, n2)]");
  if (transforms.empty()) throw ConfigError("transform", "list must not be empty");
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] >= 1.0) || !std::isfinite(kappas[i])) {
      throw ConfigError("kappa[" + std::to_string(i) + "]", "must be a finite value >= 1");
    }
  }
  if (kappas.empty()) throw ConfigError("kappa", "list must not be empty");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in [0, 1)");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p", "must lie in (0, 1]");
  if (snr_db.empty()) throw ConfigError("snr_db", "list must not be empty");
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    if (std::isnan(snr_db[i])) throw ConfigError("snr_db[" + std::to_string(i) + "]", "must be a number or null");
  }
  if (etas.empty()) throw ConfigError("eta", "list must not be empty");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0.0) || !std::isfinite(etas[i])) {
      throw ConfigError("eta[" + std::to_string(i) + "]", "must be positive");
    }
  }
  if (max_iters < 0) throw ConfigError("max_iters", "must be >= 0");
  if (!(rel_tol >= 0.0)) throw ConfigError("rel_tol", "must be >= 0");
  try {
    schedule.validate();
  } catch (const Error& e) {
    const std::string msg = e.what();
    const auto field = msg.find("schedule.");
    const std::string path = field == std::string::npos ? "schedule" : msg.substr(field, msg.find(' ', field) - field);
    throw ConfigError(path, msg);
  }
  if (varsigma && !(*varsigma > 0.0)) throw ConfigError("varsigma", "must be positive");
  if (!(init_radius >= 0.0)) throw ConfigError("init_radius", "must be >= 0");
  if (seeds.empty()) throw ConfigError("seeds", "list must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds", "duplicate seed");
  }
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

}  // namespace tsgd::harness
