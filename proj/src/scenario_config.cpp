#include "icltemp/scenario_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace icltemp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("config error at '" + path + "': " + what);
}

const json& require_field(const json& obj, const char* key,
                          const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double as_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

long as_integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  return node.get<long>();
}

std::string as_string(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected a string");
  return node.get<std::string>();
}

// "name(arg1, arg2, ...)" -> (name, args)
bool parse_call(const std::string& text, std::string& name,
                std::vector<double>& args) {
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')') return false;
  name = text.substr(0, open);
  std::string body = text.substr(open + 1, text.size() - open - 2);
  args.clear();
  if (body.empty()) return true;
  std::istringstream stream(body);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      args.push_back(std::stod(token));
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

}  // namespace

Vector parse_vector_spec(const json& node, Index d, const std::string& path) {
  if (node.is_string()) {
    std::string name;
    std::vector<double> args;
    if (!parse_call(node.get<std::string>(), name, args)) {
      fail(path, "cannot parse vector spec '" + node.get<std::string>() + "'");
    }
    if (name == "zeros" && args.size() == 1) {
      if (static_cast<Index>(args[0]) != d) fail(path, "dimension mismatch");
      return Vector::Zero(d);
    }
    if (name == "constant" && args.size() == 2) {
      if (static_cast<Index>(args[0]) != d) fail(path, "dimension mismatch");
      return Vector::Constant(d, args[1]);
    }
    fail(path, "unknown vector spec '" + name + "'");
  }
  if (node.is_array()) {
    if (static_cast<Index>(node.size()) != d) fail(path, "dimension mismatch");
    Vector v(d);
    for (Index i = 0; i < d; ++i) {
      v(i) = as_number(node[static_cast<std::size_t>(i)],
                       path + "[" + std::to_string(i) + "]");
    }
    return v;
  }
  fail(path, "expected a vector spec string or an array");
}

Matrix parse_matrix_spec(const json& node, Index d, const std::string& path) {
  if (node.is_string()) {
    std::string name;
    std::vector<double> args;
    if (!parse_call(node.get<std::string>(), name, args)) {
      fail(path, "cannot parse matrix spec '" + node.get<std::string>() + "'");
    }
    if (name == "identity" && args.size() == 1) {
      if (static_cast<Index>(args[0]) != d) fail(path, "dimension mismatch");
      return Matrix::Identity(d, d);
    }
    if (name == "scaled_identity" && args.size() == 2) {
      if (static_cast<Index>(args[0]) != d) fail(path, "dimension mismatch");
      return args[1] * Matrix::Identity(d, d);
    }
    if (name == "diag") {
      if (static_cast<Index>(args.size()) != d) fail(path, "dimension mismatch");
      Matrix m = Matrix::Zero(d, d);
      for (Index i = 0; i < d; ++i) m(i, i) = args[static_cast<std::size_t>(i)];
      return m;
    }
    fail(path, "unknown matrix spec '" + name + "'");
  }
  if (node.is_array()) {
    if (static_cast<Index>(node.size()) != d) fail(path, "dimension mismatch");
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i) {
      const json& row = node[static_cast<std::size_t>(i)];
      const std::string row_path = path + "[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<Index>(row.size()) != d) {
        fail(row_path, "expected a row of length " + std::to_string(d));
      }
      for (Index j = 0; j < d; ++j) {
        m(i, j) = as_number(row[static_cast<std::size_t>(j)],
                            row_path + "[" + std::to_string(j) + "]");
      }
    }
    return m;
  }
  fail(path, "expected a matrix spec string or an array of rows");
}

namespace {

GaussianSpec parse_gaussian(const json& node, Index d,
                            const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  GaussianSpec spec;
  spec.mean = node.contains("mean")
                  ? parse_vector_spec(node["mean"], d, path + ".mean")
                  : Vector::Zero(d);
  spec.covariance = node.contains("cov")
                        ? parse_matrix_spec(node["cov"], d, path + ".cov")
                        : Matrix::Identity(d, d);
  return spec;
}

DataDistribution parse_distribution(const json& node, Index d,
                                    const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  DataDistribution dist;
  dist.x_spec = parse_gaussian(require_field(node, "x", path), d, path + ".x");
  dist.task.w_spec =
      parse_gaussian(require_field(node, "w", path), d, path + ".w");
  dist.noise.sigma2 =
      node.contains("sigma2") ? as_number(node["sigma2"], path + ".sigma2")
                              : 0.0;
  if (dist.noise.sigma2 < 0.0) fail(path + ".sigma2", "must be >= 0");
  return dist;
}

TauPolicy parse_policy(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  const std::string type = as_string(require_field(node, "type", path),
                                     path + ".type");
  if (type == "fixed") {
    return TauPolicy::fixed(
        as_number(require_field(node, "tau", path), path + ".tau"));
  }
  if (type == "pretrain_default") return TauPolicy::pretrain_default();
  if (type == "optimal") return TauPolicy::optimal();
  if (type == "heuristic") {
    double scale = 0.0;
    if (node.contains("scale")) scale = as_number(node["scale"], path + ".scale");
    return TauPolicy::heuristic(scale);
  }
  if (type == "sweep") {
    const json& grid = require_field(node, "grid", path);
    if (!grid.is_array() || grid.empty()) {
      fail(path + ".grid", "expected a nonempty array");
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values.push_back(
          as_number(grid[i], path + ".grid[" + std::to_string(i) + "]"));
    }
    return TauPolicy::sweep(std::move(values));
  }
  fail(path + ".type", "unknown policy '" + type + "'");
}

}  // namespace

ShiftScenario parse_scenario(const json& doc) {
  const std::string root = "scenario";
  if (!doc.is_object()) fail(root, "expected a JSON object");

  ShiftScenario s;
  s.d = as_integer(require_field(doc, "d", root), root + ".d");
  if (s.d < 1) fail(root + ".d", "must be >= 1");
  s.m = as_integer(require_field(doc, "m", root), root + ".m");

  const json& grid = require_field(doc, "l_grid", root);
  if (!grid.is_array() || grid.empty()) {
    fail(root + ".l_grid", "expected a nonempty array");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.l_grid.push_back(static_cast<Index>(
        as_integer(grid[i], root + ".l_grid[" + std::to_string(i) + "]")));
  }

  if (doc.contains("id")) s.id = as_string(doc["id"], root + ".id");
  s.case_label = doc.contains("case_label")
                     ? as_string(doc["case_label"], root + ".case_label")
                     : s.id;
  if (doc.contains("seed")) {
    s.seed = static_cast<std::uint64_t>(
        as_integer(doc["seed"], root + ".seed"));
  }
  if (doc.contains("n_prompts")) {
    s.n_prompts = as_integer(doc["n_prompts"], root + ".n_prompts");
  }
  if (doc.contains("threads")) {
    s.threads = static_cast<int>(as_integer(doc["threads"], root + ".threads"));
  }
  if (doc.contains("include_linear_attention")) {
    const json& flag = doc["include_linear_attention"];
    if (!flag.is_boolean()) {
      fail(root + ".include_linear_attention", "expected a boolean");
    }
    s.include_linear_attention = flag.get<bool>();
  }

  s.tau_policy =
      parse_policy(require_field(doc, "tau_policy", root), root + ".tau_policy");
  s.train = parse_distribution(require_field(doc, "train", root), s.d,
                               root + ".train");
  s.test = parse_distribution(require_field(doc, "test", root), s.d,
                              root + ".test");
  return s;
}

ShiftScenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("config error: cannot open '" + path.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(file);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config error: " + path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::runtime_error("override must look like path.to.field=value: '" +
                             assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;  // plain string

  json* node = &doc;
  std::istringstream stream(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(stream, key, '.')) {
    if (key.empty()) {
      throw std::runtime_error("override has an empty path segment: '" +
                               assignment + "'");
    }
    keys.push_back(key);
  }
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    node = &(*node)[keys[i]];
  }
  (*node)[keys.back()] = value;
}

}  // namespace icltemp
