#include "mfgs/model_file.hpp"

#include <fstream>
#include <sstream>

#include "mfgs/error.hpp"

namespace mfgs {

using nlohmann::json;

namespace {

SpinConvention parse_convention(const json& j) {
  const std::string c = j.value("convention", "pauli");
  if (c == "pauli") return SpinConvention::kPauli;
  if (c == "spin" || c == "spin_operator" || c == "sx") return SpinConvention::kSpinOperator;
  throw ModelError("unknown spin convention '" + c + "'");
}

}  // namespace

ModelSpec model_from_json(const json& j) {
  try {
    ModelSpec spec;
    const json& kern = j.at("kernel");
    std::vector<double> values;
    if (kern.contains("spin_s")) {
      const json& p = kern.at("spin_s");
      const double s = p.at("s").get<double>();
      const double lam = p.at("lambda").get<double>();
      const SpinConvention conv = parse_convention(p);
      spec = spin_model(s, lam, Polynomial(spin_dimension(s)), conv);
      values = spec.label_values;
    } else if (kern.contains("matrix")) {
      const auto rows = kern.at("matrix").get<std::vector<std::vector<double>>>();
      const int d = static_cast<int>(rows.size());
      spec.d = d;
      spec.kernel.resize(d, d);
      for (int a = 0; a < d; ++a) {
        if (static_cast<int>(rows[a].size()) != d) throw ModelError("kernel matrix is not square");
        for (int b = 0; b < d; ++b) spec.kernel(a, b) = rows[a][b];
      }
      spec.field_strength = j.value("field_strength", spec.kernel.maxCoeff());
    } else {
      throw ModelError("kernel needs 'matrix' or 'spin_s'");
    }
    if (j.contains("d") && j.at("d").get<int>() != spec.d)
      throw ModelError("field d disagrees with the kernel size");
    if (j.contains("labels")) spec.labels = j.at("labels").get<std::vector<std::string>>();
    if (spec.labels.empty())
      for (int a = 0; a < spec.d; ++a) spec.labels.push_back(std::to_string(a));
    if (j.contains("label_values")) values = j.at("label_values").get<std::vector<double>>();
    spec.label_values = values;

    spec.interaction = Polynomial(spec.d);
    if (j.contains("interaction")) {
      const json& in = j.at("interaction");
      if (in.contains("p_body")) {
        const json& p = in.at("p_body");
        if (values.empty()) throw ModelError("p_body needs label_values or a spin_s kernel");
        spec.interaction = p_body_interaction(p.at("p").get<int>(), values, p.value("coeff", 1.0));
      } else if (in.contains("terms")) {
        for (const json& t : in.at("terms"))
          spec.interaction.add_term(t.at("exps").get<std::vector<int>>(),
                                    t.at("coeff").get<double>());
      } else {
        throw ModelError("interaction needs 'terms' or 'p_body'");
      }
    }
    return spec;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model description: ") + e.what());
  }
}

json load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ModelError("cannot parse model file '" + path + "': " + e.what());
  }
}

ModelSpec load_model(const std::string& path) { return model_from_json(load_model_json(path)); }

json with_field(const json& j, double lam) {
  json out = j;
  json& kern = out.at("kernel");
  if (kern.contains("spin_s")) {
    kern["spin_s"]["lambda"] = lam;
    return out;
  }
  const ModelSpec spec = model_from_json(j);
  if (!(spec.field_strength > 0)) throw ModelError("cannot rescale a kernel with zero field");
  const double f = lam / spec.field_strength;
  auto rows = kern.at("matrix").get<std::vector<std::vector<double>>>();
  for (auto& r : rows)
    for (auto& x : r) x *= f;
  kern["matrix"] = rows;
  out["field_strength"] = lam;
  return out;
}

}  // namespace mfgs
