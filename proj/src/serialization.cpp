#include "rsindy/serialization.hpp"

#include "rsindy/error.hpp"

namespace rsindy {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::SchemaError, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return required<T>(j, key);
}

}  // namespace

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::SchemaError, "expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorCode::SchemaError, "expected a JSON array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::SchemaError, "expected a JSON array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (row.size() != m.cols()) fail(ErrorCode::SchemaError, "ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

Json to_json(const DictionarySpec& spec) {
  return Json{{"base_dim", spec.base_dim},     {"include_intercept", spec.include_intercept},
              {"interactions", spec.interactions}, {"squares", spec.squares},
              {"sine", spec.sine},             {"cosine", spec.cosine},
              {"frequency", spec.frequency},   {"phase", spec.phase}};
}

DictionarySpec dictionary_from_json(const Json& j) {
  DictionarySpec s;
  s.base_dim = required<int>(j, "base_dim");
  s.include_intercept = optional_field(j, "include_intercept", true);
  s.interactions = optional_field(j, "interactions", false);
  s.squares = optional_field(j, "squares", false);
  s.sine = optional_field(j, "sine", false);
  s.cosine = optional_field(j, "cosine", false);
  s.frequency = optional_field(j, "frequency", 1.0);
  s.phase = optional_field(j, "phase", 0.0);
  try {
    validate(s);
  } catch (const Error& e) {
    fail(ErrorCode::SchemaError, e.what());
  }
  return s;
}

Json to_json(const GaussianModeld& model) {
  return Json{{"mu", vector_to_json(model.mu)},
              {"sigma", matrix_to_json(model.sigma.matrix())},
              {"lambda", model.lambda},
              {"eta", model.eta},
              {"noise_var", model.noise_var}};
}

GaussianModeld gaussian_model_from_json(const Json& j) {
  if (!j.contains("mu") || !j.contains("sigma")) fail(ErrorCode::SchemaError, "model needs mu and sigma");
  return make_gaussian_model<double>(vector_from_json(j.at("mu")),
                                     SymMatrixd(matrix_from_json(j.at("sigma"))),
                                     required<double>(j, "lambda"), required<double>(j, "eta"),
                                     optional_field(j, "noise_var", 0.0));
}

Json to_json(const LogisticModeld& model) {
  return Json{{"mu", vector_to_json(model.mu)},
              {"sigma", matrix_to_json(model.sigma.matrix())},
              {"lambda", model.lambda},
              {"eta", model.eta},
              {"threshold", model.threshold}};
}

LogisticModeld logistic_model_from_json(const Json& j) {
  if (!j.contains("mu") || !j.contains("sigma")) fail(ErrorCode::SchemaError, "model needs mu and sigma");
  return make_logistic_model<double>(vector_from_json(j.at("mu")),
                                     SymMatrixd(matrix_from_json(j.at("sigma"))),
                                     required<double>(j, "lambda"), required<double>(j, "eta"),
                                     optional_field(j, "threshold", 0.5));
}

}  // namespace rsindy
