#pragma once

// JSON state serialization for models and dictionary specs.

#include "json.hpp"

#include "rsindy/feature_library.hpp"
#include "rsindy/gaussian_regressor.hpp"
#include "rsindy/logistic_classifier.hpp"

namespace rsindy {

using Json = nlohmann::json;

Json to_json(const DictionarySpec& spec);
DictionarySpec dictionary_from_json(const Json& j);

/// {mu, sigma, lambda, eta, noise_var}
Json to_json(const GaussianModeld& model);
GaussianModeld gaussian_model_from_json(const Json& j);

/// {mu, sigma, lambda, eta, threshold}
Json to_json(const LogisticModeld& model);
LogisticModeld logistic_model_from_json(const Json& j);

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

}  // namespace rsindy
