#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsindy {

/// Declarative description of the feature dictionary Δ(x).
///
/// Output ordering is fixed: intercept, raw features, two-way interactions
/// (i < j, lexicographic), squares, sines, cosines. Self-products only come
/// from `squares`.
struct DictionarySpec {
  int base_dim = 1;
  bool include_intercept = true;
  bool interactions = false;
  bool squares = false;
  bool sine = false;
  bool cosine = false;
  double frequency = 1.0;  // trig argument is frequency * x + phase
  double phase = 0.0;

  bool operator==(const DictionarySpec&) const = default;
};

void validate(const DictionarySpec& spec);

Eigen::Index dimension(const DictionarySpec& spec);

Eigen::VectorXd transform(const DictionarySpec& spec, const Eigen::VectorXd& x);

/// Column names matching `transform`'s ordering, given raw feature names.
std::vector<std::string> term_names(const DictionarySpec& spec,
                                    const std::vector<std::string>& raw_names);

/// The nine augmentation combinations E1..E9 of the expert-advice study.
std::vector<DictionarySpec> expert_grid(int base_dim);

}  // namespace rsindy
