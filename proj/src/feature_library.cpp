#include "rsindy/feature_library.hpp"

#include <cmath>

#include "rsindy/error.hpp"

namespace rsindy {

void validate(const DictionarySpec& spec) {
  if (spec.base_dim < 1) fail(ErrorCode::InvalidInput, "DictionarySpec: base_dim must be >= 1");
  if (!std::isfinite(spec.frequency) || !std::isfinite(spec.phase)) {
    fail(ErrorCode::InvalidInput, "DictionarySpec: non-finite trig parameters");
  }
}

Eigen::Index dimension(const DictionarySpec& spec) {
  validate(spec);
  const Eigen::Index k = spec.base_dim;
  Eigen::Index p = k;
  if (spec.include_intercept) p += 1;
  if (spec.interactions) p += k * (k - 1) / 2;
  if (spec.squares) p += k;
  if (spec.sine) p += k;
  if (spec.cosine) p += k;
  return p;
}

Eigen::VectorXd transform(const DictionarySpec& spec, const Eigen::VectorXd& x) {
  const Eigen::Index p = dimension(spec);
  const Eigen::Index k = spec.base_dim;
  if (x.size() != k) fail(ErrorCode::InvalidInput, "transform: input length does not match base_dim");
  if (!x.allFinite()) fail(ErrorCode::InvalidInput, "transform: non-finite input");

  Eigen::VectorXd out(p);
  Eigen::Index at = 0;
  if (spec.include_intercept) out(at++) = 1.0;
  out.segment(at, k) = x;
  at += k;
  if (spec.interactions) {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) out(at++) = x(i) * x(j);
    }
  }
  if (spec.squares) {
    out.segment(at, k) = x.array().square().matrix();
    at += k;
  }
  if (spec.sine) {
    out.segment(at, k) = (spec.frequency * x.array() + spec.phase).sin().matrix();
    at += k;
  }
  if (spec.cosine) {
    out.segment(at, k) = (spec.frequency * x.array() + spec.phase).cos().matrix();
    at += k;
  }
  return out;
}

std::vector<std::string> term_names(const DictionarySpec& spec,
                                    const std::vector<std::string>& raw_names) {
  validate(spec);
  if (static_cast<int>(raw_names.size()) != spec.base_dim) {
    fail(ErrorCode::InvalidInput, "term_names: name count does not match base_dim");
  }
  std::vector<std::string> out;
  if (spec.include_intercept) out.emplace_back("intercept");
  for (const auto& n : raw_names) out.push_back(n);
  if (spec.interactions) {
    for (std::size_t i = 0; i < raw_names.size(); ++i) {
      for (std::size_t j = i + 1; j < raw_names.size(); ++j) {
        out.push_back(raw_names[i] + ":" + raw_names[j]);
      }
    }
  }
  if (spec.squares) for (const auto& n : raw_names) out.push_back(n + "^2");
  if (spec.sine) for (const auto& n : raw_names) out.push_back("sin(" + n + ")");
  if (spec.cosine) for (const auto& n : raw_names) out.push_back("cos(" + n + ")");
  return out;
}

std::vector<DictionarySpec> expert_grid(int base_dim) {
  if (base_dim < 1) fail(ErrorCode::InvalidInput, "expert_grid: base_dim must be >= 1");
  // interaction, squared, sine, cosine
  constexpr bool table[9][4] = {
      {false, false, false, false},  // E1
      {true, false, false, false},   // E2
      {false, true, false, false},   // E3
      {false, false, true, false},   // E4
      {false, false, false, true},   // E5
      {true, true, false, false},    // E6
      {true, true, true, false},     // E7
      {true, true, true, true},      // E8
      {false, false, true, true},    // E9
  };
  std::vector<DictionarySpec> out;
  out.reserve(9);
  for (const auto& row : table) {
    DictionarySpec s;
    s.base_dim = base_dim;
    s.include_intercept = true;
    s.interactions = row[0];
    s.squares = row[1];
    s.sine = row[2];
    s.cosine = row[3];
    out.push_back(s);
  }
  return out;
}

}  // namespace rsindy
