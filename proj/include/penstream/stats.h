// Copyright 2026 The Penstream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Item-level statistics: standardization, correlations, collinearity pruning,
// ordinary least squares with t tests, and stacked two-level designs.

#ifndef PENSTREAM_STATS_H_
#define PENSTREAM_STATS_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "penstream/cleaning.h"

namespace penstream {

// Columns of a regression design. The intercept, when present, is column 0
// and named "(Intercept)".
struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

inline constexpr std::string_view kInterceptName = "(Intercept)";

// Prepends a column of ones.
DesignMatrix with_intercept(const DesignMatrix &design);

struct Coefficient {
  std::string term;
  double beta = 0;
  double se = 0;
  double t = 0;
  double p = 1;
};

struct FitResult {
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd residuals;
  double r_squared = 0;
  double sigma2 = 0;
  std::size_t df_residual = 0;

  const Coefficient &coefficient(std::string_view term) const;
};

// Mean 0, sample sd 1 (n - 1 denominator). Throws ZeroVariance, or
// InsufficientRows for fewer than two values.
std::vector<double> z_transform(std::span<const double> values);
Eigen::VectorXd z_transform(const Eigen::VectorXd &values, const std::string &name = "vector");

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);

// Two-sided Student t tail probability 2 P(T >= |t|).
double t_sf(double t, double df);

// "***", "**", "*" at the .001, .01 and .05 levels, otherwise empty.
std::string significance_stars(double p);

struct CorrelationMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd r;
  Eigen::MatrixXd p;
  std::size_t n = 0;

  // r to two decimals plus stars; the diagonal carries no stars.
  std::string cell_text(Eigen::Index i, Eigen::Index j) const;
};

// Pearson correlations between equally long columns (at least three values).
// Significance uses t = r sqrt((n - 2) / (1 - r^2)) on n - 2 df. Throws
// ZeroVariance naming the offending column.
CorrelationMatrix pearson_matrix(const std::vector<std::string> &names,
                                 const Eigen::MatrixXd &columns);

std::string format_correlations(const CorrelationMatrix &matrix);

// VIF of every column: 1 / (1 - R^2) from regressing the column on the others
// plus an intercept. R^2 >= 1 - 1e-12 yields +infinity.
std::vector<double> variance_inflation(const Eigen::MatrixXd &predictors);

struct VifStep {
  std::vector<std::pair<std::string, double>> vifs;
  std::optional<std::string> dropped;
};

struct VifSelection {
  std::vector<std::string> retained;
  std::vector<VifStep> log;
};

// Drops the column with the largest VIF while that VIF exceeds the threshold;
// ties go to the later column. `design` holds predictors only.
VifSelection vif_stepwise(const DesignMatrix &design, double threshold);

std::string format_vif_log(const VifSelection &selection);

// Least squares through a column-pivoted QR decomposition. SE_j is
// sqrt(sigma2 [(X'X)^-1]_jj) with sigma2 = RSS / (n - p); p-values are two
// sided on n - p df; R^2 = 1 - RSS / TSS around the mean of y.
//
// Throws InsufficientRows when n <= p and RankDeficient when X lacks full
// column rank.
FitResult ols_fit(const DesignMatrix &design, const Eigen::VectorXd &y);

// One level of a stacked design: the response per item, optionally with a
// per-level covariate (e.g. length).
struct LevelData {
  std::string name;
  std::vector<std::string> items;
  Eigen::VectorXd response;
  std::optional<Eigen::VectorXd> covariate;
};

struct LevelDesignOptions {
  bool zscore_predictors = true;
  bool zscore_covariate = true;
  std::string covariate_name = "length";
};

struct LevelDesign {
  DesignMatrix design;  // includes the intercept
  Eigen::VectorXd response;
};

// Stacks two levels of the same items into one design. Level is a centred
// contrast, +0.5 for `higher` and -0.5 for `lower`. Columns: intercept,
// Level, [length], predictors, Level x predictors, [Level x length].
// `predictors` has one row per item and the covariate appears only when both
// levels carry one. Throws MismatchedItems.
LevelDesign build_level_design(const LevelData &higher, const LevelData &lower,
                               const DesignMatrix &predictors,
                               const LevelDesignOptions &options = {});

// A single-level model on the item table: response ~ predictors + covariates.
struct ModelSpec {
  std::string name;
  std::string response;
  std::vector<std::string> covariates;
};

// Two stacked levels: higher/lower responses with optional paired
// covariates.
struct LevelModelSpec {
  std::string name;
  std::string higher;
  std::string lower;
  std::optional<std::pair<std::string, std::string>> covariate;
};

struct ModelOptions {
  bool zscore_covariates = true;
};

struct ModelResult {
  std::string name;
  std::size_t n = 0;  // rows entering the fit
  FitResult fit;
};

// Listwise deletion of items with NA in any entered column, then z-scored
// predictors and OLS.
ModelResult fit_item_model(const ItemTable &items, const ModelSpec &spec,
                           const std::vector<std::string> &predictors,
                           const ModelOptions &options = {});
ModelResult fit_level_model(const ItemTable &items, const LevelModelSpec &spec,
                            const std::vector<std::string> &predictors,
                            const ModelOptions &options = {});

// Columns term, beta, se, t, p; a final R2 row carries R^2 in the beta column.
std::string format_model_table(const ModelResult &result);

// "name:response[:cov1,cov2]".
ModelSpec parse_model_spec(std::string_view text);
// "name:higher,lower[:higher_cov,lower_cov]".
LevelModelSpec parse_level_model_spec(std::string_view text);

// The single-level and stacked models reported for the handwriting database.
std::vector<ModelSpec> default_models();
std::vector<LevelModelSpec> default_level_models();

}  // namespace penstream

#endif  // PENSTREAM_STATS_H_
