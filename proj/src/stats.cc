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

#include "penstream/stats.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/text_table.h"

namespace penstream {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCollinear = 1e-12;
constexpr double kRankThreshold = 1e-10;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 200000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1;
  double d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1) < kEps) break;
  }
  return h;
}

// I_x(a, b) given both x and y = 1 - x, so callers can pass a y computed
// without cancellation.
double incomplete_beta_xy(double x, double y, double a, double b) {
  if (x <= 0) return 0;
  if (y <= 0) return 1;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  if (x < (a + 1) / (a + b + 2)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

double mean(const Eigen::VectorXd &v) { return v.mean(); }

double sample_sd(const Eigen::VectorXd &v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

// Coefficient of determination of y regressed on [1, X].
double r_squared_with_intercept(const Eigen::MatrixXd &others, const Eigen::VectorXd &y) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd design(n, others.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(others.cols()) = others;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(kRankThreshold);
  const Eigen::VectorXd fitted = design * qr.solve(y);
  const double tss = (y.array() - y.mean()).square().sum();
  if (tss == 0) return 1;  // a constant column is fully explained by the intercept
  const double rss = (y - fitted).squaredNorm();
  return 1 - rss / tss;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    parts.emplace_back(trim(text.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::string covariate_role(const std::string &name) {
  if (name.ends_with("_len")) return "length";
  if (name.ends_with("_dist")) return "distance";
  return name;
}

}  // namespace

DesignMatrix with_intercept(const DesignMatrix &design) {
  DesignMatrix out;
  out.values.resize(design.rows(), design.cols() + 1);
  out.values.col(0).setOnes();
  out.values.rightCols(design.cols()) = design.values;
  out.names.emplace_back(kInterceptName);
  out.names.insert(out.names.end(), design.names.begin(), design.names.end());
  return out;
}

const Coefficient &FitResult::coefficient(std::string_view term) const {
  for (const auto &c : coefficients) {
    if (c.term == term) return c;
  }
  throw std::out_of_range(fmt::format("no term {}", term));
}

std::vector<double> z_transform(std::span<const double> values) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                        static_cast<Eigen::Index>(values.size()));
  Eigen::VectorXd z = z_transform(v);
  return {z.data(), z.data() + z.size()};
}

Eigen::VectorXd z_transform(const Eigen::VectorXd &values, const std::string &name) {
  if (values.size() < 2) throw InsufficientRows(static_cast<std::size_t>(values.size()), 1);
  const double sd = sample_sd(values);
  if (!(sd > 0)) throw ZeroVariance(name);
  return (values.array() - mean(values)) / sd;
}

double incomplete_beta(double x, double a, double b) {
  return incomplete_beta_xy(x, 1 - x, a, b);
}

double t_sf(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0;
  if (t == 0) return 1;
  const double t2 = t * t;
  return incomplete_beta_xy(df / (df + t2), t2 / (df + t2), df / 2, 0.5);
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string CorrelationMatrix::cell_text(Eigen::Index i, Eigen::Index j) const {
  std::string text = fmt::format("{:.2f}", r(i, j));
  if (text == "-0.00") text = "0.00";
  if (i != j) text += significance_stars(p(i, j));
  return text;
}

CorrelationMatrix pearson_matrix(const std::vector<std::string> &names,
                                 const Eigen::MatrixXd &columns) {
  const Eigen::Index n = columns.rows();
  const Eigen::Index k = columns.cols();
  if (n < 3) throw InsufficientRows(static_cast<std::size_t>(n), 3);
  Eigen::MatrixXd centered = columns.rowwise() - columns.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(norms(j) > 0)) throw ZeroVariance(names[static_cast<std::size_t>(j)]);
    centered.col(j) /= norms(j);
  }

  CorrelationMatrix out;
  out.names = names;
  out.n = static_cast<std::size_t>(n);
  out.r = centered.transpose() * centered;
  out.p.resize(k, k);
  const double df = static_cast<double>(n - 2);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.r(i, i) = 1;
    out.p(i, i) = 0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = std::clamp(out.r(i, j), -1.0, 1.0);
      out.r(i, j) = out.r(j, i) = r;
      const double denom = 1 - r * r;
      const double t = denom <= 0 ? kInf : r * std::sqrt(df / denom);
      out.p(i, j) = out.p(j, i) = t_sf(t, df);
    }
  }
  return out;
}

std::string format_correlations(const CorrelationMatrix &matrix) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < matrix.r.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < matrix.r.cols(); ++j) {
      rows.push_back({matrix.names[i], matrix.names[j], format_double(matrix.r(i, j)),
                      format_double(matrix.p(i, j)), significance_stars(matrix.p(i, j))});
    }
  }
  return write_table({"var_a", "var_b", "r", "p", "stars"}, rows, '\t');
}

std::vector<double> variance_inflation(const Eigen::MatrixXd &predictors) {
  const Eigen::Index k = predictors.cols();
  std::vector<double> vifs(static_cast<std::size_t>(k), 1.0);
  if (k < 2) return vifs;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::MatrixXd others(predictors.rows(), k - 1);
    for (Eigen::Index c = 0, o = 0; c < k; ++c) {
      if (c != j) others.col(o++) = predictors.col(c);
    }
    const double r2 = r_squared_with_intercept(others, predictors.col(j));
    vifs[static_cast<std::size_t>(j)] = r2 >= 1 - kCollinear ? kInf : 1 / (1 - r2);
  }
  return vifs;
}

VifSelection vif_stepwise(const DesignMatrix &design, double threshold) {
  if (!(threshold > 1)) throw ConfigError("VIF threshold must exceed 1");
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < design.cols(); ++j) active.push_back(j);

  VifSelection selection;
  while (!active.empty()) {
    Eigen::MatrixXd current(design.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c) {
      current.col(static_cast<Eigen::Index>(c)) = design.values.col(active[c]);
    }
    const std::vector<double> vifs = variance_inflation(current);
    VifStep step;
    std::size_t worst = 0;
    for (std::size_t c = 0; c < active.size(); ++c) {
      step.vifs.emplace_back(design.names[static_cast<std::size_t>(active[c])], vifs[c]);
      if (vifs[c] >= vifs[worst]) worst = c;
    }
    if (vifs[worst] > threshold) {
      step.dropped = design.names[static_cast<std::size_t>(active[worst])];
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
      selection.log.push_back(std::move(step));
      continue;
    }
    selection.log.push_back(std::move(step));
    break;
  }
  for (Eigen::Index j : active) {
    selection.retained.push_back(design.names[static_cast<std::size_t>(j)]);
  }
  return selection;
}

std::string format_vif_log(const VifSelection &selection) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < selection.log.size(); ++s) {
    const VifStep &step = selection.log[s];
    for (const auto &[name, vif] : step.vifs) {
      rows.push_back({std::to_string(s + 1), name,
                      std::isinf(vif) ? "Inf" : format_double(vif),
                      step.dropped && *step.dropped == name ? "1" : "0"});
    }
  }
  return write_table({"step", "term", "vif", "dropped"}, rows, '\t');
}

FitResult ols_fit(const DesignMatrix &design, const Eigen::VectorXd &y) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) throw DataError("response length differs from design rows");
  if (n <= p) throw InsufficientRows(static_cast<std::size_t>(n), static_cast<std::size_t>(p));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.values);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < p) throw RankDeficient();

  const Eigen::VectorXd beta = qr.solve(y);
  FitResult fit;
  fit.residuals = y - design.values * beta;
  fit.df_residual = static_cast<std::size_t>(n - p);
  const double rss = fit.residuals.squaredNorm();
  fit.sigma2 = rss / static_cast<double>(fit.df_residual);
  const double tss = (y.array() - y.mean()).square().sum();
  fit.r_squared = tss > 0 ? std::clamp(1 - rss / tss, 0.0, 1.0) : 0.0;

  // (X'X)^-1 = P R^-1 R^-T P' for X P = Q R.
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
  const Eigen::MatrixXd xtx_inv =
      qr.colsPermutation() * permuted * qr.colsPermutation().transpose();

  const double df = static_cast<double>(fit.df_residual);
  for (Eigen::Index j = 0; j < p; ++j) {
    Coefficient c;
    c.term = design.names[static_cast<std::size_t>(j)];
    c.beta = beta(j);
    c.se = std::sqrt(fit.sigma2 * xtx_inv(j, j));
    if (c.se > 0) {
      c.t = c.beta / c.se;
    } else {
      c.t = c.beta == 0 ? 0 : std::copysign(kInf, c.beta);
    }
    c.p = t_sf(c.t, df);
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

LevelDesign build_level_design(const LevelData &higher, const LevelData &lower,
                               const DesignMatrix &predictors,
                               const LevelDesignOptions &options) {
  if (higher.items != lower.items) {
    throw MismatchedItems("levels " + higher.name + " and " + lower.name +
                          " cover different items");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(higher.items.size());
  if (higher.response.size() != n || lower.response.size() != n || predictors.rows() != n) {
    throw MismatchedItems("level data and predictors differ in length");
  }
  const bool with_covariate = higher.covariate && lower.covariate;
  const Eigen::Index k = predictors.cols();

  Eigen::MatrixXd z(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    z.col(j) = options.zscore_predictors
                   ? z_transform(predictors.values.col(j), predictors.names[static_cast<std::size_t>(j)])
                   : Eigen::VectorXd(predictors.values.col(j));
  }

  Eigen::VectorXd covariate;
  if (with_covariate) {
    covariate.resize(2 * n);
    covariate << *higher.covariate, *lower.covariate;
    if (options.zscore_covariate) covariate = z_transform(covariate, "length");
  }

  const Eigen::Index cols = 2 + (with_covariate ? 2 : 0) + 2 * k;
  LevelDesign out;
  out.design.values.resize(2 * n, cols);
  out.response.resize(2 * n);
  out.response << higher.response, lower.response;

  Eigen::VectorXd level(2 * n);
  level.head(n).setConstant(0.5);
  level.tail(n).setConstant(-0.5);

  auto &names = out.design.names;
  Eigen::Index c = 0;
  out.design.values.col(c++).setOnes();
  names.emplace_back(kInterceptName);
  out.design.values.col(c++) = level;
  names.emplace_back("Level");
  if (with_covariate) {
    out.design.values.col(c++) = covariate;
    names.emplace_back(options.covariate_name);
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    out.design.values.col(c).head(n) = z.col(j);
    out.design.values.col(c).tail(n) = z.col(j);
    names.push_back(predictors.names[static_cast<std::size_t>(j)]);
    ++c;
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    out.design.values.col(c).head(n) = 0.5 * z.col(j);
    out.design.values.col(c).tail(n) = -0.5 * z.col(j);
    names.push_back("Level×" + predictors.names[static_cast<std::size_t>(j)]);
    ++c;
  }
  if (with_covariate) {
    out.design.values.col(c++) = level.cwiseProduct(covariate);
    names.push_back("Level×" + options.covariate_name);
  }
  return out;
}

namespace {

DesignMatrix predictor_matrix(const ItemTable &items, const std::vector<const ItemRow *> &rows,
                              const std::vector<std::string> &predictors) {
  DesignMatrix m;
  m.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(predictors.size()));
  for (std::size_t j = 0; j < predictors.size(); ++j) {
    m.names.push_back(display_name(predictors[j]));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          *items.value(*rows[i], predictors[j]);
    }
  }
  return m;
}

Eigen::VectorXd item_column(const ItemTable &items, const std::vector<const ItemRow *> &rows,
                            const std::string &name) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = *items.value(*rows[i], name);
  }
  return v;
}

std::vector<const ItemRow *> complete_rows(const ItemTable &items,
                                           const std::vector<std::string> &columns) {
  for (const auto &name : columns) {
    if (!ItemTable::has_column(name)) throw ConfigError("unknown item column '" + name + "'");
  }
  std::vector<const ItemRow *> rows;
  for (const ItemRow &row : items.rows) {
    bool complete = true;
    for (const auto &name : columns) complete = complete && items.value(row, name).has_value();
    if (complete) rows.push_back(&row);
  }
  return rows;
}

}  // namespace

ModelResult fit_item_model(const ItemTable &items, const ModelSpec &spec,
                           const std::vector<std::string> &predictors,
                           const ModelOptions &options) {
  std::vector<std::string> needed = {spec.response};
  needed.insert(needed.end(), spec.covariates.begin(), spec.covariates.end());
  needed.insert(needed.end(), predictors.begin(), predictors.end());
  const auto rows = complete_rows(items, needed);

  const std::size_t cols = 1 + predictors.size() + spec.covariates.size();
  if (rows.size() <= cols) throw InsufficientRows(rows.size(), cols);

  DesignMatrix design = predictor_matrix(items, rows, predictors);
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    design.values.col(j) = z_transform(design.values.col(j), design.names[static_cast<std::size_t>(j)]);
  }
  for (const auto &name : spec.covariates) {
    Eigen::VectorXd v = item_column(items, rows, name);
    if (options.zscore_covariates) v = z_transform(v, name);
    design.values.conservativeResize(Eigen::NoChange, design.cols() + 1);
    design.values.col(design.cols() - 1) = v;
    design.names.push_back(display_name(name));
  }
  ModelResult result;
  result.name = spec.name;
  result.n = rows.size();
  result.fit = ols_fit(with_intercept(design), item_column(items, rows, spec.response));
  return result;
}

ModelResult fit_level_model(const ItemTable &items, const LevelModelSpec &spec,
                            const std::vector<std::string> &predictors,
                            const ModelOptions &options) {
  std::vector<std::string> needed = {spec.higher, spec.lower};
  if (spec.covariate) {
    needed.push_back(spec.covariate->first);
    needed.push_back(spec.covariate->second);
  }
  needed.insert(needed.end(), predictors.begin(), predictors.end());
  const auto rows = complete_rows(items, needed);

  const std::size_t cols = 2 + 2 * predictors.size() + (spec.covariate ? 2 : 0);
  if (2 * rows.size() <= cols) throw InsufficientRows(2 * rows.size(), cols);

  LevelData higher{spec.higher, {}, item_column(items, rows, spec.higher), std::nullopt};
  LevelData lower{spec.lower, {}, item_column(items, rows, spec.lower), std::nullopt};
  for (const ItemRow *row : rows) {
    higher.items.push_back(row->character);
    lower.items.push_back(row->character);
  }
  LevelDesignOptions design_options;
  design_options.zscore_covariate = options.zscore_covariates;
  if (spec.covariate) {
    higher.covariate = item_column(items, rows, spec.covariate->first);
    lower.covariate = item_column(items, rows, spec.covariate->second);
    design_options.covariate_name = covariate_role(spec.covariate->first);
  }
  const LevelDesign stacked =
      build_level_design(higher, lower, predictor_matrix(items, rows, predictors), design_options);
  ModelResult result;
  result.name = spec.name;
  result.n = static_cast<std::size_t>(stacked.response.size());
  result.fit = ols_fit(stacked.design, stacked.response);
  return result;
}

std::string format_model_table(const ModelResult &result) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &c : result.fit.coefficients) {
    rows.push_back({c.term, format_double(c.beta), format_double(c.se), format_double(c.t),
                    format_double(c.p)});
  }
  rows.push_back({"R2", format_double(result.fit.r_squared), "NA", "NA", "NA"});
  return write_table({"term", "beta", "se", "t", "p"}, rows, '\t');
}

ModelSpec parse_model_spec(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3 || parts[0].empty() || parts[1].empty()) {
    throw ConfigError(fmt::format("bad model spec '{}'", text));
  }
  ModelSpec spec{parts[0], parts[1], {}};
  if (parts.size() == 3 && !parts[2].empty()) spec.covariates = split(parts[2], ',');
  for (const auto &name : spec.covariates) {
    if (!ItemTable::has_column(name)) throw ConfigError("unknown item column '" + name + "'");
  }
  if (!ItemTable::has_column(spec.response)) {
    throw ConfigError("unknown item column '" + spec.response + "'");
  }
  return spec;
}

LevelModelSpec parse_level_model_spec(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3 || parts[0].empty()) {
    throw ConfigError(fmt::format("bad level model spec '{}'", text));
  }
  const auto levels = split(parts[1], ',');
  if (levels.size() != 2) throw ConfigError(fmt::format("bad level model spec '{}'", text));
  LevelModelSpec spec{parts[0], levels[0], levels[1], std::nullopt};
  if (parts.size() == 3 && !parts[2].empty()) {
    const auto covariates = split(parts[2], ',');
    if (covariates.size() != 2) throw ConfigError(fmt::format("bad level model spec '{}'", text));
    spec.covariate = std::make_pair(covariates[0], covariates[1]);
  }
  for (const auto &name : {spec.higher, spec.lower}) {
    if (!ItemTable::has_column(name)) throw ConfigError("unknown item column '" + name + "'");
  }
  return spec;
}

std::vector<ModelSpec> default_models() {
  return {
      {"amnesia", "amnesia_rate", {}},
      {"char_latency", "char_rt", {}},
      {"char_duration", "char_dur", {"char_len"}},
      {"char_pressure", "char_press_avg", {"char_len"}},
      {"rad_latency", "rad_rt_rel", {"rad_dist"}},
      {"rad_duration", "rad_dur", {"rad_len", "rad_dist"}},
      {"rad_pressure", "rad_press_avg", {"rad_len", "rad_dist"}},
      {"stroke_latency", "stroke_rt_rel", {"stroke_dist"}},
      {"stroke_duration", "stroke_dur", {"stroke_len", "stroke_dist"}},
      {"stroke_pressure", "stroke_press_avg", {"stroke_len", "stroke_dist"}},
  };
}

std::vector<LevelModelSpec> default_level_models() {
  using P = std::pair<std::string, std::string>;
  return {
      {"latency_char_vs_rad", "char_rt", "rad_rt_rel", std::nullopt},
      {"latency_char_vs_stroke", "char_rt", "stroke_rt_rel", std::nullopt},
      {"latency_rad_vs_stroke", "rad_rt_rel", "stroke_rt_rel", std::nullopt},
      {"duration_char_vs_rad", "char_dur", "rad_dur", P{"char_len", "rad_len"}},
      {"duration_char_vs_stroke", "char_dur", "stroke_dur", P{"char_len", "stroke_len"}},
      {"duration_rad_vs_stroke", "rad_dur", "stroke_dur", P{"rad_len", "stroke_len"}},
      {"pressure_char_vs_rad", "char_press_avg", "rad_press_avg", P{"char_len", "rad_len"}},
      {"pressure_char_vs_stroke", "char_press_avg", "stroke_press_avg", P{"char_len", "stroke_len"}},
      {"pressure_rad_vs_stroke", "rad_press_avg", "stroke_press_avg", P{"rad_len", "stroke_len"}},
  };
}

}  // namespace penstream
