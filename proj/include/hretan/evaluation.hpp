#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hretan/dataset.hpp"
#include "hretan/hierarchy.hpp"
#include "hretan/tan.hpp"

namespace hretan {

// Positive class is index 1.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;

  std::size_t total() const { return tp + fn + tn + fp; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

/// Percent-scale metrics. Sensitivity (specificity) is empty when the fold
/// has no positive (negative) instances; gmean is empty if either is.
struct Metrics {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> gmean;
};

/// Throws LengthMismatchError, or ArgumentError for a non-binary label.
ConfusionCounts confusion(const std::vector<std::size_t>& predicted,
                          const std::vector<std::size_t>& actual);
Metrics metrics(const ConfusionCounts& counts);
double gmean(double sensitivity, double specificity);

/// D = 1 - minority / majority over binary labels. Throws ArgumentError if a
/// class is absent or a label is not 0/1.
double degree_of_imbalance(const std::vector<std::size_t>& labels);

/// Sample Pearson correlation. Throws LengthMismatchError, DegenerateError.
double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys);

struct LinearFit {
  double slope;
  double intercept;
};
/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct WilcoxonResult {
  double w_plus;     // rank sum of positive differences (a > b)
  double w_minus;
  double statistic;  // min(w_plus, w_minus)
  double p_value;    // two-tailed
  std::size_t n_used;
  bool exact;
  std::size_t wins;
  std::size_t ties;
  std::size_t losses;
};

/// Two-tailed Wilcoxon signed-rank test of as against bs.
///
/// Zero differences are discarded; tied absolute differences (equal within
/// 1e-9 relative) share their average rank. Up to 25 remaining pairs the
/// p-value comes from the exact permutation distribution of the (possibly
/// tied) ranks; above that a normal approximation with tie-corrected
/// variance and continuity correction is used. Throws TooFewPairsError with
/// fewer than 5 non-zero differences, LengthMismatchError.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& as, const std::vector<double>& bs);

enum class Method { Tan, HreTan };
const char* method_name(Method m);
Method parse_method(const std::string& name);  // throws ArgumentError

struct CvConfig {
  Method method = Method::HreTan;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  double smoothing = 1.0;
  RootPolicy root = RootPolicy::Random;
};

struct FoldResult {
  std::size_t fold;
  ConfusionCounts counts;
  Metrics metrics;
};

struct EvalReport {
  std::string dataset;
  CvConfig config;
  std::size_t n_instances = 0;
  std::size_t n_features = 0;
  std::string positive_class;
  std::string negative_class;
  double degree_of_imbalance = 0.0;
  std::vector<FoldResult> folds;
  ConfusionCounts pooled;
  Metrics aggregate;  // from pooled counts
  std::optional<double> sensitivity_se;
  std::optional<double> specificity_se;
};

/// Stratified k-fold cross-validation. Fold f uses root seed
/// derive_seed(seed, f) for both methods, so an empty hierarchy gives
/// identical TAN and HRE-TAN predictions.
EvalReport cross_validate(const Dataset& data, const FeatureDag& dag, const CvConfig& config,
                          const std::string& dataset_name = "");

std::string report_to_json(const EvalReport& report);
// One line per fold plus a "pooled" line.
std::string report_to_csv(const EvalReport& report);

struct ComparisonRow {
  std::string dataset;
  double degree_of_imbalance;
  double gmean_a;
  double gmean_b;
};

struct ComparisonReport {
  std::string method_a;
  std::string method_b;
  std::vector<ComparisonRow> rows;
  std::vector<std::string> failed;  // "name: reason"
  std::size_t wins = 0;  // gmean_a > gmean_b
  std::size_t ties = 0;
  std::size_t losses = 0;
  std::optional<WilcoxonResult> wilcoxon;
  std::string wilcoxon_error;
  std::optional<double> pearson_a;
  std::optional<double> pearson_b;
  std::optional<LinearFit> fit_a;
  std::optional<LinearFit> fit_b;
};

/// Statistics over per-dataset GMean pairs. Statistics that cannot be
/// computed (too few rows, zero variance) are left empty.
ComparisonReport compare_gmeans(const std::string& method_a, const std::string& method_b,
                                std::vector<ComparisonRow> rows);

std::string comparison_to_json(const ComparisonReport& report);
// dataset,D,gmean_<b>,gmean_<a>
std::string comparison_to_csv(const ComparisonReport& report);
// method<TAB>x<TAB>y<TAB>fitted_y, one block per method.
std::string comparison_to_plot_tsv(const ComparisonReport& report);

}  // namespace hretan
