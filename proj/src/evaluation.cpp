#include "hretan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hretan/errors.hpp"
#include "hretan/hretan.hpp"
#include "hretan/rng.hpp"
#include "json.hpp"

namespace hretan {

using ojson = nlohmann::ordered_json;

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fn += o.fn;
  tn += o.tn;
  fp += o.fp;
  return *this;
}

ConfusionCounts confusion(const std::vector<std::size_t>& predicted,
                          const std::vector<std::size_t>& actual) {
  if (predicted.size() != actual.size())
    throw LengthMismatchError("prediction and label sequences differ in length");
  ConfusionCounts out;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (predicted[i] > 1 || actual[i] > 1) throw ArgumentError("confusion counts need binary labels");
    if (actual[i] == 1)
      ++(predicted[i] == 1 ? out.tp : out.fn);
    else
      ++(predicted[i] == 0 ? out.tn : out.fp);
  }
  return out;
}

double gmean(double sensitivity, double specificity) {
  return std::sqrt(sensitivity * specificity);
}

Metrics metrics(const ConfusionCounts& counts) {
  Metrics m;
  if (counts.tp + counts.fn > 0)
    m.sensitivity = 100.0 * static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  if (counts.tn + counts.fp > 0)
    m.specificity = 100.0 * static_cast<double>(counts.tn) / static_cast<double>(counts.tn + counts.fp);
  if (m.sensitivity && m.specificity) m.gmean = gmean(*m.sensitivity, *m.specificity);
  return m;
}

double degree_of_imbalance(const std::vector<std::size_t>& labels) {
  std::size_t count[2] = {0, 0};
  for (auto l : labels) {
    if (l > 1) throw ArgumentError("degree of imbalance needs binary labels");
    ++count[l];
  }
  if (count[0] == 0 || count[1] == 0) throw ArgumentError("both classes must be present");
  const auto [minor, major] = std::minmax(count[0], count[1]);
  return 1.0 - static_cast<double>(minor) / static_cast<double>(major);
}

namespace {

struct Moments {
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
};

Moments centered_moments(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw LengthMismatchError("xs and ys differ in length");
  if (xs.size() < 2) throw DegenerateError("need at least two points");
  const double n = static_cast<double>(xs.size());
  Moments m;
  m.mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  m.mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - m.mean_x;
    const double dy = ys[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace

double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto m = centered_moments(xs, ys);
  if (m.sxx == 0.0 || m.syy == 0.0) throw DegenerateError("zero variance");
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto m = centered_moments(xs, ys);
  if (m.sxx == 0.0) throw DegenerateError("constant xs");
  const double slope = m.sxy / m.sxx;
  return {slope, m.mean_y - slope * m.mean_x};
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& as, const std::vector<double>& bs) {
  if (as.size() != bs.size()) throw LengthMismatchError("paired samples differ in length");
  WilcoxonResult res{};
  struct Diff {
    double abs;
    bool positive;
  };
  std::vector<Diff> diffs;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const double d = as[i] - bs[i];
    if (d > 0) ++res.wins;
    else if (d < 0) ++res.losses;
    else ++res.ties;
    if (d != 0) diffs.push_back({std::abs(d), d > 0});
  }
  const std::size_t n = diffs.size();
  if (n < 5) throw TooFewPairsError("need at least 5 non-zero differences, got " + std::to_string(n));
  std::sort(diffs.begin(), diffs.end(), [](const Diff& a, const Diff& b) { return a.abs < b.abs; });

  // Doubled average ranks keep tied ranks integral.
  std::vector<std::size_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && diffs[j].abs - diffs[i].abs <= 1e-9 * std::max(1.0, diffs[i].abs)) ++j;
    const std::size_t t = j - i;
    for (std::size_t k = i; k < j; ++k) rank2[k] = i + 1 + j;  // 2 * mean of ranks i+1..j
    tie_term += static_cast<double>(t * t * t - t);
    i = j;
  }
  std::size_t w_plus2 = 0;
  std::size_t total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (diffs[i].positive) w_plus2 += rank2[i];
  }
  res.n_used = n;
  res.w_plus = w_plus2 / 2.0;
  res.w_minus = (total2 - w_plus2) / 2.0;
  res.statistic = std::min(res.w_plus, res.w_minus);

  if (n <= 25) {
    res.exact = true;
    // Number of sign assignments reaching each doubled rank sum.
    std::vector<double> ways(total2 + 1, 0.0);
    ways[0] = 1.0;
    for (auto r : rank2)
      for (std::size_t s = total2; s >= r; --s) ways[s] += ways[s - r];
    const std::size_t low = std::min(w_plus2, total2 - w_plus2);
    const double tail = std::accumulate(ways.begin(), ways.begin() + low + 1, 0.0);
    res.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
  } else {
    res.exact = false;
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4.0;
    const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(res.w_plus - mean) - 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  return res;
}

const char* method_name(Method m) { return m == Method::Tan ? "tan" : "hre-tan"; }

Method parse_method(const std::string& name) {
  if (name == "tan") return Method::Tan;
  if (name == "hre-tan") return Method::HreTan;
  throw ArgumentError("unknown classifier '" + name + "' (expected tan or hre-tan)");
}

namespace {

std::optional<double> standard_error(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1)) / std::sqrt(n);
}

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(); }

}  // namespace

EvalReport cross_validate(const Dataset& data, const FeatureDag& dag, const CvConfig& config,
                          const std::string& dataset_name) {
  if (data.n_classes() != 2) throw ArgumentError("cross-validation needs exactly two classes");
  if (data.n_features() != dag.n_features())
    throw DimensionError("dataset and hierarchy feature counts differ");
  if (config.smoothing < 0.0) throw ArgumentError("smoothing must be non-negative");

  EvalReport report;
  report.dataset = dataset_name;
  report.config = config;
  report.n_instances = data.n_instances();
  report.n_features = data.n_features();
  report.negative_class = data.class_names()[0];
  report.positive_class = data.class_names()[1];
  report.degree_of_imbalance = degree_of_imbalance(data.labels());

  const auto split = stratified_kfold(data, config.folds, config.seed);
  std::vector<double> sens;
  std::vector<double> spec;
  for (std::size_t f = 0; f < config.folds; ++f) {
    const auto train_rows = split.train_rows(f);
    const auto test_rows = split.test_rows(f);
    const auto train = data.subset(train_rows);
    const auto test = data.subset(test_rows);
    const RootChoice root{config.root, derive_seed(config.seed, f)};
    const auto results = config.method == Method::Tan
                             ? evaluate_tan(train, test, root, config.smoothing)
                             : evaluate_hre_tan(train, test, dag, root, config.smoothing);
    std::vector<std::size_t> predicted;
    predicted.reserve(results.size());
    for (const auto& r : results) predicted.push_back(r.label);

    FoldResult fold{f, confusion(predicted, test.labels()), {}};
    fold.metrics = metrics(fold.counts);
    if (fold.metrics.sensitivity) sens.push_back(*fold.metrics.sensitivity);
    if (fold.metrics.specificity) spec.push_back(*fold.metrics.specificity);
    report.pooled += fold.counts;
    report.folds.push_back(fold);
  }
  report.aggregate = metrics(report.pooled);
  report.sensitivity_se = standard_error(sens);
  report.specificity_se = standard_error(spec);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  ojson j;
  j["dataset"] = report.dataset;
  j["classifier"] = method_name(report.config.method);
  j["folds"] = report.config.folds;
  j["seed"] = report.config.seed;
  j["smoothing"] = report.config.smoothing;
  j["root"] = report.config.root == RootPolicy::First ? "first" : "random";
  j["n_instances"] = report.n_instances;
  j["n_features"] = report.n_features;
  j["positive_class"] = report.positive_class;
  j["negative_class"] = report.negative_class;
  j["degree_of_imbalance"] = report.degree_of_imbalance;
  j["per_fold"] = ojson::array();
  for (const auto& f : report.folds) {
    ojson fj;
    fj["fold"] = f.fold;
    fj["tp"] = f.counts.tp;
    fj["fn"] = f.counts.fn;
    fj["tn"] = f.counts.tn;
    fj["fp"] = f.counts.fp;
    fj["sensitivity"] = optional_number(f.metrics.sensitivity);
    fj["specificity"] = optional_number(f.metrics.specificity);
    fj["gmean"] = optional_number(f.metrics.gmean);
    j["per_fold"].push_back(std::move(fj));
  }
  j["pooled"] = {{"tp", report.pooled.tp}, {"fn", report.pooled.fn},
                 {"tn", report.pooled.tn}, {"fp", report.pooled.fp}};
  j["sensitivity"] = optional_number(report.aggregate.sensitivity);
  j["sensitivity_se"] = optional_number(report.sensitivity_se);
  j["specificity"] = optional_number(report.aggregate.specificity);
  j["specificity_se"] = optional_number(report.specificity_se);
  j["gmean"] = optional_number(report.aggregate.gmean);
  return j.dump(2) + "\n";
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_num(*v) : ""; }

}  // namespace

std::string report_to_csv(const EvalReport& report) {
  std::string out = "fold,tp,fn,tn,fp,sensitivity,specificity,gmean\n";
  auto line = [&](const std::string& fold, const ConfusionCounts& c, const Metrics& m) {
    out += fold + ',' + std::to_string(c.tp) + ',' + std::to_string(c.fn) + ',' +
           std::to_string(c.tn) + ',' + std::to_string(c.fp) + ',' + fmt_opt(m.sensitivity) + ',' +
           fmt_opt(m.specificity) + ',' + fmt_opt(m.gmean) + '\n';
  };
  for (const auto& f : report.folds) line(std::to_string(f.fold), f.counts, f.metrics);
  line("pooled", report.pooled, report.aggregate);
  return out;
}

ComparisonReport compare_gmeans(const std::string& method_a, const std::string& method_b,
                                std::vector<ComparisonRow> rows) {
  ComparisonReport rep;
  rep.method_a = method_a;
  rep.method_b = method_b;
  rep.rows = std::move(rows);
  std::vector<double> d, a, b;
  for (const auto& r : rep.rows) {
    d.push_back(r.degree_of_imbalance);
    a.push_back(r.gmean_a);
    b.push_back(r.gmean_b);
    if (r.gmean_a > r.gmean_b) ++rep.wins;
    else if (r.gmean_a < r.gmean_b) ++rep.losses;
    else ++rep.ties;
  }
  try {
    rep.wilcoxon = wilcoxon_signed_rank(a, b);
  } catch (const Error& e) {
    rep.wilcoxon_error = e.what();
  }
  auto attempt = [](auto&& fn) -> decltype(std::optional(fn())) {
    try {
      return fn();
    } catch (const DegenerateError&) {
      return std::nullopt;
    }
  };
  rep.pearson_a = attempt([&] { return pearson_r(d, a); });
  rep.pearson_b = attempt([&] { return pearson_r(d, b); });
  rep.fit_a = attempt([&] { return linear_fit(d, a); });
  rep.fit_b = attempt([&] { return linear_fit(d, b); });
  return rep;
}

std::string comparison_to_json(const ComparisonReport& rep) {
  ojson j;
  j["method_a"] = rep.method_a;
  j["method_b"] = rep.method_b;
  j["datasets"] = ojson::array();
  for (const auto& r : rep.rows)
    j["datasets"].push_back({{"dataset", r.dataset},
                             {"degree_of_imbalance", r.degree_of_imbalance},
                             {"gmean_a", r.gmean_a},
                             {"gmean_b", r.gmean_b}});
  j["failed"] = rep.failed;
  j["wins"] = rep.wins;
  j["ties"] = rep.ties;
  j["losses"] = rep.losses;
  if (rep.wilcoxon) {
    const auto& w = *rep.wilcoxon;
    j["wilcoxon"] = {{"w_plus", w.w_plus},   {"w_minus", w.w_minus}, {"statistic", w.statistic},
                     {"p_value", w.p_value}, {"n_used", w.n_used},   {"exact", w.exact}};
  } else {
    j["wilcoxon"] = {{"error", rep.wilcoxon_error}};
  }
  j["pearson_r"] = {{"a", optional_number(rep.pearson_a)}, {"b", optional_number(rep.pearson_b)}};
  auto fit = [](const std::optional<LinearFit>& f) {
    return f ? ojson{{"slope", f->slope}, {"intercept", f->intercept}} : ojson();
  };
  j["regression"] = {{"a", fit(rep.fit_a)}, {"b", fit(rep.fit_b)}};
  return j.dump(2) + "\n";
}

namespace {

std::string column_suffix(std::string method) {
  method.erase(std::remove(method.begin(), method.end(), '-'), method.end());
  return method;
}

}  // namespace

std::string comparison_to_csv(const ComparisonReport& rep) {
  std::string out = "dataset,D,gmean_" + column_suffix(rep.method_b) + ",gmean_" +
                    column_suffix(rep.method_a) + "\n";
  for (const auto& r : rep.rows)
    out += r.dataset + ',' + fmt_num(r.degree_of_imbalance) + ',' + fmt_num(r.gmean_b) + ',' +
           fmt_num(r.gmean_a) + '\n';
  return out;
}

std::string comparison_to_plot_tsv(const ComparisonReport& rep) {
  std::string out = "method\tx\ty\tfitted_y\n";
  auto block = [&](const std::string& method, const std::optional<LinearFit>& fit, bool use_a) {
    for (const auto& r : rep.rows) {
      const double y = use_a ? r.gmean_a : r.gmean_b;
      out += method + '\t' + fmt_num(r.degree_of_imbalance) + '\t' + fmt_num(y) + '\t' +
             (fit ? fmt_num(fit->slope * r.degree_of_imbalance + fit->intercept) : "") + '\n';
    }
  };
  block(rep.method_b, rep.fit_b, false);
  block(rep.method_a, rep.fit_a, true);
  return out;
}

}  // namespace hretan
