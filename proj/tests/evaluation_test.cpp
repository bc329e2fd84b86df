#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hretan/errors.hpp"
#include "hretan/evaluation.hpp"
#include "hretan/synth.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace hretan;
using namespace hretan::testing;

namespace {

// Two-tailed p by enumerating every sign assignment of the averaged ranks.
double sign_flip_p(const std::vector<double>& as, const std::vector<double>& bs) {
  std::vector<double> d;
  for (std::size_t k = 0; k < as.size(); ++k)
    if (as[k] != bs[k]) d.push_back(as[k] - bs[k]);
  const std::size_t n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(d[j]) < std::fabs(d[i])) ++below;
      if (std::fabs(d[j]) == std::fabs(d[i])) ++equal;
    }
    rank[i] = below + (equal + 1) / 2.0;
  }
  double w_obs = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0) w_obs += rank[i];
  }
  const double centre = total / 2;
  std::size_t extreme = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += rank[i];
    if (std::fabs(w - centre) >= std::fabs(w_obs - centre) - 1e-9) ++extreme;
  }
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(std::size_t{1} << n));
}

std::vector<double> column(const std::vector<ReferenceRow>& rows, double ReferenceRow::*field) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

}  // namespace

TEST(Metrics, ReferenceRowExample) {
  const double g = gmean(41.1, 76.8);
  EXPECT_NEAR(std::round(g * 10) / 10, 56.2, 1e-9);
  EXPECT_EQ(gmean(0.0, 88.0), 0.0);
}

TEST(Metrics, FromCounts) {
  const auto m = metrics({3, 1, 8, 2});
  EXPECT_DOUBLE_EQ(*m.sensitivity, 75.0);
  EXPECT_DOUBLE_EQ(*m.specificity, 80.0);
  EXPECT_NEAR(*m.gmean * *m.gmean, 75.0 * 80.0, 1e-9);

  const auto perfect = metrics(confusion({1, 0, 1, 0}, {1, 0, 1, 0}));
  EXPECT_EQ(*perfect.sensitivity, 100.0);
  EXPECT_EQ(*perfect.specificity, 100.0);
  EXPECT_EQ(*perfect.gmean, 100.0);

  const auto no_pos = metrics({0, 0, 4, 1});
  EXPECT_FALSE(no_pos.sensitivity);
  EXPECT_TRUE(no_pos.specificity);
  EXPECT_FALSE(no_pos.gmean);

  const auto zero_sens = metrics({0, 5, 4, 1});
  EXPECT_EQ(*zero_sens.gmean, 0.0);
}

TEST(Metrics, Confusion) {
  const auto c = confusion({1, 1, 0, 0, 1}, {1, 0, 0, 1, 1});
  EXPECT_EQ(c, (ConfusionCounts{2, 1, 1, 1}));
  EXPECT_THROW(confusion({1}, {1, 0}), LengthMismatchError);
  EXPECT_THROW(confusion({2}, {1}), ArgumentError);
}

TEST(Metrics, GmeanSquaredProperty) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const ConfusionCounts c{1 + rng() % 50, rng() % 50, 1 + rng() % 50, rng() % 50};
    const auto m = metrics(c);
    EXPECT_NEAR(*m.gmean * *m.gmean, *m.sensitivity * *m.specificity, 1e-9);
  }
}

TEST(Imbalance, Examples) {
  EXPECT_EQ(degree_of_imbalance({0, 1, 0, 1}), 0.0);
  std::vector<std::size_t> labels(150, 0);
  for (std::size_t i = 0; i < 50; ++i) labels[i] = 1;
  EXPECT_DOUBLE_EQ(degree_of_imbalance(labels), 0.5);
  EXPECT_THROW(degree_of_imbalance({1, 1, 1}), ArgumentError);
}

TEST(Pearson, ReferenceData) {
  const auto rows = reference_results();
  ASSERT_EQ(rows.size(), 28u);
  const auto d = column(rows, &ReferenceRow::d);
  EXPECT_NEAR(pearson_r(d, column(rows, &ReferenceRow::tan_gmean)), -0.801, 0.005);
  EXPECT_NEAR(pearson_r(d, column(rows, &ReferenceRow::hre_gmean)), -0.479, 0.005);
  const auto tan = linear_fit(d, column(rows, &ReferenceRow::tan_gmean));
  const auto hre = linear_fit(d, column(rows, &ReferenceRow::hre_gmean));
  EXPECT_LT(tan.slope, hre.slope);
  EXPECT_LT(hre.slope, 0.0);
}

TEST(Pearson, LinearAndDegenerate) {
  const std::vector<double> xs{0.1, 0.5, 0.7, 2.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2 * x + 1);
  EXPECT_NEAR(pearson_r(xs, ys), 1.0, 1e-12);
  const auto fit = linear_fit(xs, ys);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
  EXPECT_THROW(pearson_r({1, 1, 1}, {1, 2, 3}), DegenerateError);
  EXPECT_THROW(linear_fit({1, 1, 1}, {1, 2, 3}), DegenerateError);
  EXPECT_THROW(pearson_r({1, 2}, {1, 2, 3}), LengthMismatchError);
  EXPECT_THROW(pearson_r({1}, {1}), DegenerateError);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs, ys, scaled, flipped;
    for (int k = 0; k < 12; ++k) {
      xs.push_back(z(rng));
      ys.push_back(z(rng) + 0.5 * xs.back());
      scaled.push_back(3.5 * xs.back() - 7);
      flipped.push_back(-0.25 * xs.back() + 2);
    }
    const double r = pearson_r(xs, ys);
    EXPECT_NEAR(pearson_r(scaled, ys), r, 1e-12);
    EXPECT_NEAR(pearson_r(flipped, ys), -r, 1e-12);
  }
}

TEST(Wilcoxon, ReferenceGmeans) {
  const auto rows = reference_results();
  const auto w = wilcoxon_signed_rank(column(rows, &ReferenceRow::hre_gmean),
                                      column(rows, &ReferenceRow::tan_gmean));
  EXPECT_EQ(w.wins, 18u);
  EXPECT_EQ(w.ties, 2u);
  EXPECT_EQ(w.losses, 8u);
  EXPECT_EQ(w.n_used, 26u);
  EXPECT_FALSE(w.exact);
  EXPECT_LT(w.p_value, 0.05);
  EXPECT_NEAR(w.w_plus + w.w_minus, 26.0 * 27.0 / 2.0, 1e-9);
}

TEST(Wilcoxon, AllZeroDifferences) {
  const std::vector<double> xs{1, 2, 3, 4, 5, 6};
  EXPECT_THROW(wilcoxon_signed_rank(xs, xs), TooFewPairsError);
  EXPECT_THROW(wilcoxon_signed_rank({1, 2}, {1}), LengthMismatchError);
}

TEST(Wilcoxon, TenPairFixturesAgainstSignFlipOracle) {
  // One fixture with a zero difference and tied magnitudes, one without.
  const std::vector<double> a1{125, 115, 130, 140, 140, 115, 140, 125, 140, 135};
  const std::vector<double> b1{110, 122, 125, 120, 140, 124, 123, 137, 135, 145};
  const std::vector<double> a2{8.2, 7.1, 6.5, 9.9, 5.0, 7.7, 8.8, 6.1, 7.4, 9.0};
  const std::vector<double> b2{7.0, 7.9, 5.1, 8.0, 5.6, 6.1, 6.4, 6.9, 5.5, 7.3};
  for (const auto& [a, b] : {std::pair{a1, b1}, std::pair{a2, b2}}) {
    const auto w = wilcoxon_signed_rank(a, b);
    EXPECT_TRUE(w.exact);
    EXPECT_NEAR(w.p_value, sign_flip_p(a, b), 1e-12);
  }
  const auto w1 = wilcoxon_signed_rank(a1, b1);
  EXPECT_EQ(w1.n_used, 9u);
  EXPECT_DOUBLE_EQ(w1.w_plus, 27.0);
  EXPECT_DOUBLE_EQ(w1.w_minus, 18.0);
  EXPECT_DOUBLE_EQ(w1.statistic, 18.0);
}

TEST(Wilcoxon, RandomSmallSamplesAgainstOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 10;
    std::vector<double> a, b;
    for (std::size_t k = 0; k < n; ++k) {
      a.push_back(static_cast<double>(rng() % 12));
      b.push_back(static_cast<double>(rng() % 12));
    }
    std::size_t nonzero = 0;
    for (std::size_t k = 0; k < n; ++k) nonzero += a[k] != b[k];
    if (nonzero < 5) continue;
    EXPECT_NEAR(wilcoxon_signed_rank(a, b).p_value, sign_flip_p(a, b), 1e-12);
  }
}

TEST(Wilcoxon, SymmetryAndRange) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 40;
    std::vector<double> a, b;
    for (std::size_t k = 0; k < n; ++k) {
      a.push_back(std::round(z(rng) * 4) / 4);
      b.push_back(std::round(z(rng) * 4) / 4 + 0.1);
    }
    WilcoxonResult ab, ba;
    try {
      ab = wilcoxon_signed_rank(a, b);
    } catch (const TooFewPairsError&) {
      continue;
    }
    ba = wilcoxon_signed_rank(b, a);
    EXPECT_GT(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    EXPECT_EQ(ab.wins, ba.losses);
    EXPECT_EQ(ab.ties, ba.ties);
    EXPECT_DOUBLE_EQ(ab.w_plus, ba.w_minus);
  }
}

TEST(Wilcoxon, LargeSampleNormalApproximation) {
  // n = 30, all differences positive and distinct: W- = 0.
  std::vector<double> a, b;
  for (int k = 1; k <= 30; ++k) {
    a.push_back(k);
    b.push_back(0);
  }
  const auto w = wilcoxon_signed_rank(a, b);
  EXPECT_FALSE(w.exact);
  const double mu = 30 * 31 / 4.0;
  const double sigma = std::sqrt(30 * 31 * 61 / 24.0);
  EXPECT_NEAR(w.p_value, std::erfc(((465 - mu) - 0.5) / sigma / std::sqrt(2.0)), 1e-15);
}

TEST(CompareGmeans, ReferenceRows) {
  std::vector<ComparisonRow> rows;
  for (const auto& r : reference_results()) rows.push_back({r.dataset, r.d, r.hre_gmean, r.tan_gmean});
  const auto rep = compare_gmeans("hre-tan", "tan", rows);
  EXPECT_EQ(rep.wins + rep.ties + rep.losses, 28u);
  EXPECT_EQ(rep.wins, 18u);
  ASSERT_TRUE(rep.wilcoxon);
  EXPECT_LT(rep.wilcoxon->p_value, 0.05);
  EXPECT_NEAR(*rep.pearson_a, -0.479, 0.005);
  EXPECT_NEAR(*rep.pearson_b, -0.801, 0.005);

  const auto j = nlohmann::json::parse(comparison_to_json(rep));
  EXPECT_EQ(j["datasets"].size(), 28u);
  const auto csv = comparison_to_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,D,gmean_tan,gmean_hretan");
  const auto tsv = comparison_to_plot_tsv(rep);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 1 + 2 * 28);
}

TEST(CompareGmeans, TooFewRowsLeavesStatisticsEmpty) {
  const auto rep = compare_gmeans("hre-tan", "tan", {{"x", 0.5, 70, 60}, {"y", 0.5, 70, 60}});
  EXPECT_FALSE(rep.wilcoxon);
  EXPECT_FALSE(rep.wilcoxon_error.empty());
  EXPECT_FALSE(rep.pearson_a);
  EXPECT_EQ(rep.wins, 2u);
}

namespace {

// Feature 0 is the class; the rest come from a small hierarchy.
Dataset separable(std::uint64_t seed, const FeatureDag& noise_dag) {
  const auto noise = synthesize(noise_dag, {120, 0.3, 0.3, seed});
  std::vector<std::string> names{"label_copy"};
  for (const auto& n : noise.feature_names()) names.push_back(n);
  std::vector<std::uint8_t> values;
  for (std::size_t r = 0; r < noise.n_instances(); ++r) {
    values.push_back(static_cast<std::uint8_t>(noise.label(r)));
    for (auto v : noise.row(r)) values.push_back(v);
  }
  return Dataset(names, "class", noise.class_names(), values, noise.labels());
}

FeatureDag with_extra_root(const FeatureDag& dag) {
  std::vector<std::string> names{"label_copy"};
  for (const auto& n : dag.feature_names()) names.push_back(n);
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t f = 0; f < dag.n_features(); ++f)
    for (auto p : dag.parents(f)) edges.emplace_back(dag.feature_names()[f], dag.feature_names()[p]);
  return build_dag(names, edges);
}

}  // namespace

TEST(CrossValidate, SeparableDataScoresHigh) {
  const auto noise_dag = random_dag(8, 2, 0.6, 3);
  const auto data = separable(5, noise_dag);
  const auto dag = with_extra_root(noise_dag);
  for (auto method : {Method::Tan, Method::HreTan}) {
    const auto rep = cross_validate(data, dag, {method, 10, 1, 1.0, RootPolicy::Random}, "sep");
    ASSERT_TRUE(rep.aggregate.gmean);
    EXPECT_GT(*rep.aggregate.gmean, 95.0) << method_name(method);
    EXPECT_EQ(rep.pooled.total(), data.n_instances());
    EXPECT_EQ(rep.folds.size(), 10u);
    EXPECT_TRUE(rep.sensitivity_se);
  }
}

TEST(CrossValidate, DeterministicAndPooled) {
  const auto dag = random_dag(12, 2, 0.6, 9);
  const auto data = synthesize(dag, {90, 0.35, 0.4, 2});
  const CvConfig cfg{Method::HreTan, 5, 3, 1.0, RootPolicy::Random};
  const auto a = report_to_json(cross_validate(data, dag, cfg, "d"));
  EXPECT_EQ(a, report_to_json(cross_validate(data, dag, cfg, "d")));
  const auto rep = cross_validate(data, dag, cfg, "d");
  ConfusionCounts sum;
  for (const auto& f : rep.folds) sum += f.counts;
  EXPECT_EQ(sum, rep.pooled);
  EXPECT_EQ(sum.total(), 90u);
  EXPECT_EQ(sum.tp + sum.fn, static_cast<std::size_t>(std::count(data.labels().begin(), data.labels().end(), 1u)));
  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["per_fold"].size(), 5u);
  EXPECT_EQ(j["classifier"], "hre-tan");
}

TEST(CrossValidate, FlatHierarchyReportsMatch) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto data = random_dataset(rng, 70, 6);
    const auto dag = build_dag(data.feature_names(), {});
    const auto seed = rng();
    auto tan = cross_validate(data, dag, {Method::Tan, 7, seed, 1.0, RootPolicy::Random});
    auto hre = cross_validate(data, dag, {Method::HreTan, 7, seed, 1.0, RootPolicy::Random});
    hre.config.method = tan.config.method;
    EXPECT_EQ(report_to_json(tan), report_to_json(hre));
  }
}

TEST(CrossValidate, NeedsTwoClasses) {
  const Dataset one({"x"}, "class", {"only"}, {1, 0, 1}, {0, 0, 0});
  EXPECT_THROW(cross_validate(one, build_dag({"x"}, {}), {}), ArgumentError);
}

TEST(Methods, Names) {
  EXPECT_EQ(parse_method("tan"), Method::Tan);
  EXPECT_EQ(parse_method("hre-tan"), Method::HreTan);
  EXPECT_STREQ(method_name(Method::HreTan), "hre-tan");
  EXPECT_THROW(parse_method("nb"), ArgumentError);
}
