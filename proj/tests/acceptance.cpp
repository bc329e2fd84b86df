// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "hretan/errors.hpp"
#include "hretan/evaluation.hpp"
#include "hretan/hretan.hpp"
#include "hretan/rng.hpp"
#include "hretan/synth.hpp"
#include "test_support.hpp"

using namespace hretan;
using namespace hretan::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-28s %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 --------------------------------------------------------------------
Outcome golden_tree() {
  const auto dag = example_dag();
  const auto ranking = example_ranking();
  const auto inst = example_instance();
  hre_mst_edges(dag, ranking, inst);  // warm-up

  const int reps = 1000;
  const auto t0 = std::chrono::steady_clock::now();
  UndirectedTree tree;
  for (int k = 0; k < reps; ++k) tree = hre_mst_edges(dag, ranking, inst);
  const double per_call_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;

  const std::set<std::pair<std::size_t, std::size_t>> got(tree.edges.begin(), tree.edges.end());
  const bool edges_ok = got == std::set<std::pair<std::size_t, std::size_t>>{{F, A}, {F, B}, {B, E}};
  const bool excluded_ok = tree.vertices == std::vector<std::size_t>{F, B, A, E};
  const auto rooted = direct_tree(tree, B);
  const bool parents_ok = rooted.parent_of == std::map<std::size_t, std::size_t>{{F, B}, {E, B}, {A, F}};
  return {edges_ok && excluded_ok && parents_ok && per_call_ms < 1.0,
          fmt("edges %s, C/D excluded %s, parents %s, %.4f ms/call (< 1 ms)", edges_ok ? "ok" : "WRONG",
              excluded_ok ? "yes" : "NO", parents_ok ? "ok" : "WRONG", per_call_ms)};
}

// 2 --------------------------------------------------------------------
Outcome table_consistency() {
  const auto rows = reference_results();
  int checked = 0, bad = 0;
  double worst = 0;
  auto check = [&](double sens, double spec, double printed) {
    ++checked;
    const double rounded = std::round(gmean(sens, spec) * 10) / 10;
    worst = std::max(worst, std::fabs(rounded - printed));
    if (std::fabs(rounded - printed) > 0.05 + 1e-9) ++bad;
  };
  for (const auto& r : rows) {
    check(r.hre_sens, r.hre_spec, r.hre_gmean);
    check(r.tan_sens, r.tan_spec, r.tan_gmean);
  }
  const double example = std::round(gmean(41.1, 76.8) * 10) / 10;
  return {checked == 56 && bad == 0 && std::fabs(example - 56.2) < 1e-9,
          fmt("%d triples, %d outside +-0.05 (max dev %.3f); (41.1, 76.8) -> %.1f", checked, bad, worst, example)};
}

// 3 --------------------------------------------------------------------
Outcome correlation_statistics() {
  const auto rows = reference_results();
  std::vector<double> d, tan, hre;
  for (const auto& r : rows) {
    d.push_back(r.d);
    tan.push_back(r.tan_gmean);
    hre.push_back(r.hre_gmean);
  }
  const double r_tan = pearson_r(d, tan), r_hre = pearson_r(d, hre);
  const auto f_tan = linear_fit(d, tan), f_hre = linear_fit(d, hre);
  const bool ok = rows.size() == 28 && std::fabs(r_tan + 0.801) <= 0.005 && std::fabs(r_hre + 0.479) <= 0.005 &&
                  f_tan.slope < f_hre.slope;
  return {ok, fmt("r(TAN) = %.4f, r(HRE-TAN) = %.4f (+-0.005); slopes %.2f < %.2f", r_tan, r_hre, f_tan.slope,
                  f_hre.slope)};
}

// 4 --------------------------------------------------------------------
Outcome significance() {
  std::vector<double> hre, tan;
  for (const auto& r : reference_results()) {
    hre.push_back(r.hre_gmean);
    tan.push_back(r.tan_gmean);
  }
  const auto w = wilcoxon_signed_rank(hre, tan);
  const bool ok = w.wins == 18 && w.ties == 2 && w.losses == 8 && w.p_value < 0.05;
  return {ok, fmt("W/T/L = %zu/%zu/%zu, W = %.1f, n = %zu, p = %.5f (< 0.05)", w.wins, w.ties, w.losses,
                  w.statistic, w.n_used, w.p_value)};
}

// 5 --------------------------------------------------------------------
Outcome reduction() {
  std::size_t compared = 0, mismatched = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto gen_dag = random_dag(15, 2, 0.6, 100 + s);
    const auto data = synthesize(gen_dag, {200, 0.35, 0.4, 200 + s});
    const auto flat = build_dag(data.feature_names(), {});
    const auto split = stratified_kfold(data, 10, s);
    for (std::size_t f = 0; f < 10; ++f) {
      const auto train = data.subset(split.train_rows(f));
      const auto test = data.subset(split.test_rows(f));
      const RootChoice root{RootPolicy::Random, derive_seed(s, f)};
      const auto a = evaluate_tan(train, test, root, 1.0);
      const auto b = evaluate_hre_tan(train, test, flat, root, 1.0);
      for (std::size_t r = 0; r < a.size(); ++r) {
        ++compared;
        if (a[r].label != b[r].label || a[r].posterior != b[r].posterior) ++mismatched;
      }
    }
  }
  return {compared == 4000 && mismatched == 0,
          fmt("20 datasets x 200 rows, %zu predictions compared, %zu differ (labels and posteriors, exact)",
              compared, mismatched)};
}

// 6 --------------------------------------------------------------------
Outcome mst_oracle() {
  std::mt19937_64 rng(6);
  int bad = 0, trees = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 6;  // 2..7 features
    std::vector<ScoredEdge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, static_cast<double>(rng() % 50)});
    const ScoredEdgeList w(n, edges);
    double best = -1;
    for_each_labelled_tree(n, [&](const auto& t) {
      ++trees;
      double total = 0;
      for (auto [i, j] : t) total += weight_of(w, i, j);
      best = std::max(best, total);
    });
    const auto mst = build_mst(w, n);
    if (mst.edges.size() + 1 != n || mst.total_weight(w) != best) ++bad;
  }
  return {bad == 0, fmt("100 integer weight matrices (2..7 features), %d trees enumerated, %d mismatches", trees, bad)};
}

// 7 --------------------------------------------------------------------
Outcome redundancy_fuzz() {
  std::mt19937_64 rng(7);
  int cases = 0, empty = 0, redundant = 0, not_tree = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const auto dag = random_test_dag(rng, n, 0.05 + 0.5 * (rng() % 100) / 100.0);
    const auto w = random_weights(rng, n);
    Instance inst;
    for (std::size_t f = 0; f < n; ++f) inst.values.push_back(rng() & 1);
    ++cases;
    UndirectedTree tree;
    try {
      tree = hre_mst_edges(dag, w, inst);
    } catch (const EmptyTreeSignal&) {
      ++empty;
      continue;
    }
    for (auto f : tree.vertices)
      for (auto g : tree.vertices)
        if (dag.is_ancestor(g, f) && inst[f] == inst[g]) ++redundant;
    bool ok = tree.edges.size() + 1 == tree.vertices.size();
    if (ok) {
      try {
        direct_tree(tree, tree.vertices.front());
      } catch (const StructureError&) {
        ok = false;
      }
    }
    if (!ok) ++not_tree;
  }
  return {cases >= 1000 && redundant == 0 && not_tree == 0,
          fmt("%d cases (%d empty-tree fallbacks), %d redundant pairs, %d non-trees", cases, empty, redundant,
              not_tree)};
}

// 8 --------------------------------------------------------------------
Outcome root_invariance() {
  std::mt19937_64 rng(8);
  double worst = 0;
  int models = 0;
  for (; models < 50; ++models) {
    const std::size_t n = 2 + rng() % 5;
    const auto data = with_all_cells(random_dataset(rng, 20 + rng() % 40, n));
    const auto mst = build_mst(score_all_edges(data), n);
    std::vector<TanModel> rooted;
    for (std::size_t root = 0; root < n; ++root) rooted.push_back(make_model(data, direct_tree(mst, root), 0.0));
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Instance inst;
      for (std::size_t f = 0; f < n; ++f) inst.values.push_back((mask >> f) & 1);
      const auto ref = classify(rooted[0], inst);
      for (std::size_t root = 1; root < n; ++root) {
        const auto p = classify(rooted[root], inst);
        for (std::size_t c = 0; c < 2; ++c) worst = std::max(worst, std::fabs(p.posterior[c] - ref.posterior[c]));
      }
    }
  }
  return {worst <= 1e-9, fmt("%d models, every root and instance, max |dp| = %.2e (<= 1e-9)", models, worst)};
}

// 9 --------------------------------------------------------------------
double cmi_oracle(const Dataset& d, std::size_t i, std::size_t j) {
  const double n = static_cast<double>(d.n_instances());
  double total = 0.0;
  for (std::size_t c = 0; c < d.n_classes(); ++c)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double nabc = 0, nac = 0, nbc = 0, nc = 0;
        for (std::size_t r = 0; r < d.n_instances(); ++r) {
          if (d.label(r) != c) continue;
          ++nc;
          nac += d.value(r, i) == a;
          nbc += d.value(r, j) == b;
          nabc += d.value(r, i) == a && d.value(r, j) == b;
        }
        if (nabc > 0) total += (nabc / n) * std::log(nabc * nc / (nac * nbc));
      }
  return total;
}

// Per class, rows m_a(x_i = a) x m_b(x_j = b): a product table, so the
// features are exactly independent given the class.
Dataset product_table(std::mt19937_64& rng) {
  std::vector<std::uint8_t> values;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t m[2][2] = {{1 + rng() % 4, 1 + rng() % 4}, {1 + rng() % 4, 1 + rng() % 4}};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < m[0][a] * m[1][b]; ++k) {
          values.push_back(a);
          values.push_back(b);
          labels.push_back(c);
        }
  }
  return Dataset({"x", "y"}, "class", {"neg", "pos"}, values, labels);
}

Outcome cmi_properties() {
  std::mt19937_64 rng(9);
  int asym = 0, negative = 0;
  double worst_oracle = 0, worst_indep = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_dataset(rng, 8, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) {
        const double ij = conditional_mutual_information(d, i, j);
        asym += ij != conditional_mutual_information(d, j, i);
        negative += ij < 0;
        worst_oracle = std::max(worst_oracle, std::fabs(ij - std::max(0.0, cmi_oracle(d, i, j))));
      }
    worst_indep = std::max(worst_indep, conditional_mutual_information(product_table(rng), 0, 1));
  }
  const bool ok = asym == 0 && negative == 0 && worst_oracle < 1e-12 && worst_indep < 1e-12;
  return {ok, fmt("asymmetric %d, negative %d, max |oracle diff| %.1e, max CMI on independent tables %.1e "
                  "(100 random 8-row datasets)",
                  asym, negative, worst_oracle, worst_indep)};
}

// 10 -------------------------------------------------------------------
std::string run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full{"hretan"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = cli::run(full, out, err);
  return std::to_string(code) + "\n" + out.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "hretan_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string manifest;
  for (int k = 0; k < 3; ++k) {
    const auto name = "syn" + std::to_string(k);
    run_cli({"synth", "--features", "25", "-n", "150", "--seed", std::to_string(10 + k), "--out-data",
             (dir / (name + ".csv")).string(), "--out-dag", (dir / (name + ".tsv")).string()});
    manifest += name + "\t" + name + ".csv\t" + name + ".tsv\n";
  }
  std::ofstream(dir / "manifest.tsv") << manifest;

  const std::vector<std::vector<std::string>> commands = {
      {"cv", "--data", (dir / "syn0.csv").string(), "--dag", (dir / "syn0.tsv").string(), "--seed", "3"},
      {"cv", "--data", (dir / "syn1.csv").string(), "--classifier", "tan", "--format", "csv", "--seed", "3"},
      {"compare", "--manifest", (dir / "manifest.tsv").string(), "--seed", "5"}};

  int differing = 0;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "8", "8", "1"}) {
      setenv("HRETAN_THREADS", threads, 1);
      outputs.push_back(run_cli(cmd));
    }
    for (const auto& o : outputs) differing += o != outputs.front() || o.rfind("0\n", 0) != 0;
  }
  unsetenv("HRETAN_THREADS");
  fs::remove_all(dir);
  return {differing == 0,
          fmt("%zu commands x 4 runs (1 and 8 worker threads), %d outputs differ or failed", commands.size(),
              differing)};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  report(1, "golden HRE tree", golden_tree);
  report(2, "GMean table consistency", table_consistency);
  report(3, "imbalance correlation", correlation_statistics);
  report(4, "signed-rank significance", significance);
  report(5, "empty-hierarchy reduction", reduction);
  report(6, "spanning tree oracle", mst_oracle);
  report(7, "no-redundancy fuzz", redundancy_fuzz);
  report(8, "root invariance", root_invariance);
  report(9, "CMI properties", cmi_properties);
  report(10, "determinism", determinism);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 10 criteria failed (%.1f s)\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
