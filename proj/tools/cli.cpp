#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hretan/dataset.hpp"
#include "hretan/errors.hpp"
#include "hretan/evaluation.hpp"
#include "hretan/hierarchy.hpp"
#include "hretan/hretan.hpp"
#include "hretan/rng.hpp"
#include "hretan/synth.hpp"
#include "hretan/tan.hpp"

namespace hretan::cli {

namespace {

namespace fs = std::filesystem;

struct SynthConfig {
  std::size_t n_features = 40;
  std::size_t n_instances = 200;
  double balance = 0.35;
  double dependency = 0.3;
  std::size_t max_parents = 2;
  double parent_prob = 0.6;
  std::string out_data;
  std::string out_dag;
};

struct PredictConfig {
  std::string train_path;
  std::string test_path;
};

FeatureDag load_dag_for(const Dataset& data, const std::string& dag_path) {
  if (dag_path.empty()) return build_dag(data.feature_names(), {});
  return build_dag(data.feature_names(), load_dag_edges(dag_path));
}

RootPolicy root_policy(const std::string& s) {
  if (s == "random") return RootPolicy::Random;
  if (s == "first") return RootPolicy::First;
  throw ArgumentError("--root must be random or first");
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary);
  if (!f) throw Error("cannot write '" + cfg.output_path + "'");
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

CvConfig cv_config(const RunConfig& cfg, const std::string& classifier) {
  if (cfg.folds < 2) throw ArgumentError("--folds must be at least 2");
  if (cfg.smoothing < 0.0) throw ArgumentError("--smoothing must be non-negative");
  return CvConfig{parse_method(classifier), cfg.folds, cfg.seed, cfg.smoothing,
                  root_policy(cfg.root)};
}

int cmd_validate(const RunConfig& cfg, const std::string& repair_path, std::ostream& out) {
  const auto data = load_dataset(cfg.data_path, cfg.positive_class);
  const auto dag = load_dag_for(data, cfg.dag_path);
  const auto violations = validate_true_path(dag, data);
  std::ostringstream report;
  for (const auto& v : violations)
    report << "row " << v.row << ": " << dag.feature_names()[v.feature] << " = 1 but ancestor "
           << dag.feature_names()[v.ancestor] << " = 0\n";
  emit(cfg, report.str(), out);
  if (!repair_path.empty()) write_file(repair_path, serialize_dataset(repair_true_path(dag, data)));
  return violations.empty() ? kOk : kFindings;
}

int cmd_cv(const RunConfig& cfg, std::ostream& out) {
  const auto config = cv_config(cfg, cfg.classifier);
  if (cfg.format != "json" && cfg.format != "csv")
    throw ArgumentError("cv supports --format json or csv");
  const auto data = load_dataset(cfg.data_path, cfg.positive_class);
  const auto dag = load_dag_for(data, cfg.dag_path);
  const auto name = fs::path(cfg.data_path).stem().string();
  const auto report = cross_validate(data, dag, config, name);
  emit(cfg, cfg.format == "json" ? report_to_json(report) : report_to_csv(report), out);
  return kOk;
}

struct ManifestEntry {
  std::string name;
  std::string data_path;
  std::string dag_path;
};

std::string strip(std::string s) {
  if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) out.push_back(field);
  return out;
}

// name<TAB>data<TAB>dag; the dag column may be omitted or "-" for a flat
// hierarchy. Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path + "'");
  const auto base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError(line_no, "manifest lines are name<TAB>data[<TAB>dag]");
    ManifestEntry e{fields[0], resolve(fields[1]), ""};
    if (fields.size() == 3 && !fields[2].empty() && fields[2] != "-") e.dag_path = resolve(fields[2]);
    entries.push_back(std::move(e));
  }
  return entries;
}

// name<TAB>D<TAB>gmean_a<TAB>gmean_b
std::vector<ComparisonRow> read_stub_gmeans(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<ComparisonRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto f = split_tabs(line);
    if (f.size() != 4) throw ParseError(line_no, "expected name<TAB>D<TAB>gmean_a<TAB>gmean_b");
    try {
      rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stod(f[3])});
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "non-numeric value");
    }
  }
  return rows;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "tsv-plot")
    throw ArgumentError("compare supports --format json, csv or tsv-plot");
  if (cfg.manifest_path.empty() == cfg.stub_gmeans_path.empty())
    throw ArgumentError("compare needs exactly one of --manifest or --stub-gmeans");

  std::vector<ComparisonRow> rows;
  std::vector<std::string> failed;
  if (!cfg.stub_gmeans_path.empty()) {
    rows = read_stub_gmeans(cfg.stub_gmeans_path);
  } else {
    const auto config_a = cv_config(cfg, cfg.classifier);
    const auto config_b = cv_config(cfg, cfg.classifier_b);
    for (const auto& entry : read_manifest(cfg.manifest_path)) {
      try {
        const auto data = load_dataset(entry.data_path, cfg.positive_class);
        const auto dag = load_dag_for(data, entry.dag_path);
        const auto a = cross_validate(data, dag, config_a, entry.name);
        const auto b = cross_validate(data, dag, config_b, entry.name);
        if (!a.aggregate.gmean || !b.aggregate.gmean) throw Error("GMean undefined");
        rows.push_back({entry.name, a.degree_of_imbalance, *a.aggregate.gmean, *b.aggregate.gmean});
      } catch (const Error& e) {
        failed.push_back(entry.name + ": " + e.what());
        err << "dataset " << entry.name << " failed: " << e.what() << "\n";
      }
    }
  }

  auto report = compare_gmeans(cfg.classifier, cfg.classifier_b, std::move(rows));
  report.failed = std::move(failed);
  if (cfg.format == "json")
    emit(cfg, comparison_to_json(report), out);
  else if (cfg.format == "csv")
    emit(cfg, comparison_to_csv(report), out);
  else
    emit(cfg, comparison_to_plot_tsv(report), out);
  return report.failed.empty() ? kOk : kPartialFailure;
}

int cmd_synth(const RunConfig& cfg, const SynthConfig& s) {
  if (s.out_data.empty() || s.out_dag.empty())
    throw ArgumentError("synth needs --out-data and --out-dag");
  const auto dag = random_dag(s.n_features, s.max_parents, s.parent_prob, cfg.seed);
  const auto data = synthesize(dag, {s.n_instances, s.balance, s.dependency, derive_seed(cfg.seed, 1)});
  write_file(s.out_data, serialize_dataset(data));
  write_file(s.out_dag, serialize_dag_edges(dag));
  return kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.smoothing < 0.0) throw ArgumentError("--smoothing must be non-negative");
  const auto data = load_dataset(cfg.data_path, cfg.positive_class);
  const auto model = fit_tan(data, {root_policy(cfg.root), cfg.seed}, cfg.smoothing);
  emit(cfg, model_to_json(model), out);
  return kOk;
}

int cmd_predict(const RunConfig& cfg, const PredictConfig& p, std::ostream& out) {
  if (cfg.smoothing < 0.0) throw ArgumentError("--smoothing must be non-negative");
  const auto method = parse_method(cfg.classifier);
  const auto train = load_dataset(p.train_path, cfg.positive_class);
  const auto test_raw = load_dataset(p.test_path);
  if (test_raw.feature_names() != train.feature_names())
    throw DimensionError("train and test headers differ");
  // Re-index test labels onto the training class names.
  std::vector<std::size_t> labels;
  for (auto l : test_raw.labels()) {
    const auto& name = test_raw.class_names()[l];
    const auto& names = train.class_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ArgumentError("test class '" + name + "' unseen in training data");
    labels.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  const Dataset test(train.feature_names(), train.class_column(), train.class_names(),
                     test_raw.values(), std::move(labels));
  const auto dag = load_dag_for(train, cfg.dag_path);
  const RootChoice root{root_policy(cfg.root), cfg.seed};
  const auto results = method == Method::Tan ? evaluate_tan(train, test, root, cfg.smoothing)
                                             : evaluate_hre_tan(train, test, dag, root, cfg.smoothing);
  std::ostringstream os;
  os.precision(17);
  os << "row,actual,predicted";
  for (const auto& c : train.class_names()) os << ",p_" << c;
  os << "\n";
  for (std::size_t r = 0; r < results.size(); ++r) {
    os << r << ',' << train.class_names()[test.label(r)] << ','
       << train.class_names()[results[r].label];
    for (double p : results[r].posterior) os << ',' << p;
    os << "\n";
  }
  emit(cfg, os.str(), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  SynthConfig synth;
  PredictConfig predict;
  std::string repair_path;
  std::string positive;

  CLI::App app{"Tree Augmented Naive Bayes with hierarchical redundancy elimination", "hretan"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--positive", positive, "Class name treated as positive");
    sub->add_option("--output,-o", cfg.output_path, "Output file (default: stdout)");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--smoothing", cfg.smoothing, "Laplace pseudo-count for CPTs")->capture_default_str();
    sub->add_option("--root", cfg.root, "Root policy: random or first")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "Check true-path consistency of a dataset");
  validate->add_option("--data", cfg.data_path, "Dataset CSV")->required();
  validate->add_option("--dag", cfg.dag_path, "Hierarchy TSV (child<TAB>parent)")->required();
  validate->add_option("--repair", repair_path, "Write a copy with 1s propagated to ancestors");
  add_common(validate);

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  cv->add_option("--data", cfg.data_path, "Dataset CSV")->required();
  cv->add_option("--dag", cfg.dag_path, "Hierarchy TSV (omit for a flat hierarchy)");
  cv->add_option("--classifier", cfg.classifier, "tan or hre-tan")->capture_default_str();
  cv->add_option("--folds", cfg.folds, "Number of folds")->capture_default_str();
  cv->add_option("--format", cfg.format, "json or csv")->capture_default_str();
  add_common(cv);
  add_model(cv);

  auto* compare = app.add_subcommand("compare", "Compare two classifiers over many datasets");
  compare->add_option("--manifest", cfg.manifest_path, "TSV of name, data path, dag path");
  compare->add_option("--stub-gmeans", cfg.stub_gmeans_path,
                      "TSV of recorded name, D, gmean_a, gmean_b (statistics only)");
  compare->add_option("--classifier-a,--classifier", cfg.classifier, "First method")->capture_default_str();
  compare->add_option("--classifier-b", cfg.classifier_b, "Second method")->capture_default_str();
  compare->add_option("--folds", cfg.folds, "Number of folds")->capture_default_str();
  compare->add_option("--format", cfg.format, "json, csv or tsv-plot")->capture_default_str();
  add_common(compare);
  add_model(compare);

  auto* synth_cmd = app.add_subcommand("synth", "Generate a hierarchy and a consistent dataset");
  synth_cmd->add_option("--features", synth.n_features, "Number of terms")->capture_default_str();
  synth_cmd->add_option("-n,--instances", synth.n_instances, "Number of instances")->capture_default_str();
  synth_cmd->add_option("--balance", synth.balance, "Positive class proportion")->capture_default_str();
  synth_cmd->add_option("--dependency", synth.dependency, "Dependency strength in [0,1]")->capture_default_str();
  synth_cmd->add_option("--max-parents", synth.max_parents, "Maximum parents per term")->capture_default_str();
  synth_cmd->add_option("--parent-prob", synth.parent_prob, "Probability of each parent slot")->capture_default_str();
  synth_cmd->add_option("--out-data", synth.out_data, "Dataset CSV to write")->required();
  synth_cmd->add_option("--out-dag", synth.out_dag, "Hierarchy TSV to write")->required();
  synth_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();

  auto* fit = app.add_subcommand("fit", "Fit a TAN model and dump it as JSON");
  fit->add_option("--data", cfg.data_path, "Dataset CSV")->required();
  add_common(fit);
  add_model(fit);

  auto* pred = app.add_subcommand("predict", "Train on one file, classify another");
  pred->add_option("--train", predict.train_path, "Training CSV")->required();
  pred->add_option("--test", predict.test_path, "Test CSV")->required();
  pred->add_option("--dag", cfg.dag_path, "Hierarchy TSV (omit for a flat hierarchy)");
  pred->add_option("--classifier", cfg.classifier, "tan or hre-tan")->capture_default_str();
  add_common(pred);
  add_model(pred);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (!positive.empty()) cfg.positive_class = positive;
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (*validate) return cmd_validate(cfg, repair_path, out);
    if (*cv) return cmd_cv(cfg, out);
    if (*compare) return cmd_compare(cfg, out, err);
    if (*synth_cmd) return cmd_synth(cfg, synth);
    if (*fit) return cmd_fit(cfg, out);
    if (*pred) return cmd_predict(cfg, predict, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hretan::cli
