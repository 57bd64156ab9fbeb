// Batch command-line surface: dataset ingestion, training, persistence,
// evaluation, sweeps, and the accelerator cycle model. Data goes to stdout,
// progress and timings go to stderr, so captured output stays reproducible.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "syhd/dataset.hpp"
#include "syhd/errors.hpp"
#include "syhd/item_memory.hpp"
#include "syhd/model_io.hpp"
#include "syhd/numfmt.hpp"
#include "syhd/perfsim.hpp"
#include "syhd/pipeline.hpp"
#include "syhd/report.hpp"

namespace {

using namespace syhd;

// Every flag can also be set through SYHD_<FLAG> in the environment.
CLI::Option* with_env(CLI::Option* opt) {
  std::string env = "SYHD_";
  for (const char c : opt->get_single_name()) {
    env.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return opt->envname(env);
}

struct DataOpts {
  std::string train_path;
  std::string train_labels;
  std::string test_path;
  std::string test_labels;
};

void add_data_options(CLI::App* cmd, DataOpts& d, bool test_required) {
  with_env(cmd->add_option("--train", d.train_path, "training features (csv or feature file)"))
      ->required();
  with_env(cmd->add_option("--train-labels", d.train_labels,
                           "label file when features and labels are split"));
  auto* test = with_env(cmd->add_option("--test", d.test_path, "test features"));
  if (test_required) test->required();
  with_env(cmd->add_option("--test-labels", d.test_labels, "test label file"));
}

std::optional<std::string> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

std::pair<Dataset, Dataset> load_pair(const DataOpts& d) {
  Dataset train = load_dataset(d.train_path, opt_path(d.train_labels));
  Dataset test = load_dataset(d.test_path, opt_path(d.test_labels));
  align_labels({&train, &test});
  return {std::move(train), std::move(test)};
}

Dataset load_single(const std::string& path, const std::string& labels) {
  Dataset ds = load_dataset(path, opt_path(labels));
  align_labels({&ds});
  return ds;
}

// Maps the dataset's raw labels into the model's dense space. Falls back to
// treating raw labels as already dense when the model recorded no mapping.
void align_to_model(Dataset& ds, const ModelBundle& bundle) {
  const int classes = bundle.hd.class_count();
  ds.y.resize(ds.raw_labels.size());
  if (bundle.label_values.empty()) {
    for (std::size_t i = 0; i < ds.raw_labels.size(); ++i) {
      const long long raw = ds.raw_labels[i];
      if (raw < 1 || raw > classes) {
        throw std::invalid_argument("label " + std::to_string(raw) +
                                    " is outside the model's classes");
      }
      ds.y[i] = static_cast<int>(raw);
    }
  } else {
    std::unordered_map<long long, int> dense;
    for (std::size_t k = 0; k < bundle.label_values.size(); ++k) {
      dense[bundle.label_values[k]] = static_cast<int>(k) + 1;
    }
    for (std::size_t i = 0; i < ds.raw_labels.size(); ++i) {
      const auto it = dense.find(ds.raw_labels[i]);
      if (it == dense.end()) {
        throw std::invalid_argument("label " + std::to_string(ds.raw_labels[i]) +
                                    " is outside the model's classes");
      }
      ds.y[i] = it->second;
    }
  }
  ds.class_count = classes;
  ds.label_values = bundle.label_values;
}

struct TrainFlags {
  std::uint64_t dh = 0;  // 0 resolves per kind below
  int q = 4;
  std::uint64_t seed = 1;
  int epochs = 120;
  int batch_size = 256;
  double max_lr = 0.01;
  double l2 = 1e-4;
  std::uint64_t dnn = 0;
  bool no_standardize = false;
  int repetitions = 1;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_repetitions) {
  with_env(cmd->add_option("--dh", f.dh,
                           "hypervector dimension (default: 16; 10240 for plain hdl)"));
  with_env(cmd->add_option("--q", f.q, "quantization levels"))->capture_default_str();
  with_env(cmd->add_option("--seed", f.seed, "master rng seed"))->capture_default_str();
  with_env(cmd->add_option("--epochs", f.epochs, "extractor training epochs"))
      ->capture_default_str();
  with_env(cmd->add_option("--batch-size", f.batch_size, "sgd mini-batch size"))
      ->capture_default_str();
  with_env(cmd->add_option("--max-lr", f.max_lr, "one-cycle peak learning rate"))
      ->capture_default_str();
  with_env(cmd->add_option("--l2", f.l2, "l2 penalty coefficient"))->capture_default_str();
  with_env(cmd->add_option("--dnn", f.dnn, "feature layer width (0 = input width)"));
  with_env(cmd->add_flag("--no-standardize", f.no_standardize,
                         "skip per-feature standardization of the extractor input"));
  if (with_repetitions) {
    with_env(cmd->add_option("--repetitions", f.repetitions,
                             "independent runs with derived seeds, metrics averaged"))
        ->capture_default_str();
  }
}

std::uint64_t resolve_dh(std::uint64_t flag, ModelKind kind) {
  if (flag != 0) return flag;
  return kind == ModelKind::kHdl ? 10240 : 16;
}

ExperimentSpec make_spec(const TrainFlags& f, ModelKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.dh = resolve_dh(f.dh, kind);
  spec.q = f.q;
  spec.dnn = f.dnn;
  spec.seed = f.seed;
  spec.repetitions = f.repetitions;
  spec.train.epochs = f.epochs;
  spec.train.batch_size = f.batch_size;
  spec.train.max_lr = f.max_lr;
  spec.train.l2_coeff = f.l2;
  spec.train.standardize = !f.no_standardize;
  spec.train.rng_seed = f.seed;
  return spec;
}

ResultRecord base_record(const ExperimentSpec& spec) {
  ResultRecord r;
  r.model_kind = to_string(spec.kind);
  r.dh = spec.dh;
  r.q = spec.q;
  r.seed = spec.seed;
  if (spec.kind != ModelKind::kHdl) {
    r.epochs = spec.train.epochs;
    r.batch_size = spec.train.batch_size;
    r.max_lr = spec.train.max_lr;
    r.l2 = spec.train.l2_coeff;
    r.dnn = spec.dnn;
  }
  if (spec.repetitions > 1) r.repetitions = spec.repetitions;
  return r;
}

struct OutputOpts {
  std::string csv_path;
  std::string jsonl_path;
};

void add_output_options(CLI::App* cmd, OutputOpts& o) {
  with_env(cmd->add_option("--csv", o.csv_path, "also write the records to this csv file"));
  with_env(cmd->add_option("--jsonl", o.jsonl_path,
                           "also write line-delimited records with the full config echo"));
}

void emit_records(const std::vector<ResultRecord>& records, const OutputOpts& out) {
  const std::string csv = result_csv(records);
  std::fwrite(csv.data(), 1, csv.size(), stdout);
  if (!out.csv_path.empty()) write_text_file(out.csv_path, csv);
  if (!out.jsonl_path.empty()) write_text_file(out.jsonl_path, result_jsonl(records));
}

void note(const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); }

// ---- train ----------------------------------------------------------------

struct TrainCmd {
  std::string kind_str;
  DataOpts data;
  TrainFlags flags;
  OutputOpts out;
  std::string model_out;

  void run() const {
    const ModelKind kind = model_kind_from_string(kind_str);
    Dataset train = load_dataset(data.train_path, opt_path(data.train_labels));
    std::optional<Dataset> test;
    if (!data.test_path.empty()) {
      test = load_dataset(data.test_path, opt_path(data.test_labels));
      align_labels({&train, &*test});
    } else {
      align_labels({&train});
    }
    const ExperimentSpec spec = make_spec(flags, kind);

    std::vector<ResultRecord> records;
    ModelBundle bundle;
    if (test) {
      ExperimentResult res = run_repeated(train, *test, spec);
      for (const SeedRun& rep : res.repetitions) {
        ResultRecord r = base_record(spec);
        r.seed = rep.seed;
        r.accuracy = rep.accuracy;
        records.push_back(std::move(r));
      }
      if (spec.repetitions > 1) {
        note("mean accuracy: " + to_shortest(res.mean) + " (min " + to_shortest(res.min) +
             ", max " + to_shortest(res.max) + ")");
      }
      note("wall_seconds: " + to_shortest(res.wall_seconds));
      bundle = std::move(res.last_bundle);
    } else {
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        ExperimentSpec s = spec;
        s.seed = repetition_seed(spec.seed, rep);
        s.train.rng_seed = s.seed;
        bundle = train_bundle(train, s);
        ResultRecord r = base_record(spec);
        r.seed = s.seed;
        records.push_back(std::move(r));
      }
    }
    emit_records(records, out);
    if (!model_out.empty()) {
      save_model(model_out, bundle);
      note("model written to " + model_out);
    }
  }
};

// ---- predict / eval / finetune ---------------------------------------------

struct PredictCmd {
  std::string model_path;
  std::string data_path;
  std::string data_labels;
  std::string out_path;

  void run() const {
    const ModelBundle bundle = load_model(model_path);
    const Dataset ds = load_dataset(data_path, opt_path(data_labels));
    const std::vector<int> dense = predict_bundle(bundle, ds.x);
    std::string text;
    for (const int p : dense) {
      const long long value = bundle.label_values.empty()
                                  ? p
                                  : bundle.label_values[static_cast<std::size_t>(p) - 1];
      text += std::to_string(value);
      text.push_back('\n');
    }
    std::fwrite(text.data(), 1, text.size(), stdout);
    if (!out_path.empty()) write_text_file(out_path, text);
  }
};

struct EvalCmd {
  std::string model_path;
  std::string data_path;
  std::string data_labels;
  OutputOpts out;

  void run() const {
    const ModelBundle bundle = load_model(model_path);
    Dataset ds = load_dataset(data_path, opt_path(data_labels));
    align_to_model(ds, bundle);
    const double accuracy = evaluate_bundle(bundle, ds);
    std::fprintf(stdout, "%s\n", to_shortest(accuracy).c_str());
    if (!out.csv_path.empty() || !out.jsonl_path.empty()) {
      ResultRecord r;
      r.model_kind = to_string(bundle.kind);
      r.dh = bundle.hd.item_memory().dim();
      r.q = static_cast<int>(bundle.hd.item_memory().levels());
      r.seed = bundle.hd.item_memory().seed();
      r.accuracy = accuracy;
      const std::vector<ResultRecord> records{r};
      if (!out.csv_path.empty()) write_text_file(out.csv_path, result_csv(records));
      if (!out.jsonl_path.empty()) write_text_file(out.jsonl_path, result_jsonl(records));
    }
  }
};

struct FinetuneCmd {
  std::string model_path;
  std::string data_path;
  std::string data_labels;
  std::string test_path;
  std::string test_labels;
  std::string out_path;

  void run() const {
    ModelBundle bundle = load_model(model_path);
    Dataset extra = load_dataset(data_path, opt_path(data_labels));
    align_to_model(extra, bundle);
    finetune_bundle(bundle, extra);
    const std::string target = out_path.empty() ? model_path : out_path;
    save_model(target, bundle);
    note("model written to " + target);
    if (!test_path.empty()) {
      Dataset test = load_dataset(test_path, opt_path(test_labels));
      align_to_model(test, bundle);
      std::fprintf(stdout, "%s\n", to_shortest(evaluate_bundle(bundle, test)).c_str());
    }
  }
};

// ---- recon-error ------------------------------------------------------------

struct ReconCmd {
  std::string data_path;
  std::string data_labels;
  std::vector<std::uint64_t> dh_list{16, 64, 256, 1024, 10240};
  std::vector<int> q_list{4};
  std::uint64_t seed = 1;
  int repetitions = 1;
  OutputOpts out;

  void run() const {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    const Dataset ds = load_single(data_path, data_labels);
    std::vector<ResultRecord> records;
    for (const std::uint64_t dh : dh_list) {
      for (const int q : q_list) {
        double mean_sum = 0.0;
        double std_sum = 0.0;
        for (int rep = 0; rep < repetitions; ++rep) {
          ItemMemory mem =
              ItemMemory::generate(ds.feature_count(), dh, q, repetition_seed(seed, rep));
          mem.set_quantizer(Quantizer::fit(ds.x, q));
          const auto [mean, stdev] = reconstruction_error(ds.x, mem);
          mean_sum += mean;
          std_sum += stdev;
        }
        ResultRecord r;
        r.dh = dh;
        r.q = q;
        r.seed = seed;
        r.mean_err = mean_sum / repetitions;
        r.std_err = std_sum / repetitions;
        if (repetitions > 1) r.repetitions = repetitions;
        records.push_back(std::move(r));
      }
    }
    emit_records(records, out);
  }
};

// ---- sweep / incremental / seed-sweep ---------------------------------------

struct SweepCmd {
  DataOpts data;
  TrainFlags flags;
  OutputOpts out;
  std::vector<std::string> kinds{"hdl", "synergic"};
  std::vector<std::uint64_t> dh_list{16};
  std::vector<int> q_list{4};

  void run() const {
    const auto [train, test] = load_pair(data);
    std::vector<ResultRecord> records;
    for (const std::string& kind_str : kinds) {
      const ModelKind kind = model_kind_from_string(kind_str);
      for (const std::uint64_t dh : dh_list) {
        for (const int q : q_list) {
          ExperimentSpec spec = make_spec(flags, kind);
          spec.dh = dh;
          spec.q = q;
          const RunResult run = run_experiment(train, test, spec);
          ResultRecord r = base_record(spec);
          r.accuracy = run.accuracy;
          records.push_back(std::move(r));
          note(to_string(kind) + " dh=" + to_shortest(dh) + " q=" + std::to_string(q) +
               " accuracy=" + to_shortest(run.accuracy) +
               " wall_seconds=" + to_shortest(run.wall_seconds));
        }
      }
    }
    emit_records(records, out);
  }
};

struct IncrementalCmd {
  DataOpts data;
  TrainFlags flags;
  OutputOpts out;
  std::string kind_str = "synergic";
  std::vector<double> ratios{0.25, 0.5, 0.75, 1.0};

  void run() const {
    const ModelKind kind = model_kind_from_string(kind_str);
    const auto [train, test] = load_pair(data);
    std::vector<ResultRecord> records;
    for (const double ratio : ratios) {
      ExperimentSpec spec = make_spec(flags, kind);
      spec.ratio = ratio;
      const RunResult run = run_incremental(train, test, spec);
      ResultRecord r = base_record(spec);
      r.ratio = ratio;
      r.accuracy = run.accuracy;
      records.push_back(std::move(r));
      note(to_string(kind) + " ratio=" + to_shortest(ratio) +
           " accuracy=" + to_shortest(run.accuracy) +
           " wall_seconds=" + to_shortest(run.wall_seconds));
    }
    emit_records(records, out);
  }
};

struct SeedSweepCmd {
  DataOpts data;
  TrainFlags flags;
  OutputOpts out;
  std::string kind_str = "synergic";
  std::vector<std::uint64_t> seeds;
  int count = 5;

  void run() const {
    const ModelKind kind = model_kind_from_string(kind_str);
    const auto [train, test] = load_pair(data);
    const ExperimentSpec spec = make_spec(flags, kind);
    const SeedSweepResult sweep = seeds.empty() ? seed_sweep(train, test, spec, count)
                                                : seed_sweep(train, test, spec, seeds);
    std::vector<ResultRecord> records;
    for (const SeedRun& run : sweep.runs) {
      ResultRecord r = base_record(spec);
      r.seed = run.seed;
      r.accuracy = run.accuracy;
      records.push_back(std::move(r));
    }
    emit_records(records, out);
    note("spread: " + to_shortest(sweep.spread));
  }
};

// ---- perfsim ------------------------------------------------------------------

struct PerfsimCmd {
  std::vector<std::size_t> widths{617, 561, 561};
  SystolicConfig nn_cfg;
  HdPipeConfig hd_cfg;
  std::string mode_str = "parallel";
  std::size_t dl = 0;  // 0 = last network width
  bool compile_first = false;
  std::size_t pe_budget = 1024;
  std::string csv_path;

  void run() const {
    NetworkShape shape{widths};
    SystolicConfig nn = nn_cfg;
    HdPipeConfig hd = hd_cfg;
    hd.dl = dl == 0 ? widths.back() : dl;
    if (mode_str == "parallel") {
      hd.mode = HdMode::kParallel;
    } else if (mode_str == "sequential") {
      hd.mode = HdMode::kSequential;
    } else {
      throw std::invalid_argument("mode must be parallel or sequential");
    }
    if (compile_first) {
      CompileParams params;
      params.pe_budget = pe_budget;
      params.dram_bandwidth = nn.dram_bandwidth;
      const Schedule best = compile(shape, params);
      nn.w_sys = best.w_sys;
      nn.h_sys = best.h_sys;
      std::string orders;
      for (const TileOrder o : best.layer_orders) {
        if (!orders.empty()) orders += ",";
        orders += o == TileOrder::kOutputMajor ? "output-major" : "input-major";
      }
      note("compiled array " + to_shortest(best.w_sys) + "x" + to_shortest(best.h_sys) +
           " orders [" + orders + "] total_cycles " + to_shortest(best.total_cycles));
    }
    const std::vector<PerfRow> rows = perf_report(shape, nn, hd);
    const std::string csv = perf_report_csv(rows);
    std::fwrite(csv.data(), 1, csv.size(), stdout);
    std::fputs(perf_report_text(rows).c_str(), stderr);
    if (!csv_path.empty()) write_text_file(csv_path, csv);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperdimensional learning toolkit"};
  app.require_subcommand(1);
  const std::vector<std::string> kind_names{"hdl", "nn-hdl", "nn_hdl", "synergic"};

  TrainCmd train_cmd;
  auto* train = app.add_subcommand("train", "train a model, optionally evaluate and save it");
  train->add_option("kind", train_cmd.kind_str, "model kind: hdl, nn-hdl, or synergic")
      ->required()
      ->check(CLI::IsMember(kind_names));
  add_data_options(train, train_cmd.data, false);
  add_train_flags(train, train_cmd.flags, true);
  add_output_options(train, train_cmd.out);
  with_env(train->add_option("--out", train_cmd.model_out, "write the trained model here"));
  train->callback([&train_cmd] { train_cmd.run(); });

  PredictCmd predict_cmd;
  auto* predict = app.add_subcommand("predict", "print predicted labels, one per line");
  with_env(predict->add_option("--model", predict_cmd.model_path, "saved model"))->required();
  with_env(predict->add_option("--data", predict_cmd.data_path, "features to predict"))
      ->required();
  with_env(predict->add_option("--data-labels", predict_cmd.data_labels, "label file, if split"));
  with_env(predict->add_option("--out", predict_cmd.out_path, "also write predictions here"));
  predict->callback([&predict_cmd] { predict_cmd.run(); });

  EvalCmd eval_cmd;
  auto* eval = app.add_subcommand("eval", "print accuracy of a saved model on a labeled set");
  with_env(eval->add_option("--model", eval_cmd.model_path, "saved model"))->required();
  with_env(eval->add_option("--data", eval_cmd.data_path, "labeled evaluation set"))->required();
  with_env(eval->add_option("--data-labels", eval_cmd.data_labels, "label file, if split"));
  add_output_options(eval, eval_cmd.out);
  eval->callback([&eval_cmd] { eval_cmd.run(); });

  FinetuneCmd finetune_cmd;
  auto* finetune =
      app.add_subcommand("finetune", "one-pass update of a saved hdl or synergic model");
  with_env(finetune->add_option("--model", finetune_cmd.model_path, "saved model"))->required();
  with_env(finetune->add_option("--data", finetune_cmd.data_path, "new labeled samples"))
      ->required();
  with_env(
      finetune->add_option("--data-labels", finetune_cmd.data_labels, "label file, if split"));
  with_env(finetune->add_option("--test", finetune_cmd.test_path,
                                "print accuracy on this set after the update"));
  with_env(finetune->add_option("--test-labels", finetune_cmd.test_labels, "test label file"));
  with_env(finetune->add_option("--out", finetune_cmd.out_path,
                                "write the updated model here (default: overwrite --model)"));
  finetune->callback([&finetune_cmd] { finetune_cmd.run(); });

  ReconCmd recon_cmd;
  auto* recon =
      app.add_subcommand("recon-error", "encode/decode reconstruction error over a (dh, q) grid");
  with_env(recon->add_option("--data", recon_cmd.data_path, "feature file"))->required();
  with_env(recon->add_option("--data-labels", recon_cmd.data_labels, "label file, if split"));
  with_env(recon->add_option("--dh-list", recon_cmd.dh_list, "hypervector dimensions"))
      ->delimiter(',')
      ->capture_default_str();
  with_env(recon->add_option("--q-list", recon_cmd.q_list, "quantization level counts"))
      ->delimiter(',')
      ->capture_default_str();
  with_env(recon->add_option("--seed", recon_cmd.seed, "master rng seed"))->capture_default_str();
  with_env(recon->add_option("--repetitions", recon_cmd.repetitions,
                             "seeds averaged per grid point"))
      ->capture_default_str();
  add_output_options(recon, recon_cmd.out);
  recon->callback([&recon_cmd] { recon_cmd.run(); });

  SweepCmd sweep_cmd;
  auto* sweep = app.add_subcommand("sweep", "accuracy grid over kinds x dh x q");
  add_data_options(sweep, sweep_cmd.data, true);
  with_env(sweep->add_option("--kinds", sweep_cmd.kinds, "model kinds to run"))
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember(kind_names));
  with_env(sweep->add_option("--dh-list", sweep_cmd.dh_list, "hypervector dimensions"))
      ->delimiter(',')
      ->capture_default_str();
  with_env(sweep->add_option("--q-list", sweep_cmd.q_list, "quantization level counts"))
      ->delimiter(',')
      ->capture_default_str();
  add_train_flags(sweep, sweep_cmd.flags, false);
  add_output_options(sweep, sweep_cmd.out);
  sweep->callback([&sweep_cmd] { sweep_cmd.run(); });

  IncrementalCmd incr_cmd;
  auto* incr = app.add_subcommand(
      "incremental", "train on an initial fraction, absorb the rest one-pass, per ratio");
  add_data_options(incr, incr_cmd.data, true);
  with_env(incr->add_option("--kind", incr_cmd.kind_str, "hdl or synergic"))
      ->capture_default_str()
      ->check(CLI::IsMember(std::vector<std::string>{"hdl", "synergic"}));
  with_env(incr->add_option("--ratios", incr_cmd.ratios, "initial-data fractions"))
      ->delimiter(',')
      ->capture_default_str();
  add_train_flags(incr, incr_cmd.flags, false);
  add_output_options(incr, incr_cmd.out);
  incr->callback([&incr_cmd] { incr_cmd.run(); });

  SeedSweepCmd seeds_cmd;
  auto* seeds = app.add_subcommand("seed-sweep", "rerun one spec across seeds, report the spread");
  add_data_options(seeds, seeds_cmd.data, true);
  with_env(seeds->add_option("--kind", seeds_cmd.kind_str, "model kind"))
      ->capture_default_str()
      ->check(CLI::IsMember(kind_names));
  with_env(seeds->add_option("--seeds", seeds_cmd.seeds, "explicit seed list"))->delimiter(',');
  with_env(seeds->add_option("--count", seeds_cmd.count,
                             "number of derived seeds when --seeds is not given"))
      ->capture_default_str();
  add_train_flags(seeds, seeds_cmd.flags, false);
  add_output_options(seeds, seeds_cmd.out);
  seeds->callback([&seeds_cmd] { seeds_cmd.run(); });

  PerfsimCmd perf_cmd;
  auto* perf = app.add_subcommand("perfsim", "accelerator cycle model: systolic NN + HD pipeline");
  with_env(perf->add_option("--widths", perf_cmd.widths,
                            "network widths, input first (one entry = no NN layers)"))
      ->delimiter(',')
      ->capture_default_str();
  with_env(perf->add_option("--w-sys", perf_cmd.nn_cfg.w_sys, "systolic array columns"))
      ->capture_default_str();
  with_env(perf->add_option("--h-sys", perf_cmd.nn_cfg.h_sys, "systolic array rows"))
      ->capture_default_str();
  with_env(perf->add_option("--clock-mhz", perf_cmd.nn_cfg.clock_mhz, "clock in MHz"))
      ->capture_default_str();
  with_env(perf->add_option("--dram-bandwidth", perf_cmd.nn_cfg.dram_bandwidth,
                            "DMA words per cycle"))
      ->capture_default_str();
  with_env(perf->add_option("--dh", perf_cmd.hd_cfg.dh, "hypervector dimension"))
      ->capture_default_str();
  with_env(perf->add_option("--dl", perf_cmd.dl, "encoder input width (0 = last network width)"));
  with_env(perf->add_option("--classes", perf_cmd.hd_cfg.classes, "class count"))
      ->capture_default_str();
  with_env(perf->add_option("--fanin", perf_cmd.hd_cfg.fanin, "adder tree fan-in"))
      ->capture_default_str();
  with_env(perf->add_option("--hd-mode", perf_cmd.mode_str, "parallel or sequential"))
      ->capture_default_str()
      ->check(CLI::IsMember(std::vector<std::string>{"parallel", "sequential"}));
  with_env(perf->add_option("--chunk-width", perf_cmd.hd_cfg.chunk_width,
                            "positions per pass in sequential mode"))
      ->capture_default_str();
  with_env(perf->add_flag("--compile", perf_cmd.compile_first,
                          "search array shapes and tile orders first, then report"));
  with_env(perf->add_option("--pe-budget", perf_cmd.pe_budget, "PE budget for --compile"))
      ->capture_default_str();
  with_env(perf->add_option("--csv", perf_cmd.csv_path, "also write the report csv here"));
  perf->callback([&perf_cmd] { perf_cmd.run(); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const syhd::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 5;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
