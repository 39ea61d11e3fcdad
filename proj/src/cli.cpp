#include "atclab/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace atclab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) {
    throw IoError("cannot open " + path);
  }
  f << text;
  if (!f) {
    throw IoError("write failed for " + path);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig ec;
  try {
    ec.seed = j.value("seed", ec.seed);
    ec.out = j.value("out", ec.out);
    if (j.contains("data")) {
      const json& d = j["data"];
      ec.data.num_classes = d.value("classes", ec.data.num_classes);
      ec.data.per_class = d.value("per_class", ec.data.per_class);
      ec.data.dim = d.value("dim", ec.data.dim);
      ec.data.spread = d.value("spread", ec.data.spread);
      ec.data_path = d.value("path", ec.data_path);
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      ec.train.loss_kind =
          loss_kind_from_string(t.value("loss", to_string(ec.train.loss_kind)));
      ec.train.margin = t.value("margin", ec.train.margin);
      ec.train.lambda = t.value("lambda", ec.train.lambda);
      ec.train.lr_net = t.value("lr_net", ec.train.lr_net);
      ec.train.lr_center = t.value("lr_center", ec.train.lr_center);
      ec.train.momentum = t.value("momentum", ec.train.momentum);
      ec.train.weight_decay = t.value("weight_decay", ec.train.weight_decay);
      ec.train.batch_size = t.value("batch_size", ec.train.batch_size);
      ec.train.epochs = t.value("epochs", ec.train.epochs);
      ec.train.lr_drop_epoch = t.value("lr_drop_epoch", ec.train.lr_drop_epoch);
      ec.train.lr_drop_factor =
          t.value("lr_drop_factor", ec.train.lr_drop_factor);
      ec.train.hidden_dim = t.value("hidden_dim", ec.train.hidden_dim);
      ec.train.embed_dim = t.value("embed_dim", ec.train.embed_dim);
      ec.train.eval_every = t.value("eval_every", ec.train.eval_every);
    }
    if (j.contains("eval")) {
      const json& e = j["eval"];
      ec.hist_bins = e.value("bins", ec.hist_bins);
      ec.f_cutoff = e.value("f_cutoff", ec.f_cutoff);
    }
    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      ec.sweep_axis = s.value("axis", ec.sweep_axis);
      ec.sweep_values =
          s.value("values", std::vector<double>(ec.sweep_values));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  return ec;
}

std::string config_to_json_text(const ExperimentConfig& ec) {
  json j;
  j["seed"] = ec.seed;
  j["out"] = ec.out;
  j["data"] = {{"classes", ec.data.num_classes},
               {"per_class", ec.data.per_class},
               {"dim", ec.data.dim},
               {"spread", ec.data.spread},
               {"path", ec.data_path}};
  j["train"] = {{"loss", to_string(ec.train.loss_kind)},
                {"margin", ec.train.margin},
                {"lambda", ec.train.lambda},
                {"lr_net", ec.train.lr_net},
                {"lr_center", ec.train.lr_center},
                {"momentum", ec.train.momentum},
                {"weight_decay", ec.train.weight_decay},
                {"batch_size", ec.train.batch_size},
                {"epochs", ec.train.epochs},
                {"lr_drop_epoch", ec.train.lr_drop_epoch},
                {"lr_drop_factor", ec.train.lr_drop_factor},
                {"hidden_dim", ec.train.hidden_dim},
                {"embed_dim", ec.train.embed_dim},
                {"eval_every", ec.train.eval_every}};
  j["eval"] = {{"bins", ec.hist_bins}, {"f_cutoff", ec.f_cutoff}};
  j["sweep"] = {{"axis", ec.sweep_axis}, {"values", ec.sweep_values}};
  return j.dump(2) + "\n";
}

void validate(const ExperimentConfig& ec) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (ec.out.empty()) fail("out: must not be empty");
  if (ec.data.num_classes < 2) fail("data.classes: must be >= 2");
  if (ec.data.per_class < 2) fail("data.per_class: must be >= 2");
  if (ec.data.dim < 2) fail("data.dim: must be >= 2");
  if (!(ec.data.spread > 0.0)) fail("data.spread: must be > 0");
  const TrainConfig& t = ec.train;
  if (t.lr_net < 0.0) fail("train.lr_net: must be >= 0");
  if (t.lr_center < 0.0) fail("train.lr_center: must be >= 0");
  if (t.momentum < 0.0) fail("train.momentum: must be >= 0");
  if (t.weight_decay < 0.0) fail("train.weight_decay: must be >= 0");
  if (t.batch_size < 2) fail("train.batch_size: must be >= 2");
  if (t.epochs < 0) fail("train.epochs: must be >= 0");
  if (!(t.lr_drop_factor > 0.0 && t.lr_drop_factor <= 1.0)) {
    fail("train.lr_drop_factor: must be in (0, 1]");
  }
  if (t.margin < 0.0) fail("train.margin: must be >= 0");
  if (uses_normalized_bank(t.loss_kind) && t.margin >= 3.141592653589793) {
    fail("train.margin: angular margin must be < pi");
  }
  if (t.lambda < 0.0) fail("train.lambda: must be >= 0");
  if (t.hidden_dim < 1) fail("train.hidden_dim: must be >= 1");
  if (t.embed_dim < 2) fail("train.embed_dim: must be >= 2");
  if (t.eval_every < 0) fail("train.eval_every: must be >= 0");
  if (ec.hist_bins < 1) fail("eval.bins: must be >= 1");
  if (ec.f_cutoff < 0) fail("eval.f_cutoff: must be >= 0");
  if (!ec.sweep_axis.empty() && ec.sweep_axis != "margin" &&
      ec.sweep_axis != "lambda") {
    fail("sweep.axis: must be 'margin' or 'lambda'");
  }
}

namespace {

Dataset matrix_as_dataset(const std::vector<double>& data, int rows, int cols) {
  Dataset ds;
  ds.dim = cols;
  ds.samples.resize(rows);
  for (int r = 0; r < rows; ++r) {
    ds.samples[r].label = r + 1;
    ds.samples[r].x.assign(data.begin() + static_cast<std::ptrdiff_t>(r) * cols,
                           data.begin() + static_cast<std::ptrdiff_t>(r + 1) * cols);
  }
  return ds;
}

std::vector<double> dataset_as_matrix(const Dataset& ds, int rows, int cols,
                                      const std::string& what) {
  if (ds.dim != cols || ds.size() != rows) {
    throw IoError("checkpoint tensor " + what + ": expected " +
                  std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                  std::to_string(ds.size()) + "x" + std::to_string(ds.dim));
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& s : ds.samples) {
    out.insert(out.end(), s.x.begin(), s.x.end());
  }
  return out;
}

}  // namespace

void save_checkpoint(const std::string& dir, const EmbeddingModel& model,
                     const CenterBank& bank) {
  const auto params = model.params();
  const auto& names = EmbeddingModel::param_names();
  const int rows[] = {model.hidden_dim, 1, model.embed_dim,
                      1, model.num_classes, 1};
  const int cols[] = {model.in_dim, model.hidden_dim, model.hidden_dim,
                      model.embed_dim, model.embed_dim, model.num_classes};
  for (std::size_t p = 0; p < params.size(); ++p) {
    write_dataset(dir + "/model_" + names[p] + ".txt",
                  matrix_as_dataset(*params[p], rows[p], cols[p]));
  }
  Dataset centers;
  centers.dim = bank.dim;
  for (int j = 1; j <= bank.num_classes(); ++j) {
    centers.samples.push_back({j, bank.center(j)});
  }
  write_dataset(dir + "/centers.txt", centers);
}

Checkpoint load_checkpoint(const std::string& dir, const ExperimentConfig& ec) {
  Checkpoint ck;
  EmbeddingModel& m = ck.model;
  m.in_dim = ec.data.dim;
  m.hidden_dim = ec.train.hidden_dim;
  m.embed_dim = ec.train.embed_dim;
  m.num_classes = ec.data.num_classes;
  const auto params = m.params();
  const auto& names = EmbeddingModel::param_names();
  const int rows[] = {m.hidden_dim, 1, m.embed_dim, 1, m.num_classes, 1};
  const int cols[] = {m.in_dim, m.hidden_dim, m.hidden_dim,
                      m.embed_dim, m.embed_dim, m.num_classes};
  for (std::size_t p = 0; p < params.size(); ++p) {
    *params[p] = dataset_as_matrix(
        read_dataset(dir + "/model_" + names[p] + ".txt"), rows[p], cols[p],
        names[p]);
  }
  const Dataset centers = read_dataset(dir + "/centers.txt");
  if (centers.dim != m.embed_dim || centers.size() != m.num_classes) {
    throw IoError("checkpoint centers: shape mismatch");
  }
  ck.bank.dim = centers.dim;
  ck.bank.centers.assign(m.num_classes, Vec(centers.dim, 0.0));
  std::vector<bool> seen(m.num_classes, false);
  for (const auto& s : centers.samples) {
    if (s.label < 1 || s.label > m.num_classes || seen[s.label - 1]) {
      throw IoError("checkpoint centers: bad class label " +
                    std::to_string(s.label));
    }
    seen[s.label - 1] = true;
    ck.bank.center(s.label) = s.x;
  }
  return ck;
}

namespace {

SplitDataset load_data(const ExperimentConfig& ec) {
  if (!ec.data_path.empty()) {
    SplitDataset ds;
    ds.train = read_dataset(ec.data_path + "/train.txt");
    ds.val = read_dataset(ec.data_path + "/val.txt");
    ds.test = read_dataset(ec.data_path + "/test.txt");
    ds.num_classes = std::max({ds.train.num_classes(), ds.val.num_classes(),
                               ds.test.num_classes()});
    if (ds.train.dim != ds.val.dim || ds.train.dim != ds.test.dim) {
      throw ConfigError("dataset splits disagree on dimension");
    }
    return ds;
  }
  return generate(ec.data);
}

void write_manifest(const ExperimentConfig& ec) {
  write_text(ec.out + "/manifest.json", config_to_json_text(ec));
}

void write_history_csv(const std::string& path,
                       const std::vector<EpochStats>& history) {
  std::string text = "epoch,loss,lr,map\n";
  for (const auto& s : history) {
    text += std::to_string(s.epoch) + "," + fmt(s.loss) + "," + fmt(s.lr) + ",";
    if (s.has_val_map) {
      text += fmt(s.val_map);
    }
    text += "\n";
  }
  write_text(path, text);
}

void write_report(const std::string& dir, const RetrievalReport& report) {
  std::string csv = "metric,value\n";
  csv += "map," + fmt(report.map) + "\n";
  csv += "auc," + fmt(report.auc) + "\n";
  csv += "f_measure_micro," + fmt(report.f_measure_micro) + "\n";
  csv += "f_measure_macro," + fmt(report.f_measure_macro) + "\n";
  csv += "ndcg_micro," + fmt(report.ndcg_micro) + "\n";
  csv += "ndcg_macro," + fmt(report.ndcg_macro) + "\n";
  write_text(dir + "/report.csv", csv);

  json j;
  j["map"] = report.map;
  j["auc"] = report.auc;
  j["f_measure_micro"] = report.f_measure_micro;
  j["f_measure_macro"] = report.f_measure_macro;
  j["ndcg_micro"] = report.ndcg_micro;
  j["ndcg_macro"] = report.ndcg_macro;
  j["per_query_ap"] = report.per_query_ap;
  write_text(dir + "/report.json", j.dump(2) + "\n");
}

void cmd_gen(const ExperimentConfig& ec) {
  const SplitDataset ds = load_data(ec);
  write_dataset(ec.out + "/train.txt", ds.train);
  write_dataset(ec.out + "/val.txt", ds.val);
  write_dataset(ec.out + "/test.txt", ds.test);
  std::cout << "wrote " << ds.train.size() << "/" << ds.val.size() << "/"
            << ds.test.size() << " train/val/test samples to " << ec.out
            << "\n";
}

void cmd_train(const ExperimentConfig& ec) {
  const SplitDataset ds = load_data(ec);
  const TrainResult result = train(ds.train, ds.val, ds.num_classes, ec.train);
  for (const auto& s : result.history) {
    std::cout << "epoch " << s.epoch << " loss " << fmt(s.loss) << " lr "
              << fmt(s.lr);
    if (s.has_val_map) {
      std::cout << " val_map " << fmt(s.val_map);
    }
    std::cout << "\n";
  }
  write_history_csv(ec.out + "/history.csv", result.history);
  save_checkpoint(ec.out, result.model, result.bank);
  std::cout << "wrote checkpoint and history to " << ec.out << "\n";
}

void cmd_eval(const ExperimentConfig& ec) {
  const SplitDataset ds = load_data(ec);
  const Checkpoint ck = load_checkpoint(ec.out, ec);
  const EmbeddingSet test = embed_dataset(ck.model, ds.test);
  const RetrievalReport report =
      evaluate_retrieval(test, test, true, ec.f_cutoff);
  write_report(ec.out, report);
  std::cout << "map " << fmt(report.map) << " auc " << fmt(report.auc) << "\n";
  std::cout << "wrote report to " << ec.out << "\n";
}

void cmd_hist(const ExperimentConfig& ec) {
  const SplitDataset ds = load_data(ec);
  const Checkpoint ck = load_checkpoint(ec.out, ec);
  const EmbeddingSet test = embed_dataset(ck.model, ds.test);
  const HistogramReport hist = cosine_histograms(test, ec.hist_bins);
  std::string csv = "bin_lo,bin_hi,intra_count,inter_count\n";
  for (std::size_t b = 0; b + 1 < hist.bin_edges.size(); ++b) {
    csv += fmt(hist.bin_edges[b]) + "," + fmt(hist.bin_edges[b + 1]) + "," +
           std::to_string(hist.intra_counts[b]) + "," +
           std::to_string(hist.inter_counts[b]) + "\n";
  }
  write_text(ec.out + "/hist.csv", csv);
  json j;
  j["bin_edges"] = hist.bin_edges;
  j["intra_counts"] = hist.intra_counts;
  j["inter_counts"] = hist.inter_counts;
  write_text(ec.out + "/hist.json", j.dump(2) + "\n");
  std::cout << "wrote histograms to " << ec.out << "\n";
}

void cmd_sweep(const ExperimentConfig& ec) {
  if (ec.sweep_axis.empty() || ec.sweep_values.empty()) {
    throw ConfigError("sweep: need --axis and --values (or a sweep config section)");
  }
  const SplitDataset ds = load_data(ec);
  std::string csv = "value," + std::string("map,auc\n");
  for (const double v : ec.sweep_values) {
    ExperimentConfig point = ec;
    if (ec.sweep_axis == "margin") {
      point.train.margin = v;
    } else {
      point.train.lambda = v;
    }
    validate(point);
    const TrainResult result =
        train(ds.train, ds.val, ds.num_classes, point.train);
    const EmbeddingSet test = embed_dataset(result.model, ds.test);
    const RetrievalReport report =
        evaluate_retrieval(test, test, true, ec.f_cutoff);
    std::cout << ec.sweep_axis << " " << fmt(v) << " map " << fmt(report.map)
              << " auc " << fmt(report.auc) << "\n";
    csv += fmt(v) + "," + fmt(report.map) + "," + fmt(report.auc) + "\n";
  }
  write_text(ec.out + "/sweep.csv", csv);
  std::cout << "wrote sweep to " << ec.out << "\n";
}

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string loss;
  double margin = 0.0;
  double lambda = 0.0;
  int epochs = 0;
  CLI::Option* o_config = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_loss = nullptr;
  CLI::Option* o_margin = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_epochs = nullptr;

  void attach(CLI::App* sub) {
    o_config = sub->add_option("--config", config, "JSON config file");
    o_seed = sub->add_option("--seed", seed, "RNG seed for data, model and centers");
    o_out = sub->add_option("--out", out, "output directory");
    o_loss = sub->add_option(
        "--loss", loss,
        "atcl | atcl+softmax | cosine_tcl | euclidean_tcl | softmax | "
        "center+softmax | triplet");
    o_margin = sub->add_option("--margin", margin, "metric margin");
    o_lambda = sub->add_option("--lambda", lambda, "metric-loss weight");
    o_epochs = sub->add_option("--epochs", epochs, "training epochs");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig ec;
    if (o_config->count() > 0) {
      ec = config_from_json_text(read_text(config));
    }
    if (o_seed->count() > 0) ec.seed = seed;
    if (o_out->count() > 0) ec.out = out;
    if (o_loss->count() > 0) ec.train.loss_kind = loss_kind_from_string(loss);
    if (o_margin->count() > 0) ec.train.margin = margin;
    if (o_lambda->count() > 0) ec.train.lambda = lambda;
    if (o_epochs->count() > 0) ec.train.epochs = epochs;
    ec.data.seed = ec.seed;
    ec.train.seed = ec.seed;
    return ec;
  }
};

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"metric-embedding lab: synthetic data, training, retrieval evaluation"};
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand("gen", "generate dataset files");
  CLI::App* trainc = app.add_subcommand("train", "train a model, write checkpoint and history");
  CLI::App* evalc = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  CLI::App* sweep = app.add_subcommand("sweep", "train/eval across margin or lambda values");
  CLI::App* hist = app.add_subcommand("hist", "intra/inter-class cosine-distance histograms");

  CommonFlags flags_gen, flags_train, flags_eval, flags_sweep, flags_hist;
  flags_gen.attach(gen);
  flags_train.attach(trainc);
  flags_eval.attach(evalc);
  flags_sweep.attach(sweep);
  flags_hist.attach(hist);

  std::string sweep_axis;
  std::vector<double> sweep_values;
  CLI::Option* o_axis =
      sweep->add_option("--axis", sweep_axis, "margin | lambda")
          ->check(CLI::IsMember({"margin", "lambda"}));
  CLI::Option* o_values =
      sweep->add_option("--values", sweep_values, "comma-separated values")
          ->delimiter(',');

  std::vector<std::string> argv_like = args;
  std::vector<char*> argv;
  std::string prog = "atclab";
  argv.push_back(prog.data());
  for (auto& a : argv_like) {
    argv.push_back(a.data());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const CommonFlags* flags = nullptr;
    if (app.got_subcommand(gen)) flags = &flags_gen;
    if (app.got_subcommand(trainc)) flags = &flags_train;
    if (app.got_subcommand(evalc)) flags = &flags_eval;
    if (app.got_subcommand(sweep)) flags = &flags_sweep;
    if (app.got_subcommand(hist)) flags = &flags_hist;

    ExperimentConfig ec = flags->resolve();
    if (o_axis->count() > 0) ec.sweep_axis = sweep_axis;
    if (o_values->count() > 0) ec.sweep_values = sweep_values;
    validate(ec);
    fs::create_directories(ec.out);
    write_manifest(ec);

    if (app.got_subcommand(gen)) cmd_gen(ec);
    if (app.got_subcommand(trainc)) cmd_train(ec);
    if (app.got_subcommand(evalc)) cmd_eval(ec);
    if (app.got_subcommand(sweep)) cmd_sweep(ec);
    if (app.got_subcommand(hist)) cmd_hist(ec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace atclab::cli
