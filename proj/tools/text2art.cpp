// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// text2art: build vocabularies, train joint text/image models, evaluate
// and query them.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "text2art/corpus.hpp"
#include "text2art/evaluation.hpp"
#include "text2art/models.hpp"
#include "text2art/pipeline.hpp"
#include "text2art/synthetic.hpp"
#include "text2art/text_encoding.hpp"
#include "text2art/visual_features.hpp"

namespace fs = std::filesystem;
using namespace text2art;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Configuration problems collected so they can be reported together.
class ConfigErrors : public std::runtime_error {
 public:
  explicit ConfigErrors(std::vector<std::string> problems)
      : std::runtime_error("invalid configuration"), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct Options {
  std::string metadata;
  std::string features;
  std::string splits;
  std::string vocab;
  std::string checkpoint;
  std::string out = ".";
  std::uint64_t seed = 0;

  // vocabulary
  std::optional<std::size_t> vocab_cap;
  std::uint64_t min_count = 10;

  // model / training
  std::string model = "cml";
  std::string arch = "bow";
  std::string attribute = "type";
  std::size_t dim = 128;
  double margin = 0.1;
  double alpha = 0.01;
  double lr = 1e-4;
  std::size_t batch = 32;
  std::size_t epochs = 100;
  std::size_t negatives = 1;
  std::size_t patience = 20;
  std::size_t mlp_dim = 128;
  double ridge = 1e-4;

  // evaluation / retrieval
  std::string split = "test";
  std::string pool;
  std::size_t pool_queries = 100;
  bool random = false;
  std::size_t trials = 1000;
  std::size_t random_n = 0;
  std::string query;
  std::string title;
  std::string image;
  std::size_t k = 10;

  // split / synth
  double train_fraction = 0.9;
  double val_fraction = 0.05;
  double test_fraction = 0.05;
  std::size_t samples = 256;
  std::size_t classes = 8;
  std::size_t image_dim = 256;
};

fs::path vocab_dir(const Options& o) { return o.vocab.empty() ? fs::path(o.splits) : fs::path(o.vocab); }

void require_file(std::vector<std::string>& problems, const std::string& flag, const fs::path& p) {
  if (p.empty())
    problems.push_back(flag + " is required");
  else if (!fs::exists(p))
    problems.push_back(flag + ": no such file: " + p.string());
}

void throw_if(std::vector<std::string>& problems) {
  if (!problems.empty()) throw ConfigErrors(std::move(problems));
}

Corpus load_corpus(const Options& o) {
  auto parsed = load_metadata(o.metadata);
  if (!parsed.rejected.empty()) {
    std::cerr << "metadata: rejected " << parsed.rejected.size() << " row(s)";
    const auto& first = parsed.rejected.front();
    std::cerr << " (first: row " << first.row << ", " << first.reason << ")\n";
  }
  return std::move(parsed.corpus);
}

Corpus load_split(const Corpus& all, const Options& o, Split which) {
  const fs::path p = fs::path(o.splits) / (std::string(split_name(which)) + ".txt");
  return select_by_ids(all, parse_split_manifest(io::read_file(p)), which);
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw ConfigErrors({"--split must be train, val or test"});
}

TextVocabularies load_vocabs(const Options& o) {
  return {load_vocabulary(vocab_dir(o) / "comment_vocab.tsv"),
          load_vocabulary(vocab_dir(o) / "title_vocab.tsv")};
}

void check_data_inputs(std::vector<std::string>& problems, const Options& o,
                       std::initializer_list<Split> splits, bool need_vocab) {
  require_file(problems, "--metadata", o.metadata);
  require_file(problems, "--features", o.features);
  if (o.splits.empty()) {
    problems.push_back("--splits is required");
  } else {
    for (auto s : splits)
      require_file(problems, "--splits", fs::path(o.splits) / (std::string(split_name(s)) + ".txt"));
  }
  if (need_vocab && !vocab_dir(o).empty()) {
    require_file(problems, "--vocab", vocab_dir(o) / "comment_vocab.tsv");
    require_file(problems, "--vocab", vocab_dir(o) / "title_vocab.tsv");
  }
}

// --- commands ---------------------------------------------------------------

int cmd_synth(const Options& o) {
  SyntheticConfig cfg;
  cfg.n_samples = o.samples;
  cfg.n_classes = o.classes;
  cfg.image_dim = o.image_dim;
  cfg.seed = o.seed;
  auto syn = make_synthetic_corpus(cfg);
  fs::create_directories(o.out);
  io::write_file(fs::path(o.out) / "metadata.csv", serialize_metadata(syn.corpus));
  save_feature_file(fs::path(o.out) / "features.semf", syn.features);
  std::cout << "wrote " << syn.corpus.size() << " samples to " << o.out << "\n";
  return 0;
}

int cmd_split(const Options& o) {
  std::vector<std::string> problems;
  require_file(problems, "--metadata", o.metadata);
  throw_if(problems);
  auto parts = split_corpus(load_corpus(o), o.seed,
                            {o.train_fraction, o.val_fraction, o.test_fraction});
  fs::create_directories(o.out);
  for (const auto& part : parts) {
    io::write_file(fs::path(o.out) / (std::string(split_name(*part.split)) + ".txt"),
                   serialize_split_manifest(part));
    std::cout << split_name(*part.split) << ": " << part.size() << "\n";
  }
  return 0;
}

int cmd_build_vocab(const Options& o) {
  std::vector<std::string> problems;
  require_file(problems, "--metadata", o.metadata);
  if (o.splits.empty())
    problems.push_back("--splits is required");
  else
    require_file(problems, "--splits", fs::path(o.splits) / "train.txt");
  throw_if(problems);

  const Corpus train = load_split(load_corpus(o), o, Split::kTrain);
  const auto comment = build_comment_vocab(train, o.min_count, o.vocab_cap);
  const auto title = build_title_vocab(train);
  fs::create_directories(o.out);
  save_vocabulary(fs::path(o.out) / "comment_vocab.tsv", comment);
  save_vocabulary(fs::path(o.out) / "title_vocab.tsv", title);
  std::cout << "comment vocabulary: " << comment.size() << " terms\n"
            << "title vocabulary: " << title.size() << " terms\n";
  return 0;
}

void validate_train_config(std::vector<std::string>& problems, const Options& o) {
  if (o.model != "cca" && o.model != "cml" && o.model != "amd")
    problems.push_back("--model must be cca, cml or amd");
  if (o.arch != "bow" && o.arch != "mlp") problems.push_back("--arch must be bow or mlp");
  if (o.dim == 0) problems.push_back("--dim must be positive");
  if (o.margin < 0 || o.margin >= 1) problems.push_back("--margin must lie in [0, 1)");
  if (o.alpha < 0 || o.alpha >= 0.5) problems.push_back("--alpha must lie in [0, 0.5)");
  if (o.lr < 0) problems.push_back("--lr must be non-negative");
  if (o.batch < 2) problems.push_back("--batch must be at least 2");
  if (o.epochs == 0) problems.push_back("--epochs must be positive");
  if (o.negatives == 0) problems.push_back("--negatives must be positive");
  if (o.ridge < 0) problems.push_back("--ridge must be non-negative");
  if (o.model == "amd") {
    try {
      parse_attribute(o.attribute);
    } catch (const ArgumentError& e) {
      problems.push_back(std::string("--attribute: ") + e.what());
    }
  }
}

int cmd_train(const Options& o) {
  std::vector<std::string> problems;
  check_data_inputs(problems, o, {Split::kTrain, Split::kVal}, true);
  validate_train_config(problems, o);
  throw_if(problems);

  const Corpus all = load_corpus(o);
  const Corpus train = load_split(all, o, Split::kTrain);
  const Corpus val = load_split(all, o, Split::kVal);
  const auto vocabs = load_vocabs(o);
  const auto features = load_feature_file(o.features);

  std::optional<LabelMap> labels;
  if (o.model == "amd") labels = build_label_maps(train, parse_attribute(o.attribute));
  const auto enc_train = encode_corpus(train, vocabs, features, labels ? &*labels : nullptr);
  const auto enc_val = encode_corpus(val, vocabs, features, labels ? &*labels : nullptr);

  TrainConfig tc;
  tc.batch_size = o.batch;
  tc.lr = o.lr;
  tc.epochs = o.epochs;
  tc.seed = o.seed;
  tc.negatives_per_positive = o.negatives;
  tc.patience = o.patience;
  CmlConfig cc{o.dim, o.margin, parse_arch(o.arch), o.mlp_dim};

  std::optional<JointModel> model;
  std::vector<EpochRecord> history;
  if (o.model == "cca") {
    const auto n = static_cast<Eigen::Index>(enc_train.size());
    Matrix X(n, static_cast<Eigen::Index>(enc_train.image_dim()));
    Matrix Y(n, static_cast<Eigen::Index>(enc_train.text_dim()));
    for (Eigen::Index i = 0; i < n; ++i) {
      X.row(i) = enc_train.pairs[static_cast<std::size_t>(i)].image.transpose();
      Y.row(i) = enc_train.pairs[static_cast<std::size_t>(i)].text.transpose();
    }
    model = fit_cca(X, Y, o.dim, o.ridge);
  } else if (o.model == "cml") {
    auto res = train_cml(enc_train, enc_val, tc, cc);
    std::cout << "best epoch " << res.best_epoch << " of " << res.history.size() << "\n";
    history = std::move(res.history);
    model = std::move(res.model);
  } else {
    auto res = train_amd(enc_train, enc_val, tc, AmdConfig{cc, o.alpha}, labels->attribute(),
                         labels->values());
    auto acc = classifier_accuracy(res.model, enc_train);
    std::cout << "best epoch " << res.best_epoch << " of " << res.history.size()
              << "; train classifier accuracy text " << acc.text << ", image " << acc.vis << "\n";
    history = std::move(res.history);
    model = std::move(res.model);
  }

  fs::create_directories(o.out);
  save_checkpoint(fs::path(o.out) / "model.bin", *model);
  io::write_file(fs::path(o.out) / "history.csv", history_csv(history));
  std::cout << "wrote " << (fs::path(o.out) / "model.bin").string() << "\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  PoolLevel level = PoolLevel::kEasy;
  std::vector<std::string> problems;
  if (!o.pool.empty()) {
    if (o.pool == "easy")
      level = PoolLevel::kEasy;
    else if (o.pool == "difficult")
      level = PoolLevel::kDifficult;
    else
      problems.push_back("--pool must be easy or difficult");
  }
  fs::create_directories(o.out);

  if (o.random) {
    std::size_t n = o.random_n;
    if (n == 0) {
      // Size the baseline after the chosen split when data is given.
      if (o.metadata.empty() || o.splits.empty())
        problems.push_back("--random needs --n or --metadata and --splits");
      throw_if(problems);
      n = load_split(load_corpus(o), o, parse_split(o.split)).size();
    }
    throw_if(problems);
    auto rep = random_baseline(n, o.trials, o.seed);
    io::write_file(fs::path(o.out) / "report.csv", report_csv(rep));
    std::cout << report_table(rep, "Random");
    return 0;
  }

  const Split which = parse_split(o.split);
  check_data_inputs(problems, o, {which}, true);
  require_file(problems, "--checkpoint", o.checkpoint);
  throw_if(problems);

  const Corpus all = load_corpus(o);
  const Corpus test = load_split(all, o, which);
  const auto vocabs = load_vocabs(o);
  const auto features = load_feature_file(o.features);
  const JointModel model = load_checkpoint(o.checkpoint);
  const auto enc = encode_corpus(test, vocabs, features);
  const auto rep = evaluate_model(model, enc);
  io::write_file(fs::path(o.out) / "report.csv", report_csv(rep));
  std::cout << report_table(rep, std::string(model_kind(model)));

  if (!o.pool.empty()) {
    PoolTask task{level, 10, o.pool_queries, o.seed};
    auto pool = pool_eval(model, test, enc, task);
    std::ostringstream csv;
    csv << "level,type,correct,total,accuracy\n";
    csv << pool_level_name(level) << ",all," << pool.correct << ',' << pool.answered << ','
        << pool.accuracy() << '\n';
    for (const auto& [type, st] : pool.per_type)
      csv << pool_level_name(level) << ',' << csv::quote(type) << ',' << st.correct << ','
          << st.total << ',' << st.accuracy() << '\n';
    io::write_file(fs::path(o.out) / "pool.csv", csv.str());
    std::cout << "pool (" << pool_level_name(level) << ", seed " << pool.seed
              << "): accuracy " << std::fixed << std::setprecision(3) << pool.accuracy() << " over "
              << pool.answered << " queries";
    if (pool.skipped) std::cout << ", " << pool.skipped << " skipped";
    std::cout << "\n";
    for (const auto& [type, st] : pool.per_type)
      std::cout << "  " << std::left << std::setw(16) << type << st.accuracy() << " (" << st.total
                << ")\n";
    for (const auto& d : pool.diagnostics) std::cerr << "pool: " << d << "\n";
  }
  return 0;
}

int cmd_retrieve(const Options& o) {
  std::vector<std::string> problems;
  const bool text_query = !o.query.empty();
  const bool image_query = !o.image.empty();
  if (text_query == image_query) problems.push_back("give exactly one of a non-empty --query or --image");
  if (o.k == 0) problems.push_back("--k must be positive");
  const Split which = parse_split(o.split);
  check_data_inputs(problems, o, {which}, true);
  require_file(problems, "--checkpoint", o.checkpoint);
  throw_if(problems);

  const Corpus all = load_corpus(o);
  const Corpus gallery = load_split(all, o, which);
  const auto vocabs = load_vocabs(o);
  const auto features = load_feature_file(o.features);
  const JointModel model = load_checkpoint(o.checkpoint);
  const auto enc = encode_corpus(gallery, vocabs, features);
  auto [text_rows, vis_rows] = project_all(model, enc);

  Projection q;
  if (text_query) {
    auto t = encode_text(vocabs, o.query, o.title);
    if (t.is_zero())
      std::cerr << "warning: query has no in-vocabulary terms; it encodes to the zero vector and "
                   "every gallery item is scored against the model's response to empty text\n";
    q = embed_text(model, to_vector(t));
  } else {
    const auto* f = features.find(o.image);
    if (!f) throw ConfigErrors({"--image: no feature vector for '" + o.image + "'"});
    q = embed_image(model, to_vector(*f));
  }
  if (q.degenerate) std::cerr << "warning: query projection is degenerate (zero vector)\n";

  const auto hits = top_k(q.values, text_query ? vis_rows : text_rows, enc.ids, o.k);
  std::cout << "id,score\n";
  for (const auto& h : hits) std::cout << h.id << ',' << std::setprecision(6) << h.score << '\n';
  return 0;
}

void add_data_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--metadata", o.metadata, "Metadata CSV");
  cmd->add_option("--features", o.features, "SEMF feature file");
  cmd->add_option("--splits", o.splits, "Directory holding train.txt, val.txt, test.txt");
  cmd->add_option("--vocab", o.vocab, "Directory holding the vocabulary files (default: --splits)");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--out", o.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"text2art: cross-modal art retrieval"};
  app.set_config("--config", "", "TOML/INI config file; flags take precedence");
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and its features");
  synth->add_option("--out", o.out, "Output directory");
  synth->add_option("--samples", o.samples, "Number of samples");
  synth->add_option("--classes", o.classes, "Number of latent classes");
  synth->add_option("--image-dim", o.image_dim, "Feature dimension");
  synth->add_option("--seed", o.seed, "Random seed");

  auto* split = app.add_subcommand("split", "Write train/val/test manifests");
  split->add_option("--metadata", o.metadata, "Metadata CSV");
  split->add_option("--train", o.train_fraction, "Train fraction");
  split->add_option("--val", o.val_fraction, "Validation fraction");
  split->add_option("--test", o.test_fraction, "Test fraction");
  split->add_option("--seed", o.seed, "Random seed");
  split->add_option("--out", o.out, "Output directory");

  auto* vocab = app.add_subcommand("build-vocab", "Build comment and title vocabularies");
  vocab->add_option("--metadata", o.metadata, "Metadata CSV");
  vocab->add_option("--splits", o.splits, "Directory holding train.txt");
  vocab->add_option("--vocab-cap", o.vocab_cap, "Keep only the N most frequent comment terms");
  vocab->add_option("--min-count", o.min_count, "Minimum comment document frequency");
  vocab->add_option("--out", o.out, "Output directory");

  auto* train = app.add_subcommand("train", "Train a joint model");
  add_data_flags(train, o);
  train->add_option("--model", o.model, "cca, cml or amd");
  train->add_option("--arch", o.arch, "Text tower: bow or mlp");
  train->add_option("--attribute", o.attribute, "AMD attribute: type, school, timeframe, author");
  train->add_option("--dim", o.dim, "Joint space dimension");
  train->add_option("--margin", o.margin, "Cosine margin");
  train->add_option("--alpha", o.alpha, "AMD classifier weight");
  train->add_option("--lr", o.lr, "Adam learning rate");
  train->add_option("--batch", o.batch, "Mini-batch size");
  train->add_option("--epochs", o.epochs, "Maximum epochs");
  train->add_option("--negatives", o.negatives, "Negatives per positive");
  train->add_option("--patience", o.patience, "Early-stopping patience (0 disables)");
  train->add_option("--mlp-dim", o.mlp_dim, "Width of the MLP comment/title encoders");
  train->add_option("--ridge", o.ridge, "CCA covariance ridge");

  auto* eval = app.add_subcommand("evaluate", "Retrieval metrics and pool task");
  add_data_flags(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  eval->add_option("--split", o.split, "Split to evaluate on");
  eval->add_option("--pool", o.pool, "Also run the 10-image pool task: easy or difficult");
  eval->add_option("--pool-queries", o.pool_queries, "Pool task queries");
  eval->add_flag("--random", o.random, "Uniform-random baseline; no checkpoint needed");
  eval->add_option("--trials", o.trials, "Random baseline trials");
  eval->add_option("--n", o.random_n, "Random baseline size (default: size of --split)");

  auto* retrieve = app.add_subcommand("retrieve", "Rank a gallery split for one query");
  add_data_flags(retrieve, o);
  retrieve->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  retrieve->add_option("--split", o.split, "Gallery split");
  retrieve->add_option("--query", o.query, "Free-text query (comment)");
  retrieve->add_option("--title", o.title, "Optional title for a text query");
  retrieve->add_option("--image", o.image, "Image query by sample id");
  retrieve->add_option("--k", o.k, "Number of results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*split) return cmd_split(o);
    if (*vocab) return cmd_build_vocab(o);
    if (*train) return cmd_train(o);
    if (*eval) return cmd_evaluate(o);
    if (*retrieve) return cmd_retrieve(o);
  } catch (const ConfigErrors& e) {
    for (const auto& p : e.problems()) std::cerr << "error: " << p << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
