// Copyright 2026 The bizsurv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bizsurv/pipeline/stages.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>

#include "bizsurv/attributes/attributes.hpp"
#include "bizsurv/common/hash.hpp"
#include "bizsurv/common/io.hpp"
#include "bizsurv/corpus/labels.hpp"
#include "bizsurv/corpus/snapshot.hpp"
#include "bizsurv/corpus/synth.hpp"
#include "bizsurv/explain/explain.hpp"
#include "bizsurv/geo/geo.hpp"
#include "bizsurv/learn/ablation.hpp"
#include "bizsurv/learn/dataset.hpp"
#include "bizsurv/learn/metrics.hpp"
#include "bizsurv/learn/smote.hpp"
#include "bizsurv/mobility/mobility.hpp"
#include "bizsurv/text/text.hpp"

namespace bizsurv::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<Stage, 8> kStages = {Stage::Synth, Stage::Ingest,   Stage::Label,  Stage::Features,
                                          Stage::Train, Stage::Evaluate, Stage::Ablate, Stage::Explain};

// Config as echoed into artifacts: the workdir is a location, not a parameter.
json echoed_config(const RunConfig& c) {
  json j = c.resolved;
  j["paths"].erase("workdir");
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

class StageContext {
 public:
  explicit StageContext(const RunConfig& config) : config_(config) {}

  fs::path path(const std::string& rel) const { return config_.workdir / rel; }

  void require(const std::string& rel) const {
    if (!fs::exists(path(rel))) throw MissingArtifactError(rel);
  }

  void input(const std::string& rel) { inputs_.push_back(rel); }
  void input_dir(const std::string& rel) {
    for (const auto& f : list_files(path(rel))) inputs_.push_back(rel + "/" + f);
  }
  void external_input(const fs::path& p) { external_.push_back(p); }

  void write(const std::string& rel, std::string_view content) {
    fs::create_directories(path(rel).parent_path());
    write_file_atomic(path(rel), content);
    outputs_.push_back(rel);
  }
  void produced(const std::string& rel) { outputs_.push_back(rel); }
  void produced_dir(const std::string& rel) {
    for (const auto& f : list_files(path(rel))) outputs_.push_back(rel + "/" + f);
  }

  json input_digests() const {
    json j = json::object();
    for (const auto& rel : inputs_) j[rel] = file_digest(path(rel));
    for (const auto& p : external_) j[p.string()] = file_digest(p);
    return j;
  }
  json output_digests() const {
    json j = json::object();
    for (const auto& rel : outputs_) j[rel] = file_digest(path(rel));
    return j;
  }
  const std::vector<std::string>& outputs() const { return outputs_; }

  static std::vector<std::string> list_files(const fs::path& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() != ".tmp") out.push_back(e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const RunConfig& config_;
  std::vector<std::string> inputs_;
  std::vector<fs::path> external_;
  std::vector<std::string> outputs_;
};

json load_manifest(const fs::path& workdir) {
  const fs::path p = workdir / artifact::kManifest;
  if (!fs::exists(p)) return json::object();
  try {
    auto j = json::parse(read_file(p));
    return j.is_object() ? j : json::object();
  } catch (const json::exception&) {
    return json::object();  // a damaged manifest only costs a rerun
  }
}

bool outputs_current(const fs::path& workdir, const json& recorded) {
  if (!recorded.is_object() || recorded.empty()) return false;
  for (const auto& [rel, digest] : recorded.items()) {
    const fs::path p = workdir / rel;
    if (!fs::exists(p) || file_digest(p) != digest.get<std::string>()) return false;
  }
  return true;
}

std::string label_family(const std::string& f) {
  if (f == "G") return artifact::kGeo;
  if (f == "U") return artifact::kMobility;
  if (f == "A") return artifact::kAttributes;
  if (f == "L") return artifact::kBow;
  throw ConfigError("features", "unknown feature family '" + f + "'");
}

std::vector<std::string> parse_families(const std::string& letters) {
  std::vector<std::string> out;
  std::set<char> seen;
  for (char ch : letters) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (c != 'G' && c != 'U' && c != 'A' && c != 'L') {
      throw ConfigError("features", "unknown feature family '" + std::string(1, ch) + "' (expected G, U, A, L)");
    }
    if (seen.insert(c).second) out.emplace_back(1, c);
  }
  if (out.empty()) throw ConfigError("features", "no feature family given");
  return out;
}

std::map<std::string, int> load_label_map(const fs::path& path) {
  std::map<std::string, int> out;
  for (const auto& l : corpus::read_labels_jsonl(path)) {
    out[l.business_id] = l.label == corpus::Survival::Survived ? 1 : 0;
  }
  return out;
}

fs::path observation_source(const RunConfig& c) {
  return c.observation_dir.empty() ? c.workdir / artifact::kObservationDir : c.observation_dir;
}
fs::path prediction_source(const RunConfig& c) {
  return c.prediction_dir.empty() ? c.workdir / artifact::kPredictionDir : c.prediction_dir;
}

// ---- stage bodies -------------------------------------------------------------

void run_synth(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  auto corpus = corpus::generate_synthetic_corpus(c.synth, c.stage_seed("synth"));
  corpus::write_snapshot(corpus.observation, ctx.path(artifact::kObservationDir));
  corpus::write_snapshot(corpus.prediction, ctx.path(artifact::kPredictionDir));
  ctx.produced_dir(artifact::kObservationDir);
  ctx.produced_dir(artifact::kPredictionDir);
  std::string truth;
  for (const auto& t : corpus.truth) {
    ordered_json j;
    j["business_id"] = t.business_id;
    j["open_at_observation"] = t.open_at_observation;
    j["planted_score"] = t.score;
    j["survival_probability"] = t.survival_probability;
    j["survived"] = t.survived;
    truth += j.dump() + "\n";
  }
  ctx.write(artifact::kSynthTruth, truth);
  out.messages.push_back("synthesized " + std::to_string(corpus.truth.size()) + " restaurants; planted oracle AUC " +
                         format_double(corpus::planted_oracle_auc(corpus.truth)));
}

void run_ingest(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  const fs::path obs = observation_source(c), pred = prediction_source(c);
  for (const auto& dir : {obs, pred}) {
    if (!fs::exists(dir / "business.json")) {
      const bool in_workdir = (c.observation_dir.empty() && dir == obs) || (c.prediction_dir.empty() && dir == pred);
      throw MissingArtifactError(in_workdir ? fs::relative(dir, c.workdir).string() + "/business.json"
                                            : (dir / "business.json").string());
    }
    for (const auto& f : StageContext::list_files(dir)) ctx.external_input(dir / f);
  }
  auto o = corpus::parse_snapshot(obs, c.observation_end);
  auto p = corpus::parse_snapshot(pred, c.prediction_end);
  corpus::write_snapshot(o.snapshot, ctx.path(artifact::kCorpusObservation));
  corpus::write_snapshot(p.snapshot, ctx.path(artifact::kCorpusPrediction));
  ctx.produced_dir(artifact::kCorpusObservation);
  ctx.produced_dir(artifact::kCorpusPrediction);
  ordered_json report;
  report["observation"] = o.report.to_json();
  report["prediction"] = p.report.to_json();
  report["config"] = echoed_config(c);
  ctx.write(artifact::kIngestReport, dump(report));
  out.messages.push_back("observation snapshot: " + std::to_string(o.snapshot.businesses().size()) +
                         " businesses, " + std::to_string(o.snapshot.reviews().size()) + " reviews");
}

corpus::Snapshot load_corpus(StageContext& ctx, const char* rel, Date as_of) {
  ctx.require(std::string(rel) + "/business.json");
  ctx.input_dir(rel);
  return corpus::parse_snapshot(ctx.path(rel), as_of).snapshot;
}

void run_label(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  ctx.require(std::string(artifact::kCorpusObservation) + "/business.json");
  ctx.require(std::string(artifact::kCorpusPrediction) + "/business.json");
  auto obs = load_corpus(ctx, artifact::kCorpusObservation, c.observation_end);
  auto pred = load_corpus(ctx, artifact::kCorpusPrediction, c.prediction_end);
  auto labeling = corpus::derive_labels(obs, pred);
  corpus::write_labels_jsonl(labeling.labels, ctx.path(artifact::kLabels));
  ctx.produced(artifact::kLabels);
  ordered_json report = labeling.report.to_json();
  report["config"] = echoed_config(c);
  ctx.write(artifact::kLabelReport, dump(report));
  out.messages.push_back(std::to_string(labeling.report.considered) + " restaurants labeled: " +
                         std::to_string(labeling.report.survived) + " survived, " +
                         std::to_string(labeling.report.dead) + " dead");
}

void run_features(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  ctx.require(std::string(artifact::kCorpusObservation) + "/business.json");
  ctx.require(artifact::kLabels);
  ctx.input(artifact::kLabels);
  auto obs = load_corpus(ctx, artifact::kCorpusObservation, c.observation_end);
  std::vector<std::string> ids;
  for (const auto& l : corpus::read_labels_jsonl(ctx.path(artifact::kLabels))) ids.push_back(l.business_id);

  auto geo = geo::compute_geo_features(obs, ids, c.radius_m);
  write_feature_csv(geo.table, ctx.path(artifact::kGeo));
  ctx.produced(artifact::kGeo);

  auto mob = mobility::compute_mobility_features(obs, ids, c.mobility);
  write_feature_csv(mob.table, ctx.path(artifact::kMobility));
  ctx.produced(artifact::kMobility);
  ctx.write(artifact::kTransitions, mobility::transitions_jsonl(mob.transitions));

  auto attrs = attributes::compute_attribute_features(obs, ids);
  write_feature_csv(attrs.table, ctx.path(artifact::kAttributes));
  ctx.produced(artifact::kAttributes);
  ctx.write(artifact::kAttributeSchema, dump(attributes::attribute_schema_json()));

  text::TextConfig tc;
  tc.vocabulary_size = c.vocab_size;
  tc.polarity_map = c.polarity_map;
  tc.seed = c.stage_seed("features/text");
  auto txt = text::compute_text_features(obs, ids, tc);
  write_feature_csv(txt.bow, ctx.path(artifact::kBow));
  ctx.produced(artifact::kBow);
  ctx.write(artifact::kVocabulary, text::vocabulary_json(txt.vocabulary));
  ctx.write(artifact::kPolarity, text::review_polarity_jsonl(txt.reviews));
  ctx.write(artifact::kExtremes, text::extreme_reviews_jsonl(txt.extremes));

  ordered_json report;
  report["restaurants"] = ids.size();
  report["geo"] = {{"empty_neighborhoods", geo.report.empty_neighborhoods},
                   {"no_restaurant_neighbors", geo.report.no_restaurant_neighbors},
                   {"unknown_category_strings", geo.report.unknown_category_strings},
                   {"missing_businesses", geo.report.missing_businesses}};
  report["mobility"] = {{"transitions", mob.transitions.size()},
                        {"skipped_same_business", mob.transition_report.same_business_pairs},
                        {"skipped_gap", mob.transition_report.gap_exceeded},
                        {"skipped_unresolved", mob.transition_report.unresolved_endpoints}};
  report["attributes"] = {{"unrecognized_values", attrs.report.unrecognized},
                          {"by_attribute", attrs.report.by_attribute}};
  report["text"] = {{"vocabulary_size", txt.vocabulary.size()},
                    {"reviews", txt.reviews.size()},
                    {"restaurants_without_reviews", txt.without_reviews}};
  report["config"] = echoed_config(c);
  ctx.write(artifact::kFeatureReport, dump(report));
  out.messages.push_back("features for " + std::to_string(ids.size()) + " restaurants");
}

struct SurvivalData {
  learn::Dataset data;
  learn::AssembleReport report;
};

SurvivalData load_survival_dataset(const std::vector<std::string>& families, StageContext& ctx) {
  // Prerequisites in pipeline order, labels last.
  for (const char* f : {"G", "U", "A", "L"}) {
    if (std::find(families.begin(), families.end(), f) != families.end()) ctx.require(label_family(f));
  }
  ctx.require(artifact::kLabels);
  std::vector<FeatureTable> tables;
  for (const auto& f : families) {
    ctx.input(label_family(f));
    tables.push_back(read_feature_csv(ctx.path(label_family(f)), f));
  }
  ctx.input(artifact::kLabels);
  std::vector<const FeatureTable*> ptrs;
  for (const auto& t : tables) ptrs.push_back(&t);
  SurvivalData out;
  out.data = learn::assemble_dataset(ptrs, load_label_map(ctx.path(artifact::kLabels)), &out.report);
  return out;
}

learn::Dataset load_sentiment_dataset(StageContext& ctx) {
  ctx.require(artifact::kVocabulary);
  ctx.require(artifact::kPolarity);
  ctx.input(artifact::kVocabulary);
  ctx.input(artifact::kPolarity);
  const auto vocab = text::read_vocabulary_json(read_file(ctx.path(artifact::kVocabulary)));
  const auto reviews = text::read_review_polarity_jsonl(read_file(ctx.path(artifact::kPolarity)));
  learn::Dataset d;
  for (const auto& t : vocab.terms()) d.columns.push_back(text::bow_column(t));
  d.X = Matrix(0, d.columns.size());
  std::vector<double> row(d.columns.size());
  for (const auto& r : reviews) {
    if (r.polarity == text::Polarity::Neutral) continue;
    std::fill(row.begin(), row.end(), 0.0);
    for (const auto& tok : r.tokens) {
      if (auto idx = vocab.index(tok)) row[*idx] += 1.0;
    }
    d.ids.push_back(r.review_id);
    d.y.push_back(r.polarity == text::Polarity::Positive ? 1 : 0);
    d.X.append_row(row);
  }
  if (d.ids.empty()) throw DataError("no polarity-labeled reviews");
  return d;
}

learn::Dataset load_task_dataset(const RunConfig& c, StageContext& ctx, json* details) {
  if (c.task == Task::Sentiment) return load_sentiment_dataset(ctx);
  auto s = load_survival_dataset(c.families, ctx);
  if (details) {
    (*details)["dropped_in_join"] = s.report.dropped;
    (*details)["unlabeled"] = s.report.unlabeled;
  }
  return std::move(s.data);
}

std::string task_name(Task t) { return t == Task::Survival ? "survival" : "sentiment"; }

void run_train(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  json details = json::object();
  auto data = load_task_dataset(c, ctx, &details);
  const std::uint64_t seed = c.stage_seed("train");
  const auto mask = learn::stratified_test_mask(data.y, c.test_fraction, derive_seed(seed, "split"));
  std::vector<std::size_t> train_rows;
  json train_ids = json::array(), test_ids = json::array();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      test_ids.push_back(data.ids[i]);
    } else {
      train_rows.push_back(i);
      train_ids.push_back(data.ids[i]);
    }
  }
  auto train = data.subset(train_rows);
  const std::size_t original_rows = train.rows();
  std::size_t synthetic = 0;
  std::vector<std::string> warnings;
  // Oversampling applies to the survival task; review-level sentiment rows are
  // balanced enough and too numerous for exhaustive neighbor search.
  if (c.smote && c.task == Task::Survival) {
    auto over = learn::oversample(train, c.smote_amount, c.smote_k, derive_seed(seed, "smote"));
    synthetic = over.synthetic.rows.rows();
    warnings = over.synthetic.warnings;
    train = std::move(over.data);
  }
  auto model = learn::train_classifier(c.model, train, c.hyper, derive_seed(seed, to_string(c.model)));
  learn::save_model(model, ctx.path(artifact::kModel));
  ctx.produced(artifact::kModel);

  ordered_json split;
  split["task"] = task_name(c.task);
  split["test_fraction"] = c.test_fraction;
  split["train"] = train_ids;
  split["test"] = test_ids;
  ctx.write(artifact::kSplit, split.dump() + "\n");

  ordered_json report;
  report["task"] = task_name(c.task);
  report["model"] = to_string(c.model);
  report["families"] = c.task == Task::Survival ? json(c.families) : json::array({"L"});
  report["columns"] = data.width();
  report["rows"] = data.rows();
  report["train_rows"] = original_rows;
  report["test_rows"] = test_ids.size();
  report["smote_rows"] = synthetic;
  report["train_positive"] = train.count(1);
  report["train_negative"] = train.count(0);
  report["join"] = details;
  report["warnings"] = warnings;
  report["protocol"] = "stratified split; SMOTE on the training fold only";
  report["config"] = echoed_config(c);
  ctx.write(artifact::kTrainReport, dump(report));
  out.messages.push_back("trained " + std::string(to_string(c.model)) + " on " + std::to_string(train.rows()) +
                         " rows (" + std::to_string(synthetic) + " synthetic)");
  for (const auto& w : warnings) out.messages.push_back("warning: " + w);
}

void run_evaluate(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  ctx.require(artifact::kModel);
  ctx.require(artifact::kSplit);
  ctx.input(artifact::kModel);
  ctx.input(artifact::kSplit);
  auto model = learn::load_model(ctx.path(artifact::kModel));
  auto split = json::parse(read_file(ctx.path(artifact::kSplit)));
  if (split.value("task", "") != task_name(c.task)) {
    throw ConfigError("task", "model.bin was trained for the " + split.value("task", std::string("?")) + " task");
  }
  auto data = load_task_dataset(c, ctx, nullptr);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < data.ids.size(); ++i) row_of.emplace(data.ids[i], i);
  std::vector<std::size_t> rows;
  for (const auto& id : split.at("test")) {
    auto it = row_of.find(id.get<std::string>());
    if (it == row_of.end()) throw DataError("test id " + id.get<std::string>() + " missing from the features");
    rows.push_back(it->second);
  }
  auto test = data.subset(rows);
  auto scores = model.predict_proba(test);
  auto eval = learn::roc_auc(scores, test.y);
  eval.config = echoed_config(c);
  ordered_json report;
  report["task"] = task_name(c.task);
  report["model"] = to_string(model.kind());
  report["test_rows"] = test.rows();
  report["protocol"] = "stratified split; SMOTE on the training fold only";
  json body = eval.to_json();
  for (const char* k : {"auc", "positives", "negatives", "roc", "config"}) report[k] = body[k];
  ctx.write(artifact::kEvalReport, dump(report));
  out.messages.push_back("AUC " + format_double(eval.auc) + " on " + std::to_string(test.rows()) + " held-out rows");
}

void run_ablate(const RunConfig& c, StageContext& ctx, StageOutcome& out) {
  ctx.require(artifact::kLabels);
  std::map<std::string, FeatureTable> tables;
  std::vector<std::string> warnings;
  for (const char* f : {"G", "U", "A", "L"}) {
    const auto rel = label_family(f);
    if (!fs::exists(ctx.path(rel))) {
      out.messages.push_back(std::string("warning: ") + rel + " not found; rows using family " + f + " are skipped");
      continue;
    }
    ctx.input(rel);
    tables.emplace(f, read_feature_csv(ctx.path(rel), f));
  }
  ctx.input(artifact::kLabels);
  std::map<std::string, const FeatureTable*> ptrs;
  for (const auto& [f, t] : tables) ptrs.emplace(f, &t);
  learn::AblationConfig ac;
  ac.test_fraction = c.test_fraction;
  ac.smote = c.smote;
  ac.smote_amount = c.smote_amount;
  ac.smote_k = c.smote_k;
  ac.hyper = c.hyper;
  auto result = learn::run_ablation(ptrs, load_label_map(ctx.path(artifact::kLabels)), ac, c.stage_seed("ablate"));
  ctx.write(artifact::kAblation, result.to_csv());
  ordered_json report;
  auto rows = ordered_json::array();
  for (const auto& r : result.rows) {
    ordered_json row;
    row["feature_set"] = r.name;
    row["families"] = r.families;
    row["GBDT"] = r.gbdt_auc ? json(*r.gbdt_auc) : json();
    row["MLP"] = r.mlp_auc ? json(*r.mlp_auc) : json();
    rows.push_back(row);
  }
  report["rows"] = rows;
  report["train_rows"] = result.train_rows;
  report["test_rows"] = result.test_rows;
  report["warnings"] = result.warnings;
  report["protocol"] = "shared stratified split; SMOTE on the training fold only; multi-family rows are "
                       "equal-weight majority votes of per-family models";
  report["config"] = echoed_config(c);
  ctx.write(artifact::kAblationReport, dump(report));
  for (const auto& w : result.warnings) out.messages.push_back("warning: " + w);
}

std::string reviews_text(const corpus::Snapshot& s, const std::string& business_id) {
  std::vector<const corpus::ReviewRecord*> reviews;
  for (const auto& r : s.reviews()) {
    if (r.business_id == business_id && r.timestamp < s.period_end()) reviews.push_back(&r);
  }
  std::sort(reviews.begin(), reviews.end(), [](auto* a, auto* b) { return a->review_id < b->review_id; });
  std::string text;
  for (const auto* r : reviews) text += r->text + "\n";
  return text;
}

void run_explain(const RunConfig& c, const ExplainRequest& req, StageContext& ctx) {
  const std::string model_rel = req.model ? req.model->string() : std::string(artifact::kModel);
  const fs::path model_path = req.model ? *req.model : ctx.path(artifact::kModel);
  if (!fs::exists(model_path)) throw MissingArtifactError(model_rel);
  if (req.model) {
    ctx.external_input(fs::absolute(model_path));
  } else {
    ctx.input(artifact::kModel);
  }
  auto model = learn::load_model(model_path);
  const std::size_t top_k = req.top_k.value_or(c.explain.top_k);
  const std::uint64_t seed = req.seed.value_or(c.stage_seed("explain"));
  const std::string format = req.format.value_or(c.explain.format);
  const auto& formats = explain::render_formats();
  if (std::find(formats.begin(), formats.end(), format) == formats.end()) {
    throw ConfigError("format", "unknown format '" + format + "' (supported: json, html)");
  }
  const std::array<std::string, 2> class_names =
      c.task == Task::Survival ? std::array<std::string, 2>{"dead", "survived"}
                               : std::array<std::string, 2>{"negative", "positive"};
  const bool bow_model = std::all_of(model.columns().begin(), model.columns().end(),
                                     [](const std::string& col) { return col.rfind("bow.", 0) == 0; });

  std::string instance, family, json_text, html_text;
  std::string letters = req.features.value_or("");
  if (letters.empty() && bow_model) letters = "L";
  if (letters.empty()) {
    for (const auto& f : c.families) letters += f;
  }
  const bool text_mode =
      c.task == Task::Sentiment || (bow_model && parse_families(letters) == std::vector<std::string>{"L"});
  if (text_mode) {
    // Text explanation of a review (sentiment) or of a restaurant's reviews.
    const std::string rel = std::string(artifact::kCorpusObservation) + "/business.json";
    ctx.require(rel);
    auto obs = load_corpus(ctx, artifact::kCorpusObservation, c.observation_end);
    std::string text, id;
    if (c.task == Task::Sentiment) {
      if (req.review_id.empty()) throw ConfigError("review-id", "sentiment explanations need --review-id");
      for (const auto& r : obs.reviews()) {
        if (r.review_id == req.review_id) text = r.text;
      }
      if (text.empty()) throw DataError("review " + req.review_id + " not found in the observation corpus");
      id = req.review_id;
    } else {
      if (req.business_id.empty()) throw ConfigError("business-id", "--business-id is required");
      if (!obs.find(req.business_id)) throw DataError("business " + req.business_id + " not found");
      text = reviews_text(obs, req.business_id);
      id = req.business_id;
    }
    explain::TextExplainConfig tc;
    tc.top_k = top_k;
    tc.num_samples = req.samples.value_or(c.explain.text_samples);
    tc.kernel_width = c.explain.text_kernel_width;
    tc.ridge_alpha = c.explain.ridge_alpha;
    tc.seed = seed;
    tc.class_names = class_names;
    auto e = explain::explain_text(model, text, id, tc);
    instance = id;
    family = "L";
    json_text = explain::render_explanation(e, "json");
    if (format == "html") html_text = explain::render_explanation(e, "html");
  } else {
    if (req.business_id.empty()) throw ConfigError("business-id", "--business-id is required");
    const auto families = parse_families(letters);
    auto data = load_survival_dataset(families, ctx).data;
    if (learn::schema_fingerprint(data.columns) != model.fingerprint()) {
      throw DataError("model " + model_rel + " was not trained on feature families " + letters);
    }
    ctx.require(artifact::kSplit);
    ctx.input(artifact::kSplit);
    auto split = json::parse(read_file(ctx.path(artifact::kSplit)));
    std::set<std::string> train_ids;
    for (const auto& id : split.at("train")) train_ids.insert(id.get<std::string>());
    std::vector<std::size_t> background_rows;
    std::optional<std::size_t> row;
    for (std::size_t i = 0; i < data.ids.size(); ++i) {
      if (train_ids.count(data.ids[i])) background_rows.push_back(i);
      if (data.ids[i] == req.business_id) row = i;
    }
    if (!row) throw DataError("business " + req.business_id + " has no complete feature row for " + letters);
    if (background_rows.empty()) throw DataError("split.json lists no training rows for these features");
    explain::TabularConfig tc;
    tc.top_k = top_k;
    tc.num_samples = req.samples.value_or(c.explain.samples);
    tc.kernel_width = c.explain.kernel_width;
    tc.ridge_alpha = c.explain.ridge_alpha;
    tc.mode = c.explain.mode;
    tc.seed = seed;
    tc.class_names = class_names;
    auto e = explain::explain_tabular(model, data.X.row(*row), req.business_id, data.X.select_rows(background_rows), tc);
    instance = req.business_id;
    family.clear();
    for (const auto& f : families) family += f;
    json_text = explain::render_explanation(e, "json");
    if (format == "html") html_text = explain::render_explanation(e, "html");
  }
  const std::string base = std::string(artifact::kExplanationDir) + "/" + instance + "." + family + ".explanation";
  ctx.write(base + ".json", json_text);
  if (!html_text.empty()) ctx.write(base + ".html", html_text);
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Synth: return "synth";
    case Stage::Ingest: return "ingest";
    case Stage::Label: return "label";
    case Stage::Features: return "features";
    case Stage::Train: return "train";
    case Stage::Evaluate: return "evaluate";
    case Stage::Ablate: return "ablate";
    case Stage::Explain: return "explain";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : kStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages(kStages.begin(), kStages.end());
  return stages;
}

std::string family_artifact(const std::string& family) { return label_family(family); }

std::string version_string() {
  return std::string("bizsurv ") + BIZSURV_VERSION + " (manifest schema " + std::to_string(kManifestSchemaVersion) +
         ", model format " + std::to_string(learn::kModelFormatVersion) + ")";
}

StageOutcome run_stage(Stage stage, const RunConfig& config, const ExplainRequest& request) {
  fs::create_directories(config.workdir);
  WorkdirLock lock(config.workdir);
  StageContext ctx(config);
  StageOutcome out;

  // Stage-specific identity of this run for the manifest.
  json key = echoed_config(config);
  std::string entry = std::string(stage_name(stage));
  if (stage == Stage::Explain) {
    json r;
    r["business_id"] = request.business_id;
    r["review_id"] = request.review_id;
    r["model"] = request.model ? request.model->string() : "";
    r["features"] = request.features.value_or("");
    r["top_k"] = request.top_k ? json(*request.top_k) : json();
    r["samples"] = request.samples ? json(*request.samples) : json();
    r["seed"] = request.seed ? json(*request.seed) : json();
    r["format"] = request.format.value_or("");
    key["request"] = r;
    entry += ":" + (request.business_id.empty() ? request.review_id : request.business_id) + "." +
             request.features.value_or("");
  }

  json manifest = load_manifest(config.workdir);
  const std::string config_digest = to_hex(fnv1a64(key.dump()));

  // Skip when config, recorded inputs and recorded outputs are all unchanged.
  if (manifest.contains("stages") && manifest["stages"].contains(entry)) {
    const auto& rec = manifest["stages"][entry];
    bool same = rec.value("config_digest", "") == config_digest;
    if (same && rec.contains("inputs")) {
      for (const auto& [rel, digest] : rec["inputs"].items()) {
        const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : config.workdir / rel;
        if (!fs::exists(p) || file_digest(p) != digest.get<std::string>()) {
          same = false;
          break;
        }
      }
    }
    if (same && outputs_current(config.workdir, rec.value("outputs", json::object()))) {
      out.skipped = true;
      for (const auto& [rel, _] : rec["outputs"].items()) out.outputs.push_back(rel);
      out.messages.push_back(std::string(stage_name(stage)) + ": up to date");
      return out;
    }
  }

  switch (stage) {
    case Stage::Synth: run_synth(config, ctx, out); break;
    case Stage::Ingest: run_ingest(config, ctx, out); break;
    case Stage::Label: run_label(config, ctx, out); break;
    case Stage::Features: run_features(config, ctx, out); break;
    case Stage::Train: run_train(config, ctx, out); break;
    case Stage::Evaluate: run_evaluate(config, ctx, out); break;
    case Stage::Ablate: run_ablate(config, ctx, out); break;
    case Stage::Explain: run_explain(config, request, ctx); break;
  }

  json rec;
  rec["config_digest"] = config_digest;
  rec["config"] = key;
  rec["seed"] = config.stage_seed(stage_name(stage));
  rec["inputs"] = ctx.input_digests();
  rec["outputs"] = ctx.output_digests();
  rec["tool_version"] = BIZSURV_VERSION;
  manifest["tool"] = "bizsurv";
  manifest["version"] = BIZSURV_VERSION;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["master_seed"] = config.seed;
  manifest["stages"][entry] = rec;
  write_file_atomic(config.workdir / artifact::kManifest, manifest.dump(2) + "\n");
  out.outputs = ctx.outputs();
  return out;
}

WorkdirLock::WorkdirLock(const fs::path& workdir) : path_(workdir / artifact::kLock) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
      ::close(fd);
      return;
    }
    if (errno != EEXIST) throw Error("cannot create lock file " + path_.string() + ": " + std::strerror(errno));
    long holder = 0;
    {
      std::ifstream in(path_);
      in >> holder;
    }
    const bool alive = holder > 0 && (::kill(static_cast<pid_t>(holder), 0) == 0 || errno == EPERM);
    if (alive) {
      throw LockedError("workdir " + path_.parent_path().string() + " is locked by process " +
                        std::to_string(holder) + " (" + path_.string() + ")");
    }
    std::error_code ec;
    fs::remove(path_, ec);  // stale lock from a process that no longer exists
  }
  throw LockedError("could not acquire " + path_.string());
}

WorkdirLock::~WorkdirLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

}  // namespace bizsurv::pipeline
