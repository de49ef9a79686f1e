#include <cmath>
#include <string>

#include "json.hpp"
#include "ztree/error.hpp"
#include "ztree/tree.hpp"

namespace ztree {

namespace {

using Json = nlohmann::ordered_json;

std::string_view to_string(Algorithm a) { return a == Algorithm::cart ? "cart" : "ztree"; }

Algorithm parse_algorithm(std::string_view text) {
  if (text == "ztree") return Algorithm::ztree;
  if (text == "cart") return Algorithm::cart;
  throw FormatError("unknown algorithm '" + std::string(text) + "'");
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json schema_json(const Schema& schema) {
  Json features = Json::array();
  for (const auto& f : schema.features) {
    Json jf;
    jf["name"] = f.name;
    jf["kind"] = to_string(f.kind);
    jf["levels"] = f.levels;
    features.push_back(std::move(jf));
  }
  Json target;
  target["name"] = schema.target.name;
  target["kind"] = to_string(schema.target.kind);
  target["event_indicator"] = schema.target.event_indicator_name;
  target["labels"] = schema.target.labels;
  Json out;
  out["features"] = std::move(features);
  out["target"] = std::move(target);
  out["treatment"] = schema.treatment ? Json(*schema.treatment) : Json(nullptr);
  return out;
}

Json leaf_stats_json(const LeafStats& s, const Schema& schema) {
  Json j;
  j["n"] = s.n;
  switch (schema.target.kind) {
    case TargetKind::binary: j["positive_fraction"] = s.value; break;
    case TargetKind::continuous: j["mean"] = s.value; break;
    case TargetKind::time_to_event:
      j["event_count"] = s.event_count;
      j["total_time"] = s.total_time;
      j["event_fraction"] = s.value;
      break;
  }
  if (schema.treatment) {
    j["n_treated"] = s.n_treated;
    j["n_control"] = s.n_control;
    j["mean_treated"] = optional_number(s.mean_treated);
    j["mean_control"] = optional_number(s.mean_control);
  }
  return j;
}

Json node_json(const TreeModel& model, std::size_t index) {
  const auto& node = model.nodes[index];
  Json j;
  j["path"] = node.path;
  if (node.cv_score) {
    Json cv;
    cv["mean"] = node.cv_score->mean_score;
    cv["per_repeat"] = node.cv_score->per_repeat;
    j["cv_score"] = std::move(cv);
  } else {
    j["cv_score"] = nullptr;
  }
  j["criterion"] = node.criterion ? Json(node.criterion->to_string()) : Json(nullptr);
  j["split_z"] = optional_number(node.split_z);
  j["stop"] = to_string(node.stop);
  j["leaf_stats"] = leaf_stats_json(node.stats, model.schema);
  Json children = Json::array();
  if (!node.is_leaf()) {
    children.push_back(node_json(model, static_cast<std::size_t>(node.left)));
    children.push_back(node_json(model, static_cast<std::size_t>(node.right)));
  }
  j["children"] = std::move(children);
  return j;
}

// --- reading ---------------------------------------------------------------

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("model document lacks field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("model field '") + key + "' has the wrong type");
  }
}

std::optional<double> get_optional_number(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw FormatError(std::string("model field '") + key + "' is not a number");
  return v.get<double>();
}

Schema read_schema(const Json& j) {
  Schema schema;
  for (const auto& jf : field(j, "features")) {
    FeatureSpec f;
    f.name = get<std::string>(jf, "name");
    try {
      f.kind = parse_feature_kind(get<std::string>(jf, "kind"));
    } catch (const DataError& e) {
      throw FormatError(e.what());
    }
    f.levels = get<std::vector<std::string>>(jf, "levels");
    schema.features.push_back(std::move(f));
  }
  const auto& jt = field(j, "target");
  schema.target.name = get<std::string>(jt, "name");
  try {
    schema.target.kind = parse_target_kind(get<std::string>(jt, "kind"));
  } catch (const DataError& e) {
    throw FormatError(e.what());
  }
  schema.target.event_indicator_name = get<std::string>(jt, "event_indicator");
  schema.target.labels = get<std::vector<std::string>>(jt, "labels");
  const auto& trt = field(j, "treatment");
  if (!trt.is_null()) schema.treatment = trt.get<std::string>();
  return schema;
}

LeafStats read_leaf_stats(const Json& j, const Schema& schema) {
  LeafStats s;
  s.n = get<std::size_t>(j, "n");
  switch (schema.target.kind) {
    case TargetKind::binary: s.value = get<double>(j, "positive_fraction"); break;
    case TargetKind::continuous: s.value = get<double>(j, "mean"); break;
    case TargetKind::time_to_event:
      s.event_count = get<double>(j, "event_count");
      s.total_time = get<double>(j, "total_time");
      s.value = get<double>(j, "event_fraction");
      break;
  }
  if (schema.treatment) {
    s.n_treated = get<std::size_t>(j, "n_treated");
    s.n_control = get<std::size_t>(j, "n_control");
    s.mean_treated = get_optional_number(j, "mean_treated");
    s.mean_control = get_optional_number(j, "mean_control");
  }
  return s;
}

int read_node(const Json& j, const TreeModel& model, std::vector<TreeNode>& out, const std::string& expected_path) {
  const int index = static_cast<int>(out.size());
  out.emplace_back();
  TreeNode node;
  node.path = get<std::string>(j, "path");
  if (node.path != expected_path) throw FormatError("node path '" + node.path + "' out of place");
  const auto& cv = field(j, "cv_score");
  if (!cv.is_null()) {
    CvScore score;
    score.mean_score = get<double>(cv, "mean");
    score.per_repeat = get<std::vector<double>>(cv, "per_repeat");
    if (score.per_repeat.empty() || mean_of(score.per_repeat) != score.mean_score) {
      throw FormatError("node '" + node.path + "': cv mean does not match its repeats");
    }
    node.cv_score = std::move(score);
  }
  const auto& criterion = field(j, "criterion");
  if (!criterion.is_null()) node.criterion = SubgroupCriterion::parse(criterion.get<std::string>(), model.schema);
  node.split_z = get_optional_number(j, "split_z");
  node.stop = parse_stop_reason(get<std::string>(j, "stop"));
  node.stats = read_leaf_stats(field(j, "leaf_stats"), model.schema);
  const auto& children = field(j, "children");
  if (!children.is_array()) throw FormatError("node children must be an array");

  const bool internal = node.criterion.has_value();
  if (internal != (children.size() == 2) || (!internal && !children.empty()) ||
      internal != (node.stop == StopReason::split)) {
    throw FormatError("node '" + node.path + "': criterion, children and stop reason disagree");
  }
  if (model.config.algorithm == Algorithm::ztree && internal) {
    if (!node.cv_score || node.cv_score->mean_score < model.config.threshold) {
      throw FormatError("node '" + node.path + "': cv score below the model threshold");
    }
  }
  out[index] = node;
  if (internal) {
    const int left = read_node(children[0], model, out, node.path + "L");
    const int right = read_node(children[1], model, out, node.path + "R");
    if (out[left].stats.n + out[right].stats.n != node.stats.n) {
      throw FormatError("node '" + node.path + "': children do not partition the node");
    }
    out[index].left = left;
    out[index].right = right;
  }
  return index;
}

}  // namespace

std::string serialize(const TreeModel& model) {
  Json j;
  Json provenance;
  provenance["tool"] = model.provenance.tool;
  provenance["command"] = model.provenance.command;
  provenance["seed"] = model.provenance.seed;
  j["provenance"] = std::move(provenance);
  j["format_version"] = kModelFormatVersion;
  j["algorithm"] = to_string(model.config.algorithm);
  Json config;
  if (model.config.algorithm == Algorithm::ztree) {
    config["threshold"] = model.config.threshold;
    config["search_depth"] = model.config.search_depth;
    config["min_side"] = model.config.min_side;
    config["cv"] = {{"folds", model.config.cv.folds}, {"repeats", model.config.cv.repeats}, {"seed", model.config.cv.seed}};
    config["test"] = to_string(model.config.test);
  } else {
    config["max_depth"] = model.config.cart.max_depth;
    config["min_samples_split"] = model.config.cart.min_samples_split;
  }
  j["config"] = std::move(config);
  j["schema_fingerprint"] = model.schema.fingerprint();
  j["schema"] = schema_json(model.schema);
  j["root"] = node_json(model, 0);
  return j.dump(1) + "\n";
}

TreeModel deserialize(std::string_view document) {
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos) throw FormatError("empty model document");
  Json j;
  try {
    j = Json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("model document must be a JSON object");
  if (get<int>(j, "format_version") != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + field(j, "format_version").dump());
  }
  TreeModel model;
  const auto& provenance = field(j, "provenance");
  model.provenance.tool = get<std::string>(provenance, "tool");
  model.provenance.command = get<std::string>(provenance, "command");
  model.provenance.seed = get<std::uint64_t>(provenance, "seed");
  model.config.algorithm = parse_algorithm(get<std::string>(j, "algorithm"));
  const auto& config = field(j, "config");
  if (model.config.algorithm == Algorithm::ztree) {
    model.config.threshold = get<double>(config, "threshold");
    if (!(model.config.threshold >= 0.0)) throw FormatError("model threshold must be >= 0");
    model.config.search_depth = get<int>(config, "search_depth");
    model.config.min_side = get<std::size_t>(config, "min_side");
    const auto& cv = field(config, "cv");
    model.config.cv.folds = get<int>(cv, "folds");
    model.config.cv.repeats = get<int>(cv, "repeats");
    model.config.cv.seed = get<std::uint64_t>(cv, "seed");
    try {
      model.config.test = parse_test_kind(get<std::string>(config, "test"));
    } catch (const Unsupported& e) {
      throw FormatError(e.what());
    }
  } else {
    model.config.cart.max_depth = get<int>(config, "max_depth");
    model.config.cart.min_samples_split = get<int>(config, "min_samples_split");
  }
  const auto fingerprint = get<std::string>(j, "schema_fingerprint");
  model.schema = read_schema(field(j, "schema"));
  if (model.schema.fingerprint() != fingerprint) throw FormatError("schema fingerprint does not match the schema");
  read_node(field(j, "root"), model, model.nodes, "");
  return model;
}

}  // namespace ztree
