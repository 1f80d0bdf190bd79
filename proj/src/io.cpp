#include "svcal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "svcal/distributions.hpp"
#include "svcal/error.hpp"

namespace svcal {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line); }

[[noreturn]] void schema(const std::string& source, std::size_t line, const std::string& message) {
  fail(ErrorCode::SchemaError, where(source, line) + ": " + message);
}

// Calls fn(object, line_number) for each non-blank line.
template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      schema(source, number, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) schema(source, number, "expected a JSON object");
    try {
      fn(obj, number);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::DuplicateKey) throw;
      schema(source, number, e.what());
    } catch (const json::exception& e) {
      schema(source, number, e.what());
    }
  }
}

const json& field(const json& obj, const char* name, const std::string& source, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) schema(source, line, std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name, const std::string& source, std::size_t line) {
  const json& v = field(obj, name, source, line);
  if (!v.is_string() || v.get<std::string>().empty()) {
    schema(source, line, std::string("'") + name + "' must be a non-empty string");
  }
  return v.get<std::string>();
}

int int_field(const json& obj, const char* name, const std::string& source, std::size_t line) {
  const json& v = field(obj, name, source, line);
  if (!v.is_number_integer()) schema(source, line, std::string("'") + name + "' must be an integer");
  return v.get<int>();
}

bool bool_field(const json& obj, const char* name, const std::string& source, std::size_t line) {
  const json& v = field(obj, name, source, line);
  if (!v.is_boolean()) schema(source, line, std::string("'") + name + "' must be true or false");
  return v.get<bool>();
}

std::array<double, 2> pair_field(const json& v, const char* name, const std::string& source, std::size_t line) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    schema(source, line, std::string("'") + name + "' must be an array of two numbers");
  }
  std::array<double, 2> out{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(out[0]) || !std::isfinite(out[1])) {
    schema(source, line, std::string("'") + name + "' must be finite");
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t");
    const auto last = cell.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::SchemaError, context + ": '" + s + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& context) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::SchemaError, context + ": '" + s + "' is not an integer");
  }
  return v;
}

bool parse_flag(const std::string& s, const std::string& context) {
  if (s == "1" || s == "true" || s == "True") return true;
  if (s == "0" || s == "false" || s == "False") return false;
  fail(ErrorCode::SchemaError, context + ": '" + s + "' is not a 0/1 flag");
}

}  // namespace

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& contents) {
  auto out = open_output(path);
  out << contents;
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source) {
  std::vector<PredictionRecord> records;
  std::map<PairKey, std::size_t> seen;
  for_each_json_line(in, source, [&](const json& obj, std::size_t line) {
    PredictionRecord r;
    r.case_id = string_field(obj, "case_id", source, line);
    r.article = int_field(obj, "article", source, line);
    if (r.article < 1) schema(source, line, "'article' must be positive");
    r.logits = pair_field(field(obj, "logits", source, line), "logits", source, line);
    r.gold = int_field(obj, "gold", source, line);
    if (r.gold != 0 && r.gold != 1) schema(source, line, "'gold' must be 0 or 1");
    r.alleged = bool_field(obj, "alleged", source, line);
    r.split = parse_split(string_field(obj, "split", source, line));
    if (auto it = obj.find("human"); it != obj.end() && !it->is_null()) {
      r.human = SoftLabel::checked(pair_field(*it, "human", source, line));
    }
    if (auto it = obj.find("temperature"); it != obj.end() && !it->is_null()) {
      if (!it->is_number() || !(it->get<double>() > 0.0)) schema(source, line, "'temperature' must be positive");
      r.temperature = it->get<double>();
    }
    auto [pos, inserted] = seen.emplace(r.key(), line);
    if (!inserted) {
      fail(ErrorCode::DuplicateKey, where(source, line) + ": " + r.key().str() + " already defined on line " +
                                        std::to_string(pos->second));
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<PredictionRecord> load_predictions(const fs::path& path) {
  auto in = open_input(path);
  return read_predictions(in, path.string());
}

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records, bool attach_probs) {
  for (const auto& r : records) {
    ordered_json obj;
    obj["case_id"] = r.case_id;
    obj["article"] = r.article;
    obj["logits"] = {r.logits[0], r.logits[1]};
    obj["gold"] = r.gold;
    obj["alleged"] = r.alleged;
    if (r.human) obj["human"] = {r.human->probs[0], r.human->probs[1]};
    obj["split"] = std::string(to_string(r.split));
    if (attach_probs || r.temperature != 1.0) obj["temperature"] = r.temperature;
    if (attach_probs) {
      const Probs2 p = probabilities(r);
      obj["probs"] = {p[0], p[1]};
    }
    out << obj.dump() << '\n';
  }
}

std::vector<KeyedExtraction> read_votes(std::istream& in, const std::string& source) {
  std::vector<KeyedExtraction> votes;
  std::map<PairKey, std::size_t> seen;
  for_each_json_line(in, source, [&](const json& obj, std::size_t line) {
    KeyedExtraction v;
    v.case_id = string_field(obj, "case_id", source, line);
    v.vote.article = int_field(obj, "article", source, line);
    v.vote.votes_violation = int_field(obj, "votes_violation", source, line);
    v.vote.votes_noviolation = int_field(obj, "votes_noviolation", source, line);
    v.vote.found_violation = bool_field(obj, "found_violation", source, line);
    if (v.vote.article < 1) schema(source, line, "'article' must be positive");
    if (v.vote.votes_violation < 0 || v.vote.votes_noviolation < 0 || v.vote.total() < 1) {
      schema(source, line, "vote counts must be non-negative with at least one vote");
    }
    const PairKey key{v.case_id, v.vote.article};
    auto [pos, inserted] = seen.emplace(key, line);
    if (!inserted) {
      fail(ErrorCode::DuplicateKey, where(source, line) + ": " + key.str() + " already defined on line " +
                                        std::to_string(pos->second));
    }
    votes.push_back(std::move(v));
  });
  return votes;
}

std::vector<KeyedExtraction> load_votes(const fs::path& path) {
  auto in = open_input(path);
  return read_votes(in, path.string());
}

void write_votes(std::ostream& out, const std::vector<KeyedExtraction>& votes) {
  for (const auto& v : votes) {
    ordered_json obj;
    obj["case_id"] = v.case_id;
    obj["article"] = v.vote.article;
    obj["votes_violation"] = v.vote.votes_violation;
    obj["votes_noviolation"] = v.vote.votes_noviolation;
    obj["found_violation"] = v.vote.found_violation;
    out << obj.dump() << '\n';
  }
}

std::vector<ConclusionDocument> load_conclusions(const fs::path& path) {
  auto in = open_input(path);
  std::vector<ConclusionDocument> docs;
  if (path.extension() == ".jsonl") {
    for_each_json_line(in, path.string(), [&](const json& obj, std::size_t line) {
      ConclusionDocument doc;
      doc.case_id = string_field(obj, "case_id", path.string(), line);
      doc.text = string_field(obj, "text", path.string(), line);
      if (auto it = obj.find("formation"); it != obj.end() && it->is_string()) doc.formation = it->get<std::string>();
      docs.push_back(std::move(doc));
    });
    return docs;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  docs.push_back({path.stem().string(), std::nullopt, buf.str()});
  return docs;
}

JoinResult join_votes(std::vector<PredictionRecord> predictions, const std::vector<KeyedExtraction>& votes) {
  std::map<PairKey, const VoteExtraction*> by_key;
  for (const auto& v : votes) {
    if (!by_key.emplace(PairKey{v.case_id, v.vote.article}, &v.vote).second) {
      fail(ErrorCode::DuplicateKey, "vote record " + PairKey{v.case_id, v.vote.article}.str() + " appears twice");
    }
  }
  JoinResult result;
  for (auto& p : predictions) {
    auto it = by_key.find(p.key());
    if (it == by_key.end()) {
      result.unmatched.push_back(p.key());
      continue;
    }
    const VoteExtraction& v = *it->second;
    p.human = class_ordered_label(VoteDistribution(v.votes_violation, v.votes_noviolation));
  }
  result.predictions = std::move(predictions);
  return result;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorCode::SchemaError, "missing CSV column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_input(path);
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      fail(ErrorCode::SchemaError, where(path.string(), number) + ": expected " +
                                       std::to_string(table.header.size()) + " cells, got " +
                                       std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) fail(ErrorCode::SchemaError, path.string() + ": empty CSV file");
  return table;
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyRow>& rows) {
  out << "case_id,article,entropy,single_dissent\n";
  for (const auto& r : rows) {
    out << r.key.case_id << ',' << r.key.article << ',' << format_double(r.entropy) << ','
        << (r.single_dissent ? 1 : 0) << '\n';
  }
}

std::map<PairKey, double> load_entropy_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_case = t.column("case_id");
  const auto c_article = t.column("article");
  const auto c_entropy = t.column("entropy");
  std::map<PairKey, double> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = where(path.string(), i + 2);
    PairKey key{row[c_case], parse_int(row[c_article], ctx)};
    if (!out.emplace(key, parse_double(row[c_entropy], ctx)).second) {
      fail(ErrorCode::DuplicateKey, ctx + ": " + key.str() + " appears twice");
    }
  }
  return out;
}

std::map<PairKey, bool> proxy_flags(const CsvTable& proxies, const std::string& column,
                                    const std::vector<PairKey>& pairs) {
  const auto c_case = proxies.column("case_id");
  const auto c_flag = proxies.column(column);
  std::optional<std::size_t> c_article;
  for (std::size_t i = 0; i < proxies.header.size(); ++i) {
    if (proxies.header[i] == "article") c_article = i;
  }

  std::map<PairKey, bool> by_pair;
  std::map<std::string, bool> by_case;
  for (std::size_t i = 0; i < proxies.rows.size(); ++i) {
    const auto& row = proxies.rows[i];
    const std::string ctx = "proxy row " + std::to_string(i + 2);
    const bool flag = parse_flag(row[c_flag], ctx);
    if (c_article) {
      by_pair[PairKey{row[c_case], parse_int(row[*c_article], ctx)}] = flag;
    } else {
      by_case[row[c_case]] = flag;
    }
  }

  std::map<PairKey, bool> out;
  for (const auto& key : pairs) {
    if (c_article) {
      if (auto it = by_pair.find(key); it != by_pair.end()) out.emplace(key, it->second);
    } else if (auto it = by_case.find(key.case_id); it != by_case.end()) {
      out.emplace(key, it->second);
    }
  }
  return out;
}

std::set<int> load_article_list(const fs::path& path) {
  auto in = open_input(path);
  std::set<int> out;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) out.insert(parse_int(token, path.string()));
  }
  return out;
}

SoftTrainProblem load_problem(const fs::path& features_csv, const fs::path& targets_jsonl) {
  const CsvTable t = read_csv(features_csv);
  SoftTrainProblem problem;
  problem.features.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      problem.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(t.rows[i][j], where(features_csv.string(), i + 2));
    }
  }

  auto in = open_input(targets_jsonl);
  std::vector<std::array<double, 2>> targets;
  const std::string source = targets_jsonl.string();
  for_each_json_line(in, source, [&](const json& obj, std::size_t line) {
    if (auto it = obj.find("target"); it != obj.end()) {
      targets.push_back(SoftLabel::checked(pair_field(*it, "target", source, line)).probs);
    } else {
      const int y = int_field(obj, "label", source, line);
      if (y != 0 && y != 1) schema(source, line, "'label' must be 0 or 1");
      targets.push_back(y == 1 ? std::array<double, 2>{0.0, 1.0} : std::array<double, 2>{1.0, 0.0});
    }
  });
  problem.targets.resize(static_cast<Eigen::Index>(targets.size()), 2);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    problem.targets(static_cast<Eigen::Index>(i), 0) = targets[i][0];
    problem.targets(static_cast<Eigen::Index>(i), 1) = targets[i][1];
  }
  problem.validate();
  return problem;
}

void save_model(const fs::path& path, const LinearSoftModel& model) {
  ordered_json obj;
  obj["classes"] = 2;
  obj["loss_form"] = model.loss_form == LossForm::Mean ? "mean" : "sum";
  ordered_json weights = ordered_json::array();
  for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
    weights.push_back({model.weights(i, 0), model.weights(i, 1)});
  }
  obj["weights"] = std::move(weights);
  ordered_json trace = ordered_json::array();
  for (const auto& e : model.training_trace) trace.push_back({{"epoch", e.epoch}, {"loss", e.loss}});
  obj["training_trace"] = std::move(trace);
  write_text(path, obj.dump(2) + "\n");
}

LinearSoftModel load_model(const fs::path& path) {
  auto in = open_input(path);
  json obj;
  try {
    obj = json::parse(in);
    LinearSoftModel model;
    model.loss_form = obj.value("loss_form", "mean") == "sum" ? LossForm::Sum : LossForm::Mean;
    const json& w = obj.at("weights");
    model.weights.resize(static_cast<Eigen::Index>(w.size()), 2);
    for (std::size_t i = 0; i < w.size(); ++i) {
      model.weights(static_cast<Eigen::Index>(i), 0) = w.at(i).at(0).get<double>();
      model.weights(static_cast<Eigen::Index>(i), 1) = w.at(i).at(1).get<double>();
    }
    if (auto it = obj.find("training_trace"); it != obj.end()) {
      for (const auto& e : *it) model.training_trace.push_back({e.at("epoch").get<int>(), e.at("loss").get<double>()});
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

std::string temperature_json(const Temperature& t, std::size_t dev_count) {
  ordered_json obj;
  obj["t"] = t.t;
  obj["objective"] = std::string(to_string(t.objective));
  obj["dev_objective_value"] = t.dev_objective_value;
  obj["dev_count"] = dev_count;
  return obj.dump(2) + "\n";
}

Temperature load_temperature(const fs::path& path) {
  auto in = open_input(path);
  try {
    const json obj = json::parse(in);
    Temperature t;
    t.t = obj.at("t").get<double>();
    t.objective = parse_objective(obj.value("objective", "nll"));
    t.dev_objective_value = obj.value("dev_objective_value", 0.0);
    return t;
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

}  // namespace svcal
