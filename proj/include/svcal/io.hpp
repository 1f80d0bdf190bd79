#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "svcal/calibration.hpp"
#include "svcal/metrics.hpp"
#include "svcal/pair_key.hpp"
#include "svcal/softtrain.hpp"
#include "svcal/vote_parser.hpp"

namespace svcal {

namespace fs = std::filesystem;

// ---- predictions -----------------------------------------------------------
//
// One JSON object per line:
//   {"case_id": "001-57619", "article": 3, "logits": [0.2, 1.4], "gold": 1,
//    "alleged": true, "human": [0.14, 0.86], "split": "test"}
// "human" is optional and indexed by class (index 1 = violation). Files written
// by `apply` also carry "temperature" and "probs".

std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source);
std::vector<PredictionRecord> load_predictions(const fs::path& path);

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records, bool attach_probs);

// ---- votes -----------------------------------------------------------------
//
// {"case_id": ..., "article": 3, "votes_violation": 6, "votes_noviolation": 1, "found_violation": true}

std::vector<KeyedExtraction> read_votes(std::istream& in, const std::string& source);
std::vector<KeyedExtraction> load_votes(const fs::path& path);
void write_votes(std::ostream& out, const std::vector<KeyedExtraction>& votes);

struct ConclusionDocument {
  std::string case_id;
  std::optional<std::string> formation;
  std::string text;
};

/// A .jsonl file holds {case_id, formation, text} objects; any other file is
/// one plain-text conclusion whose case id is the file stem.
std::vector<ConclusionDocument> load_conclusions(const fs::path& path);

struct JoinResult {
  std::vector<PredictionRecord> predictions;
  std::vector<PairKey> unmatched;
};

/// Attaches the class-ordered vote shares to every prediction with a vote record.
JoinResult join_votes(std::vector<PredictionRecord> predictions, const std::vector<KeyedExtraction>& votes);

// ---- tabular ---------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws SchemaError
};

CsvTable read_csv(const fs::path& path);

struct EntropyRow {
  PairKey key;
  double entropy = 0.0;
  bool single_dissent = false;
};

void write_entropy_csv(std::ostream& out, const std::vector<EntropyRow>& rows);
std::map<PairKey, double> load_entropy_csv(const fs::path& path);

/// Proxy flags per pair. The table needs case_id and the named 0/1 column; with
/// an article column flags are per pair, otherwise a case flag covers all of
/// that case's pairs in `pairs`.
std::map<PairKey, bool> proxy_flags(const CsvTable& proxies, const std::string& column,
                                    const std::vector<PairKey>& pairs);

/// Whitespace/comma separated integers; '#' starts a comment.
std::set<int> load_article_list(const fs::path& path);

// ---- soft training ---------------------------------------------------------

/// Features CSV with a header row, targets JSONL with {"target": [q0, q1]} or {"label": 0|1}.
SoftTrainProblem load_problem(const fs::path& features_csv, const fs::path& targets_jsonl);
void save_model(const fs::path& path, const LinearSoftModel& model);
LinearSoftModel load_model(const fs::path& path);

// ---- temperature -----------------------------------------------------------

std::string temperature_json(const Temperature& t, std::size_t dev_count);
Temperature load_temperature(const fs::path& path);

// Helpers shared by the CLI and the pipeline.
std::ofstream open_output(const fs::path& path);
void write_text(const fs::path& path, const std::string& contents);

}  // namespace svcal
