#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "svcal/error.hpp"

namespace svcal {

// Half-open byte range [begin, end) into the parsed text.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const SourceSpan&) const = default;
};

// One "Holds ..." conclusion clause resolved to a vote split.
struct VoteExtraction {
  int article = 0;
  int votes_violation = 0;
  int votes_noviolation = 0;
  bool found_violation = false;
  SourceSpan source_span;

  int total() const { return votes_violation + votes_noviolation; }
  bool operator==(const VoteExtraction&) const = default;
};

enum class Formation { Committee, Chamber, GrandChamber };

class BenchFormation {
 public:
  // Chamber is the default formation when metadata is absent.
  BenchFormation() : BenchFormation(Formation::Chamber) {}
  explicit BenchFormation(Formation kind);

  Formation kind() const { return kind_; }
  int size() const { return size_; }
  std::string_view name() const;

  bool operator==(const BenchFormation&) const = default;

 private:
  Formation kind_;
  int size_;
};

struct ParseWarning {
  ErrorCode code;
  std::string message;
  SourceSpan source_span;
};

struct ParsedConclusion {
  std::vector<VoteExtraction> votes;
  std::vector<ParseWarning> warnings;
};

/// Extracts every recognised vote clause in document order.
///
/// Recognised forms (case-insensitive, whitespace-normalised):
///   "Holds, by X votes to Y, that there has been a/no violation of Article Z ..."
///   "Holds by X votes to Y that Article Z has (not) been violated"
///   "Holds unanimously that ..." with either body, resolved against the bench size.
/// A split whose counts do not add up to the bench size is still returned and
/// produces an InconsistentVoteSum warning. Throws NoVotePattern when nothing matches.
ParsedConclusion parse_conclusion(std::string_view text, const BenchFormation& bench = {});

/// Accepts COMMITTEE, CHAMBER and GRANDCHAMBER in any case; spaces, '_' and '-' are ignored.
BenchFormation resolve_bench(std::string_view metadata_tag);

/// Digit string or English word in [0, 17].
int normalize_numeral(std::string_view token);

std::string_view numeral_word(int value);

enum class NumeralStyle { Digits, Words };

/// Renders the canonical "Holds, by X votes to Y, that there has been a/no
/// violation of Article Z of the Convention" clause for an extraction.
std::string render_conclusion(const VoteExtraction& vote, NumeralStyle style = NumeralStyle::Words);

struct KeyedExtraction {
  std::string case_id;
  VoteExtraction vote;
};

struct ExtractionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

// A prediction is a true positive only when the (case, article) key exists in
// gold and the counts and finding agree exactly. Spans are ignored.
ExtractionScore score_extraction(const std::vector<KeyedExtraction>& predicted,
                                 const std::vector<KeyedExtraction>& gold);

}  // namespace svcal
