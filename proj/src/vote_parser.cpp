#include "svcal/vote_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <regex>
#include <tuple>

namespace svcal {

namespace {

constexpr std::array<std::string_view, 18> kNumberWords = {
    "zero", "one",    "two",    "three",    "four",     "five",    "six",     "seven",     "eight",
    "nine", "ten",    "eleven", "twelve",   "thirteen", "fourteen", "fifteen", "sixteen", "seventeen"};

// Lowercased text with whitespace runs collapsed to one space. origin[i] is the
// byte offset in the input of normalised character i.
struct NormalizedText {
  std::string text;
  std::vector<std::size_t> origin;
};

NormalizedText normalize(std::string_view input) {
  NormalizedText out;
  out.text.reserve(input.size());
  out.origin.reserve(input.size());
  bool in_space = false;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto c = static_cast<unsigned char>(input[i]);
    bool space = std::isspace(c) != 0;
    std::size_t width = 1;
    // U+00A0 no-break space is common in HUDOC exports.
    if (c == 0xC2 && i + 1 < input.size() && static_cast<unsigned char>(input[i + 1]) == 0xA0) {
      space = true;
      width = 2;
    }
    if (space) {
      if (!in_space) {
        out.text.push_back(' ');
        out.origin.push_back(i);
      }
      in_space = true;
      i += width - 1;
      continue;
    }
    in_space = false;
    out.text.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    out.origin.push_back(i);
  }
  return out;
}

const std::string kNumeral =
    "(\\d+|zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|"
    "fourteen|fifteen|sixteen|seventeen)\\b";

// "Article 6 § 1 (c) of Protocol No. 1"; group 1 = article, group 2 = protocol.
const std::string kArticle =
    "articles? (\\d+)(?: ?(?:§)+ ?\\d+(?: ?\\([a-z]\\))?(?: and \\d+)?)*(?: of protocol no\\.? ?(\\d+))?";

const std::regex& head_regex() {
  static const std::regex re("\\bholds,? ?(?:by " + kNumeral + " votes? to " + kNumeral +
                                 "|(unanimously)),? ?that ",
                             std::regex::ECMAScript | std::regex::optimize);
  return re;
}

// "there has been a/no violation of Article Z"
const std::regex& finding_first_regex() {
  static const std::regex re("there (?:has|have) been (a|no) violations? of " + kArticle +
                                 "(?: of the convention)?",
                             std::regex::ECMAScript | std::regex::optimize);
  return re;
}

// "Article Z has (not) been violated"
const std::regex& article_first_regex() {
  static const std::regex re(kArticle + "(?: of the convention)? (?:has|have|had) (not )?been violated",
                             std::regex::ECMAScript | std::regex::optimize);
  return re;
}

int parse_article(const std::string& digits) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return 0;
  return value;
}

}  // namespace

BenchFormation::BenchFormation(Formation kind) : kind_(kind) {
  switch (kind) {
    case Formation::Committee: size_ = 3; break;
    case Formation::Chamber: size_ = 7; break;
    case Formation::GrandChamber: size_ = 17; break;
  }
}

std::string_view BenchFormation::name() const {
  switch (kind_) {
    case Formation::Committee: return "COMMITTEE";
    case Formation::Chamber: return "CHAMBER";
    case Formation::GrandChamber: return "GRANDCHAMBER";
  }
  return "";
}

BenchFormation resolve_bench(std::string_view metadata_tag) {
  std::string key;
  for (char c : metadata_tag) {
    if (c == ' ' || c == '_' || c == '-') continue;
    key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (key == "COMMITTEE") return BenchFormation(Formation::Committee);
  if (key == "CHAMBER") return BenchFormation(Formation::Chamber);
  if (key == "GRANDCHAMBER") return BenchFormation(Formation::GrandChamber);
  fail(ErrorCode::UnknownFormation, "unrecognised court formation '" + std::string(metadata_tag) + "'");
}

int normalize_numeral(std::string_view token) {
  if (!token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc() && ptr == token.data() + token.size() && value <= 17) return value;
  } else {
    std::string lower(token);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto it = std::find(kNumberWords.begin(), kNumberWords.end(), lower);
    if (it != kNumberWords.end()) return static_cast<int>(it - kNumberWords.begin());
  }
  fail(ErrorCode::UnparsableNumeral, "cannot read '" + std::string(token) + "' as a vote count");
}

std::string_view numeral_word(int value) {
  if (value < 0 || value >= static_cast<int>(kNumberWords.size())) {
    fail(ErrorCode::UnparsableNumeral, "no word form for " + std::to_string(value));
  }
  return kNumberWords[static_cast<std::size_t>(value)];
}

ParsedConclusion parse_conclusion(std::string_view text, const BenchFormation& bench) {
  if (text.empty()) fail(ErrorCode::InvalidArgument, "conclusion text is empty");

  const NormalizedText norm = normalize(text);
  const std::string& s = norm.text;
  ParsedConclusion result;

  auto to_span = [&](std::size_t begin, std::size_t end) {
    return SourceSpan{norm.origin[begin], norm.origin[end - 1] + 1};
  };

  for (auto it = std::sregex_iterator(s.begin(), s.end(), head_regex()); it != std::sregex_iterator(); ++it) {
    const std::smatch& head = *it;
    const auto body_begin = head[0].second;
    const std::size_t clause_begin = static_cast<std::size_t>(head.position(0));

    std::smatch body;
    bool found = false;
    bool finding_first = false;
    if (std::regex_search(body_begin, s.cend(), body, finding_first_regex(),
                          std::regex_constants::match_continuous)) {
      finding_first = true;
      found = body[1].str() == "a";
    } else if (std::regex_search(body_begin, s.cend(), body, article_first_regex(),
                                 std::regex_constants::match_continuous)) {
      found = !body[3].matched;
    } else {
      continue;  // "Holds ... that the respondent State is to pay ..." and similar
    }

    const std::size_t clause_end = static_cast<std::size_t>(body[0].second - s.cbegin());
    const SourceSpan span = to_span(clause_begin, clause_end);
    const std::string article_text = finding_first ? body[2].str() : body[1].str();
    const bool protocol = finding_first ? body[3].matched : body[2].matched;

    if (protocol) {
      result.warnings.push_back({ErrorCode::UnsupportedArticle,
                                 "Article " + article_text + " of a Protocol has no integer article id; skipped",
                                 span});
      continue;
    }

    VoteExtraction vote;
    vote.article = parse_article(article_text);
    vote.found_violation = found;
    vote.source_span = span;
    if (vote.article <= 0) {
      result.warnings.push_back({ErrorCode::UnsupportedArticle, "article '" + article_text + "' out of range", span});
      continue;
    }

    if (head[3].matched) {
      vote.votes_violation = found ? bench.size() : 0;
      vote.votes_noviolation = found ? 0 : bench.size();
    } else {
      const int majority = normalize_numeral(head[1].str());
      const int minority = normalize_numeral(head[2].str());
      vote.votes_violation = found ? majority : minority;
      vote.votes_noviolation = found ? minority : majority;
      if (vote.total() == 0) {
        result.warnings.push_back({ErrorCode::InconsistentVoteSum, "clause records no votes; skipped", span});
        continue;
      }
      if (vote.total() != bench.size()) {
        result.warnings.push_back({ErrorCode::InconsistentVoteSum,
                                   "Article " + article_text + ": " + std::to_string(majority) + " + " +
                                       std::to_string(minority) + " votes on a bench of " +
                                       std::to_string(bench.size()),
                                   span});
      }
    }
    result.votes.push_back(vote);
  }

  if (result.votes.empty()) fail(ErrorCode::NoVotePattern, "no vote clause found in conclusion text");
  return result;
}

std::string render_conclusion(const VoteExtraction& vote, NumeralStyle style) {
  const int majority = vote.found_violation ? vote.votes_violation : vote.votes_noviolation;
  const int minority = vote.found_violation ? vote.votes_noviolation : vote.votes_violation;
  auto num = [style](int n) {
    return style == NumeralStyle::Words ? std::string(numeral_word(n)) : std::to_string(n);
  };
  return "Holds, by " + num(majority) + " votes to " + num(minority) + ", that there has been " +
         (vote.found_violation ? "a" : "no") + " violation of Article " + std::to_string(vote.article) +
         " of the Convention";
}

ExtractionScore score_extraction(const std::vector<KeyedExtraction>& predicted,
                                 const std::vector<KeyedExtraction>& gold) {
  using Key = std::pair<std::string, int>;
  std::map<Key, const VoteExtraction*> remaining;
  for (const auto& g : gold) remaining.emplace(Key{g.case_id, g.vote.article}, &g.vote);

  ExtractionScore score;
  score.predicted = predicted.size();
  score.gold = gold.size();
  for (const auto& p : predicted) {
    auto it = remaining.find(Key{p.case_id, p.vote.article});
    if (it == remaining.end()) continue;
    const VoteExtraction& g = *it->second;
    if (g.votes_violation == p.vote.votes_violation && g.votes_noviolation == p.vote.votes_noviolation &&
        g.found_violation == p.vote.found_violation) {
      ++score.true_positives;
      remaining.erase(it);
    }
  }

  if (score.predicted == 0 && score.gold == 0) {
    score.precision = score.recall = score.f1 = 1.0;
    return score;
  }
  const auto tp = static_cast<double>(score.true_positives);
  score.precision = score.predicted ? tp / static_cast<double>(score.predicted) : 0.0;
  score.recall = score.gold ? tp / static_cast<double>(score.gold) : 0.0;
  const double denom = score.precision + score.recall;
  score.f1 = denom > 0.0 ? 2.0 * score.precision * score.recall / denom : 0.0;
  return score;
}

}  // namespace svcal
