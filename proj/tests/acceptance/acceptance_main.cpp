// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: svcal_acceptance [scratch_dir]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "svcal/calibration.hpp"
#include "svcal/difficulty.hpp"
#include "svcal/distributions.hpp"
#include "svcal/error.hpp"
#include "svcal/io.hpp"
#include "svcal/metrics.hpp"
#include "svcal/pipeline.hpp"
#include "svcal/softtrain.hpp"
#include "svcal/stats.hpp"
#include "svcal/vote_parser.hpp"

using namespace svcal;
namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Collects the sub-checks of one criterion; the first failure is reported.
struct Criterion {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PredictionRecord rec(const std::string& id, int article, double z, int gold, bool alleged = true) {
  PredictionRecord r;
  r.case_id = id;
  r.article = article;
  r.logits = {0.0, z};
  r.gold = gold;
  r.alleged = alleged;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion entropy_convention() {
  Criterion c;
  const double h16 = entropy(VoteDistribution(1, 6));
  c.expect(h16 >= 0.405 && h16 <= 0.415, "entropy([1,6]) = " + fmt(h16));
  c.expect(entropy(VoteDistribution(0, 7)) == 0.0, "entropy([0,7]) != 0");
  for (int k = 1; k <= 8; ++k) {
    const double h = entropy(VoteDistribution(k, k));
    c.expect(std::abs(h - std::log(2.0)) <= 1e-12, "entropy([k,k]) off ln 2 at k=" + std::to_string(k));
  }
  if (c.ok) c.detail = "entropy([1,6]) = " + fmt(h16) + " nats";
  return c;
}

Criterion parser_quality(const fs::path& data) {
  Criterion c;
  std::vector<KeyedExtraction> predicted;
  const auto docs = load_conclusions(data / "votes" / "corpus.jsonl");
  for (const auto& doc : docs) {
    const BenchFormation bench = doc.formation ? resolve_bench(*doc.formation) : BenchFormation{};
    try {
      for (const auto& v : parse_conclusion(doc.text, bench).votes) predicted.push_back({doc.case_id, v});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoVotePattern) throw;
    }
  }
  const auto score = score_extraction(predicted, load_votes(data / "votes" / "gold.jsonl"));
  c.expect(docs.size() >= 40, "corpus has only " + std::to_string(docs.size()) + " snippets");
  c.expect(score.f1 >= 0.95, "corpus F1 = " + fmt(score.f1));

  Rng rng(2);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    static const Formation kinds[] = {Formation::Committee, Formation::Chamber, Formation::GrandChamber};
    const BenchFormation bench(kinds[uniform_int(rng, 0, 2)]);
    VoteExtraction v;
    v.article = uniform_int(rng, 1, 60);
    v.found_violation = uniform_int(rng, 0, 1) == 1;
    const int minority = uniform_int(rng, 0, bench.size() / 2);
    v.votes_violation = v.found_violation ? bench.size() - minority : minority;
    v.votes_noviolation = bench.size() - v.votes_violation;
    const auto style = uniform_int(rng, 0, 1) ? NumeralStyle::Words : NumeralStyle::Digits;
    const auto parsed = parse_conclusion(render_conclusion(v, style), bench);
    const bool same = parsed.votes.size() == 1 && parsed.votes[0].article == v.article &&
                      parsed.votes[0].votes_violation == v.votes_violation &&
                      parsed.votes[0].votes_noviolation == v.votes_noviolation &&
                      parsed.votes[0].found_violation == v.found_violation;
    failures += same ? 0 : 1;
  }
  c.expect(failures == 0, std::to_string(failures) + " round-trip failures");
  if (c.ok) {
    c.detail = "F1 " + fmt(score.f1) + " on " + std::to_string(docs.size()) + " snippets; 1000/1000 round-trips";
  }
  return c;
}

std::vector<PredictionRecord> planted(Rng& rng, std::size_t n, double t_true, Split split) {
  std::normal_distribution<double> z_dist(0.0, 6.0);
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z_dist(rng);
    auto r = rec("c" + std::to_string(i), 1 + static_cast<int>(i % 9), z, uniform(rng) < logistic(z / t_true) ? 1 : 0);
    r.split = split;
    out.push_back(r);
  }
  return out;
}

bool same_f1(const F1Report& a, const F1Report& b) {
  if (a.micro_f1 != b.micro_f1 || a.macro_f1 != b.macro_f1 || a.hard_macro_f1 != b.hard_macro_f1) return false;
  if (a.per_article.size() != b.per_article.size()) return false;
  for (const auto& [art, s] : a.per_article) {
    const auto& o = b.per_article.at(art);
    if (s.f1 != o.f1 || s.hard_f1 != o.hard_f1 || s.all.tp != o.all.tp || s.all.fp != o.all.fp ||
        s.all.fn != o.all.fn || s.alleged.tp != o.alleged.tp || s.alleged.fp != o.alleged.fp ||
        s.alleged.fn != o.alleged.fn)
      return false;
  }
  return true;
}

Criterion temperature_scaling() {
  Criterion c;
  Rng rng(3);
  const auto dev = planted(rng, 10000, 3.0, Split::Dev);
  const double t = fit_temperature(dev).t;
  c.expect(t >= 2.7 && t <= 3.3, "fitted t = " + fmt(t));

  // ECE is measured on a fresh sample from the same generator.
  auto test = planted(rng, 10000, 3.0, Split::Test);
  const double pre = ece(test).ece;
  const auto f1_pre = f1_suite(test);
  for (auto& r : test) r.temperature = t;
  const double post = ece(test).ece;
  c.expect(post < pre / 5.0, "ECE " + fmt(pre) + " -> " + fmt(post));
  c.expect(same_f1(f1_pre, f1_suite(test)), "f1_suite changed under scaling");
  if (c.ok) c.detail = "t = " + fmt(t) + "; ECE " + fmt(pre) + " -> " + fmt(post) + "; F1 suite identical";
  return c;
}

Criterion soft_loss() {
  Criterion c;
  Rng rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_problem = [&](int n, int d) {
    SoftTrainProblem p;
    p.features.resize(n, d);
    p.targets.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) p.features(i, j) = normal(rng);
      const double q = uniform(rng);
      p.targets.row(i) << q, 1.0 - q;
    }
    return p;
  };

  double worst = 0.0;
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const auto prob = random_problem(20, 5);
    LinearSoftModel m;
    m.weights.resize(5, 2);
    for (int j = 0; j < 5; ++j) m.weights.row(j) << normal(rng), normal(rng);
    const auto g = gradient(m, prob);
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 2; ++k) {
        LinearSoftModel up = m, down = m;
        up.weights(j, k) += h;
        down.weights(j, k) -= h;
        const double fd = (soft_cross_entropy(up, prob) - soft_cross_entropy(down, prob)) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(g(j, k)), 1e-8});
        worst = std::max(worst, std::abs(fd - g(j, k)) / denom);
      }
    }
  }
  c.expect(worst < 1e-5, "finite-difference relative error " + fmt(worst));

  auto hard = random_problem(60, 4);
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < hard.targets.rows(); ++i) {
    const int y = hard.targets(i, 1) > 0.5 ? 1 : 0;
    labels.push_back(y);
    hard.targets.row(i) << (y ? 0.0 : 1.0), (y ? 1.0 : 0.0);
  }
  const auto soft_run = train(hard, {});
  const auto hard_run = train_logistic(hard.features, labels, {});
  bool identical = soft_run.weights == hard_run.weights &&
                   soft_run.training_trace.size() == hard_run.training_trace.size();
  for (std::size_t k = 0; identical && k < soft_run.training_trace.size(); ++k)
    identical = soft_run.training_trace[k].loss == hard_run.training_trace[k].loss;
  c.expect(identical, "one-hot training differs from hard-label logistic regression");

  SoftTrainProblem null_model;
  null_model.features = Eigen::MatrixXd::Ones(200, 1);
  null_model.targets.resize(200, 2);
  for (int i = 0; i < 200; i += 2) {
    const double e = uniform(rng, 0.0, 0.25);
    null_model.targets.row(i) << 0.3 + e, 0.7 - e;
    null_model.targets.row(i + 1) << 0.3 - e, 0.7 + e;
  }
  const auto p = predict_proba(train(null_model, {}), Eigen::RowVectorXd::Ones(1));
  const double mean0 = null_model.targets.col(0).mean();
  c.expect(std::abs(p[0] - mean0) <= 1e-3 && std::abs(p[1] - (1.0 - mean0)) <= 1e-3,
           "intercept-only model predicts " + fmt(p[0]) + " vs mean " + fmt(mean0));
  if (c.ok) {
    c.detail = "max FD rel err " + fmt(worst) + "; one-hot bit-identical; intercept err " + fmt(std::abs(p[0] - mean0));
  }
  return c;
}

Criterion pvi_machinery() {
  Criterion c;
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p = uniform(rng, 1e-9, 1.0);
    worst = std::max(worst, std::abs(pvi(p, p)));
  }
  c.expect(worst <= 1e-12, "max |pvi(p,p)| = " + fmt(worst));

  std::vector<PviRecord> recs;
  for (int i = 0; i < 60; ++i) {
    recs.push_back(make_pvi_record("easy" + std::to_string(i), 3, uniform(rng, 0.8, 0.99), uniform(rng, 0.3, 0.5)));
    recs.push_back(make_pvi_record("hard" + std::to_string(i), 3, uniform(rng, 0.2, 0.4), uniform(rng, 0.5, 0.7)));
  }
  const auto rep =
      dataset_pvi(recs, [](const PviRecord& r) { return r.case_id.rfind("easy", 0) == 0; }, "easy", "hard");
  c.expect(rep.first.mean_pvi > rep.second.mean_pvi, "easy mean PVI not above hard");
  c.expect(rep.test.p_value < 0.05, "t-test p = " + fmt(rep.test.p_value));
  if (c.ok) {
    c.detail = "mean PVI easy " + fmt(rep.first.mean_pvi) + " > hard " + fmt(rep.second.mean_pvi) + ", p = " +
               fmt(rep.test.p_value);
  }
  return c;
}

Criterion statistics_oracle() {
  Criterion c;
  const std::vector<double> a = {0.4, 0.5, 0.6}, b = {0.6, 0.7, 0.8};
  const auto r = t_test(a, b);
  c.expect(std::abs(r.t_value + 2.449) <= 0.001, "t = " + fmt(r.t_value));
  c.expect(std::abs(r.df - 4.0) <= 1e-9, "df = " + fmt(r.df));
  c.expect(std::abs(r.p_value - 0.0705) <= 0.002, "p = " + fmt(r.p_value));
  const double p1 = two_sided_p(12.706, 1.0), p4 = two_sided_p(2.776, 4.0);
  c.expect(std::abs(p1 - 0.05) <= 0.001, "p(12.706, 1) = " + fmt(p1));
  c.expect(std::abs(p4 - 0.05) <= 0.001, "p(2.776, 4) = " + fmt(p4));
  const double corr = pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}).r;
  c.expect(std::abs(corr - 0.8) <= 1e-12, "pearson r = " + fmt(corr));
  if (c.ok) {
    c.detail = "t = " + fmt(r.t_value) + ", df = " + fmt(r.df) + ", p = " + fmt(r.p_value) + "; table p " + fmt(p1) +
               ", " + fmt(p4) + "; r = " + fmt(corr);
  }
  return c;
}

Criterion metric_oracles() {
  Criterion c;
  Rng rng(7);
  double worst = 0.0;
  bool axioms = true;
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform(rng), b = uniform(rng), m = uniform(rng);
    const Probs2 q{a, 1.0 - a}, p{b, 1.0 - b}, r{m, 1.0 - m};
    const double d = dist_ce(SoftLabel{q}, p);
    const double brute = 0.5 * (std::fabs(q[0] - p[0]) + std::fabs(q[1] - p[1]));
    worst = std::max(worst, std::abs(d - brute));
    axioms = axioms && d >= 0.0 && dist_ce(SoftLabel{q}, q) == 0.0 && (q == p || d > 0.0) &&
             d == dist_ce(SoftLabel{p}, q) && d <= dist_ce(SoftLabel{q}, r) + dist_ce(SoftLabel{r}, p) + 1e-15;
  }
  c.expect(worst <= 1e-12, "dist_ce off brute force by " + fmt(worst));
  c.expect(axioms, "dist_ce violates a metric axiom");

  std::vector<ConfidencePoint> pts;
  for (int i = 0; i < 5000; ++i) pts.push_back({uniform(rng, 0.5, 1.0), uniform(rng) < 0.8});
  const auto rep = ece(pts, 10);
  double recomputed = 0.0;
  for (const auto& bin : rep.bins) {
    recomputed +=
        static_cast<double>(bin.count) / static_cast<double>(rep.n) * std::abs(bin.accuracy - bin.mean_confidence);
  }
  c.expect(std::abs(recomputed - rep.ece) <= 1e-12, "ECE from bins differs by " + fmt(std::abs(recomputed - rep.ece)));

  // Article 3: TP, FP, FN; Article 6: TP. All pairs alleged.
  const std::vector<PredictionRecord> hand = {rec("a", 3, 2.0, 1), rec("b", 3, 2.0, 0), rec("c", 3, -2.0, 1),
                                              rec("d", 6, 2.0, 1)};
  const auto f1 = f1_suite(hand);
  c.expect(f1.hard_macro_f1 == 0.75, "hm-F1 = " + fmt(f1.hard_macro_f1));
  c.expect(std::abs(f1.micro_f1 - 0.6667) <= 1e-4, "micro-F1 = " + fmt(f1.micro_f1));
  if (c.ok) {
    c.detail = "dist_ce max dev " + fmt(worst) + "; ECE bins exact; hm-F1 " + fmt(f1.hard_macro_f1) + ", micro " +
               fmt(f1.micro_f1);
  }
  return c;
}

Criterion end_to_end(const fs::path& data, const fs::path& scratch) {
  Criterion c;
  auto config = [&](const std::string& name) {
    RunConfig cfg;
    cfg.predictions = data / "toy" / "predictions.jsonl";
    cfg.votes = data / "toy" / "votes.jsonl";
    cfg.soft_predictions = data / "toy" / "predictions_soft.jsonl";
    cfg.null_predictions = data / "toy" / "predictions_null.jsonl";
    cfg.proxies = data / "toy" / "proxies.csv";
    cfg.output_dir = scratch / name;
    fs::remove_all(cfg.output_dir);
    return cfg;
  };
  const auto first = run_pipeline(config("run1"));
  const auto second = run_pipeline(config("run2"));
  bool identical = first.files.size() == second.files.size() && !first.files.empty();
  for (std::size_t i = 0; identical && i < first.files.size(); ++i) {
    identical = first.files[i].filename() == second.files[i].filename() &&
                slurp(first.files[i]) == slurp(second.files[i]);
  }
  c.expect(identical, "report files differ between runs");
  c.expect(first.unanimous + first.split_vote == first.all, std::to_string(first.unanimous) + " + " +
                                                                std::to_string(first.split_vote) +
                                                                " != " + std::to_string(first.all));
  if (c.ok) {
    c.detail = std::to_string(first.files.size()) + " files byte-identical; " + std::to_string(first.unanimous) +
               " + " + std::to_string(first.split_vote) + " = " + std::to_string(first.all);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path data = SVCAL_TEST_DATA_DIR;
  const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "svcal_acceptance";

  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"1 entropy convention", entropy_convention},
      {"2 parser quality", [&] { return parser_quality(data); }},
      {"3 temperature scaling", temperature_scaling},
      {"4 soft-loss correctness", soft_loss},
      {"5 PVI machinery", pvi_machinery},
      {"6 statistics oracle", statistics_oracle},
      {"7 metric oracles", metric_oracles},
      {"8 end-to-end determinism", [&] { return end_to_end(data, scratch); }},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Criterion c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s  %-26s %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.c_str());
    failed += c.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
