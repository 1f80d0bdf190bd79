// svcal: vote extraction, calibration and difficulty analysis for split-vote
// case outcome data.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
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

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace svcal;

namespace {

// Writes to the file when a path is given, stdout otherwise.
void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    write_text(path, contents);
  }
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::vector<PredictionRecord> select_split(std::vector<PredictionRecord> records, const std::string& split) {
  if (split.empty() || split == "all") return records;
  const Split s = parse_split(split);
  std::erase_if(records, [&](const PredictionRecord& r) { return r.split != s; });
  return records;
}

std::vector<PredictionRecord> load_joined(const std::string& predictions, const std::string& votes,
                                          const std::string& split) {
  auto records = select_split(load_predictions(predictions), split);
  if (!votes.empty()) {
    JoinResult joined = join_votes(std::move(records), load_votes(votes));
    for (const auto& k : joined.unmatched) std::cerr << "warning: no vote record for " << k.str() << '\n';
    records = std::move(joined.predictions);
  }
  return records;
}

// ---- extract-votes ----------------------------------------------------------

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string formation = "CHAMBER";
  std::string out;
  std::string gold;
};

void run_extract(const ExtractArgs& args) {
  const BenchFormation fallback = resolve_bench(args.formation);
  std::vector<KeyedExtraction> votes;
  for (const auto& input : args.inputs) {
    for (const auto& doc : load_conclusions(input)) {
      const BenchFormation bench = doc.formation ? resolve_bench(*doc.formation) : fallback;
      try {
        const ParsedConclusion parsed = parse_conclusion(doc.text, bench);
        for (const auto& w : parsed.warnings) std::cerr << "warning: " << doc.case_id << ": " << w.message << '\n';
        for (const auto& v : parsed.votes) votes.push_back({doc.case_id, v});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoVotePattern) throw;
        std::cerr << "warning: " << doc.case_id << ": no vote clause found\n";
      }
    }
  }
  std::ostringstream out;
  write_votes(out, votes);
  emit(args.out, out.str());

  if (!args.gold.empty()) {
    const ExtractionScore s = score_extraction(votes, load_votes(args.gold));
    ordered_json j{{"precision", s.precision}, {"recall", s.recall},     {"f1", s.f1},
                   {"true_positives", s.true_positives}, {"predicted", s.predicted}, {"gold", s.gold}};
    std::cout << j.dump(2) << '\n';
  }
}

// ---- entropy ----------------------------------------------------------------

struct EntropyArgs {
  std::string votes;
  std::string out;
  std::string histogram;
  double bin_width = kDefaultEntropyBinWidth;
};

void run_entropy(const EntropyArgs& args) {
  std::vector<EntropyRow> rows;
  std::vector<VoteDistribution> dists;
  for (const auto& v : load_votes(args.votes)) {
    const VoteDistribution d(v.vote.votes_violation, v.vote.votes_noviolation);
    rows.push_back({{v.case_id, v.vote.article}, entropy(d), is_single_dissent(d)});
    dists.push_back(d);
  }
  std::ostringstream out;
  write_entropy_csv(out, rows);
  emit(args.out, out.str());
  if (!args.histogram.empty()) {
    std::ostringstream hist;
    hist << "bin_lower,bin_upper,count\n";
    for (const auto& b : entropy_histogram(dists, args.bin_width)) {
      hist << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count << '\n';
    }
    write_text(args.histogram, hist.str());
  }
}

// ---- metrics ----------------------------------------------------------------

struct MetricsArgs {
  std::string predictions;
  std::string votes;
  std::string split = "test";
  int bins = kDefaultEceBins;
  std::string out;
  std::string histogram;
};

void run_metrics(const MetricsArgs& args) {
  const auto records = load_joined(args.predictions, args.votes, args.split);
  if (records.empty()) fail(ErrorCode::EmptyInput, "no predictions selected");

  ordered_json j;
  j["count"] = records.size();
  const F1Report f1 = f1_suite(records);
  j["micro_f1"] = f1.micro_f1;
  j["macro_f1"] = f1.macro_f1;
  j["hard_macro_f1"] = f1.hard_macro_f1;
  const EceReport e = ece(records, args.bins);
  j["ece"] = e.ece;
  ordered_json bins = ordered_json::array();
  for (const auto& b : e.bins) {
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"count", b.count},
                    {"mean_confidence", b.mean_confidence},
                    {"accuracy", b.accuracy}});
  }
  j["ece_bins"] = std::move(bins);

  std::vector<PredictionRecord> labelled;
  for (const auto& r : records) {
    if (r.human) labelled.push_back(r);
  }
  j["human_labelled"] = labelled.size();
  j["mean_dist_ce"] = labelled.size() == records.size() ? ordered_json(mean_dist_ce(records)) : ordered_json(nullptr);

  ordered_json articles = ordered_json::object();
  for (const auto& [article, a] : f1.per_article) {
    articles[std::to_string(article)] = {{"tp", a.all.tp},       {"fp", a.all.fp},
                                         {"fn", a.all.fn},       {"f1", a.f1},
                                         {"hard_tp", a.alleged.tp}, {"hard_fp", a.alleged.fp},
                                         {"hard_fn", a.alleged.fn}, {"hard_f1", a.hard_f1},
                                         {"degenerate", a.degenerate}};
  }
  j["per_article"] = std::move(articles);
  emit(args.out, j.dump(2) + "\n");

  if (!args.histogram.empty()) {
    const ProbabilityHistograms h = confidence_histogram(labelled, args.bins);
    std::ostringstream csv;
    csv << "bin_lower,bin_upper,model_p_violation,human_q_violation,dist_ce\n";
    for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
      csv << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1]) << ',' << h.model_p1[k] << ','
          << h.human_q1[k] << ',' << h.dist_ce[k] << '\n';
    }
    write_text(args.histogram, csv.str());
  }
}

// ---- calibrate / apply ------------------------------------------------------

struct CalibrateArgs {
  std::string dev;
  std::string split;
  std::string objective = "nll";
  std::string grid = "0.25:10:0.05";
  int bins = kDefaultEceBins;
  std::string out;
};

void run_calibrate(const CalibrateArgs& args) {
  const auto dev = select_split(load_predictions(args.dev), args.split);
  const Temperature t = fit_temperature(dev, parse_objective(args.objective), parse_grid(args.grid), args.bins);
  emit(args.out, temperature_json(t, dev.size()));
}

struct ApplyArgs {
  std::string predictions;
  std::optional<double> t;
  std::string temperature_file;
  std::string out;
};

void run_apply(const ApplyArgs& args) {
  double t = 0.0;
  if (args.t) {
    t = *args.t;
  } else if (!args.temperature_file.empty()) {
    t = load_temperature(args.temperature_file).t;
  } else {
    fail(ErrorCode::InvalidArgument, "give --t or --temperature-file");
  }
  apply_temperature({0.0, 0.0}, t);  // validates t
  auto records = load_predictions(args.predictions);
  for (auto& r : records) r.temperature = t;
  std::ostringstream out;
  write_predictions(out, records, true);
  emit(args.out, out.str());
}

// ---- pvi --------------------------------------------------------------------

struct PviArgs {
  std::string cond;
  std::string null_input;
  std::string votes;
  std::string split;
  std::string out;
  std::string report;
  bool student = false;
};

void run_pvi(const PviArgs& args) {
  const auto cond = load_joined(args.cond, args.votes, args.split);
  const auto null_records = select_split(load_predictions(args.null_input), args.split);
  const auto pvis = pvi_records(cond, null_records);

  std::ostringstream csv;
  csv << "case_id,article,p_cond,p_null,pvi\n";
  for (const auto& p : pvis) {
    csv << p.case_id << ',' << p.article << ',' << format_double(p.p_cond) << ',' << format_double(p.p_null) << ','
        << format_double(p.pvi) << '\n';
  }
  emit(args.out, csv.str());

  if (args.report.empty()) return;
  ordered_json j;
  j["convention"] = std::string(kPviConvention);
  j["count"] = pvis.size();
  std::map<PairKey, double> entropy_by_key;
  for (const auto& r : cond) {
    if (r.human) entropy_by_key.emplace(r.key(), entropy(r.human->probs));
  }
  if (entropy_by_key.size() == cond.size()) {
    const auto variant = args.student ? TTestVariant::Student : TTestVariant::Welch;
    const PviGroupReport gr =
        dataset_pvi(pvis, [&](const PviRecord& r) { return entropy_by_key.at(r.key()) == 0.0; }, "unanimous",
                    "split_vote", variant);
    j["groups"] = {{gr.first.label, {{"count", gr.first.count}, {"mean_pvi", gr.first.mean_pvi}}},
                   {gr.second.label, {{"count", gr.second.count}, {"mean_pvi", gr.second.mean_pvi}}}};
    j["t_test"] = {{"t_value", num(gr.test.t_value)}, {"df", num(gr.test.df)}, {"p_value", num(gr.test.p_value)},
                   {"zero_variance", gr.test.zero_variance}};
    std::vector<PviRecord> sv;
    std::vector<KeyedValue> sv_entropy;
    for (const auto& p : pvis) {
      const double h = entropy_by_key.at(p.key());
      if (h > 0.0) {
        sv.push_back(p);
        sv_entropy.push_back({p.key(), h});
      }
    }
    if (sv.size() >= 3) {
      const CorrResult c = pvi_entropy_correlation(sv, sv_entropy);
      j["split_vote_entropy_correlation"] = {{"r", c.r}, {"p_value", c.p_value}, {"n", c.n}};
    }
  }
  write_text(args.report, j.dump(2) + "\n");
}

// ---- train-soft ---------------------------------------------------------------

struct TrainArgs {
  std::string features;
  std::string targets;
  double lr = 1.0;
  int epochs = 200;
  std::uint64_t seed = 0;
  std::string loss = "mean";
  std::string out;
  std::string predict_out;
};

void run_train(const TrainArgs& args) {
  const SoftTrainProblem problem = load_problem(args.features, args.targets);
  TrainConfig config;
  config.learning_rate = args.lr;
  config.epochs = args.epochs;
  config.seed = args.seed;
  if (args.loss == "sum") {
    config.loss_form = LossForm::Sum;
  } else if (args.loss != "mean") {
    fail(ErrorCode::InvalidArgument, "--loss must be 'sum' or 'mean'");
  }
  const LinearSoftModel model = train(problem, config);
  save_model(args.out, model);
  if (!args.predict_out.empty()) {
    std::ostringstream csv;
    csv << "row,p_0,p_1\n";
    for (Eigen::Index i = 0; i < problem.features.rows(); ++i) {
      const Probs2 p = predict_proba(model, problem.features.row(i));
      csv << i << ',' << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
    }
    write_text(args.predict_out, csv.str());
  }
  std::cerr << "final loss " << format_double(model.training_trace.back().loss) << " after "
            << model.training_trace.back().epoch << " epochs\n";
}

// ---- assoc ------------------------------------------------------------------

struct AssocArgs {
  std::string entropy;
  std::string proxy;
  std::vector<std::string> columns;
  bool student = false;
  std::string out;
};

void run_assoc(const AssocArgs& args) {
  const auto entropies = load_entropy_csv(args.entropy);
  const CsvTable table = read_csv(args.proxy);
  std::vector<std::string> columns = args.columns;
  if (columns.empty()) {
    for (const auto& h : table.header) {
      if (h != "case_id" && h != "article") columns.push_back(h);
    }
  }
  std::vector<PairKey> pairs;
  for (const auto& [k, h] : entropies) pairs.push_back(k);

  std::ostringstream csv;
  csv << "proxy,n_absent,n_present,mean_entropy_absent,mean_entropy_present,t_value,df,p_value,zero_variance\n";
  for (const auto& column : columns) {
    const auto flags = proxy_flags(table, column, pairs);
    std::map<PairKey, double> covered;
    for (const auto& [k, f] : flags) covered.emplace(k, entropies.at(k));
    const TTestResult t =
        proxy_association(covered, flags, args.student ? TTestVariant::Student : TTestVariant::Welch).test;
    csv << column << ',' << t.n_0 << ',' << t.n_1 << ',' << format_double(t.mean_0) << ','
        << format_double(t.mean_1) << ',' << format_double(t.t_value) << ',' << format_double(t.df) << ','
        << format_double(t.p_value) << ',' << (t.zero_variance ? 1 : 0) << '\n';
  }
  emit(args.out, csv.str());
}

// ---- report -----------------------------------------------------------------

struct ReportArgs {
  std::string predictions;
  std::string votes;
  std::string soft;
  std::string null_input;
  std::string proxy;
  std::vector<std::string> columns;
  std::string split = "test";
  std::string dev_split = "dev";
  bool no_ts = false;
  int bins = kDefaultEceBins;
  std::string grid = "0.25:10:0.05";
  std::string objective = "nll";
  double bin_width = kDefaultEntropyBinWidth;
  std::uint64_t seed = 0;
  bool student = false;
  std::string articles;
  bool all_articles = false;
  std::string out_dir = "report";
};

void run_report(const ReportArgs& args) {
  RunConfig config;
  config.predictions = args.predictions;
  if (!args.votes.empty()) config.votes = args.votes;
  if (!args.soft.empty()) config.soft_predictions = args.soft;
  if (!args.null_input.empty()) config.null_predictions = args.null_input;
  if (!args.proxy.empty()) config.proxies = args.proxy;
  config.proxy_columns = args.columns;
  config.split = parse_split(args.split);
  config.dev_split = parse_split(args.dev_split);
  config.temperature_scaling = !args.no_ts;
  config.ece_bins = args.bins;
  config.grid = parse_grid(args.grid);
  config.objective = parse_objective(args.objective);
  config.entropy_bin_width = args.bin_width;
  config.seed = args.seed;
  config.t_test = args.student ? TTestVariant::Student : TTestVariant::Welch;
  if (!args.all_articles) {
    if (!args.articles.empty()) {
      config.articles = load_article_list(args.articles);
    } else if (const fs::path fallback = fs::path(SVCAL_DATA_DIR) / "articles.txt"; fs::exists(fallback)) {
      config.articles = load_article_list(fallback);
    }
  }
  config.output_dir = args.out_dir;

  const PipelineOutput out = run_pipeline(config);
  std::cerr << "unanimous " << out.unanimous << " + split_vote " << out.split_vote << " = all " << out.all << '\n';
  if (out.temperature) std::cerr << "temperature " << format_double(out.temperature->t) << '\n';
  for (const auto& f : out.files) std::cerr << "wrote " << f.generic_string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-vote calibration toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract-votes", "Extract judge vote splits from conclusion text");
  c_extract->add_option("--input,-i", extract.inputs, "Text file(s) or JSONL {case_id, formation, text}")
      ->required()
      ;
  c_extract->add_option("--formation", extract.formation, "Bench formation when a document has none")
      ->capture_default_str();
  c_extract->add_option("--out,-o", extract.out, "Vote JSONL output (default stdout)");
  c_extract->add_option("--gold", extract.gold, "Gold vote JSONL; prints precision/recall/F1")
      ;

  EntropyArgs ent;
  auto* c_entropy = app.add_subcommand("entropy", "Vote-distribution entropy per pair");
  c_entropy->add_option("--votes", ent.votes)->required();
  c_entropy->add_option("--out,-o", ent.out, "Entropy CSV (default stdout)");
  c_entropy->add_option("--histogram", ent.histogram, "Entropy histogram CSV");
  c_entropy->add_option("--bin-width", ent.bin_width)->capture_default_str();

  MetricsArgs met;
  auto* c_metrics = app.add_subcommand("metrics", "F1 suite, ECE and DistCE for a prediction file");
  c_metrics->add_option("--predictions", met.predictions)->required();
  c_metrics->add_option("--votes", met.votes, "Vote JSONL to attach human labels");
  c_metrics->add_option("--split", met.split, "train, dev, test or all")->capture_default_str();
  c_metrics->add_option("--bins", met.bins)->capture_default_str();
  c_metrics->add_option("--out,-o", met.out);
  c_metrics->add_option("--histogram", met.histogram, "Probability/DistCE histogram CSV");

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Fit a temperature on a development split");
  c_cal->add_option("--dev", cal.dev)->required();
  c_cal->add_option("--split", cal.split, "Only use records of this split");
  c_cal->add_option("--objective", cal.objective, "nll or ece")->capture_default_str();
  c_cal->add_option("--grid", cal.grid, "lo:hi:step")->capture_default_str();
  c_cal->add_option("--bins", cal.bins)->capture_default_str();
  c_cal->add_option("--out,-o", cal.out);

  ApplyArgs apl;
  auto* c_apply = app.add_subcommand("apply", "Attach temperature-scaled probabilities to predictions");
  c_apply->add_option("--predictions", apl.predictions)->required();
  c_apply->add_option("--t", apl.t);
  c_apply->add_option("--temperature-file", apl.temperature_file);
  c_apply->add_option("--out,-o", apl.out);

  PviArgs pv;
  auto* c_pvi = app.add_subcommand("pvi", "Pointwise V-usable information from conditional and null predictions");
  c_pvi->add_option("--cond", pv.cond)->required();
  c_pvi->add_option("--null", pv.null_input)->required();
  c_pvi->add_option("--votes", pv.votes);
  c_pvi->add_option("--split", pv.split);
  c_pvi->add_option("--out,-o", pv.out);
  c_pvi->add_option("--report", pv.report, "Group comparison JSON");
  c_pvi->add_flag("--student", pv.student, "Pooled-variance t-test");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train-soft", "Train a linear model on soft labels");
  c_train->add_option("--features", tr.features)->required();
  c_train->add_option("--targets", tr.targets)->required();
  c_train->add_option("--lr", tr.lr)->capture_default_str();
  c_train->add_option("--epochs", tr.epochs)->capture_default_str();
  c_train->add_option("--seed", tr.seed)->capture_default_str();
  c_train->add_option("--loss", tr.loss, "sum or mean")->capture_default_str();
  c_train->add_option("--out,-o", tr.out)->required();
  c_train->add_option("--predict-out", tr.predict_out, "Per-row probabilities CSV");

  AssocArgs as;
  auto* c_assoc = app.add_subcommand("assoc", "Proxy variable vs vote entropy t-tests");
  c_assoc->add_option("--entropy", as.entropy)->required();
  c_assoc->add_option("--proxy", as.proxy)->required();
  c_assoc->add_option("--column", as.columns, "Proxy column(s); default all");
  c_assoc->add_flag("--student", as.student);
  c_assoc->add_option("--out,-o", as.out);

  ReportArgs rep;
  auto* c_report = app.add_subcommand("report", "Full per-group calibration report");
  c_report->add_option("--predictions", rep.predictions)->required();
  c_report->add_option("--votes", rep.votes);
  c_report->add_option("--soft", rep.soft, "Predictions of a soft-loss model");
  c_report->add_option("--null", rep.null_input, "Null-input predictions for PVI");
  c_report->add_option("--proxy", rep.proxy, "Proxy CSV for association tests");
  c_report->add_option("--column", rep.columns);
  c_report->add_option("--split", rep.split)->capture_default_str();
  c_report->add_option("--dev-split", rep.dev_split)->capture_default_str();
  c_report->add_flag("--no-ts", rep.no_ts, "Skip temperature scaling");
  c_report->add_option("--bins", rep.bins)->capture_default_str();
  c_report->add_option("--grid", rep.grid)->capture_default_str();
  c_report->add_option("--objective", rep.objective)->capture_default_str();
  c_report->add_option("--bin-width", rep.bin_width)->capture_default_str();
  c_report->add_option("--seed", rep.seed)->capture_default_str();
  c_report->add_flag("--student", rep.student);
  c_report->add_option("--articles", rep.articles, "Article allow-list file");
  c_report->add_flag("--all-articles", rep.all_articles, "Disable the article allow-list");
  c_report->add_option("--out-dir", rep.out_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_extract) run_extract(extract);
    else if (*c_entropy) run_entropy(ent);
    else if (*c_metrics) run_metrics(met);
    else if (*c_cal) run_calibrate(cal);
    else if (*c_apply) run_apply(apl);
    else if (*c_pvi) run_pvi(pv);
    else if (*c_train) run_train(tr);
    else if (*c_assoc) run_assoc(as);
    else if (*c_report) run_report(rep);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
