#include "svcal/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "svcal/difficulty.hpp"
#include "svcal/error.hpp"
#include "svcal/io.hpp"

namespace svcal {

using ordered_json = nlohmann::ordered_json;

namespace {

enum class Group { Unanimous, SplitVote };

constexpr const char* kGroupNames[] = {"unanimous", "split_vote", "all"};

Group group_of(const PredictionRecord& r) { return entropy(r.human->probs) > 0.0 ? Group::SplitVote : Group::Unanimous; }

// Numbers that may be infinite (zero-variance t statistics) become null in JSON.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json ttest_json(const TTestResult& t) {
  ordered_json o;
  o["mean_0"] = number(t.mean_0);
  o["mean_1"] = number(t.mean_1);
  o["n_0"] = t.n_0;
  o["n_1"] = t.n_1;
  o["t_value"] = number(t.t_value);
  o["df"] = number(t.df);
  o["p_value"] = number(t.p_value);
  o["zero_variance"] = t.zero_variance;
  return o;
}

ordered_json group_json(const std::vector<PredictionRecord>& records, int bins) {
  ordered_json o;
  o["count"] = records.size();
  if (records.empty()) return o;

  const F1Report f1 = f1_suite(records);
  o["micro_f1"] = f1.micro_f1;
  o["macro_f1"] = f1.macro_f1;
  o["hard_macro_f1"] = f1.hard_macro_f1;

  const EceReport e = ece(records, bins);
  o["ece"] = e.ece;
  o["mean_dist_ce"] = mean_dist_ce(records);

  ordered_json ece_bins = ordered_json::array();
  for (const auto& b : e.bins) {
    ece_bins.push_back({{"lower", b.lower},
                        {"upper", b.upper},
                        {"count", b.count},
                        {"mean_confidence", b.mean_confidence},
                        {"accuracy", b.accuracy}});
  }
  o["ece_bins"] = std::move(ece_bins);

  ordered_json articles = ordered_json::object();
  for (const auto& [article, a] : f1.per_article) {
    auto counts = [](const ConfusionCounts& c) { return ordered_json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}}; };
    articles[std::to_string(article)] = {{"all", counts(a.all)},
                                         {"alleged", counts(a.alleged)},
                                         {"f1", a.f1},
                                         {"hard_f1", a.hard_f1},
                                         {"degenerate", a.degenerate},
                                         {"hard_degenerate", a.hard_degenerate}};
  }
  o["per_article"] = std::move(articles);
  return o;
}

struct Variant {
  std::string name;
  std::vector<PredictionRecord> records;  // all carry human labels
};

std::string pairs_csv(const std::vector<PredictionRecord>& records) {
  std::ostringstream out;
  out << "case_id,article,group,gold,predicted,alleged,p_violation,confidence,correct,q_violation,dist_ce\n";
  for (const auto& r : records) {
    const Probs2 p = probabilities(r);
    const ConfidencePoint c = confidence_point(r);
    out << r.case_id << ',' << r.article << ',' << kGroupNames[static_cast<int>(group_of(r))] << ',' << r.gold << ','
        << predicted_class(r) << ',' << (r.alleged ? 1 : 0) << ',' << format_double(p[1]) << ','
        << format_double(c.confidence) << ',' << (c.correct ? 1 : 0) << ',' << format_double(r.human->probs[1])
        << ',' << format_double(dist_ce(*r.human, p)) << '\n';
  }
  return out.str();
}

std::string histogram_csv(const std::vector<std::vector<PredictionRecord>>& groups, int bins) {
  std::ostringstream out;
  out << "group,bin_lower,bin_upper,model_p_violation,human_q_violation,dist_ce\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const ProbabilityHistograms h = confidence_histogram(groups[g], bins);
    for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
      out << kGroupNames[g] << ',' << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1]) << ','
          << h.model_p1[k] << ',' << h.human_q1[k] << ',' << h.dist_ce[k] << '\n';
    }
  }
  return out.str();
}

std::vector<PredictionRecord> filter_articles(std::vector<PredictionRecord> records,
                                              const std::optional<std::set<int>>& articles) {
  if (!articles) return records;
  std::erase_if(records, [&](const PredictionRecord& r) { return !articles->contains(r.article); });
  return records;
}

// Loads, filters and joins one prediction file; returns the evaluation split
// records that have human labels and the keys of those that do not.
struct Prepared {
  std::vector<PredictionRecord> all;
  std::vector<PredictionRecord> evaluated;
  std::vector<PairKey> unlabelled;
};

Prepared prepare(const std::filesystem::path& path, const RunConfig& config,
                 const std::vector<KeyedExtraction>& votes) {
  Prepared out;
  out.all = filter_articles(load_predictions(path), config.articles);
  if (config.votes) out.all = join_votes(std::move(out.all), votes).predictions;
  bool any = false;
  for (const auto& r : out.all) {
    if (r.split != config.split) continue;
    any = true;
    if (r.human) {
      out.evaluated.push_back(r);
    } else {
      out.unlabelled.push_back(r.key());
    }
  }
  if (!any) {
    fail(ErrorCode::EmptyInput, path.string() + ": no predictions in split '" + std::string(to_string(config.split)) + "'");
  }
  if (out.evaluated.empty()) {
    fail(ErrorCode::MissingHumanLabel, path.string() + ": no evaluated pair has a judge vote distribution");
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (ece_bins < 1) fail(ErrorCode::InvalidArgument, "ECE bin count must be at least 1");
  if (!(entropy_bin_width > 0.0)) fail(ErrorCode::InvalidArgument, "entropy bin width must be positive");
  grid.points();
  if (predictions.empty()) fail(ErrorCode::InvalidArgument, "no prediction file given");
}

PipelineOutput run_pipeline(const RunConfig& config) {
  config.validate();
  PipelineOutput output;

  std::vector<KeyedExtraction> votes;
  if (config.votes) {
    votes = load_votes(*config.votes);
    if (config.articles) {
      std::erase_if(votes, [&](const KeyedExtraction& v) { return !config.articles->contains(v.vote.article); });
    }
  }

  const Prepared base = prepare(config.predictions, config, votes);

  std::vector<PredictionRecord> dev;
  for (const auto& r : base.all) {
    if (r.split == config.dev_split) dev.push_back(r);
  }
  if (config.temperature_scaling && !dev.empty()) {
    output.temperature = fit_temperature(dev, config.objective, config.grid, config.ece_bins);
  }

  std::vector<Variant> variants;
  variants.push_back({"base", base.evaluated});
  if (output.temperature) {
    Variant ts{"ts", base.evaluated};
    for (auto& r : ts.records) r.temperature = output.temperature->t;
    variants.push_back(std::move(ts));
  }
  if (config.soft_predictions) variants.push_back({"soft", prepare(*config.soft_predictions, config, votes).evaluated});

  auto emit = [&](const std::string& name, const std::string& contents) {
    const auto path = config.output_dir / name;
    write_text(path, contents);
    output.files.push_back(path);
  };

  ordered_json report;
  ordered_json cfg;
  cfg["predictions"] = config.predictions.generic_string();
  cfg["votes"] = config.votes ? ordered_json(config.votes->generic_string()) : ordered_json(nullptr);
  cfg["split"] = std::string(to_string(config.split));
  cfg["dev_split"] = std::string(to_string(config.dev_split));
  cfg["ece_bins"] = config.ece_bins;
  cfg["grid"] = {config.grid.lo, config.grid.hi, config.grid.step};
  cfg["objective"] = std::string(to_string(config.objective));
  cfg["entropy_bin_width"] = config.entropy_bin_width;
  cfg["seed"] = config.seed;
  cfg["t_test"] = config.t_test == TTestVariant::Welch ? "welch" : "student";
  cfg["articles"] = config.articles ? ordered_json(*config.articles) : ordered_json(nullptr);
  report["config"] = std::move(cfg);

  if (output.temperature) {
    report["temperature"] = {{"t", output.temperature->t},
                             {"objective", std::string(to_string(output.temperature->objective))},
                             {"dev_objective_value", output.temperature->dev_objective_value},
                             {"dev_count", dev.size()}};
  } else {
    report["temperature"] = nullptr;
  }

  ordered_json unlabelled = ordered_json::array();
  for (const auto& k : base.unlabelled) unlabelled.push_back(k.str());
  report["unlabelled_pairs"] = std::move(unlabelled);

  ordered_json variant_json = ordered_json::object();
  for (const auto& v : variants) {
    std::vector<std::vector<PredictionRecord>> groups(3);
    for (const auto& r : v.records) {
      groups[static_cast<int>(group_of(r))].push_back(r);
      groups[2].push_back(r);
    }
    ordered_json g;
    for (std::size_t i = 0; i < groups.size(); ++i) g[kGroupNames[i]] = group_json(groups[i], config.ece_bins);
    variant_json[v.name] = std::move(g);
    emit("pairs_" + v.name + ".csv", pairs_csv(v.records));
    emit("hist_" + v.name + ".csv", histogram_csv(groups, config.ece_bins));
    if (v.name == "base") {
      output.unanimous = groups[0].size();
      output.split_vote = groups[1].size();
      output.all = groups[2].size();
    }
  }
  report["variants"] = std::move(variant_json);

  std::map<PairKey, double> vote_entropy;
  if (config.votes) {
    std::vector<EntropyRow> rows;
    std::vector<VoteDistribution> dists;
    for (const auto& v : votes) {
      const VoteDistribution d(v.vote.votes_violation, v.vote.votes_noviolation);
      const PairKey key{v.case_id, v.vote.article};
      rows.push_back({key, entropy(d), is_single_dissent(d)});
      dists.push_back(d);
      vote_entropy.emplace(key, entropy(d));
    }
    std::sort(rows.begin(), rows.end(), [](const EntropyRow& a, const EntropyRow& b) { return a.key < b.key; });
    std::ostringstream ent;
    write_entropy_csv(ent, rows);
    emit("entropy.csv", ent.str());

    std::ostringstream hist;
    hist << "bin_lower,bin_upper,count\n";
    for (const auto& b : entropy_histogram(dists, config.entropy_bin_width)) {
      hist << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count << '\n';
    }
    emit("entropy_hist.csv", hist.str());
  }

  if (config.null_predictions) {
    std::vector<PredictionRecord> null_records;
    std::map<PairKey, PredictionRecord> null_by_key;
    for (auto& r : load_predictions(*config.null_predictions)) null_by_key.emplace(r.key(), std::move(r));
    for (const auto& r : base.evaluated) {
      auto it = null_by_key.find(r.key());
      if (it == null_by_key.end()) fail(ErrorCode::MisalignedKeys, "no null-input prediction for " + r.key().str());
      null_records.push_back(it->second);
    }
    const std::vector<PviRecord> pvis = pvi_records(base.evaluated, null_records);

    std::map<PairKey, Group> groups;
    std::ostringstream csv;
    csv << "case_id,article,group,p_cond,p_null,pvi,entropy\n";
    std::vector<PviRecord> sv_records;
    std::vector<KeyedValue> sv_entropy;
    for (std::size_t i = 0; i < pvis.size(); ++i) {
      const Group g = group_of(base.evaluated[i]);
      const double h = entropy(base.evaluated[i].human->probs);
      groups.emplace(pvis[i].key(), g);
      csv << pvis[i].case_id << ',' << pvis[i].article << ',' << kGroupNames[static_cast<int>(g)] << ','
          << format_double(pvis[i].p_cond) << ',' << format_double(pvis[i].p_null) << ','
          << format_double(pvis[i].pvi) << ',' << format_double(h) << '\n';
      if (g == Group::SplitVote) {
        sv_records.push_back(pvis[i]);
        sv_entropy.push_back({pvis[i].key(), h});
      }
    }
    emit("pvi.csv", csv.str());

    ordered_json pvi_json;
    pvi_json["convention"] = std::string(kPviConvention);
    try {
      const PviGroupReport gr = dataset_pvi(
          pvis, [&](const PviRecord& r) { return groups.at(r.key()) == Group::Unanimous; }, "unanimous",
          "split_vote", config.t_test);
      pvi_json["groups"] = {{gr.first.label, {{"count", gr.first.count}, {"mean_pvi", gr.first.mean_pvi}}},
                            {gr.second.label, {{"count", gr.second.count}, {"mean_pvi", gr.second.mean_pvi}}}};
      pvi_json["t_test"] = ttest_json(gr.test);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGroup) throw;
      pvi_json["groups"] = nullptr;
      pvi_json["note"] = e.what();
    }
    try {
      const CorrResult c = pvi_entropy_correlation(sv_records, sv_entropy);
      pvi_json["split_vote_entropy_correlation"] = {{"r", c.r}, {"p_value", c.p_value}, {"n", c.n}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGroup && e.code() != ErrorCode::ZeroVariance) throw;
      pvi_json["split_vote_entropy_correlation"] = nullptr;
    }
    report["pvi"] = std::move(pvi_json);
  }

  if (config.proxies) {
    if (!config.votes) fail(ErrorCode::InvalidArgument, "proxy association needs a vote file");
    const CsvTable table = read_csv(*config.proxies);
    std::vector<std::string> columns = config.proxy_columns;
    if (columns.empty()) {
      for (const auto& h : table.header) {
        if (h != "case_id" && h != "article") columns.push_back(h);
      }
    }
    std::vector<PairKey> pairs;
    for (const auto& [key, h] : vote_entropy) pairs.push_back(key);

    std::ostringstream csv;
    csv << "proxy,n_absent,n_present,mean_entropy_absent,mean_entropy_present,t_value,df,p_value,zero_variance\n";
    ordered_json assoc = ordered_json::array();
    for (const auto& column : columns) {
      const auto flags = proxy_flags(table, column, pairs);
      std::map<PairKey, double> covered;
      for (const auto& [key, flag] : flags) covered.emplace(key, vote_entropy.at(key));
      const TTestResult t = proxy_association(covered, flags, config.t_test).test;
      csv << column << ',' << t.n_0 << ',' << t.n_1 << ',' << format_double(t.mean_0) << ','
          << format_double(t.mean_1) << ',' << format_double(t.t_value) << ',' << format_double(t.df) << ','
          << format_double(t.p_value) << ',' << (t.zero_variance ? 1 : 0) << '\n';
      ordered_json row = ttest_json(t);
      row["proxy"] = column;
      assoc.push_back(std::move(row));
    }
    emit("association.csv", csv.str());
    report["association"] = std::move(assoc);
  }

  emit("report.json", report.dump(2) + "\n");
  return output;
}

}  // namespace svcal
