#pragma once
// Report rendering: pooled and per-seed fairness tables (CSV + markdown),
// per-group score box plots, and parameter sweeps (oversampling level or
// minority training count) with summary plots. Every table value is
// recomputed from the persisted scores.csv files.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairseg/experiment.hpp"
#include "fairseg/plot.hpp"

namespace fairseg {

// Concatenate a split's subject scores across all seeds of an experiment.
inline std::vector<SubjectScore> pooled_scores(const ExperimentResult& r,
                                               const std::string& split) {
  std::vector<SubjectScore> out;
  for (const auto& sr : r.per_seed) {
    auto it = sr.splits.find(split);
    if (it == sr.splits.end()) continue;
    // Disambiguate subjects across seeds so pooled stats keep every sample.
    for (SubjectScore s : it->second.scores) {
      s.subject_id = "seed" + std::to_string(sr.seed) + "/" + s.subject_id;
      out.push_back(std::move(s));
    }
  }
  return out;
}

namespace detail {

inline std::string num(double v, int prec = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(prec) << v;
  return ss.str();
}

inline std::string opt_num(const std::optional<double>& v, int prec = 2) {
  return v ? num(*v, prec) : std::string("-");
}

inline std::string csv_opt(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream ss;
  ss.precision(17);
  ss << *v;
  return ss.str();
}

inline void write_report_row(std::ofstream& f, const std::string& split,
                             const std::string& experiment, const std::string& seed_label,
                             const FairnessReport& rep) {
  auto group_cells = [&](const GroupSummary& g) {
    std::ostringstream ss;
    ss.precision(17);
    ss << g.group << ',' << g.n << ',' << g.median_dsc << ',' << g.iqr_dsc << ','
       << csv_opt(g.median_hd) << ',' << csv_opt(g.iqr_hd);
    return ss.str();
  };
  std::ostringstream tail;
  tail.precision(17);
  tail << rep.fairness_gap << ',' << rep.ser << ',' << rep.mann_whitney.u << ','
       << rep.mann_whitney.p_two_sided << ',' << rep.mann_whitney.method << ','
       << (rep.mann_whitney.p_two_sided < 0.05 ? 1 : 0);
  for (const GroupSummary* g : {&rep.majority, &rep.minority})
    f << split << ',' << experiment << ',' << seed_label << ',' << group_cells(*g) << ','
      << tail.str() << '\n';
}

}  // namespace detail

// Markdown table for one split: metric rows, one (experiment, group) column
// pair per experiment; '*' marks p < 0.05.
inline std::string markdown_table(const std::vector<ExperimentResult>& results,
                                  const std::string& split,
                                  const std::vector<FairnessReport>& pooled) {
  std::ostringstream md;
  md << "| Metric |";
  for (const auto& r : results)
    md << ' ' << r.config.name << " (" << r.majority << ") | " << r.config.name << " ("
       << r.minority << ") |";
  md << "\n|---|";
  for (size_t i = 0; i < results.size(); ++i) md << "---|---|";
  md << '\n';

  auto row = [&](const std::string& name, auto cell) {
    md << "| " << name << " |";
    for (size_t i = 0; i < results.size(); ++i) {
      auto [a, b] = cell(pooled[i]);
      md << ' ' << a << " | " << b << " |";
    }
    md << '\n';
  };
  using detail::num;
  using detail::opt_num;
  row("Median DSC", [](const FairnessReport& r) {
    return std::pair(num(r.majority.median_dsc), num(r.minority.median_dsc));
  });
  row("IQR DSC", [](const FairnessReport& r) {
    return std::pair(num(r.majority.iqr_dsc), num(r.minority.iqr_dsc));
  });
  row("Median HD (mm)", [](const FairnessReport& r) {
    return std::pair(opt_num(r.majority.median_hd), opt_num(r.minority.median_hd));
  });
  row("IQR HD (mm)", [](const FairnessReport& r) {
    return std::pair(opt_num(r.majority.iqr_hd), opt_num(r.minority.iqr_hd));
  });
  row("SER", [](const FairnessReport& r) { return std::pair(num(r.ser), std::string("-")); });
  row("Fairness gap",
      [](const FairnessReport& r) { return std::pair(num(r.fairness_gap), std::string("-")); });
  row("p (Mann-Whitney U)", [](const FairnessReport& r) {
    std::string p = num(r.mann_whitney.p_two_sided, 4);
    if (r.mann_whitney.p_two_sided < 0.05) p += "*";
    return std::pair(p, std::string("-"));
  });
  return md.str();
}

// Renders report.csv (pooled + per-seed rows), report.md, and per-split
// box plots of the per-subject overall DSC distribution.
inline void render_report(const std::vector<ExperimentResult>& results,
                          const std::string& out_dir) {
  if (results.empty()) throw EmptyResults("no experiment results to report");
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "plots");

  std::ofstream csv(fs::path(out_dir) / "report.csv");
  if (!csv) throw IoError("cannot write report.csv in " + out_dir);
  csv << "split,experiment,seed,group,n,median_dsc,iqr_dsc,median_hd,iqr_hd,"
         "fairness_gap,ser,mwu_u,mwu_p,mwu_method,significant\n";

  std::ostringstream md;
  md << "# Fairness report\n\nGenerated from per-subject scores; '*' marks p < 0.05 "
        "(two-sided Mann-Whitney U on per-subject overall DSC).\n";

  for (const std::string split : {"internal", "external"}) {
    std::vector<FairnessReport> pooled;
    std::vector<const ExperimentResult*> present;
    std::vector<plot::BoxSeries> boxes;
    for (const auto& r : results) {
      auto scores = pooled_scores(r, split);
      if (scores.empty()) continue;
      FairnessReport rep = split_fairness_report(scores, r.majority, r.minority);
      detail::write_report_row(csv, split, r.config.name, "pooled", rep);
      for (const auto& sr : r.per_seed) {
        auto it = sr.splits.find(split);
        if (it == sr.splits.end()) continue;
        detail::write_report_row(csv, split, r.config.name, std::to_string(sr.seed),
                                 it->second.report);
      }
      for (const std::string g : {r.majority, r.minority}) {
        plot::BoxSeries bs;
        bs.label = r.config.name + ":" + g;
        for (const auto& s : scores)
          if (s.group == g) bs.values.push_back(s.overall_dsc);
        boxes.push_back(std::move(bs));
      }
      pooled.push_back(std::move(rep));
      present.push_back(&r);
    }
    if (pooled.empty()) continue;
    std::vector<ExperimentResult> shown;
    for (const auto* p : present) shown.push_back(*p);
    md << "\n## " << split << " test set (pooled over seeds)\n\n"
       << markdown_table(shown, split, pooled);
    for (const auto& r : shown)
      if (r.config.cropping == "cascaded") {
        for (const auto& sr : r.per_seed) {
          auto it = sr.splits.find(split);
          if (it == sr.splits.end() || it->second.bbox_errors.empty()) continue;
          std::vector<double> ex, ey;
          for (auto [x, y] : it->second.bbox_errors) {
            ex.push_back(x);
            ey.push_back(y);
          }
          md << "\nCascaded stage-1 box-size error (" << r.config.name << ", seed " << sr.seed
             << "): median " << detail::num(median(ex), 2) << "% (x), "
             << detail::num(median(ey), 2) << "% (y); empty stage-1 predictions: "
             << it->second.stage1_empty_count << "\n";
        }
      }
    plot::box_plot(boxes, std::string("Overall DSC by group - ") + split, "DSC",
                   (fs::path(out_dir) / "plots" / (std::string(split) + "_dsc_boxplot.png"))
                       .string());
  }

  std::ofstream mdf(fs::path(out_dir) / "report.md");
  if (!mdf) throw IoError("cannot write report.md in " + out_dir);
  mdf << md.str();
}

// ---- sweeps ----

struct SweepPoint {
  double value = 0.0;
  double median_dsc_majority = 0.0;
  double median_dsc_minority = 0.0;
  double fairness_gap = 0.0;
  double ser = 0.0;
  double mwu_p = 1.0;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;
};

// Sweeps one axis. "oversampling_level" varies the sampler interpolation on
// a fixed dataset; "minority_train_count" regenerates the training cohort
// per value. Evaluation uses the pooled internal test split.
inline SweepResult sweep(const ExperimentConfig& base, const DatasetSpec& spec,
                         const std::string& axis, const std::vector<double>& values,
                         const std::string& out_dir, const std::string& cache_dir) {
  if (values.empty()) throw InvalidParams("sweep needs at least one value");
  if (axis != "oversampling_level" && axis != "minority_train_count")
    throw InvalidParams("unknown sweep axis: " + axis);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  SweepResult result;
  result.axis = axis;

  std::string shared_data;
  if (axis == "oversampling_level") {
    shared_data = (fs::path(out_dir) / "data").string();
    if (!fs::exists(fs::path(shared_data) / "manifest.csv"))
      save_dataset(generate_dataset(spec), shared_data);
  }

  for (size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    ExperimentConfig cfg = base;
    std::string data_dir = shared_data;
    if (axis == "oversampling_level") {
      if (v < 0.0 || v > 1.0) throw InvalidParams("oversampling_level must be in [0,1]");
      cfg.strategy = "oversample";
      cfg.train.strategy = parse_strategy(cfg.strategy);
      cfg.train.oversample_level = v;
    } else {
      int count = static_cast<int>(std::lround(v));
      if (count < 1) throw InvalidParams("minority_train_count must be >= 1");
      DatasetSpec s = spec;
      s.train.per_group[s.minority_group] = count;
      data_dir = (fs::path(out_dir) / ("data_v" + std::to_string(i))).string();
      if (!fs::exists(fs::path(data_dir) / "manifest.csv"))
        save_dataset(generate_dataset(s), data_dir);
    }
    cfg.name = base.name + "_" + axis + "_" + detail::num(v, 3);
    ExperimentResult er = run_experiment(
        cfg, data_dir, (fs::path(out_dir) / ("value_" + std::to_string(i))).string(),
        cache_dir);
    auto scores = pooled_scores(er, "internal");
    FairnessReport rep = split_fairness_report(scores, er.majority, er.minority);
    SweepPoint pt;
    pt.value = v;
    pt.median_dsc_majority = rep.majority.median_dsc;
    pt.median_dsc_minority = rep.minority.median_dsc;
    pt.fairness_gap = rep.fairness_gap;
    pt.ser = rep.ser;
    pt.mwu_p = rep.mann_whitney.p_two_sided;
    result.points.push_back(pt);
  }

  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  if (!csv) throw IoError("cannot write sweep.csv in " + out_dir);
  csv << "axis,value,median_dsc_majority,median_dsc_minority,fairness_gap,ser,mwu_p\n";
  csv.precision(17);
  for (const auto& p : result.points)
    csv << axis << ',' << p.value << ',' << p.median_dsc_majority << ','
        << p.median_dsc_minority << ',' << p.fairness_gap << ',' << p.ser << ',' << p.mwu_p
        << '\n';

  plot::LineSeries maj{"majority", {}}, min_{"minority", {}};
  plot::LineSeries smaj{"majority", {}}, smin{"minority", {}};
  for (const auto& p : result.points) {
    maj.points.push_back({p.value, p.median_dsc_majority});
    min_.points.push_back({p.value, p.median_dsc_minority});
    smaj.points.push_back({p.fairness_gap, p.median_dsc_majority});
    smin.points.push_back({p.fairness_gap, p.median_dsc_minority});
  }
  plot::line_plot({maj, min_}, "Median DSC vs " + axis, axis, "median DSC",
                  (fs::path(out_dir) / "dsc_vs_axis.png").string());
  plot::line_plot({smaj, smin}, "Median DSC vs fairness gap", "fairness gap", "median DSC",
                  (fs::path(out_dir) / "dsc_vs_fg.png").string(), /*lines=*/false);
  return result;
}

}  // namespace fairseg
