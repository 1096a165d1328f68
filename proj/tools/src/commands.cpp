/*
 * Copyright 2026 The reclab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "reclab/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "reclab/cli/config.hpp"
#include "reclab/cli/svg.hpp"
#include "reclab/csv.hpp"
#include "reclab/error.hpp"
#include "reclab/metrics.hpp"
#include "reclab/model.hpp"
#include "reclab/trainer.hpp"

namespace reclab::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string parent_dir(const std::string& path) {
  const fs::path p = fs::path(path).parent_path();
  return p.empty() ? "." : p.string();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + path.string());
    f << text;
  }
  fs::rename(tmp, path);
}

// Maps library exceptions to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const OracleFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const InvalidState& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    // InvalidInput, FormatError, VersionMismatch, GenerationError and I/O.
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

struct RunResult {
  bool ok = false;
  std::optional<MetricsReport> report;
};

RunResult train_into(const TrainConfig& config, const std::string& dir, std::ostream& err) {
  try {
    const TrainLog log = train(config);
    write_train_outputs(log, dir);
    RunResult r;
    r.ok = true;
    if (!log.eval.empty()) r.report = log.eval.back().report;
    return r;
  } catch (const TrainingAborted& e) {
    TrainLog partial = e.partial_log();
    partial.final_params = e.last_good();
    write_train_outputs(partial, dir);
    err << "error: " << e.what() << '\n';
    return {};
  }
}

std::string format_report_csv(const MetricsReport& report) {
  std::ostringstream os;
  const auto header = metrics_csv_header(static_cast<int>(report.num_classes()));
  write_csv_row(os, header);
  const auto row = metrics_csv_row(report);
  write_csv_row(os, row);
  return os.str();
}

}  // namespace

int cmd_gen_data(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GeneratorSpec spec = parse_generator_config(read_text(config_path));
    if (seed) std::visit([&](auto& s) { s.seed = *seed; }, spec);
    const Dataset ds = generate(spec);
    save_dataset(ds, out_path);
    out << "wrote " << ds.labels.size() << " samples, " << ds.num_classes << " classes to "
        << out_path << '\n';
    return kExitOk;
  });
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    TrainConfig config = parse_train_config(read_text(config_path), parent_dir(config_path));
    if (seed) apply_seed(config, *seed);
    const RunResult r = train_into(config, out_dir, err);
    if (!r.ok) return static_cast<int>(kExitNumerical);
    out << "wrote train.csv, eval.csv, weights.csv, checkpoint.bin to " << out_dir << '\n';
    if (r.report && r.report->mean_iou) {
      out << "final mean_accuracy=" << format_optional(r.report->mean_accuracy)
          << " mean_iou=" << format_optional(r.report->mean_iou) << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ModelParams params = load_checkpoint(checkpoint_path);
    Dataset ds;
    if (fs::path(data_path).extension() == ".json") {
      ds = generate(parse_generator_config(read_text(data_path)));
    } else {
      ds = load_dataset(data_path);
    }
    const MetricsReport report = evaluate(params, ds);
    const fs::path dir(out_dir);
    write_text(dir / "report.json", metrics_to_json(report) + "\n");
    write_text(dir / "report.csv", format_report_csv(report));
    out << "mean_accuracy=" << format_optional(report.mean_accuracy)
        << " mean_iou=" << format_optional(report.mean_iou) << '\n';
    return kExitOk;
  });
}

int cmd_sweep(const std::string& sweep_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SweepSpec spec = parse_sweep_spec(read_text(sweep_path), parent_dir(sweep_path));
    if (seed) spec.seeds = {*seed};
    const int num_classes = materialize(spec.base.data).num_classes;

    std::vector<std::string> header{"label", "loss", "seed", "status", "mean_accuracy", "mean_iou"};
    for (const char* prefix : {"recall_", "precision_", "iou_"}) {
      for (int c = 0; c < num_classes; ++c) header.push_back(prefix + std::to_string(c));
    }
    std::ostringstream summary;
    write_csv_row(summary, header);

    std::vector<ScatterPoint> points;
    int succeeded = 0;
    for (const SweepRun& run : spec.runs) {
      double sum_acc = 0.0, sum_iou = 0.0;
      int n_acc = 0, n_iou = 0;
      for (std::uint64_t s : spec.seeds) {
        TrainConfig config = spec.base;
        config.loss = run.loss;
        apply_seed(config, s);
        const fs::path dir = fs::path(out_dir) / run.label / ("seed_" + std::to_string(s));
        RunResult r;
        try {
          r = train_into(config, dir.string(), err);
        } catch (const std::exception& e) {
          err << "run " << run.label << " seed " << s << " failed: " << e.what() << '\n';
        }
        std::vector<std::string> row{run.label, std::string(to_string(run.loss.kind)),
                                     std::to_string(s), r.ok && r.report ? "ok" : "failed"};
        if (r.ok && r.report) {
          ++succeeded;
          const MetricsReport& m = *r.report;
          row.push_back(format_optional(m.mean_accuracy));
          row.push_back(format_optional(m.mean_iou));
          for (const auto* v : {&m.recall, &m.precision, &m.jaccard}) {
            for (const auto& x : *v) row.push_back(format_optional(x));
          }
          if (m.mean_accuracy) sum_acc += *m.mean_accuracy, ++n_acc;
          if (m.mean_iou) sum_iou += *m.mean_iou, ++n_iou;
        } else {
          row.resize(header.size());
        }
        write_csv_row(summary, row);
        out << run.label << " seed " << s << ": " << row[3] << '\n';
      }
      std::vector<std::string> mean_row{run.label, std::string(to_string(run.loss.kind)), "mean",
                                        n_acc + n_iou > 0 ? "ok" : "failed"};
      mean_row.push_back(n_acc ? format_double(sum_acc / n_acc) : "");
      mean_row.push_back(n_iou ? format_double(sum_iou / n_iou) : "");
      mean_row.resize(header.size());
      write_csv_row(summary, mean_row);
      if (n_acc && n_iou) points.push_back({run.label, sum_iou / n_iou, sum_acc / n_acc});
    }

    const fs::path dir(out_dir);
    write_text(dir / "summary.csv", summary.str());
    write_text(dir / "scatter.svg",
               scatter_svg(points, "mean IoU", "mean accuracy", "mean accuracy vs mean IoU"));
    if (succeeded == 0) {
      err << "error: every sweep run failed\n";
      return static_cast<int>(kExitSweepFailed);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_weights_plot(const std::string& weights_csv, const std::string& out_svg, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    const CsvTable table = read_csv_file(weights_csv);
    const std::size_t step_col = table.column("step");
    const std::size_t class_col = table.column("class_id");
    const std::size_t cols[] = {table.column("focal_weight_norm"), table.column("recall_weight_norm"),
                                table.column("ratio")};
    const char* titles[] = {"normalized focal weight", "normalized recall weight",
                            "recall / focal weight ratio"};

    auto parse_int = [&](const std::string& field) {
      const auto v = parse_optional_double(field);
      if (!v || *v != std::floor(*v) || *v < 0) throw InvalidInput("weights CSV: bad integer '" + field + "'");
      return static_cast<std::int64_t>(*v);
    };
    std::map<std::int64_t, std::size_t> class_index;
    for (const auto& row : table.rows) class_index.emplace(parse_int(row[class_col]), 0);
    if (class_index.empty()) throw InvalidInput("weights CSV has no rows");
    std::size_t k = 0;
    for (auto& [id, idx] : class_index) {
      if (id != static_cast<std::int64_t>(k)) throw InvalidInput("weights CSV: class ids are not 0..C-1");
      idx = k++;
    }

    std::vector<Panel> panels(3);
    for (int p = 0; p < 3; ++p) {
      panels[static_cast<std::size_t>(p)].title = titles[p];
      for (std::size_t c = 0; c < class_index.size(); ++c) {
        panels[static_cast<std::size_t>(p)].series.push_back({"class " + std::to_string(c), {}, {}});
      }
    }
    for (const auto& row : table.rows) {
      const auto step = static_cast<double>(parse_int(row[step_col]));
      const std::size_t c = class_index.at(parse_int(row[class_col]));
      for (int p = 0; p < 3; ++p) {
        const auto v = parse_optional_double(row[cols[p]]);
        auto& s = panels[static_cast<std::size_t>(p)].series[c];
        s.x.push_back(step);
        s.y.push_back(v ? *v : std::nan(""));
      }
    }
    write_text(out_svg, line_panels_svg(panels, "iteration"));
    out << "wrote " << out_svg << " (" << class_index.size() << " classes)\n";
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GradcheckReport report = run_gradcheck(options);
    print_gradcheck_report(out, report);
    const bool ok = report.passed();
    out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
    return ok ? kExitOk : kExitCheckFailed;
  });
}

}  // namespace reclab::cli
