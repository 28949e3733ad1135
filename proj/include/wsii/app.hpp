#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "wsii/baselines.hpp"
#include "wsii/csv_io.hpp"
#include "wsii/eval.hpp"
#include "wsii/forest.hpp"
#include "wsii/model_io.hpp"
#include "wsii/segmenter.hpp"
#include "wsii/synth.hpp"
#include "wsii/training.hpp"

namespace wsii {

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string general6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct SignalConfig {
  int w = 7;
  int q = 7;
  std::string kernel = "randomwalk";

  KernelKind kernel_kind() const { return parse_kernel(kernel); }
};

struct ForestFlags {
  int trees = 100;
  int max_depth = 12;
  int min_samples_leaf = 2;
  int mtry = 0;  // 0 = ceil(sqrt(q))
  double threshold = 0.5;

  ForestParams params() const {
    ForestParams p;
    p.n_trees = trees;
    p.max_depth = max_depth;
    p.min_samples_leaf = min_samples_leaf;
    p.features_per_split = mtry;
    p.threshold = threshold;
    return p;
  }
};

inline void add_signal_flags(CLI::App* cmd, SignalConfig& cfg, bool with_q = true) {
  cmd->add_option("--w", cfg.w, "error window size (odd, >= 7)")->capture_default_str();
  if (with_q) {
    cmd->add_option("--q", cfg.q, "feature window size (odd, >= 3)")->capture_default_str();
  }
  cmd->add_option("--kernel", cfg.kernel,
                  "interpolation kernel: randomwalk|kinematic|linear|cubic")
      ->capture_default_str();
}

inline void add_forest_flags(CLI::App* cmd, ForestFlags& flags) {
  cmd->add_option("--trees", flags.trees, "number of trees")->capture_default_str();
  cmd->add_option("--max-depth", flags.max_depth, "maximum tree depth")->capture_default_str();
  cmd->add_option("--min-samples-leaf", flags.min_samples_leaf, "minimum samples per leaf")
      ->capture_default_str();
  cmd->add_option("--mtry", flags.mtry, "features per split (0 = ceil(sqrt(q)))")
      ->capture_default_str();
  cmd->add_option("--threshold", flags.threshold, "decision cutoff on the vote fraction")
      ->capture_default_str();
}

inline std::vector<Trajectory> load_labeled(const std::string& path) {
  std::vector<Trajectory> trajectories = load_trajectories(path);
  for (const Trajectory& traj : trajectories) {
    if (!traj.labeled()) {
      throw MissingLabelsError("trajectory " + traj.id +
                               " has no labels; this command requires labeled data");
    }
  }
  return trajectories;
}

/// Builds the tune/test protocol entry for one algorithm name.
inline ProtocolAlgorithm make_protocol_algorithm(const std::string& name,
                                                 const SignalConfig& signal,
                                                 const ForestParams& forest,
                                                 std::uint64_t seed) {
  const int w = signal.w;
  const int q = signal.q;
  const KernelKind kernel = signal.kernel_kind();
  ProtocolAlgorithm algorithm;
  algorithm.name = name;
  if (name == "wsii") {
    algorithm.prepare = [w, q, kernel, forest, seed](const std::vector<Trajectory>& tuning) {
      const std::vector<TrainingSample> samples = make_training_data(tuning, w, q, kernel);
      ForestModel model = fit(samples, forest, seed);
      model.w = w;
      model.kernel = kernel;
      std::size_t positives = 0;
      for (const TrainingSample& s : samples) positives += static_cast<std::size_t>(s.label);
      std::ostringstream desc;
      desc << "forest trained on " << samples.size() << " windows (" << positives
           << " positive)";
      auto segmenter = [model = std::move(model), w, q, kernel](const Trajectory& traj) {
        return segment_wsii(traj, model, w, q, kernel);
      };
      return std::make_pair(std::function<SegmentationResult(const Trajectory&)>(segmenter),
                            desc.str());
    };
  } else if (name == "ows") {
    algorithm.prepare = [w, kernel](const std::vector<Trajectory>& tuning) {
      const std::vector<double> grid = ows_default_epsilon_grid(tuning, w, kernel);
      const double epsilon = ows_tune_epsilon(tuning, grid, w, kernel);
      const OwsParams params{w, kernel, epsilon};
      auto segmenter = [params](const Trajectory& traj) { return ows_segment(traj, params); };
      return std::make_pair(std::function<SegmentationResult(const Trajectory&)>(segmenter),
                            "epsilon=" + format_double(epsilon) + "m");
    };
  } else if (name == "spd") {
    algorithm.prepare = [](const std::vector<Trajectory>& tuning) {
      const SpdParams params = spd_tune(tuning);
      auto segmenter = [params](const Trajectory& traj) { return spd_segment(traj, params); };
      return std::make_pair(std::function<SegmentationResult(const Trajectory&)>(segmenter),
                            "theta_d=" + format_double(params.theta_d) +
                                "m theta_t=" + format_double(params.theta_t) + "s");
    };
  } else if (name == "cbsmot") {
    algorithm.prepare = [](const std::vector<Trajectory>& tuning) {
      const CbSmotParams params = cbsmot_tune(tuning);
      auto segmenter = [params](const Trajectory& traj) {
        return cbsmot_segment(traj, params);
      };
      return std::make_pair(std::function<SegmentationResult(const Trajectory&)>(segmenter),
                            "eps=" + format_double(params.eps) +
                                "m min_time=" + format_double(params.min_time) + "s");
    };
  } else {
    throw std::invalid_argument("unknown algorithm '" + name +
                                "' (expected wsii, ows, spd or cbsmot)");
  }
  return algorithm;
}

/// Deterministic metrics report for one or more protocol runs.
inline std::string render_report(const std::vector<ProtocolResult>& results, int k,
                                 std::uint64_t seed, const SignalConfig& signal,
                                 const ForestParams& forest, bool has_wsii) {
  std::ostringstream out;
  out << "trajectory segmentation report\n";
  out << "==============================\n";
  out << "seed: " << seed << "\n";
  out << "folds: " << k << " (fold 0 tunes, " << k - 1 << " test folds)\n";
  out << "signal: w=" << signal.w << " q=" << signal.q << " kernel=" << signal.kernel << "\n";
  if (has_wsii) {
    out << "forest: trees=" << forest.n_trees << " max_depth=" << forest.max_depth
        << " min_samples_leaf=" << forest.min_samples_leaf
        << " mtry=" << forest.features_per_split << " threshold=" << forest.threshold
        << "\n";
  }
  out << "\nper-fold mean harmonic of purity and coverage:\n";
  out << "fold";
  for (const ProtocolResult& r : results) {
    out << ' ';
    out.width(9);
    out << r.algorithm;
  }
  out << "\n";
  const std::size_t folds = results.empty() ? 0 : results[0].fold_means.size();
  for (std::size_t f = 0; f < folds; ++f) {
    out.width(4);
    out << f + 1;
    for (const ProtocolResult& r : results) {
      out << ' ';
      out.width(9);
      out << fixed4(r.fold_means[f]);
    }
    out << "\n";
  }
  out << "\naggregate over test folds:\n";
  for (const ProtocolResult& r : results) {
    out << "  " << r.algorithm << ": mean=" << fixed4(r.mean) << " std=" << fixed4(r.stddev)
        << " (" << r.tuned_description << ")\n";
  }
  if (results.size() > 1) {
    out << "\npairwise mann-whitney u over fold means (two-sided):\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (std::size_t j = i + 1; j < results.size(); ++j) {
        const MwuResult mwu = mann_whitney_u(results[i].fold_means, results[j].fold_means);
        out << "  " << results[i].algorithm << " vs " << results[j].algorithm
            << ": U=" << general6(mwu.u) << " p=" << general6(mwu.p) << "\n";
      }
    }
  }
  return out.str();
}

inline void write_fold_csv(const std::vector<ProtocolResult>& results,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(CsvError::Kind::Io, 0, "cannot open output file: " + path);
  out << "algorithm,fold,harmonic_mean\n";
  for (const ProtocolResult& r : results) {
    for (std::size_t f = 0; f < r.fold_means.size(); ++f) {
      out << r.algorithm << ',' << f + 1 << ',' << format_double(r.fold_means[f]) << "\n";
    }
  }
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw CsvError(CsvError::Kind::Io, 0, "cannot open output file: " + path);
  out << content;
}

}  // namespace detail

/// CLI entry point. Exit codes: 0 success, 1 validation error, 2 internal
/// error. All randomness flows from --seed; nothing is written implicitly.
inline int run_command(std::vector<std::string> args) {
  CLI::App app{"wsii: supervised trajectory segmentation toolkit"};
  app.require_subcommand(1);

  // --- synth -----------------------------------------------------------
  SynthSpec synth_spec;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate labeled synthetic trajectories");
  synth->add_option("--seed", synth_spec.seed, "generator seed")->capture_default_str();
  synth->add_option("--trajectories", synth_spec.n_trajectories, "number of trajectories")
      ->capture_default_str();
  synth->add_option("--segments-min", synth_spec.segments_min, "min segments per trajectory")
      ->capture_default_str();
  synth->add_option("--segments-max", synth_spec.segments_max, "max segments per trajectory")
      ->capture_default_str();
  synth->add_option("--points-min", synth_spec.points_min, "min points per segment")
      ->capture_default_str();
  synth->add_option("--points-max", synth_spec.points_max, "max points per segment")
      ->capture_default_str();
  synth->add_option("--noise", synth_spec.gps_noise_m, "gps noise sigma in meters")
      ->capture_default_str();
  synth->add_option("--directed-speed-min", synth_spec.directed_speed_min_mps,
                    "directed speed range low, m/s")
      ->capture_default_str();
  synth->add_option("--directed-speed-max", synth_spec.directed_speed_max_mps,
                    "directed speed range high, m/s")
      ->capture_default_str();
  synth->add_option("--heading-jitter", synth_spec.heading_jitter_deg,
                    "per-step heading jitter sigma, degrees")
      ->capture_default_str();
  synth->add_option("--wander-step-min", synth_spec.wander_step_min_m,
                    "wander step sigma range low, meters")
      ->capture_default_str();
  synth->add_option("--wander-step-max", synth_spec.wander_step_max_m,
                    "wander step sigma range high, meters")
      ->capture_default_str();
  synth->add_option("--interval", synth_spec.sample_interval_s, "sampling interval, seconds")
      ->capture_default_str();
  synth->add_option("--out", synth_out, "output points CSV")->required();

  // --- error-signal ----------------------------------------------------
  detail::SignalConfig es_cfg;
  std::string es_in, es_out;
  CLI::App* es = app.add_subcommand("error-signal", "emit the interpolation error signal");
  es->add_option("--input", es_in, "points CSV")->required();
  es->add_option("--out", es_out, "output CSV: trajectory_id,point_index,error_m")->required();
  detail::add_signal_flags(es, es_cfg, /*with_q=*/false);

  // --- make-training ---------------------------------------------------
  detail::SignalConfig mt_cfg;
  std::string mt_in, mt_out;
  CLI::App* mt = app.add_subcommand("make-training",
                                    "emit q-window training samples from labeled data");
  mt->add_option("--input", mt_in, "labeled points CSV")->required();
  mt->add_option("--out", mt_out, "output CSV: trajectory_id,start_index,e1..eq,label")
      ->required();
  detail::add_signal_flags(mt, mt_cfg);

  // --- train -----------------------------------------------------------
  detail::SignalConfig tr_cfg;
  detail::ForestFlags tr_forest;
  std::string tr_in, tr_model_out;
  std::uint64_t tr_seed = 42;
  CLI::App* tr = app.add_subcommand("train", "train the split/no-split forest");
  tr->add_option("--input", tr_in, "labeled points CSV")->required();
  tr->add_option("--model-out", tr_model_out, "output model file (JSON)")->required();
  detail::add_signal_flags(tr, tr_cfg);
  detail::add_forest_flags(tr, tr_forest);
  tr->add_option("--seed", tr_seed, "training seed")->capture_default_str();

  // --- segment ---------------------------------------------------------
  std::string sg_algorithm, sg_in, sg_out, sg_model;
  detail::SignalConfig sg_cfg;
  bool sg_has_w = false, sg_has_q = false, sg_has_kernel = false;
  OwsParams sg_ows;
  SpdParams sg_spd;
  CbSmotParams sg_cbsmot;
  CLI::App* sg = app.add_subcommand("segment", "segment trajectories");
  sg->add_option("--algorithm", sg_algorithm, "wsii|ows|spd|cbsmot")->required();
  sg->add_option("--input", sg_in, "points CSV")->required();
  sg->add_option("--out", sg_out,
                 "output CSV: trajectory_id,segment_id,start_index,end_index,start_t,end_t")
      ->required();
  sg->add_option("--model", sg_model, "model file (wsii)");
  sg->add_option("--w", sg_cfg.w, "error window size; must match the model for wsii")
      ->each([&sg_has_w](const std::string&) { sg_has_w = true; });
  sg->add_option("--q", sg_cfg.q, "feature window size; must match the model for wsii")
      ->each([&sg_has_q](const std::string&) { sg_has_q = true; });
  sg->add_option("--kernel", sg_cfg.kernel, "kernel; must match the model for wsii")
      ->each([&sg_has_kernel](const std::string&) { sg_has_kernel = true; });
  sg->add_option("--epsilon", sg_ows.epsilon, "ows error threshold, meters");
  sg->add_option("--theta-d", sg_spd.theta_d, "spd distance threshold, meters")
      ->capture_default_str();
  sg->add_option("--theta-t", sg_spd.theta_t, "spd time threshold, seconds")
      ->capture_default_str();
  sg->add_option("--eps", sg_cbsmot.eps, "cbsmot path-distance neighborhood, meters")
      ->capture_default_str();
  sg->add_option("--min-time", sg_cbsmot.min_time, "cbsmot core duration, seconds")
      ->capture_default_str();

  // --- evaluate / compare ----------------------------------------------
  detail::SignalConfig ev_cfg;
  detail::ForestFlags ev_forest;
  std::string ev_in, ev_out, ev_algorithm, ev_fold_csv;
  int ev_folds = 10;
  std::uint64_t ev_seed = 42;
  CLI::App* ev = app.add_subcommand("evaluate", "k-fold protocol for one algorithm");
  ev->add_option("--input", ev_in, "labeled points CSV")->required();
  ev->add_option("--algorithm", ev_algorithm, "wsii|ows|spd|cbsmot")->required();
  ev->add_option("--out", ev_out, "output report path")->required();
  ev->add_option("--folds", ev_folds, "number of folds")->capture_default_str();
  ev->add_option("--seed", ev_seed, "protocol seed")->capture_default_str();
  ev->add_option("--fold-csv", ev_fold_csv, "optional per-fold CSV export");
  detail::add_signal_flags(ev, ev_cfg);
  detail::add_forest_flags(ev, ev_forest);

  detail::SignalConfig cp_cfg;
  detail::ForestFlags cp_forest;
  std::string cp_in, cp_out, cp_algorithms = "wsii,ows,spd,cbsmot", cp_fold_csv;
  int cp_folds = 10;
  std::uint64_t cp_seed = 42;
  CLI::App* cp = app.add_subcommand("compare", "k-fold protocol across algorithms");
  cp->add_option("--input", cp_in, "labeled points CSV")->required();
  cp->add_option("--algorithms", cp_algorithms, "comma-separated algorithm list")
      ->capture_default_str();
  cp->add_option("--out", cp_out, "output report path")->required();
  cp->add_option("--folds", cp_folds, "number of folds")->capture_default_str();
  cp->add_option("--seed", cp_seed, "protocol seed")->capture_default_str();
  cp->add_option("--fold-csv", cp_fold_csv, "optional per-fold CSV export");
  detail::add_signal_flags(cp, cp_cfg);
  detail::add_forest_flags(cp, cp_forest);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  try {
    if (synth->parsed()) {
      write_trajectories(generate_synthetic(synth_spec), synth_out);
      return 0;
    }

    if (es->parsed()) {
      const KernelKind kernel = es_cfg.kernel_kind();
      validate_error_window_size(es_cfg.w);
      std::vector<ErrorSignal> signals;
      for (const Trajectory& traj : load_trajectories(es_in)) {
        ErrorSignal signal = error_signal(traj, es_cfg.w, kernel);
        if (signal.input_too_short) {
          std::cerr << "warning: trajectory " << traj.id << " has fewer than " << es_cfg.w
                    << " points; empty signal" << std::endl;
        }
        signals.push_back(std::move(signal));
      }
      std::ofstream out(es_out);
      if (!out) throw CsvError(CsvError::Kind::Io, 0, "cannot open output file: " + es_out);
      write_error_signal_csv(signals, out);
      return 0;
    }

    if (mt->parsed()) {
      const KernelKind kernel = mt_cfg.kernel_kind();
      validate_error_window_size(mt_cfg.w);
      validate_feature_window_size(mt_cfg.q);
      std::vector<TrainingSample> samples;
      for (const Trajectory& traj : detail::load_labeled(mt_in)) {
        const ErrorSignal signal = error_signal(traj, mt_cfg.w, kernel);
        std::vector<TrainingSample> part =
            build_training_set(signal, splits_from_labels(traj), mt_cfg.q);
        if (part.empty()) {
          std::cerr << "warning: trajectory " << traj.id
                    << " yields no training windows (signal shorter than q)" << std::endl;
        }
        samples.insert(samples.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
      }
      std::ofstream out(mt_out);
      if (!out) throw CsvError(CsvError::Kind::Io, 0, "cannot open output file: " + mt_out);
      write_training_csv(samples, mt_cfg.q, out);
      return 0;
    }

    if (tr->parsed()) {
      const KernelKind kernel = tr_cfg.kernel_kind();
      validate_error_window_size(tr_cfg.w);
      validate_feature_window_size(tr_cfg.q);
      const std::vector<Trajectory> trajectories = detail::load_labeled(tr_in);
      const std::vector<TrainingSample> samples =
          make_training_data(trajectories, tr_cfg.w, tr_cfg.q, kernel);
      ForestModel model = fit(samples, tr_forest.params(), tr_seed);
      model.w = tr_cfg.w;
      model.kernel = kernel;
      save_model(model, tr_model_out);
      return 0;
    }

    if (sg->parsed()) {
      const std::vector<Trajectory> trajectories = load_trajectories(sg_in);
      std::vector<std::pair<const Trajectory*, SegmentationResult>> results;
      results.reserve(trajectories.size());
      if (sg_algorithm == "wsii") {
        if (sg_model.empty()) {
          throw std::invalid_argument("segment --algorithm wsii requires --model");
        }
        const ForestModel model = load_model(sg_model);
        if (sg_has_q && sg_cfg.q != model.q) {
          throw std::invalid_argument(
              "q mismatch: model was trained with q=" + std::to_string(model.q) +
              ", got --q " + std::to_string(sg_cfg.q));
        }
        if (sg_has_w && sg_cfg.w != model.w) {
          throw std::invalid_argument(
              "w mismatch: model was trained with w=" + std::to_string(model.w) +
              ", got --w " + std::to_string(sg_cfg.w));
        }
        if (sg_has_kernel && sg_cfg.kernel_kind() != model.kernel) {
          throw std::invalid_argument("kernel mismatch: model was trained with kernel=" +
                                      to_string(model.kernel) + ", got --kernel " +
                                      sg_cfg.kernel);
        }
        for (const Trajectory& traj : trajectories) {
          results.emplace_back(&traj,
                               segment_wsii(traj, model, model.w, model.q, model.kernel));
        }
      } else if (sg_algorithm == "ows") {
        if (sg->count("--epsilon") == 0) {
          throw std::invalid_argument("segment --algorithm ows requires --epsilon");
        }
        const OwsParams params{sg_cfg.w, sg_cfg.kernel_kind(), sg_ows.epsilon};
        for (const Trajectory& traj : trajectories) {
          results.emplace_back(&traj, ows_segment(traj, params));
        }
      } else if (sg_algorithm == "spd") {
        for (const Trajectory& traj : trajectories) {
          results.emplace_back(&traj, spd_segment(traj, sg_spd));
        }
      } else if (sg_algorithm == "cbsmot") {
        for (const Trajectory& traj : trajectories) {
          results.emplace_back(&traj, cbsmot_segment(traj, sg_cbsmot));
        }
      } else {
        throw std::invalid_argument("unknown algorithm '" + sg_algorithm +
                                    "' (expected wsii, ows, spd or cbsmot)");
      }
      std::ofstream out(sg_out);
      if (!out) throw CsvError(CsvError::Kind::Io, 0, "cannot open output file: " + sg_out);
      write_segments_csv(results, out);
      return 0;
    }

    if (ev->parsed() || cp->parsed()) {
      const bool comparing = cp->parsed();
      const detail::SignalConfig& cfg = comparing ? cp_cfg : ev_cfg;
      const detail::ForestFlags& forest = comparing ? cp_forest : ev_forest;
      const std::string& input = comparing ? cp_in : ev_in;
      const std::string& out_path = comparing ? cp_out : ev_out;
      const std::string& fold_csv = comparing ? cp_fold_csv : ev_fold_csv;
      const int k = comparing ? cp_folds : ev_folds;
      const std::uint64_t seed = comparing ? cp_seed : ev_seed;

      validate_error_window_size(cfg.w);
      validate_feature_window_size(cfg.q);
      std::vector<std::string> names;
      if (comparing) {
        std::stringstream ss(cp_algorithms);
        std::string name;
        while (std::getline(ss, name, ',')) {
          if (!name.empty()) names.push_back(name);
        }
        if (names.empty()) {
          throw std::invalid_argument("compare: --algorithms must name at least one algorithm");
        }
      } else {
        names.push_back(ev_algorithm);
      }

      const std::vector<Trajectory> dataset = detail::load_labeled(input);
      std::vector<ProtocolResult> results;
      bool has_wsii = false;
      for (const std::string& name : names) {
        has_wsii = has_wsii || name == "wsii";
        const ProtocolAlgorithm algorithm =
            detail::make_protocol_algorithm(name, cfg, forest.params(), seed);
        results.push_back(kfold_protocol(dataset, algorithm, k, seed));
      }
      detail::write_text_file(out_path,
                              detail::render_report(results, k, seed, cfg, forest.params(),
                                                    has_wsii));
      if (!fold_csv.empty()) detail::write_fold_csv(results, fold_csv);
      return 0;
    }

    throw std::logic_error("no subcommand dispatched");
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const ModelSchemaError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return 2;
  }
}

}  // namespace wsii
