#pragma once

// File formats. Every CSV starts with the version line "# robust-wdep-dnn v1"
// followed by a header row; readers skip lines beginning with '#'.
// Doubles are written in shortest round-trip form.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rwdnn/dgp.hpp"
#include "rwdnn/error.hpp"
#include "rwdnn/harness.hpp"
#include "rwdnn/losses.hpp"
#include "rwdnn/mlp.hpp"
#include "rwdnn/trainer.hpp"

namespace rwdnn::io {

using json = nlohmann::json;

inline constexpr std::string_view kVersionLine = "# robust-wdep-dnn v1";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InvalidSpecError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "' for reading");
  return is;
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Yields data rows (header excluded) of a CSV with the expected header.
inline std::vector<std::string> read_rows(std::istream& is, std::string_view expected_header) {
  std::vector<std::string> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != expected_header) {
        throw InvalidSpecError("unexpected CSV header '" + line + "', expected '" +
                               std::string(expected_header) + "'");
      }
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  if (!header_seen) throw InvalidSpecError("CSV has no header row");
  return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectories and supervised pairs

inline void write_trajectory_csv(std::ostream& os, std::span<const double> values) {
  os << kVersionLine << "\ny\n";
  for (double v : values) os << format_double(v) << '\n';
}

inline std::vector<double> read_trajectory_csv(std::istream& is) {
  std::vector<double> out;
  for (const auto& row : detail::read_rows(is, "y")) out.push_back(parse_double(row));
  return out;
}

inline std::string pairs_header(std::size_t p) {
  std::string h;
  for (std::size_t i = 1; i <= p; ++i) h += "x" + std::to_string(i) + ",";
  return h + "y";
}

inline void write_pairs_csv(std::ostream& os, const SupervisedPairs& pairs) {
  os << kVersionLine << '\n' << pairs_header(pairs.dim()) << '\n';
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    for (double v : pairs.x(j)) os << format_double(v) << ',';
    os << format_double(pairs.y(j)) << '\n';
  }
}

inline SupervisedPairs read_pairs_csv(std::istream& is, std::size_t p) {
  const auto rows = detail::read_rows(is, pairs_header(p));
  SupervisedPairs out;
  out.inputs.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(rows.size()));
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto cells = detail::split_commas(rows[j]);
    if (cells.size() != p + 1) throw InvalidSpecError("pairs CSV row has wrong column count");
    for (std::size_t i = 0; i < p; ++i) {
      out.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cells[i]);
    }
    out.targets(static_cast<Eigen::Index>(j)) = parse_double(cells[p]);
  }
  return out;
}

inline void write_history_csv(std::ostream& os, const std::vector<double>& history) {
  os << kVersionLine << "\nepoch,risk\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << (i + 1) << ',' << format_double(history[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Network parameters: {"arch": [p0, ..., p_{L+1}], "theta": [...]}

inline json network_to_json(const Network& net) {
  json j;
  j["arch"] = net.architecture().widths();
  std::vector<double> theta(net.theta().data(), net.theta().data() + net.theta().size());
  j["theta"] = theta;
  if (net.activation() != Activation::relu) j["activation"] = to_string(net.activation());
  return j;
}

inline Network network_from_json(const json& j) {
  if (!j.contains("arch") || !j.contains("theta")) {
    throw InvalidSpecError("network JSON needs 'arch' and 'theta'");
  }
  Architecture arch(j.at("arch").get<std::vector<std::size_t>>());
  const auto theta = j.at("theta").get<std::vector<double>>();
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  Activation act = Activation::relu;
  if (j.contains("activation")) {
    const auto a = j.at("activation").get<std::string>();
    if (a == "identity") {
      act = Activation::identity;
    } else if (a != "relu") {
      throw InvalidSpecError("unknown activation '" + a + "'");
    }
  }
  return Network(std::move(arch), std::move(t), act);
}

// ---------------------------------------------------------------------------
// Experiment configuration (JSON)
//
// {
//   "dgps": [{"name": "dgp1", "error": "t2", "burn_in": 500}, ...],
//   "losses": ["l1", {"family": "huber", "delta": 1.345}, "l2"],
//   "sample_sizes": [250, 500, 1000],
//   "replications": 100,
//   "eval_length": 10000,
//   "hidden": [100, 100],
//   "train": {"learning_rate": 1e-3, "batch_size": 32, "patience": 30,
//             "max_epochs": 1000, "beta1": 0.9, "beta2": 0.999,
//             "epsilon": 1e-8, "shuffle": true},
//   "seed": 42,
//   "record_timing": false
// }
// Every key is optional except "dgps" (or a single "dgp" object).

inline LossSpec loss_from_json(const json& j) {
  LossSpec spec;
  if (j.is_string()) {
    spec.family = parse_loss_family(j.get<std::string>());
  } else {
    spec.family = parse_loss_family(j.at("family").get<std::string>());
    spec.delta = j.value("delta", 1.345);
  }
  spec.validate();
  return spec;
}

inline json loss_to_json(const LossSpec& spec) {
  json j{{"family", to_string(spec.family)}};
  if (spec.family == LossFamily::huber) j["delta"] = spec.delta;
  return j;
}

inline DgpSpec dgp_from_json(const json& j) {
  auto spec = DgpSpec::by_name(j.at("name").get<std::string>(),
                               parse_innovation_law(j.value("error", std::string("gauss"))));
  spec.burn_in = j.value("burn_in", spec.burn_in);
  if (j.contains("alpha")) spec.alpha = j.at("alpha").get<std::vector<double>>();
  spec.validate();
  return spec;
}

inline json dgp_to_json(const DgpSpec& spec) {
  return {{"name", spec.tag()}, {"error", to_string(spec.law)}, {"burn_in", spec.burn_in}, {"alpha", spec.alpha}};
}

inline void train_config_from_json(const json& j, TrainConfig& cfg) {
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.patience = j.value("patience", cfg.patience);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.shuffle = j.value("shuffle", cfg.shuffle);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("constraint")) {
    const auto& c = j.at("constraint");
    ClassSpec cs;
    cs.depth_cap = c.at("L").get<double>();
    cs.width_cap = c.at("N").get<double>();
    cs.param_cap = c.at("B").get<double>();
    cs.output_cap = c.value("F", std::numeric_limits<double>::infinity());
    cs.sparsity = c.at("S").get<double>();
    cfg.constraint = cs;
  }
}

inline json train_config_to_json(const TrainConfig& cfg) {
  json j{{"learning_rate", cfg.learning_rate}, {"batch_size", cfg.batch_size}, {"patience", cfg.patience},
         {"max_epochs", cfg.max_epochs},       {"beta1", cfg.beta1},           {"beta2", cfg.beta2},
         {"epsilon", cfg.epsilon},             {"shuffle", cfg.shuffle}};
  if (cfg.constraint) {
    const auto& c = *cfg.constraint;
    j["constraint"] = {{"L", c.depth_cap}, {"N", c.width_cap}, {"B", c.param_cap}, {"S", c.sparsity}};
    if (std::isfinite(c.output_cap)) j["constraint"]["F"] = c.output_cap;
  }
  return j;
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("dgps")) {
    for (const auto& d : j.at("dgps")) cfg.dgps.push_back(dgp_from_json(d));
  } else if (j.contains("dgp")) {
    cfg.dgps.push_back(dgp_from_json(j.at("dgp")));
  }
  if (j.contains("losses")) {
    cfg.losses.clear();
    for (const auto& l : j.at("losses")) cfg.losses.push_back(loss_from_json(l));
  }
  cfg.sample_sizes = j.value("sample_sizes", cfg.sample_sizes);
  cfg.replications = j.value("replications", cfg.replications);
  cfg.eval_length = j.value("eval_length", cfg.eval_length);
  cfg.hidden = j.value("hidden", cfg.hidden);
  if (j.contains("train")) train_config_from_json(j.at("train"), cfg.train);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.record_timing = j.value("record_timing", cfg.record_timing);
  cfg.validate();
  return cfg;
}

inline json experiment_config_to_json(const ExperimentConfig& cfg) {
  json dgps = json::array();
  for (const auto& d : cfg.dgps) dgps.push_back(dgp_to_json(d));
  json losses = json::array();
  for (const auto& l : cfg.losses) losses.push_back(loss_to_json(l));
  return {{"dgps", dgps},
          {"losses", losses},
          {"sample_sizes", cfg.sample_sizes},
          {"replications", cfg.replications},
          {"eval_length", cfg.eval_length},
          {"hidden", cfg.hidden},
          {"train", train_config_to_json(cfg.train)},
          {"seed", cfg.seed},
          {"record_timing", cfg.record_timing}};
}

inline json read_json_file(const std::string& path) {
  auto is = open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidSpecError("cannot parse JSON '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Experiment outputs

inline constexpr std::string_view kRecordsHeader =
    "dgp,error,loss,n,rep,excess_l1,excess_huber,excess_l2,mape,rmspe,epochs,seconds,diverged";

inline void write_records_csv(std::ostream& os, const std::vector<ReplicationRecord>& records) {
  os << kVersionLine << '\n' << kRecordsHeader << '\n';
  for (const auto& r : records) {
    os << r.dgp << ',' << r.error << ',' << r.loss << ',' << r.n << ',' << r.rep << ','
       << format_double(r.excess_l1) << ',' << format_double(r.excess_huber) << ','
       << format_double(r.excess_l2) << ',' << format_double(r.mape) << ',' << format_double(r.rmspe) << ','
       << r.epochs << ',' << format_double(r.seconds) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

inline std::vector<ReplicationRecord> read_records_csv(std::istream& is) {
  std::vector<ReplicationRecord> out;
  for (const auto& row : detail::read_rows(is, kRecordsHeader)) {
    const auto c = detail::split_commas(row);
    if (c.size() != 13) throw InvalidSpecError("records CSV row has wrong column count");
    ReplicationRecord r;
    r.dgp = c[0];
    r.error = c[1];
    r.loss = c[2];
    r.n = static_cast<std::size_t>(parse_double(c[3]));
    r.rep = static_cast<std::size_t>(parse_double(c[4]));
    r.excess_l1 = parse_double(c[5]);
    r.excess_huber = parse_double(c[6]);
    r.excess_l2 = parse_double(c[7]);
    r.mape = parse_double(c[8]);
    r.rmspe = parse_double(c[9]);
    r.epochs = static_cast<std::size_t>(parse_double(c[10]));
    r.seconds = parse_double(c[11]);
    r.diverged = c[12] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

inline constexpr std::string_view kSummaryHeader =
    "dgp,error,loss,n,metric,count,excluded,min,q1,median,q3,max,mean,sd";

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kVersionLine << '\n' << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    const auto& s = r.stats;
    os << r.dgp << ',' << r.error << ',' << r.loss << ',' << r.n << ',' << r.metric << ',' << s.count << ','
       << r.excluded << ',' << format_double(s.min) << ',' << format_double(s.q1) << ','
       << format_double(s.median) << ',' << format_double(s.q3) << ',' << format_double(s.max) << ','
       << format_double(s.mean) << ',' << format_double(s.sd) << '\n';
  }
}

inline json boxplot_json(const std::vector<SummaryRow>& rows) {
  json groups = json::array();
  for (const auto& r : rows) {
    groups.push_back({{"dgp", r.dgp},
                      {"error", r.error},
                      {"loss", r.loss},
                      {"n", r.n},
                      {"metric", r.metric},
                      {"excluded", r.excluded},
                      {"values", r.values}});
  }
  return {{"version", "robust-wdep-dnn v1"}, {"quantile_rule", "type7"}, {"groups", groups}};
}

}  // namespace rwdnn::io
