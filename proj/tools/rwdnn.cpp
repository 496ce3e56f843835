// rwdnn: command-line front end for simulation, training, evaluation,
// architecture schedules, risk bounds and Monte Carlo experiments.
//
// Exit codes: 0 success, 1 usage or invalid input, 2 runtime failure.
// Precedence: built-in defaults < --config file < explicit flags.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rwdnn/rwdnn.hpp"

namespace fs = std::filesystem;
using namespace rwdnn;

namespace {

struct UsageError : Error {
  using Error::Error;
};

// Assigns `value` to `dst` when the option was given on the command line.
template <typename T, typename U>
void take(const CLI::Option* opt, const T& value, U& dst) {
  if (opt->count() > 0) dst = value;
}

double parse_r(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  return io::parse_double(s);
}

// Output to a file, or to stdout when the path is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = io::open_out(path);
      os_ = &*file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::optional<std::ofstream> file_;
  std::ostream* os_ = &std::cout;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string dgp = "dgp1";
  std::string error = "gauss";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t burn_in = 500;
  std::string out;
  bool pairs = false;
};

void add_simulate(CLI::App& app, SimulateOpts& o) {
  auto* sub = app.add_subcommand("simulate", "Simulate a trajectory of a nonlinear AR process");
  sub->add_option("--dgp", o.dgp, "Process: dgp1 or dgp2")->capture_default_str();
  sub->add_option("--error", o.error, "Innovation law: gauss, t<df>, cauchy or none")->capture_default_str();
  sub->add_option("--n", o.n, "Number of retained observations")->capture_default_str();
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sub->add_option("--burn-in", o.burn_in, "Discarded initial steps")->capture_default_str();
  sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
  sub->add_flag("--pairs", o.pairs, "Write embedded (x1..xp, y) pairs instead of the trajectory");
}

int run_simulate(const SimulateOpts& o) {
  auto spec = DgpSpec::by_name(o.dgp, parse_innovation_law(o.error), o.seed);
  spec.burn_in = o.burn_in;
  const auto traj = simulate(spec, o.n);
  Sink sink(o.out);
  if (o.pairs) {
    io::write_pairs_csv(sink.stream(), embed(traj, spec.order));
  } else {
    io::write_trajectory_csv(sink.stream(), traj.values);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string data;
  std::string config;
  std::string dgp;
  std::size_t order = 0;
  std::string loss = "l1";
  double delta = 1.345;
  std::vector<std::size_t> hidden{100, 100};
  double lr = 1e-3;
  std::size_t batch = 32;
  std::size_t patience = 30;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string history;

  CLI::Option *o_order, *o_loss, *o_delta, *o_hidden, *o_lr, *o_batch, *o_patience, *o_epochs, *o_seed;
};

void add_train(CLI::App& app, TrainOpts& o) {
  auto* sub = app.add_subcommand("train", "Fit a ReLU network by empirical risk minimisation");
  sub->add_option("--data", o.data, "Trajectory CSV (column y)")->required();
  sub->add_option("--config", o.config, "JSON file with optional losses/hidden/train/seed keys");
  sub->add_option("--dgp", o.dgp, "Take the lag order p from this process (dgp1 or dgp2)");
  o.o_order = sub->add_option("--order", o.order, "Lag order p (overrides --dgp)");
  o.o_loss = sub->add_option("--loss", o.loss, "Training loss: l1, huber or l2")->capture_default_str();
  o.o_delta = sub->add_option("--delta", o.delta, "Huber threshold")->capture_default_str();
  o.o_hidden = sub->add_option("--hidden", o.hidden, "Hidden layer widths")->capture_default_str();
  o.o_lr = sub->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  o.o_batch = sub->add_option("--batch", o.batch, "Minibatch size")->capture_default_str();
  o.o_patience = sub->add_option("--patience", o.patience, "Early-stopping patience (epochs)")->capture_default_str();
  o.o_epochs = sub->add_option("--max-epochs", o.max_epochs, "Maximum number of epochs")->capture_default_str();
  o.o_seed = sub->add_option("--seed", o.seed, "Seed for initialisation and shuffling")->capture_default_str();
  sub->add_option("--out", o.out, "Output parameter JSON path")->required();
  sub->add_option("--history", o.history, "Optional CSV of the per-epoch empirical risk");
}

int run_train(const TrainOpts& o) {
  LossSpec loss;
  loss.family = LossFamily::l1;
  std::vector<std::size_t> hidden{100, 100};
  TrainConfig tc;
  if (!o.config.empty()) {
    const auto j = io::read_json_file(o.config);
    if (j.contains("losses") && !j.at("losses").empty()) loss = io::loss_from_json(j.at("losses").front());
    if (j.contains("loss")) loss = io::loss_from_json(j.at("loss"));
    hidden = j.value("hidden", hidden);
    if (j.contains("train")) io::train_config_from_json(j.at("train"), tc);
    tc.seed = j.value("seed", tc.seed);
  }
  if (o.o_loss->count() > 0) loss.family = parse_loss_family(o.loss);
  take(o.o_delta, o.delta, loss.delta);
  take(o.o_hidden, o.hidden, hidden);
  take(o.o_lr, o.lr, tc.learning_rate);
  take(o.o_batch, o.batch, tc.batch_size);
  take(o.o_patience, o.patience, tc.patience);
  take(o.o_epochs, o.max_epochs, tc.max_epochs);
  take(o.o_seed, o.seed, tc.seed);
  loss.validate();

  std::size_t p = 0;
  if (!o.dgp.empty()) p = DgpSpec::by_name(o.dgp, InnovationLaw::gaussian()).order;
  take(o.o_order, o.order, p);
  if (p == 0) throw UsageError("train needs --order or --dgp");

  auto is = io::open_in(o.data);
  const auto pairs = embed(io::read_trajectory_csv(is), p);
  const auto rep = fit(pairs, Architecture::mlp(p, hidden), loss, tc);
  {
    auto os = io::open_out(o.out);
    os << io::network_to_json(rep.params).dump() << '\n';
  }
  if (!o.history.empty()) {
    auto os = io::open_out(o.history);
    io::write_history_csv(os, rep.history);
  }
  std::cerr << "trained " << rep.epochs_run << " epochs, best risk " << io::format_double(rep.best_risk)
            << " at epoch " << rep.best_epoch << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string params;
  std::string dgp = "dgp1";
  std::string error = "gauss";
  std::string test;
  std::uint64_t eval_seed = 0;
  std::size_t m = 10000;
  std::size_t burn_in = 500;
  double delta = 1.345;
  std::string out;
};

void add_eval(CLI::App& app, EvalOpts& o) {
  auto* sub = app.add_subcommand("eval", "Evaluate fitted parameters: excess risks, MAPE, RMSPE");
  sub->add_option("--params", o.params, "Parameter JSON written by train")->required();
  sub->add_option("--dgp", o.dgp, "Process generating the evaluation data")->capture_default_str();
  sub->add_option("--error", o.error, "Innovation law")->capture_default_str();
  sub->add_option("--test", o.test, "Test trajectory CSV for MAPE/RMSPE");
  sub->add_option("--eval-seed", o.eval_seed, "Seed of the fresh evaluation trajectory")->capture_default_str();
  sub->add_option("--m", o.m, "Evaluation trajectory length")->capture_default_str();
  sub->add_option("--burn-in", o.burn_in, "Discarded initial steps")->capture_default_str();
  sub->add_option("--delta", o.delta, "Huber threshold of the Huber excess-risk metric")->capture_default_str();
  sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
}

int run_eval(const EvalOpts& o) {
  const auto net = io::network_from_json(io::read_json_file(o.params));
  auto dgp = DgpSpec::by_name(o.dgp, parse_innovation_law(o.error), o.eval_seed);
  dgp.burn_in = o.burn_in;
  if (net.architecture().input_dim() != dgp.order) {
    throw UsageError("network input dimension does not match the process order");
  }
  const auto ex = excess_risks_empirical(net, dgp, o.m, o.delta);
  double mape_v = std::numeric_limits<double>::quiet_NaN();
  double rmspe_v = mape_v;
  if (!o.test.empty()) {
    auto is = io::open_in(o.test);
    const auto test = embed(io::read_trajectory_csv(is), dgp.order);
    mape_v = mape(net, test);
    rmspe_v = rmspe(net, test);
  }
  Sink sink(o.out);
  auto& os = sink.stream();
  os << io::kVersionLine << "\nexcess_l1,excess_huber,excess_l2,mape,rmspe\n"
     << io::format_double(ex.l1) << ',' << io::format_double(ex.huber) << ',' << io::format_double(ex.l2) << ','
     << io::format_double(mape_v) << ',' << io::format_double(rmspe_v) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// Theory inputs shared by plan, bound and check-assumptions

struct TheoryOpts {
  std::string config;
  std::string s, d, r, k_loss, c, gamma, alpha_bar, l1, l2, mu, moment_bound, nu, l0, n0, s0, b0, psi,
      holder_k, f_cap, constants;

  void add(CLI::App* sub) {
    sub->add_option("--config", config, "JSON file of theory inputs (keys as the flag names)");
    sub->add_option("--s", s, "Holder smoothness s [3]");
    sub->add_option("--d", d, "Input dimension d [1]");
    sub->add_option("--r", r, "Moment order r, or inf [inf]");
    sub->add_option("--k-loss", k_loss, "Loss Lipschitz constant K [1]");
    sub->add_option("--c", c, "Mixing rate constant c [100]");
    sub->add_option("--gamma", gamma, "Mixing rate exponent gamma [1]");
    sub->add_option("--alpha-bar", alpha_bar, "Mixing prefactor alpha_bar [1]");
    sub->add_option("--l1", l1, "Weak-dependence constant L1 [1]");
    sub->add_option("--l2", l2, "Weak-dependence constant L2 [1]");
    sub->add_option("--mu", mu, "Weak-dependence exponent mu [0]");
    sub->add_option("--moment-bound", moment_bound, "Moment bound M [1]");
    sub->add_option("--nu", nu, "Log exponent nu of the strong-mixing bound [3.01]");
    sub->add_option("--l0", l0, "Depth scale L0 [1]");
    sub->add_option("--n0", n0, "Width scale N0 [1]");
    sub->add_option("--s0", s0, "Sparsity scale S0 [1]");
    sub->add_option("--b0", b0, "Norm scale B0 [1]");
    sub->add_option("--psi", psi, "Dependence combinator: theta, eta, kappa, lambda [theta]");
    sub->add_option("--holder-k", holder_k, "Holder radius K of the target (optional)");
    sub->add_option("--f-cap", f_cap, "Output cap F_n for the strong-mixing case (optional)");
    sub->add_option("--constants", constants, "Weak-dependence constants: proof or statement [proof]");
  }

  theory::TheoryInputs resolve() const {
    theory::TheoryInputs in;
    nlohmann::json j = nlohmann::json::object();
    if (!config.empty()) j = io::read_json_file(config);
    // Each key is looked up first on the command line, then in the config.
    auto pick = [&](const std::string& flag, const char* key) -> std::optional<std::string> {
      if (!flag.empty()) return flag;
      if (j.contains(key)) {
        const auto& v = j.at(key);
        return v.is_string() ? v.get<std::string>() : v.dump();
      }
      return std::nullopt;
    };
    auto num = [&](const std::string& flag, const char* key, double& dst) {
      if (auto v = pick(flag, key)) dst = parse_r(*v);
    };
    double dim = static_cast<double>(in.dim);
    num(s, "s", in.smoothness);
    num(d, "d", dim);
    num(r, "r", in.moment_order);
    num(k_loss, "k_loss", in.lipschitz);
    num(c, "c", in.mixing_c);
    num(gamma, "gamma", in.mixing_gamma);
    num(alpha_bar, "alpha_bar", in.mixing_alpha_bar);
    num(l1, "l1", in.wd_l1);
    num(l2, "l2", in.wd_l2);
    num(mu, "mu", in.wd_mu);
    num(moment_bound, "moment_bound", in.moment_bound);
    num(nu, "nu", in.log_exponent);
    num(l0, "l0", in.depth0);
    num(n0, "n0", in.width0);
    num(s0, "s0", in.sparsity0);
    num(b0, "b0", in.norm0);
    if (!(dim >= 1) || dim != std::floor(dim)) throw UsageError("--d must be a positive integer");
    in.dim = static_cast<std::size_t>(dim);
    if (auto v = pick(psi, "psi")) in.psi = theory::parse_psi_kind(*v);
    if (auto v = pick(holder_k, "holder_k")) in.holder_bound = parse_r(*v);
    if (auto v = pick(f_cap, "f_cap")) in.output_cap = parse_r(*v);
    if (auto v = pick(constants, "constants")) {
      if (*v == "proof") {
        in.constants = theory::ConstantsVariant::proof;
      } else if (*v == "statement") {
        in.constants = theory::ConstantsVariant::statement;
      } else {
        throw UsageError("--constants must be proof or statement");
      }
    }
    return in;
  }
};

const char* kScheduleHeader = "n,n_alpha,L,N,S,B,bound_thm1,bound_thm2";

// One CSV row; entries that are undefined at this n are written as nan.
void write_schedule_row(std::ostream& os, const theory::TheoryInputs& in, int theorem, std::size_t n) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t na = theory::effective_sample_size_raw(n, in.mixing_c, in.mixing_gamma);
  std::optional<theory::ArchitectureSchedule> sched;
  try {
    sched = theorem == 1 ? theory::schedule_thm1(in, n) : theory::schedule_thm2(in, n);
  } catch (const TooSmallNError&) {
  }
  double b1 = nan, b2 = nan;
  try {
    b1 = theory::bound_thm1(in, n);
  } catch (const TooSmallNError&) {
  }
  try {
    b2 = theory::bound_thm2(in, n).value;
  } catch (const TooSmallNError&) {
  }
  os << n << ',' << na << ',' << io::format_double(sched ? sched->depth : nan) << ','
     << io::format_double(sched ? sched->width : nan) << ',' << io::format_double(sched ? sched->sparsity : nan)
     << ',' << io::format_double(sched ? sched->norm : nan) << ',' << io::format_double(b1) << ','
     << io::format_double(b2) << '\n';
}

void warn_smoothness(const theory::TheoryInputs& in) {
  if (in.moment_order > 1.0) {
    const double th = theory::thm2_smoothness_threshold(in);
    if (!(in.smoothness > th)) {
      std::cerr << "warning: s = " << in.smoothness << " does not exceed the weak-dependence threshold " << th
                << '\n';
    }
  }
}

struct PlanOpts {
  TheoryOpts theory;
  int theorem = 1;
  std::size_t n = 1000;
  std::string out;
};

void add_plan(CLI::App& app, PlanOpts& o) {
  auto* sub = app.add_subcommand("plan", "Print the architecture schedule (L, N, S, B) at one sample size");
  sub->add_option("--theorem", o.theorem, "1: strong mixing, 2: weak dependence")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  sub->add_option("--n", o.n, "Sample size")->capture_default_str();
  sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
  o.theory.add(sub);
}

int run_plan(const PlanOpts& o) {
  const auto in = o.theory.resolve();
  const auto sched = o.theorem == 1 ? theory::schedule_thm1(in, o.n) : theory::schedule_thm2(in, o.n);
  warn_smoothness(in);
  Sink sink(o.out);
  auto& os = sink.stream();
  os << io::kVersionLine << '\n' << kScheduleHeader << ",L_int,N_int,S_int,F\n";
  std::ostringstream row;
  write_schedule_row(row, in, o.theorem, o.n);
  std::string line = row.str();
  line.pop_back();
  os << line << ',' << sched.depth_int << ',' << sched.width_int << ',' << sched.sparsity_int << ','
     << io::format_double(sched.output_cap.value_or(std::numeric_limits<double>::quiet_NaN())) << '\n';
  return 0;
}

struct BoundOpts {
  TheoryOpts theory;
  int theorem = 2;
  double n_min = 1e3;
  double n_max = 1e8;
  int per_decade = 4;
  std::vector<std::size_t> grid;
  std::string out;
};

void add_bound(CLI::App& app, BoundOpts& o) {
  auto* sub = app.add_subcommand("bound", "Evaluate schedules and both risk bounds over an n-grid");
  sub->add_option("--theorem", o.theorem, "Schedule columns from theorem 1 or 2")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  sub->add_option("--n-min", o.n_min, "Smallest n of the log grid")->capture_default_str();
  sub->add_option("--n-max", o.n_max, "Largest n of the log grid")->capture_default_str();
  sub->add_option("--per-decade", o.per_decade, "Grid points per decade")->capture_default_str();
  sub->add_option("--grid", o.grid, "Explicit list of sample sizes (replaces the log grid)");
  sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
  o.theory.add(sub);
}

int run_bound(const BoundOpts& o) {
  const auto in = o.theory.resolve();
  const auto grid = o.grid.empty() ? theory::log_grid(o.n_min, o.n_max, o.per_decade) : o.grid;
  warn_smoothness(in);
  Sink sink(o.out);
  auto& os = sink.stream();
  os << io::kVersionLine << '\n' << kScheduleHeader << '\n';
  for (std::size_t n : grid) write_schedule_row(os, in, o.theorem, n);
  return 0;
}

struct AssumptionOpts {
  TheoryOpts theory;
  std::string loss;
  double delta = 1.345;
  std::string out;
};

void add_assumptions(CLI::App& app, AssumptionOpts& o) {
  auto* sub = app.add_subcommand("check-assumptions", "Arithmetic check of the hypotheses for given inputs");
  sub->add_option("--loss", o.loss, "Also check that this loss (l1, huber, l2) is Lipschitz");
  sub->add_option("--delta", o.delta, "Huber threshold")->capture_default_str();
  sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
  o.theory.add(sub);
}

int run_assumptions(const AssumptionOpts& o) {
  const auto in = o.theory.resolve();
  std::optional<LossSpec> loss;
  if (!o.loss.empty()) loss = LossSpec{parse_loss_family(o.loss), o.delta};
  const auto rep = theory::check_assumptions(in, loss);
  Sink sink(o.out);
  auto& os = sink.stream();
  os << io::kVersionLine << "\ncheck,ok,detail\n";
  for (const auto& c : rep.checks) os << c.name << ',' << (c.ok ? 1 : 0) << ",\"" << c.detail << "\"\n";
  return 0;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentOpts {
  std::string config;
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  CLI::Option *o_seed, *o_reps;

  // experiment seeds
  std::uint64_t master = 0;
  std::string dgp = "dgp1", error = "gauss", loss = "l1";
  double delta = 1.345;
  std::size_t n = 500, rep = 0;
};

void add_experiment(CLI::App& app, ExperimentOpts& o) {
  auto* sub = app.add_subcommand("experiment", "Monte Carlo replication study");
  sub->require_subcommand(1);
  auto* run = sub->add_subcommand("run", "Run all replications of a JSON config");
  run->add_option("--config", o.config, "Experiment JSON config")->required();
  run->add_option("--out", o.out, "Output directory")->required();
  run->add_option("--threads", o.threads, "Worker threads (default: logical cores)");
  o.o_seed = run->add_option("--seed", o.seed, "Master seed (overrides the config)");
  o.o_reps = run->add_option("--replications", o.replications, "Replications (overrides the config)");

  auto* seeds = sub->add_subcommand("seeds", "Print the data and fit seeds of one replication");
  seeds->add_option("--seed", o.master, "Master seed")->capture_default_str();
  seeds->add_option("--dgp", o.dgp, "Process")->capture_default_str();
  seeds->add_option("--error", o.error, "Innovation law")->capture_default_str();
  seeds->add_option("--loss", o.loss, "Training loss")->capture_default_str();
  seeds->add_option("--delta", o.delta, "Huber threshold")->capture_default_str();
  seeds->add_option("--n", o.n, "Sample size")->capture_default_str();
  seeds->add_option("--rep", o.rep, "Replication index")->capture_default_str();
}

int run_experiment_cmd(const ExperimentOpts& o, int verbosity) {
  auto cfg = io::experiment_config_from_json(io::read_json_file(o.config));
  take(o.o_seed, o.seed, cfg.seed);
  take(o.o_reps, o.replications, cfg.replications);
  cfg.validate();
  fs::create_directories(o.out);
  if (verbosity > 0) {
    std::cerr << "running " << cfg.dgps.size() * cfg.losses.size() * cfg.sample_sizes.size() * cfg.replications
              << " replications on " << o.threads << " threads\n";
  }
  const auto records = run_experiment(cfg, o.threads);
  const auto dir = fs::path(o.out);
  {
    auto os = io::open_out((dir / "records.csv").string());
    io::write_records_csv(os, records);
  }
  const auto summary = summarize(records);
  {
    auto os = io::open_out((dir / "summary.csv").string());
    io::write_summary_csv(os, summary);
  }
  {
    auto os = io::open_out((dir / "boxplot.json").string());
    os << io::boxplot_json(summary).dump(1) << '\n';
  }
  std::size_t diverged = 0;
  for (const auto& r : records) {
    if (r.diverged) {
      ++diverged;
      if (verbosity > 0) std::cerr << "diverged: " << r.dgp << '/' << r.error << '/' << r.loss << " n=" << r.n
                                   << " rep=" << r.rep << ": " << r.message << '\n';
    }
  }
  if (diverged > 0) std::cerr << "warning: " << diverged << " replications diverged and were excluded\n";
  return 0;
}

int run_seeds(const ExperimentOpts& o) {
  const auto law = to_string(parse_innovation_law(o.error));
  const LossSpec loss{parse_loss_family(o.loss), o.delta};
  const auto s = replication_seeds(o.master, DgpSpec::by_name(o.dgp, InnovationLaw::gaussian()).tag(), law,
                                   loss_tag(loss), o.n, o.rep);
  std::cout << io::kVersionLine << "\ntrain_data,test_data,eval_data,fit\n"
            << s.train_data << ',' << s.test_data << ',' << s.eval_data << ',' << s.fit << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep ReLU regression under weak dependence and heavy tails", "rwdnn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rwdnn 1.0");
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Print progress to stderr");

  SimulateOpts sim;
  TrainOpts train;
  EvalOpts eval;
  PlanOpts plan;
  BoundOpts bound;
  AssumptionOpts assumptions;
  ExperimentOpts experiment;
  add_simulate(app, sim);
  add_train(app, train);
  add_eval(app, eval);
  add_plan(app, plan);
  add_bound(app, bound);
  add_assumptions(app, assumptions);
  add_experiment(app, experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (app.got_subcommand("simulate")) return run_simulate(sim);
    if (app.got_subcommand("train")) return run_train(train);
    if (app.got_subcommand("eval")) return run_eval(eval);
    if (app.got_subcommand("plan")) return run_plan(plan);
    if (app.got_subcommand("bound")) return run_bound(bound);
    if (app.got_subcommand("check-assumptions")) return run_assumptions(assumptions);
    auto* exp = app.get_subcommand("experiment");
    if (exp->got_subcommand("run")) return run_experiment_cmd(experiment, verbosity);
    if (exp->got_subcommand("seeds")) return run_seeds(experiment);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidSpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
