#include "dualopt/cli/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dualopt/instances.hpp"

namespace dualopt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double positive_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument(fmt::format("config: '{}' must be a number", key));
  const double d = v.get<double>();
  if (!(d > 0.0)) throw std::invalid_argument(fmt::format("config: '{}' must be positive", key));
  return d;
}

double nonnegative_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument(fmt::format("config: '{}' must be a number", key));
  const double d = v.get<double>();
  if (d < 0.0) throw std::invalid_argument(fmt::format("config: '{}' must be nonnegative", key));
  return d;
}

std::size_t count(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
    throw std::invalid_argument(fmt::format("config: '{}' must be a positive integer", key));
  }
  return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw std::invalid_argument(fmt::format("config: '{}' must be a string", key));
  return v.get<std::string>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "problem") {
      cfg.problem = text(v, key);
    } else if (key == "n") {
      cfg.n = count(v, key);
    } else if (key == "l") {
      cfg.l = count(v, key);
    } else if (key == "c") {
      cfg.c = nonnegative_number(v, key);
    } else if (key == "scale_min") {
      cfg.scale_min = positive_number(v, key);
    } else if (key == "scale_max") {
      cfg.scale_max = positive_number(v, key);
    } else if (key == "scale_pattern") {
      cfg.scale_pattern = text(v, key);
      if (cfg.scale_pattern != "uniform" && cfg.scale_pattern != "alternating") {
        throw std::invalid_argument("config: scale_pattern must be uniform or alternating");
      }
    } else if (key == "entropy_mu") {
      cfg.entropy_mu = positive_number(v, key);
    } else if (key == "entropy_spread") {
      cfg.entropy_spread = positive_number(v, key);
    } else if (key == "problem_seed") {
      cfg.problem_seed = v.get<std::uint64_t>();
    } else if (key == "dataset") {
      fs::path p = text(v, key);
      cfg.dataset = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (key == "graph") {
      cfg.graph = text(v, key);
    } else if (key == "m") {
      cfg.m = count(v, key);
    } else if (key == "edge_prob_scale") {
      cfg.edge_prob_scale = positive_number(v, key);
    } else if (key == "edge_prob") {
      cfg.edge_prob = positive_number(v, key);
    } else if (key == "graph_seed") {
      cfg.graph_seed = v.get<std::uint64_t>();
    } else if (key == "edges") {
      if (!v.is_array()) throw std::invalid_argument("config: 'edges' must be a list of pairs");
      for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2) {
          throw std::invalid_argument("config: each edge must be a pair [i, j]");
        }
        cfg.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
      }
    } else if (key == "algorithm") {
      cfg.algorithm = parse_variant(text(v, key));
    } else if (key == "epsilon") {
      cfg.epsilon = positive_number(v, key);
    } else if (key == "epsilon_tilde") {
      cfg.epsilon_tilde = positive_number(v, key);
    } else if (key == "R") {
      cfg.R = positive_number(v, key);
    } else if (key == "R_x") {
      cfg.R_x = positive_number(v, key);
    } else if (key == "N") {
      cfg.N = count(v, key);
    } else if (key == "T") {
      cfg.T = count(v, key);
    } else if (key == "mu") {
      cfg.mu = positive_number(v, key);
    } else if (key == "L") {
      cfg.L = positive_number(v, key);
    } else if (key == "M") {
      cfg.M = positive_number(v, key);
    } else if (key == "m_list") {
      if (!v.is_array()) throw std::invalid_argument("config: 'm_list' must be a list");
      for (const auto& e : v) cfg.m_list.push_back(count(e, key));
    } else if (key == "trace_file") {
      cfg.trace_file = text(v, key);
    } else if (key == "summary_file") {
      cfg.summary_file = text(v, key);
    } else if (key == "sweep_file") {
      cfg.sweep_file = text(v, key);
    } else {
      throw std::invalid_argument(fmt::format("config: unknown key '{}'", key));
    }
  }
  if (cfg.scale_max < cfg.scale_min) throw std::invalid_argument("config: scale_max < scale_min");
  if (cfg.dataset && !fs::exists(*cfg.dataset)) {
    throw std::invalid_argument(fmt::format("config: dataset '{}' does not exist",
                                            cfg.dataset->string()));
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

CommunicationGraph build_communication_graph(const ExperimentConfig& cfg, std::size_t m) {
  if (cfg.graph == "custom") return CommunicationGraph(Topology(m, cfg.edges));
  if (!cfg.edges.empty()) throw std::invalid_argument("config: 'edges' requires graph \"custom\"");
  std::optional<double> p = cfg.edge_prob;
  if (cfg.edge_prob_scale) {
    p = std::min(1.0, *cfg.edge_prob_scale * std::log(static_cast<double>(m)) /
                          static_cast<double>(m));
  }
  return CommunicationGraph(build_graph(parse_graph_family(cfg.graph), m, p, cfg.graph_seed));
}

SeparableObjective build_problem(const ExperimentConfig& cfg, std::size_t m) {
  if (cfg.problem == "quadratic") {
    return make_quadratic_instance(m, cfg.n, cfg.scale_min, cfg.scale_max, cfg.problem_seed,
                                   cfg.scale_pattern == "alternating" ? ScalePattern::kAlternating
                                                                      : ScalePattern::kUniform);
  }
  if (cfg.problem == "ridge") return make_ridge_instance(m, cfg.n, cfg.l, cfg.c, cfg.problem_seed);
  if (cfg.problem == "entropy") {
    SeparableObjective p = make_entropy_instance(m, cfg.n, cfg.problem_seed, cfg.entropy_spread);
    if (!cfg.entropy_mu) return p;
    std::vector<AgentPtr> agents;
    for (const auto& a : p.agents()) {
      agents.push_back(make_entropy(static_cast<const EntropyObjective&>(*a).q(), *cfg.entropy_mu));
    }
    return SeparableObjective(std::move(agents));
  }
  if (cfg.problem == "logistic") {
    if (cfg.dataset) return make_logistic_instance(load_csv_dataset(cfg.dataset->string(), m), cfg.c);
    return make_logistic_instance(m, cfg.n, cfg.l, cfg.c, cfg.problem_seed);
  }
  throw std::invalid_argument(fmt::format("config: unknown problem '{}'", cfg.problem));
}

RunOutcome run_experiment(const ExperimentConfig& cfg, std::size_t m) {
  const CommunicationGraph graph = build_communication_graph(cfg, m);
  const SeparableObjective problem = build_problem(cfg, m);
  RunOutcome out;
  out.spectrum = graph.spectrum;
  out.reference = reference_solve(problem, graph);

  AlgoConfig ac;
  ac.variant = cfg.algorithm;
  ac.epsilon = cfg.epsilon;
  ac.epsilon_tilde = cfg.epsilon_tilde;
  ac.R = cfg.R;
  ac.R_x = cfg.R_x;
  ac.N = cfg.N;
  ac.T = cfg.T;
  ac.mu = cfg.mu;
  ac.L = cfg.L;
  ac.M = cfg.M ? *cfg.M : effective_M(problem, out.reference);
  apply_reference(ac, out.reference);
  if (!ac.epsilon_tilde) {
    if (!(*ac.R > 0.0)) {
      throw std::invalid_argument("R = 0 for this instance; set epsilon_tilde in the config");
    }
    ac.epsilon_tilde = ac.epsilon / *ac.R;
  }

  out.trace = run_variant(problem, graph, ac);
  out.certificate = certificate(problem, out.trace.final_candidate, out.reference,
                                graph.laplacian, ac.epsilon, *ac.epsilon_tilde);
  out.comparison = compare_to_bound(out.trace, out.trace.N);
  return out;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", r.k, r.comm_rounds,
                       r.oracle_calls_max(), r.primal_gap, r.consensus_residual,
                       r.dual_gap_witness);
  }
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json config_echo(const ExperimentConfig& c) {
  json e = {
      {"problem", c.problem},       {"n", c.n},
      {"l", c.l},                   {"c", c.c},
      {"scale_min", c.scale_min},   {"scale_max", c.scale_max},
      {"scale_pattern", c.scale_pattern},
      {"entropy_mu", opt(c.entropy_mu)},
      {"entropy_spread", opt(c.entropy_spread)},
      {"problem_seed", c.problem_seed},
      {"dataset", c.dataset ? json(c.dataset->string()) : json(nullptr)},
      {"graph", c.graph},           {"m", c.m},
      {"edge_prob", opt(c.edge_prob)},
      {"edge_prob_scale", opt(c.edge_prob_scale)},
      {"graph_seed", c.graph_seed}, {"algorithm", std::string(to_string(c.algorithm))},
      {"epsilon", c.epsilon},       {"epsilon_tilde", opt(c.epsilon_tilde)},
      {"R", opt(c.R)},              {"R_x", opt(c.R_x)},
      {"N", opt(c.N)},              {"T", opt(c.T)},
      {"mu", opt(c.mu)},            {"L", opt(c.L)},
      {"M", opt(c.M)},
  };
  if (!c.edges.empty()) e["edges"] = c.edges;
  if (!c.m_list.empty()) e["m_list"] = c.m_list;
  return e;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << contents;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error(fmt::format("cannot create output directory '{}'", dir.string()));
  }
}

}  // namespace

std::string summary_json(const ExperimentConfig& cfg, const RunOutcome& o) {
  const RunTrace& t = o.trace;
  json j = {
      {"config", config_echo(cfg)},
      {"spectrum",
       {{"lambda_max", o.spectrum.lambda_max},
        {"lambda_min_plus", o.spectrum.lambda_min_plus},
        {"chi", o.spectrum.chi}}},
      {"reference",
       {{"f_star", o.reference.f_star},
        {"R", o.reference.R},
        {"R_x", o.reference.R_x},
        {"R_w", o.reference.R_w}}},
      {"bound", {{"N", t.N}, {"T", opt(t.T)}}},
      {"achieved_iteration", opt(o.comparison.first_certified)},
      {"rounds_to_certificate", opt(o.comparison.rounds_to_certificate)},
      {"certificate",
       {{"primal_gap", o.certificate.primal_gap},
        {"consensus_residual", o.certificate.consensus_residual},
        {"epsilon", o.certificate.epsilon},
        {"epsilon_tilde", o.certificate.epsilon_tilde},
        {"satisfied", o.certificate.satisfied}}},
      {"total_comm_rounds", t.total_rounds},
      {"oracle_calls", t.oracle_calls},
      {"oracle_calls_max",
       t.oracle_calls.empty() ? 0 : *std::max_element(t.oracle_calls.begin(), t.oracle_calls.end())},
      {"violation_count", t.violation_count},
  };
  return j.dump(2) + "\n";
}

std::string format_spectrum(const SpectralSummary& s) {
  return fmt::format("lambda_max={:.12g} lambda_min_plus={:.12g} chi={:.12g}", s.lambda_max,
                     s.lambda_min_plus, s.chi);
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg) {
  if (cfg.m_list.size() < 3) throw std::invalid_argument("sweep needs at least three sizes in m_list");
  std::vector<std::size_t> sizes = cfg.m_list;
  std::sort(sizes.begin(), sizes.end());
  std::vector<SweepRow> rows;
  for (std::size_t m : sizes) {
    const RunOutcome o = run_experiment(cfg, m);
    if (!o.certificate.satisfied || !o.comparison.rounds_to_certificate) {
      throw std::runtime_error(fmt::format(
          "sweep member m={} did not certify (gap {:.3g}, residual {:.3g})", m,
          o.certificate.primal_gap, o.certificate.consensus_residual));
    }
    rows.push_back({m, o.spectrum.chi, *o.comparison.rounds_to_certificate});
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "m,chi,rounds_to_certificate\n";
  for (const auto& r : rows) out << fmt::format("{},{:.17g},{}\n", r.m, r.chi, r.rounds_to_certificate);
}

int cmd_spectrum(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& console) {
  const CommunicationGraph g = build_communication_graph(cfg, cfg.m);
  const std::string line = format_spectrum(g.spectrum);
  console << line << '\n';
  if (!out_dir.empty()) {
    prepare_dir(out_dir);
    write_file(out_dir / "spectrum.txt", line + "\n");
  }
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& console) {
  prepare_dir(out_dir);
  const RunOutcome o = run_experiment(cfg);
  std::ostringstream csv;
  write_trace_csv(o.trace, csv);
  write_file(out_dir / cfg.trace_file, csv.str());
  write_file(out_dir / cfg.summary_file, summary_json(cfg, o));
  console << fmt::format("{}: N={}{} rounds={} primal_gap={:.6g} consensus_residual={:.6g} {}\n",
                         to_string(cfg.algorithm), o.trace.N,
                         o.trace.T ? fmt::format(" T={}", *o.trace.T) : std::string(),
                         o.trace.total_rounds, o.certificate.primal_gap,
                         o.certificate.consensus_residual,
                         o.certificate.satisfied ? "certified" : "NOT certified");
  return o.certificate.satisfied ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& console) {
  prepare_dir(out_dir);
  const std::vector<SweepRow> rows = sweep(cfg);
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  write_file(out_dir / cfg.sweep_file, csv.str());
  console << csv.str();
  return 0;
}

}  // namespace dualopt::cli
