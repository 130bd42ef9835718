// Command-line front end: dataset generation, single-shot decoding, rate
// sweeps to CSV, the property-check suites, and sweep-CSV reports.
//
// Exit codes: 0 success, 1 check failure, 2 infeasible instance, 3 bad
// config or usage.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwaskit/gwaskit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBadConfig = 3;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;
};

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::map<std::string, std::string> row;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= t.columns.size()) throw std::runtime_error("CSV row too wide");
      row[t.columns[i++]] = cell;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

int run_generate(std::int32_t q, std::int32_t G, std::int32_t L, std::int64_t N,
                 std::int64_t m, double alpha, std::uint64_t seed,
                 const std::string& out_path, const std::string& truth_path) {
  const gwaskit::ModelParams params = gwaskit::make_params(q, G, L, N, m, alpha);
  gwaskit::Rng rng_s = gwaskit::substream(seed, 0, gwaskit::Stage::subsequence);
  gwaskit::Rng rng_f = gwaskit::substream(seed, 0, gwaskit::Stage::function);
  gwaskit::Rng rng_g = gwaskit::substream(seed, 0, gwaskit::Stage::genomes);
  gwaskit::Rng rng_n = gwaskit::substream(seed, 0, gwaskit::Stage::noise);
  const auto s = gwaskit::sample_uniform_subsequence(rng_s, L, G);
  const auto f = gwaskit::sample_function(rng_f, q, L, m);
  const auto data = gwaskit::generate_dataset(rng_g, rng_n, params, s, f);

  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + out_path);
  gwaskit::write_dataset(os, params, data, seed);

  if (!truth_path.empty()) {
    std::ofstream ts(truth_path, std::ios::binary);
    if (!ts) throw std::runtime_error("cannot open " + truth_path);
    ts << "s " << gwaskit::to_string(s) << "\n";
    ts << "f";
    for (std::uint64_t p : f.patterns) ts << " " << p;
    ts << "\n";
  }
  std::cout << "wrote " << N << " individuals to " << out_path << "\n";
  return kExitOk;
}

int run_decode(const std::string& in_path, const std::string& decoder,
               double tau, bool tau_set, double refine_epsilon,
               const std::string& center, std::uint64_t seed,
               std::uint64_t budget, int threads) {
  std::ifstream is(in_path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + in_path);
  const gwaskit::StoredDataset stored = gwaskit::read_dataset(is);
  const gwaskit::ModelParams& params = stored.params;

  if (!tau_set) {
    // proportional default: 5% of the model's joint entropy
    tau = 0.05 * gwaskit::joint_pmf(params.gamma, params.alpha).H_uv;
  }
  gwaskit::DecodeOptions opt;
  opt.budget = budget;
  opt.threads = threads;
  gwaskit::Rng rng = gwaskit::substream(seed, 0, gwaskit::Stage::tiebreak);

  gwaskit::DecodeResult result;
  if (decoder == "typicality") {
    result = gwaskit::typicality_decode(stored.data, params, tau, rng, opt);
  } else if (decoder == "ml") {
    result = gwaskit::ml_decode(stored.data, params, rng, opt);
  } else if (decoder == "refine") {
    if (center.empty())
      throw gwaskit::config_error("decode: --center is required for refine");
    gwaskit::Subsequence s_tilde;
    try {
      s_tilde = gwaskit::parse_subsequence(center, params.G);
    } catch (const std::exception& e) {
      throw gwaskit::config_error(std::string("decode: bad --center: ") + e.what());
    }
    if (s_tilde.length() != params.L)
      throw gwaskit::config_error("decode: center length != L");
    result = gwaskit::refine_in_ball(stored.data, s_tilde, refine_epsilon,
                                     params, tau, rng, opt);
  } else {
    throw gwaskit::config_error("decode: unknown decoder " + decoder);
  }

  std::cout << "estimate " << gwaskit::to_string(result.estimate) << "\n"
            << "status " << gwaskit::to_string(result.status) << "\n"
            << "candidates_examined " << result.candidates_examined << "\n"
            << "accepted " << result.accepted.size() << "\n";
  if (result.witness) {
    std::cout << "witness";
    for (std::uint64_t p : result.witness->patterns) std::cout << " " << p;
    std::cout << "\n";
  }
  return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& out_path,
              bool seed_flag_set, std::uint64_t seed_flag, int threads) {
  std::ifstream is(config_path);
  if (!is) throw gwaskit::config_error("cannot open " + config_path);
  gwaskit::SweepConfig cfg = gwaskit::parse_sweep_config(is);
  if (seed_flag_set) {
    if (cfg.seed_set)
      throw gwaskit::config_error(
          "sweep: seed given both in the config and on the command line");
    cfg.seed = seed_flag;
    cfg.seed_set = true;
  }
  if (!cfg.seed_set)
    throw gwaskit::config_error(
        "sweep: --seed (or a seed= config key) is mandatory");
  if (cfg.decoder == gwaskit::DecoderKind::refine &&
      !(cfg.refine_epsilon > 0.0 && cfg.refine_epsilon < 0.5 &&
        gwaskit::binary_entropy(cfg.refine_epsilon) < 0.5)) {
    std::cerr << "warning: refine_epsilon=" << cfg.refine_epsilon
              << " is outside the h(eps) < 1/2 regime the zero-error "
                 "reduction assumes\n";
  }
  const auto rows = gwaskit::run_sweep(cfg, threads);
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + out_path);
  os << gwaskit::to_csv(rows);
  std::size_t infeasible = 0;
  for (const auto& r : rows) {
    if (r.note == "infeasible") ++infeasible;
  }
  std::cout << "wrote " << rows.size() << " rows to " << out_path;
  if (infeasible > 0) std::cout << " (" << infeasible << " infeasible)";
  std::cout << "\n";
  return kExitOk;
}

int run_verify(const std::string& suite) {
  std::vector<gwaskit::SuiteKind> kinds;
  if (suite == "all") {
    kinds = {gwaskit::SuiteKind::inequalities, gwaskit::SuiteKind::combinatorics,
             gwaskit::SuiteKind::divergence, gwaskit::SuiteKind::model,
             gwaskit::SuiteKind::decoder_oracle};
  } else if (suite == "inequalities") {
    kinds = {gwaskit::SuiteKind::inequalities};
  } else if (suite == "combinatorics") {
    kinds = {gwaskit::SuiteKind::combinatorics};
  } else if (suite == "divergence") {
    kinds = {gwaskit::SuiteKind::divergence};
  } else if (suite == "model") {
    kinds = {gwaskit::SuiteKind::model};
  } else if (suite == "decoder-oracle") {
    kinds = {gwaskit::SuiteKind::decoder_oracle};
  } else {
    throw gwaskit::config_error("verify: unknown suite " + suite);
  }
  bool all_pass = true;
  for (const auto kind : kinds) {
    const gwaskit::VerifyReport rep = gwaskit::run_suite(kind);
    for (const auto& check : rep.checks) {
      std::printf("%s  [%s] %s  (slack %.3g)\n", check.pass ? "PASS" : "FAIL",
                  rep.suite.c_str(), check.name.c_str(), check.slack);
    }
    all_pass = all_pass && rep.all_pass();
  }
  return all_pass ? kExitOk : kExitCheckFailure;
}

void write_svg(const std::string& path, const CsvTable& table) {
  // p_err against N, one polyline per tau
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double max_n = 1.0;
  for (const auto& row : table.rows) {
    if (row.at("note") == "infeasible") continue;
    const double n = std::stod(row.at("N"));
    const double p = std::stod(row.at("p_err"));
    series[row.at("tau")].push_back({n, p});
    max_n = std::max(max_n, n);
  }
  const double w = 640, h = 400, ml = 60, mb = 40, mt = 20, mr = 20;
  auto sx = [&](double n) { return ml + (w - ml - mr) * n / max_n; };
  auto sy = [&](double p) { return h - mb - (h - mb - mt) * p; };
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
     << "' y2='" << h - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << h - mb << "' stroke='black'/>\n";
  os << "<text x='" << w / 2 << "' y='" << h - 8
     << "' font-size='13' text-anchor='middle'>N</text>\n";
  os << "<text x='14' y='" << h / 2
     << "' font-size='13' text-anchor='middle' transform='rotate(-90 14 "
     << h / 2 << ")'>p_err</text>\n";
  const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#ff7f0e"};
  std::size_t ci = 0;
  for (auto& [tau, pts] : series) {
    std::sort(pts.begin(), pts.end());
    os << "<polyline fill='none' stroke='" << colors[ci % colors.size()]
       << "' stroke-width='2' points='";
    for (const auto& [n, p] : pts) os << sx(n) << "," << sy(p) << " ";
    os << "'/>\n";
    os << "<text x='" << w - mr - 110 << "' y='" << mt + 16 * (ci + 1)
       << "' font-size='12' fill='" << colors[ci % colors.size()]
       << "'>tau=" << tau << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

int run_report(const std::string& in_path, const std::string& svg_path) {
  std::ifstream is(in_path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + in_path);
  const CsvTable table = read_csv(is);

  std::map<std::string, std::vector<const std::map<std::string, std::string>*>>
      by_tau;
  std::size_t infeasible = 0, flagged = 0;
  for (const auto& row : table.rows) {
    if (row.at("note") == "infeasible") {
      ++infeasible;
      continue;
    }
    if (row.at("note") != "ok") ++flagged;
    by_tau[row.at("tau")].push_back(&row);
  }
  for (auto& [tau, rows] : by_tau) {
    std::printf("tau=%s\n", tau.c_str());
    std::printf("  %10s %10s %10s %10s %12s\n", "N", "rate", "R/C", "p_err",
                "+-2sigma");
    std::vector<std::pair<double, const std::map<std::string, std::string>*>>
        sorted;
    for (const auto* r : rows) sorted.push_back({std::stod(r->at("N")), r});
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [n, r] : sorted) {
      const double rate_v = std::stod(r->at("rate"));
      const double cap_v = std::stod(r->at("capacity"));
      std::printf("  %10.0f %10.4f %10.4f %10.4f %12.4f\n", n, rate_v,
                  rate_v / cap_v, std::stod(r->at("p_err")),
                  2.0 * std::stod(r->at("stderr")));
    }
    if (sorted.size() >= 2) {
      const double drop = std::stod(sorted.front().second->at("p_err")) -
                          std::stod(sorted.back().second->at("p_err"));
      std::printf("  error drop from N=%.0f to N=%.0f: %.4f\n",
                  sorted.front().first, sorted.back().first, drop);
    }
  }
  if (flagged > 0)
    std::printf("%zu rows flagged (m/N > 0.1: asymptotic regime needs m = o(N))\n",
                flagged);
  if (infeasible > 0) std::printf("%zu rows infeasible\n", infeasible);
  if (!svg_path.empty()) {
    write_svg(svg_path, table);
    std::printf("wrote %s\n", svg_path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwaskit: genome-phenotype association recovery toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "synthesize a dataset file");
  std::int32_t q = 2, G = 12, L = 2;
  std::int64_t N = 100, m = 1;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string out_path, truth_path;
  gen->add_option("--q", q, "alphabet size");
  gen->add_option("--G", G, "genome length");
  gen->add_option("--L", L, "causal subsequence length");
  gen->add_option("--N", N, "number of individuals");
  gen->add_option("--m", m, "pattern count |f^-1(1)|");
  gen->add_option("--alpha", alpha, "label noise probability");
  gen->add_option("--seed", seed, "master seed")->required();
  gen->add_option("--out", out_path, "output dataset path")->required();
  gen->add_option("--truth", truth_path, "optional path for the hidden (s, f)");

  // decode
  auto* dec = app.add_subcommand("decode", "run one decoder on a dataset file");
  std::string in_path, decoder = "typicality", center;
  double tau = 0.05, refine_epsilon = 1.0;
  std::uint64_t budget = 100'000'000;
  int threads = 1;
  dec->add_option("--in", in_path, "dataset path")->required();
  dec->add_option("--decoder", decoder, "typicality|ml|refine");
  auto* tau_opt = dec->add_option("--tau", tau, "typicality tolerance (default 0.05*H_uv)");
  dec->add_option("--refine-epsilon", refine_epsilon, "ball parameter for refine");
  dec->add_option("--center", center, "1-based ball center for refine, e.g. 3,7");
  dec->add_option("--seed", seed, "tie-break seed")->required();
  dec->add_option("--budget", budget, "max (candidate, function) evaluations");
  dec->add_option("--threads", threads, "scan threads");

  // sweep
  auto* swp = app.add_subcommand("sweep", "grid experiment to CSV");
  std::string config_path, csv_path;
  std::uint64_t sweep_seed = 0;
  swp->add_option("--config", config_path, "key=value config file")->required();
  swp->add_option("--out", csv_path, "output CSV path")->required();
  auto* sweep_seed_opt =
      swp->add_option("--seed", sweep_seed, "master seed (mandatory unless the "
                                            "config carries seed=)");
  swp->add_option("--threads", threads, "trial-level threads");

  // verify
  auto* ver = app.add_subcommand("verify", "run property-check suites");
  std::string suite = "all";
  ver->add_option("--suite", suite,
                  "inequalities|combinatorics|divergence|model|decoder-oracle|all");

  // report
  auto* rep = app.add_subcommand("report", "summarize a sweep CSV");
  std::string report_in, svg_path;
  rep->add_option("--in", report_in, "sweep CSV path")->required();
  rep->add_option("--svg", svg_path, "optional SVG plot path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (gen->parsed())
      return run_generate(q, G, L, N, m, alpha, seed, out_path, truth_path);
    if (dec->parsed())
      return run_decode(in_path, decoder, tau, tau_opt->count() > 0,
                        refine_epsilon, center, seed, budget, threads);
    if (swp->parsed())
      return run_sweep(config_path, csv_path, sweep_seed_opt->count() > 0,
                       sweep_seed, threads);
    if (ver->parsed()) return run_verify(suite);
    if (rep->parsed()) return run_report(report_in, svg_path);
  } catch (const gwaskit::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const gwaskit::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitBadConfig;
}
