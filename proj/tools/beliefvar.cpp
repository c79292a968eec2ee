// beliefvar: query-response mean and variance estimation for discrete
// belief networks, with the doubling, delta and adjusted estimators, a
// Monte-Carlo oracle, and the benchmark experiment harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "beliefvar/beliefvar.hpp"

namespace {

using namespace beliefvar;

std::vector<std::pair<std::string, std::string>> parse_pairs(
    const std::string& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  if (spec.empty()) return out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    const std::string item = spec.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw Error("expected VAR=value, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    start = end + 1;
  }
  return out;
}

Query parse_query(const Network& net, const std::string& hypothesis,
                  const std::string& evidence) {
  return Query::parse(net, parse_pairs(hypothesis), parse_pairs(evidence));
}

std::string fmt(double x) { return format_double(x); }

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find(',', start);
    if (end == std::string::npos) end = csv.size();
    if (end > start) out.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"belief-net query variance toolkit"};
  app.require_subcommand(1);

  // --- validate ---
  auto* validate = app.add_subcommand("validate", "check a network file");
  std::string validate_path;
  validate->add_option("net", validate_path, "network JSON file")->required();
  validate->callback([&] {
    const Network net = load_network(validate_path);
    int rows = 0;
    for (int v = 0; v < net.num_variables(); ++v)
      rows += net.parent_config_count(v);
    std::cout << "ok: " << net.num_variables() << " variables, " << rows
              << " cpt rows\n";
  });

  // --- update ---
  auto* update = app.add_subcommand("update", "conjugate update from data");
  std::string update_net, update_csv, update_out;
  update->add_option("net", update_net, "network JSON file")->required();
  update->add_option("data", update_csv, "complete-data CSV file")->required();
  update->add_option("-o,--output", update_out, "output file (default stdout)");
  update->callback([&] {
    const Network net = load_network(update_net);
    const CompleteData data = load_complete_data_csv(net, update_csv);
    const Network updated = posterior_update(net, data);
    if (update_out.empty())
      std::cout << network_to_json(updated).dump(2) << '\n';
    else
      save_network(updated, update_out);
  });

  // --- query ---
  auto* query = app.add_subcommand("query", "plug-in query mean q1");
  std::string query_net, query_h, query_e;
  query->add_option("net", query_net, "network JSON file")->required();
  query->add_option("--hypothesis", query_h, "H=h assignments")->required();
  query->add_option("--evidence", query_e, "E=e assignments");
  query->callback([&] {
    const Network net = load_network(query_net);
    std::cout << fmt(estimate_q1(net, parse_query(net, query_h, query_e)))
              << '\n';
  });

  // --- variance ---
  auto* variance = app.add_subcommand("variance", "query variance estimate");
  std::string var_net, var_h, var_e, var_method = "doubling";
  variance->add_option("net", var_net, "network JSON file")->required();
  variance->add_option("--method", var_method, "doubling or delta")
      ->check(CLI::IsMember({"doubling", "delta"}));
  variance->add_option("--hypothesis", var_h, "H=h assignments")->required();
  variance->add_option("--evidence", var_e, "E=e assignments");
  variance->callback([&] {
    const Network net = load_network(var_net);
    const Query q = parse_query(net, var_h, var_e);
    if (var_method == "delta") {
      std::cout << "v1 " << fmt(variance_v1(net, q)) << '\n';
    } else {
      const auto [q2, v2] = estimate_q2_v2(net, q);
      std::cout << "q2 " << fmt(q2) << '\n' << "v2 " << fmt(v2) << '\n';
    }
  });

  // --- bundle ---
  auto* bundle = app.add_subcommand("bundle", "all estimates as one CSV row");
  std::string bundle_net, bundle_h, bundle_e;
  bundle->add_option("net", bundle_net, "network JSON file")->required();
  bundle->add_option("--hypothesis", bundle_h, "H=h assignments")->required();
  bundle->add_option("--evidence", bundle_e, "E=e assignments");
  bundle->callback([&] {
    const Network net = load_network(bundle_net);
    const EstimateBundle b =
        full_bundle(net, parse_query(net, bundle_h, bundle_e));
    std::cout << "q1,q2,q3,q4,v1,v2,v3,v4,mu_r,sigma_rr\n";
    std::cout << fmt(b.q1) << ',' << fmt(b.q2) << ',' << fmt(b.q3) << ','
              << fmt(b.q4) << ',' << fmt(b.v1) << ',' << fmt(b.v2) << ','
              << fmt(b.v3) << ',' << fmt(b.v4) << ',' << fmt(b.mu_r) << ','
              << fmt(b.sigma_rr) << '\n';
  });

  // --- oracle ---
  auto* oracle = app.add_subcommand("oracle", "Monte-Carlo ground truth");
  std::string oracle_net, oracle_h, oracle_e;
  OracleConfig oracle_cfg;
  oracle->add_option("net", oracle_net, "network JSON file")->required();
  oracle->add_option("--hypothesis", oracle_h, "H=h assignments")->required();
  oracle->add_option("--evidence", oracle_e, "E=e assignments");
  oracle->add_option("-k,--samples", oracle_cfg.sample_count, "posterior draws");
  oracle->add_option("--seed", oracle_cfg.seed, "RNG seed");
  oracle->add_option("--threads", oracle_cfg.threads, "worker threads");
  oracle->callback([&] {
    const Network net = load_network(oracle_net);
    const OracleResult r =
        mc_estimates(net, parse_query(net, oracle_h, oracle_e), oracle_cfg);
    std::cout << "q0 " << fmt(r.q0) << '\n'
              << "v0 " << fmt(r.v0) << '\n'
              << "se_q0 " << fmt(r.se_mean) << '\n'
              << "se_v0 " << fmt(r.se_var) << '\n'
              << "k_effective " << r.k_effective << '\n';
  });

  // --- stdensity ---
  auto* stdensity = app.add_subcommand("stdensity", "St1 predictive density");
  double st_nu = 1.0, st_eta = 0.0, st_omega2 = 1.0, st_at = 0.0;
  stdensity->add_option("--nu", st_nu, "degrees of freedom")->required();
  stdensity->add_option("--eta", st_eta, "location");
  stdensity->add_option("--omega2", st_omega2, "squared scale");
  stdensity->add_option("--at", st_at, "evaluation point")->required();
  stdensity->callback([&] {
    std::cout << fmt(st_density(st1_params(st_eta, st_omega2, st_nu), st_at))
              << '\n';
  });

  // --- experiment ---
  auto* experiment = app.add_subcommand(
      "experiment", "benchmark error tables (long-format CSV)");
  std::string exp_bench = "nb2,nb4,diamond", exp_m = "20,100,500", exp_out;
  OracleConfig exp_cfg;
  exp_cfg.seed = 7;
  int exp_threads = 1;
  bool exp_timings = false;
  experiment->add_option("--bench", exp_bench, "benchmarks to run");
  experiment->add_option("--m", exp_m, "effective sample size grid");
  experiment->add_option("-k,--samples", exp_cfg.sample_count, "oracle draws");
  experiment->add_option("--seed", exp_cfg.seed, "master seed");
  experiment->add_option("--threads", exp_threads, "worker threads");
  experiment->add_flag("--timings", exp_timings,
                       "measure per-method wall times (breaks byte-level "
                       "reproducibility of the CSV)");
  experiment->add_option("-o,--output", exp_out, "output CSV (default stdout)");
  experiment->callback([&] {
    std::vector<double> grid;
    for (const auto& item : split_list(exp_m)) grid.push_back(std::stod(item));
    std::vector<ResultRow> all;
    for (const auto& name : split_list(exp_bench)) {
      Benchmark bench = make_benchmark(name);
      bench.m_grid = grid;
      auto rows = run_error_table(bench, exp_cfg, exp_timings, exp_threads);
      for (auto& r : rows) all.push_back(std::move(r));
    }
    if (exp_out.empty()) {
      write_results_csv(std::cout, all);
    } else {
      std::ofstream out(exp_out, std::ios::binary);
      if (!out) throw Error("cannot write '" + exp_out + "'");
      write_results_csv(out, all);
    }
  });

  // --- bench ---
  auto* bench_cmd = app.add_subcommand("bench", "delta vs doubling timings");
  std::string bench_nets = "nb4,random48";
  int bench_queries = 100, bench_repeats = 50;
  int bench_hyp = 2, bench_ev = 2;
  std::uint64_t bench_seed = 2032;
  bench_cmd->add_option("--nets", bench_nets,
                        "nb2,nb4,diamond,random<N> or JSON files");
  bench_cmd->add_option("--queries", bench_queries, "random queries per net");
  bench_cmd->add_option("--repeats", bench_repeats, "repeats per query set");
  bench_cmd->add_option("--hyp-vars", bench_hyp,
                        "hypothesis variables per random query");
  bench_cmd->add_option("--ev-vars", bench_ev,
                        "evidence variables per random query");
  bench_cmd->add_option("--seed", bench_seed, "seed for random nets/queries");
  bench_cmd->callback([&] {
    std::vector<std::pair<std::string, Network>> nets;
    std::vector<std::vector<Query>> query_sets;
    for (const auto& name : split_list(bench_nets)) {
      if (name == "nb2" || name == "nb4" || name == "diamond") {
        const Benchmark b = make_benchmark(name);
        nets.emplace_back(name, b.network_for(20.0));
        query_sets.push_back(b.queries);
      } else if (name.rfind("random", 0) == 0) {
        const int size = std::stoi(name.substr(6));
        Network net = random_network(size, 2, bench_seed);
        query_sets.push_back(random_queries(net, bench_queries, bench_hyp,
                                            bench_ev, bench_seed));
        nets.emplace_back(name, std::move(net));
      } else {
        Network net = load_network(name);
        query_sets.push_back(random_queries(net, bench_queries, bench_hyp,
                                            bench_ev, bench_seed));
        nets.emplace_back(name, std::move(net));
      }
    }
    const auto rows = run_timing_bench(nets, query_sets, bench_repeats);
    std::cout << "net,queries,repeats,t_delta,t_double,ratio\n";
    for (const auto& r : rows)
      std::cout << r.net_name << ',' << r.queries << ',' << r.repeats << ','
                << fmt(r.t_delta) << ',' << fmt(r.t_double) << ','
                << fmt(r.ratio) << '\n';
  });

  // --- benchnet ---
  auto* benchnet =
      app.add_subcommand("benchnet", "export a benchmark network as JSON");
  std::string bn_name = "nb2", bn_out;
  double bn_m = 20.0;
  benchnet->add_option("--bench", bn_name, "nb2, nb4 or diamond");
  benchnet->add_option("--m", bn_m, "effective sample size");
  benchnet->add_option("-o,--output", bn_out, "output file (default stdout)");
  benchnet->callback([&] {
    const auto [net, queries] = build_benchmark(bn_name, bn_m);
    (void)queries;
    if (bn_out.empty())
      std::cout << network_to_json(net).dump(2) << '\n';
    else
      save_network(net, bn_out);
  });

  // --- fixtures ---
  auto* fixtures = app.add_subcommand(
      "fixtures", "write the benchmark mean-CPT fixture files");
  std::string fix_dir = "data/benchmarks";
  fixtures->add_option("--out-dir", fix_dir, "target directory");
  fixtures->callback([&] {
    std::filesystem::create_directories(fix_dir);
    for (const char* name : {"nb2", "nb4", "diamond"}) {
      const Benchmark b = make_benchmark(name);
      std::ofstream out(fix_dir + "/" + std::string(name) + "_means.json");
      out << means_to_json(b.shape, b.mean_cpts).dump(2) << '\n';
    }
    std::cout << "wrote nb2/nb4/diamond mean fixtures to " << fix_dir << '\n';
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
