#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "multab/arith.hpp"
#include "multab/asymptotics.hpp"
#include "multab/counting.hpp"
#include "multab/divisor_geometry.hpp"
#include "multab/errors.hpp"
#include "multab/harness.hpp"
#include "multab/poisson.hpp"

using namespace multab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

struct Globals {
  std::string format = "jsonl";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> sieve_limit;
  std::vector<double> caps;
  std::optional<std::uint64_t> budget_bits;
  unsigned workers = 1;
};

std::uint32_t sieve_limit_for(const Globals& g, std::uint64_t need) {
  if (g.sieve_limit) return *g.sieve_limit;
  const std::uint32_t env = default_sieve_limit(0);
  if (env) return env;
  // Counting needs primes up to x; sieve only as far as that.
  return static_cast<std::uint32_t>(std::clamp<std::uint64_t>(need, 1000, 0xFFFFFFFFull));
}

// A lone "value" is printed bare; everything else as one JSON line or a
// two-line CSV.
void emit(const Json& j, const Globals& g) {
  if (j.size() == 1 && j.contains("value")) {
    std::cout << j["value"].dump() << '\n';
    return;
  }
  if (parse_format(g.format) == OutputFormat::jsonl) {
    std::cout << j.dump() << '\n';
    return;
  }
  std::string head, row;
  bool first = true;
  for (const auto& [key, val] : j.items()) {
    std::string cell = val.is_string() ? val.get<std::string>() : val.dump();
    if (cell.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : cell) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      cell = q + "\"";
    }
    head += (first ? "" : ",") + key;
    row += (first ? "" : ",") + cell;
    first = false;
  }
  std::cout << head << '\n' << row << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multab: multiplication-table counts, divisor geometry and density predictions"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "Output format: jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "json", "csv"}));
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--sieve-limit", g.sieve_limit, std::string("Sieve limit (default: $") +
                                                     kSieveLimitEnv + " or sized to the input)");
  app.add_option("--caps", g.caps, "Comma-separated caps on a_1..a_k")->delimiter(',');
  app.add_option("--budget-bits", g.budget_bits, "Memory budget for count-a, in bits");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);

  std::function<Json()> action;

  auto* ca = app.add_subcommand("count-a", "Distinct products n_1...n_m with n_i <= N_i");
  std::vector<std::uint64_t> ca_n;
  ca->add_option("--n", ca_n, "Sides N_1,...,N_m")->delimiter(',')->required();
  ca->callback([&] {
    action = [&] {
      return Json{{"value", count_A(ca_n, g.budget_bits.value_or(kDefaultBudgetBits), g.workers)}};
    };
  });

  auto* ch = app.add_subcommand("count-h", "H(x, y, z): n <= x with a divisor tuple in the windows");
  std::uint64_t ch_x = 0;
  std::vector<double> ch_y, ch_z;
  bool ch_star = false;
  ch->add_option("--x", ch_x, "Upper bound x")->required();
  ch->add_option("--y", ch_y, "Lower window ends y_1,...,y_k")->delimiter(',')->required();
  ch->add_option("--z", ch_z, "Upper window ends (default 2y)")->delimiter(',');
  ch->add_flag("--star", ch_star, "Count squarefree n only");
  ch->callback([&] {
    action = [&] {
      if (ch_z.empty()) {
        for (double v : ch_y) ch_z.push_back(2.0 * v);
      }
      const PrimeSieve sieve(sieve_limit_for(g, ch_x));
      const auto h = ch_star ? count_H_star(ch_x, ch_y, ch_z, sieve, g.workers)
                             : count_H(ch_x, ch_y, ch_z, sieve, g.workers);
      return Json{{"value", h}};
    };
  });

  auto* vol = app.add_subcommand("volume", "Chain count and log-box union volume of a tuple");
  std::vector<std::uint64_t> vol_a;
  vol->add_option("--a", vol_a, "Tuple a_1,...,a_k")->delimiter(',')->required();
  vol->callback([&] {
    action = [&] {
      std::uint64_t m = 1000;
      for (auto v : vol_a) m = std::max(m, v);
      const PrimeSieve sieve(sieve_limit_for(g, m));
      const auto a = FactoredTuple::from_values(vol_a, sieve);
      const auto b = l_bounds(a);
      return Json{{"a", vol_a},
                  {"tau", tau_chain(a)},
                  {"L", l_volume(a)},
                  {"tau_bound", b.tau_bound},
                  {"log_bound", b.log_bound}};
    };
  });

  auto* ss = app.add_subcommand("s-sum", "S: sum of L(a)/(a_1...a_k) over windowed squarefree tuples");
  std::vector<double> ss_t;
  ss->add_option("--t", ss_t, "Windows t_1 <= ... <= t_k")->delimiter(',')->required();
  ss->callback([&] {
    action = [&] {
      const auto caps = g.caps.empty() ? default_caps(ss_t) : g.caps;
      const PrimeSieve sieve(sieve_limit_for(g, static_cast<std::uint64_t>(ss_t.back()) + 1));
      const auto r = s_sum(ss_t, caps, sieve);
      return Json{{"t", ss_t}, {"caps", caps}, {"S", r.sum}, {"tuples", r.tuples}};
    };
  });

  auto* pr = app.add_subcommand("predict", "Asymptotic profile and predicted densities");
  std::size_t pr_k = 0;
  std::vector<double> pr_y;
  DensityOptions pr_opt;
  pr->add_option("--k", pr_k, "Dimension k")->required();
  pr->add_option("--y", pr_y, "y_1,...,y_k")->delimiter(',')->required();
  pr->add_option("--x", pr_opt.x, "x for the size hypothesis");
  pr->add_option("--epsilon", pr_opt.epsilon, "Slack in the alpha condition");
  pr->add_option("--delta", pr_opt.delta, "Exponent in log y_k <= (log y_1)^{1+delta}");
  pr->add_option("--c", pr_opt.c, "Exponent in y_k <= y_1^c");
  pr->callback([&] {
    action = [&] {
      if (pr_y.size() != pr_k) throw InvalidArgument("--y must have k entries");
      const auto p = profile(pr_y);
      Json dens = Json::object();
      for (auto v : {DensityVariant::general, DensityVariant::small_k, DensityVariant::large_k,
                     DensityVariant::equal_size}) {
        const auto d = predicted_density(p, v, pr_opt);
        dens[to_string(v)] = {{"value", d.value},
                              {"hypotheses_hold", d.hypotheses_hold},
                              {"flags", d.flags}};
      }
      return Json{{"k", p.k},     {"y", p.y},         {"ell", p.ell},
                  {"i1", p.i1},   {"beta", p.beta},   {"alpha", p.alpha},
                  {"i0", p.i0},   {"alpha_residual", p.alpha_residual},
                  {"densities", dens}};
    };
  });

  auto* al = app.add_subcommand("alpha", "Solve for alpha given ell (or y)");
  std::vector<double> al_ell, al_y;
  al->add_option("--ell", al_ell, "ell_1,...,ell_k")->delimiter(',');
  al->add_option("--y", al_y, "y_1,...,y_k (ell derived with y_0 = 3)")->delimiter(',');
  al->callback([&] {
    action = [&] {
      if (al_ell.empty() == al_y.empty()) throw InvalidArgument("give exactly one of --ell, --y");
      const auto ell = al_ell.empty() ? compute_ell(al_y) : al_ell;
      const auto s = solve_alpha(ell.size(), ell);
      return Json{{"ell", ell}, {"alpha", s.alpha}, {"residual", s.residual},
                  {"i0", find_i0(ell.size(), s.alpha)}};
    };
  });

  auto* po = app.add_subcommand("poisson", "Slab probability of the product Poisson law");
  PoissonSpec po_spec;
  double po_R = 0.0;
  std::uint64_t po_mc = 0;
  po->add_option("--z", po_spec.z, "Means z_i")->delimiter(',')->required();
  po->add_option("--lambda", po_spec.lambda, "Weights lambda_i")->delimiter(',')->required();
  po->add_option("--R", po_R, "Slab upper end R")->required();
  po->add_option("--mc", po_mc, "Also estimate by Monte Carlo with this many draws");
  po->callback([&] {
    action = [&] {
      po_spec.validate();
      const auto e = slab_prob_exact(po_spec, po_R);
      Json j{{"R", po_R},
             {"Lambda", po_spec.big_lambda()},
             {"alpha_R", alpha_R(po_spec, po_R)},
             {"prob", e.value},
             {"log_prob", e.log_value},
             {"terms", e.terms},
             {"hypothesis_ok", e.hypothesis_ok},
             {"shape", slab_bound_shape(po_spec, po_R)}};
      if (po_mc) {
        const auto m = slab_prob_mc(po_spec, po_R, po_mc, g.seed.value_or(0));
        j["mc"] = m.value;
        j["mc_stderr"] = m.error_bound;
      }
      return j;
    };
  });

  auto* os = app.add_subcommand("orderstats", "Q_r(u, v) for uniform order statistics");
  int os_r = 0;
  double os_u = 0.0, os_v = 0.0;
  std::uint64_t os_mc = 0;
  bool os_g = false;
  os->add_option("--r", os_r, "Number of points r")->required();
  os->add_option("--u", os_u, "Shift u")->required();
  os->add_option("--v", os_v, "Scale v")->required();
  os->add_option("--mc", os_mc, "Also estimate by Monte Carlo with this many draws");
  os->add_flag("--g", os_g, "Also report the discrete sum over G_r(u, v) (integer v)");
  os->callback([&] {
    action = [&] {
      const double q = qr_exact(os_r, os_u, os_v);
      if (!os_mc && !os_g) return Json{{"value", q}};
      Json j{{"Q", q}};
      if (os_mc) {
        const auto m = qr_mc(os_r, os_u, os_v, os_mc, g.seed.value_or(0));
        j["mc"] = m.estimate;
        j["mc_stderr"] = m.stderr_;
      }
      if (os_g) {
        if (os_v != std::floor(os_v)) throw InvalidArgument("--g needs an integer v");
        j["G"] = gr_sum(os_r, os_u, static_cast<int>(os_v));
      }
      return j;
    };
  });

  auto* la = app.add_subcommand("ladder", "Prime ladder lambda_{i,j} on (max{k, y_{i-1}}, y_i]");
  std::size_t la_k = 0, la_i = 0;
  std::vector<double> la_y;
  la->add_option("--k", la_k, "Dimension k")->required();
  la->add_option("--i", la_i, "Coordinate i (1-based)")->required();
  la->add_option("--y", la_y, "y_1,...,y_k")->delimiter(',')->required();
  la->callback([&] {
    action = [&] {
      if (la_y.size() != la_k) throw InvalidArgument("--y must have k entries");
      const PrimeSieve sieve(sieve_limit_for(g, static_cast<std::uint64_t>(la_y.back()) + 1));
      const auto L = build_lambda_ladder(la_k, la_i, la_y, sieve);
      return Json{{"k", L.k},
                  {"i", L.i},
                  {"lambda0", L.lambda0},
                  {"lambdas", L.lambdas},
                  {"v", L.v},
                  {"predicted_v", L.predicted_v},
                  {"fitted_L", L.fitted_l},
                  {"log_rho", L.log_rho},
                  {"reciprocal_sums", L.reciprocal_sums},
                  {"prime_counts", L.prime_counts},
                  {"covers_window", L.covers_window}};
    };
  });

  auto* ex = app.add_subcommand("experiment", "Run an experiment from a JSON config file");
  std::string ex_path, ex_output;
  bool ex_no_meta = false;
  ex->add_option("config", ex_path, "Config file")->required();
  ex->add_option("--output", ex_output, "Write records here instead of stdout");
  ex->add_flag("--no-meta", ex_no_meta, "Omit the runtime metadata column");
  ex->callback([&] {
    action = [&]() -> Json {
      auto cfg = ExperimentConfig::from_file(ex_path);
      if (g.seed) cfg.seed = *g.seed;
      if (g.sieve_limit) cfg.sieve_limit = *g.sieve_limit;
      if (g.budget_bits) cfg.budget_bits = *g.budget_bits;
      if (!g.caps.empty()) cfg.grid["caps"] = g.caps;
      if (app.count("--format")) cfg.format = parse_format(g.format);
      if (app.count("--workers")) cfg.workers = g.workers;
      if (!ex_output.empty()) cfg.output = ex_output;
      const auto records = run_experiment(cfg);
      if (cfg.output.empty()) {
        write_records(std::cout, records, cfg.format, !ex_no_meta);
      } else {
        std::ofstream out(cfg.output);
        if (!out) throw InvalidArgument("cannot write '" + cfg.output + "'");
        write_records(out, records, cfg.format, !ex_no_meta);
      }
      return nullptr;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    const Json out = action();
    if (!out.is_null()) emit(out, g);
    return kExitOk;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << " (required " << e.required() << ")\n";
    return kExitResource;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
  } catch (const OutOfRange& e) {
    std::cerr << "out of range: " << e.what() << '\n';
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
  } catch (const UnsupportedDimension& e) {
    std::cerr << "unsupported dimension: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitInvalid;
}
