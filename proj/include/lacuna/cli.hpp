#ifndef LACUNA_CLI_HPP
#define LACUNA_CLI_HPP

#include "lacuna/core.hpp"
#include "lacuna/corrgraph.hpp"
#include "lacuna/cumulants.hpp"
#include "lacuna/deviation.hpp"
#include "lacuna/io.hpp"
#include "lacuna/mgf.hpp"
#include "lacuna/moments.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace lacuna::cli {

using nlohmann::json;
using nlohmann::ordered_json;

/// One output document: a fixed column list plus rows, or a free-form JSON result.
struct Document {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::optional<ordered_json> object;  // used as the JSON result when set
};

struct Common {
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  unsigned shards = 16;
  std::uint64_t budget = 0;  // 0: compiled default or LACUNA_BUDGET

  McConfig mc(std::uint64_t samples) const { return {samples, seed, shards, jobs}; }
  std::uint64_t node_budget() const { return budget ? budget : budget_or_env(kDefaultNodeBudget); }
};

namespace detail {

inline std::string csv_cell(const json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

inline json real(long double v) {
  if (!std::isfinite(v)) return io::num(v);
  return static_cast<double>(v);
}

inline void write(std::ostream& os, const Document& doc, const Common& c, const std::string& command,
                  const ordered_json& config) {
  ordered_json meta;
  meta["tool"] = "lacuna";
  meta["version"] = std::string(kVersion);
  meta["command"] = command;
  meta["config"] = config;
  if (c.format == "json") {
    ordered_json root;
    root["meta"] = meta;
    if (doc.object) {
      root["result"] = *doc.object;
    } else {
      ordered_json rows = ordered_json::array();
      for (const auto& r : doc.rows) {
        ordered_json o;
        for (std::size_t i = 0; i < doc.columns.size(); ++i) o[doc.columns[i]] = r[i];
        rows.push_back(o);
      }
      root["result"] = rows;
    }
    os << root.dump(2) << "\n";
    return;
  }
  os << "# tool: lacuna " << kVersion << "\n";
  os << "# command: " << command << "\n";
  os << "# config: " << config.dump() << "\n";
  for (std::size_t i = 0; i < doc.columns.size(); ++i) os << (i ? "," : "") << doc.columns[i];
  os << "\n";
  for (const auto& r : doc.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
    os << "\n";
  }
}

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--out", c.out, "output file (default: stdout)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  sub->add_option("--shards", c.shards, "Monte Carlo shards; fixes the random streams")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str();
  sub->add_option("--budget", c.budget, "enumeration node budget (0: default or LACUNA_BUDGET)");
}

}  // namespace detail

/// Parses argv, runs one subcommand and writes its document. Returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact moments, cumulants and MGFs of lacunary trigonometric sums", "lacuna"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common common;
  std::string seq_text, poly_text = "cosine";
  std::optional<std::size_t> n_opt;
  std::vector<std::size_t> n_list;
  ordered_json config;
  std::string command;
  std::function<Document()> action;

  auto seq_opts = [&](CLI::App* sub, bool many_n) {
    sub->add_option("--seq", seq_text, "sequence: geometric:q:n, schedule:b:e:n, explicit:..., ratios:..., JSON or @file")
        ->required();
    sub->add_option("--poly", poly_text, "polynomial: cosine, telescope, coeffs:d=c,..., JSON or @file")
        ->capture_default_str();
    if (many_n) {
      sub->add_option("--n", n_list, "prefix lengths")->delimiter(',');
    } else {
      sub->add_option("--n", n_opt, "prefix length (default: the spec's length)");
    }
    detail::add_common(sub, common);
  };
  auto load = [&](std::optional<std::size_t> need) {
    auto seq = io::load_sequence(seq_text, need);
    config["seq"] = seq_text;
    config["poly"] = poly_text;
    config["length"] = seq.size();
    return seq;
  };
  auto finish_config = [&] {
    config["seed"] = common.seed;
    config["shards"] = common.shards;
    config["budget"] = common.node_budget();
  };

  // check-sequence ----------------------------------------------------------
  auto* cs = app.add_subcommand("check-sequence", "gap, growth and arithmetic conditions on a prefix");
  unsigned cs_rho = 4;
  std::string cs_tail = "1/2", cs_threshold = "1";
  std::vector<std::string> cs_ab;
  seq_opts(cs, false);
  cs->add_option("--rho", cs_rho, "rho for the growth conditions")->capture_default_str();
  cs->add_option("--tail", cs_tail, "tail fraction for trend checks")->capture_default_str();
  cs->add_option("--threshold", cs_threshold, "large-gap minimum tail ratio")->capture_default_str();
  cs->add_option("--ab", cs_ab, "b,c for the pair-count condition")->delimiter(',')->expected(2);
  cs->callback([&] {
    command = "check-sequence";
    action = [&] {
      auto seq = load(n_opt);
      config["rho"] = cs_rho;
      config["tail"] = cs_tail;
      config["threshold"] = cs_threshold;
      Document d{{"condition", "verdict", "q_min", "witnesses", "note"}, {}, {}};
      auto add = [&](const ConditionReport& r) {
        d.rows.push_back({r.id, to_string(r.verdict), r.q_min ? json(to_string(*r.q_min)) : json(nullptr),
                          r.witnesses.size(), r.note});
      };
      add(check_hadamard(seq));
      add(check_integer_ratios(seq));
      if (seq.size() >= 3) {
        add(check_large_gap(seq, parse_rational(cs_tail), parse_rational(cs_threshold)));
        for (unsigned w = 1; w <= 3; ++w) add(check_growth_condition(seq, cs_rho, w, {}, parse_rational(cs_tail)));
      }
      if (!cs_ab.empty()) {
        auto ab = check_cond_ab(seq, parse_bigint(cs_ab[0]), parse_bigint(cs_ab[1]), seq.size());
        config["ab"] = cs_ab;
        d.rows.push_back({"cond-ab", "count", nullptr, ab.max_count,
                          "max pair count " + std::to_string(ab.max_count) + " at d=" + to_string(ab.argmax_d)});
      }
      return d;
    };
  });

  // moments -----------------------------------------------------------------
  auto* mo = app.add_subcommand("moments", "exact moments of S_n (and of the i.i.d. analogue)");
  std::vector<unsigned> mo_m{2};
  std::string mo_kind = "dependent";
  seq_opts(mo, false);
  mo->add_option("--m", mo_m, "moment orders")->delimiter(',')->capture_default_str();
  mo->add_option("--kind", mo_kind, "dependent, iid or both")->check(CLI::IsMember({"dependent", "iid", "both"}));
  mo->callback([&] {
    command = "moments";
    action = [&] {
      auto seq = load(n_opt);
      auto f = io::parse_poly(poly_text);
      config["m"] = mo_m;
      config["kind"] = mo_kind;
      finish_config();
      Document d{{"n", "m", "kind", "value_num", "value_den"}, {}, {}};
      const std::size_t n = seq.size();
      for (unsigned m : mo_m) {
        if (mo_kind != "iid") {
          Rational v = sum_moment(f, seq, n, m, common.node_budget());
          d.rows.push_back({n, m, "dependent", numerator(v).str(), denominator(v).str()});
        }
        if (mo_kind != "dependent") {
          Rational v = iid_moment(f, n, m);
          d.rows.push_back({n, m, "iid", numerator(v).str(), denominator(v).str()});
        }
      }
      return d;
    };
  });

  // cumulants ---------------------------------------------------------------
  auto* cu = app.add_subcommand("cumulants", "exact cumulants of S_n against the correlation-graph bound");
  unsigned cu_mmax = 6;
  bool cu_single = false;
  seq_opts(cu, false);
  cu->add_option("--m-max", cu_mmax, "largest order")->check(CLI::Range(2u, 40u))->capture_default_str();
  cu->add_flag("--single", cu_single, "cumulants of X_1 against (A e)^m m!");
  cu->callback([&] {
    command = "cumulants";
    action = [&] {
      auto seq = load(n_opt);
      auto f = io::parse_poly(poly_text);
      config["m_max"] = cu_mmax;
      config["single"] = cu_single;
      finish_config();
      const Rational A = f.sup_bound();
      Document d{{"m", "gamma_num", "gamma_den", "bound", "pass"}, {}, {}};
      if (cu_single) {
        auto mu = single_moments(f, cu_mmax);
        auto t = cumulants_from_moments({mu.begin() + 1, mu.end()});
        for (unsigned m = 1; m <= cu_mmax; ++m) {
          auto b = single_variable_cumulant_bound(A, m);
          d.rows.push_back({m, numerator(t[m]).str(), denominator(t[m]).str(), detail::real(b.bound),
                            to_double(abs(t[m])) <= b.bound});
        }
        try {
          auto r = rho_of(f);
          config["rho"] = r.rho;
          config["gamma_rho"] = to_string(r.gamma_rho);
        } catch (const ConfigError& e) {
          err << "note: " << e.what() << "\n";
        }
        return d;
      }
      const std::size_t n = seq.size();
      auto table = cumulants_of(moment_table(f, seq, n, cu_mmax, MomentKind::dependent, common.node_budget()));
      auto graph = build_graph(cu_mmax, f.degree());
      config["window"] = graph.window;
      for (unsigned m = 2; m <= cu_mmax; ++m) {
        Rational b = graph_cumulant_bound(n, 2 * graph.window, A, m);
        d.rows.push_back({m, numerator(table[m]).str(), denominator(table[m]).str(), detail::real(to_long_double(b)),
                          abs(table[m]) <= b});
      }
      return d;
    };
  });

  // graph-verify ------------------------------------------------------------
  auto* gv = app.add_subcommand("graph-verify", "exact check of the uncorrelation identity on separated sets");
  unsigned gv_M = 4;
  std::uint64_t gv_sampled = 0;
  seq_opts(gv, false);
  gv->add_option("--M", gv_M, "range M")->capture_default_str();
  gv->add_option("--sampled", gv_sampled, "random instances instead of exhaustive enumeration");
  gv->callback([&] {
    command = "graph-verify";
    if (gv->count("--format") == 0) common.format = "json";
    action = [&] {
      auto seq = load(n_opt);
      auto f = io::parse_poly(poly_text);
      config["M"] = gv_M;
      config["sampled"] = gv_sampled;
      finish_config();
      auto graph = build_graph(gv_M, f.degree());
      auto rep = gv_sampled ? verify_uncorrelation_sampled(f, seq, graph, gv_M, seq.size(), gv_sampled, common.seed)
                            : verify_uncorrelation(f, seq, graph, gv_M, seq.size());
      ordered_json o;
      o["pass"] = rep.pass;
      o["tested"] = rep.tested;
      o["set_pairs"] = rep.set_pairs;
      o["window"] = graph.window;
      if (rep.counterexample) {
        const auto& c = *rep.counterexample;
        o["counterexample"] = {{"v", c.v_picks}, {"w", c.w_picks}, {"joint", to_string(c.joint)},
                               {"product", to_string(c.product)}};
      }
      Document d{{"pass", "tested", "set_pairs", "window"}, {{rep.pass, rep.tested, rep.set_pairs, graph.window}}, o};
      return d;
    };
  });

  // mgf ---------------------------------------------------------------------
  auto* mg = app.add_subcommand("mgf", "E exp(theta S_n): exact sparse product or Monte Carlo");
  long double th_re = 0.5L, th_im = 0;
  std::string mg_method = "exact";
  std::uint64_t samples = 100000;
  bool antithetic = false;
  MgfOptions mopt;
  auto theta_opts = [&](CLI::App* sub) {
    sub->add_option("--theta", th_re, "real part of theta")->capture_default_str();
    sub->add_option("--theta-im", th_im, "imaginary part of theta")->capture_default_str();
    sub->add_option("--a-budget", mopt.a_budget, "cap on |theta| sup|f| n")->capture_default_str();
    sub->add_option("--bits", mopt.precision_bits, "per-factor truncation target 2^-bits")->capture_default_str();
  };
  seq_opts(mg, false);
  theta_opts(mg);
  mg->add_option("--method", mg_method, "exact, mc or both")->check(CLI::IsMember({"exact", "mc", "both"}));
  mg->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
  mg->add_flag("--antithetic", antithetic, "pair u with 1 - u");
  mg->callback([&] {
    command = "mgf";
    action = [&] {
      auto seq = load(n_opt);
      auto f = io::parse_poly(poly_text);
      const std::size_t n = seq.size();
      const Complex theta(th_re, th_im);
      config["theta"] = {static_cast<double>(th_re), static_cast<double>(th_im)};
      config["method"] = mg_method;
      config["samples"] = samples;
      config["bits"] = mopt.precision_bits;
      finish_config();
      // comparator: the i.i.d. value (E e^{theta X_1})^n
      Complex iid = std::pow(exact_mgf(f, LacunarySequence(std::vector<BigInt>{1}), 1, theta, MgfOptions{mopt.a_budget * n + 1,
                                                                                          mopt.precision_bits,
                                                                                          mopt.max_frequencies})
                                 .value,
                             static_cast<int>(n));
      Document d{{"n", "theta_re", "theta_im", "value_re", "value_im", "target", "distance", "method", "err_bound"}, {}, {}};
      auto row = [&](Complex v, long double e, const std::string& method) {
        d.rows.push_back({n, detail::real(th_re), detail::real(th_im), detail::real(v.real()), detail::real(v.imag()),
                          detail::real(iid.real()), detail::real(std::abs(v - iid)), method, detail::real(e)});
      };
      if (mg_method != "mc") {
        auto r = exact_mgf(f, seq, n, theta, mopt);
        row(r.value, r.error, "exact");
      }
      if (mg_method != "exact") {
        auto r = mc_mgf(f, seq, n, theta, common.mc(samples), antithetic);
        row(r.estimate, r.stderr_, antithetic ? "mc-antithetic" : "mc");
      }
      return d;
    };
  });

  // modg-verify -------------------------------------------------------------
  auto* mv = app.add_subcommand("modg-verify", "normalized MGF residual against exp(theta^rho gamma_rho / rho!)");
  std::string norm = "per-term-variance";
  seq_opts(mv, true);
  theta_opts(mv);
  mv->add_option("--normalization", norm, "per-term-variance or exact-variance")
      ->check(CLI::IsMember({"per-term-variance", "exact-variance"}));
  mv->callback([&] {
    command = "modg-verify";
    action = [&] {
      if (n_list.empty()) throw ConfigError("modg-verify needs --n");
      auto seq = load(*std::max_element(n_list.begin(), n_list.end()));
      auto f = io::parse_poly(poly_text);
      auto target = ModGaussianTarget::of(f);
      const Complex theta(th_re, th_im);
      config["n"] = n_list;
      config["theta"] = {static_cast<double>(th_re), static_cast<double>(th_im)};
      config["normalization"] = norm;
      config["rho"] = target.rho;
      config["gamma_rho"] = to_string(target.gamma_rho);
      finish_config();
      auto kind = norm == "exact-variance" ? Normalization::exact_variance : Normalization::per_term_variance;
      Document d{{"n", "theta_re", "theta_im", "value_re", "value_im", "target", "distance", "method", "err_bound"}, {}, {}};
      for (auto n : n_list) {
        auto r = mod_gaussian_residual(f, seq, n, target, theta, kind, mopt);
        if (!r.warning.empty()) err << "warning: " << r.warning << "\n";
        d.rows.push_back({n, detail::real(th_re), detail::real(th_im), detail::real(r.residual.real()),
                          detail::real(r.residual.imag()), detail::real(std::abs(r.target)), detail::real(r.distance),
                          "exact", detail::real(r.error)});
      }
      return d;
    };
  });

  // mdp-verify --------------------------------------------------------------
  auto* md = app.add_subcommand("mdp-verify", "Monte Carlo normalized log-tail at the moderate-deviation scale");
  long double t = 0.5L, z_power = 2.0L / 3.0L;
  std::string var_source = "exact";
  bool iid_flag = false;
  std::uint64_t md_samples = 1'000'000;
  seq_opts(md, true);
  md->add_option("--t", t, "threshold t")->capture_default_str();
  md->add_option("--z-power", z_power, "z_n = n^-p")->capture_default_str();
  md->add_option("--variance", var_source, "exact or per-term")->check(CLI::IsMember({"exact", "per-term"}));
  md->add_option("--samples", md_samples, "Monte Carlo samples")->capture_default_str();
  md->add_flag("--iid", iid_flag, "sample the i.i.d. analogue T_n instead");
  md->callback([&] {
    command = "mdp-verify";
    action = [&] {
      if (n_list.empty()) throw ConfigError("mdp-verify needs --n");
      auto seq = load(*std::max_element(n_list.begin(), n_list.end()));
      auto f = io::parse_poly(poly_text);
      config["n"] = n_list;
      config["t"] = static_cast<double>(t);
      config["z_power"] = static_cast<double>(z_power);
      config["variance"] = var_source;
      config["samples"] = md_samples;
      config["iid"] = iid_flag;
      finish_config();
      const bool exact = var_source == "exact" && !iid_flag;
      auto sched = make_schedule(
          {ScheduleKind::power, z_power, 0}, n_list,
          [&](std::size_t n) {
            return exact ? to_long_double(sum_moment(f, seq, n, 2, common.node_budget()))
                         : static_cast<long double>(n) * to_long_double(f.second_moment());
          },
          exact ? VarianceSource::exact : VarianceSource::per_term);
      Document d{{"n", "t", "x_n", "y_n", "estimate", "target", "lo", "hi", "hits", "samples"}, {}, {}};
      for (const auto& row : sched.rows) {
        err << "sampling n=" << row.n << "\n";
        auto e = empirical_mdp_rate(f, seq, row, t, common.mc(md_samples), iid_flag);
        d.rows.push_back({row.n, detail::real(t), detail::real(row.x), detail::real(row.y),
                          e.estimate ? detail::real(*e.estimate) : json(nullptr), detail::real(e.target),
                          detail::real(e.lo), detail::real(e.hi), e.hits, e.samples});
      }
      return d;
    };
  });

  // rss-envelope ------------------------------------------------------------
  auto* rs = app.add_subcommand("rss-envelope", "multiplicative envelope for P(Z > x) / P(G > x)");
  long double big_theta = 100, s_param = 2e4L;
  std::vector<long double> xs{0, 0.5L, 1};
  std::uint64_t rs_samples = 0;
  std::string rs_seq;
  std::size_t rs_n = 10;
  rs->add_option("--Theta", big_theta, "Theta")->capture_default_str();
  rs->add_option("--s", s_param, "s with 1 <= s <= 2 Theta^2")->capture_default_str();
  rs->add_option("--x", xs, "evaluation points")->delimiter(',');
  rs->add_option("--seq", rs_seq, "optional sequence for a Monte Carlo comparison");
  rs->add_option("--poly", poly_text, "polynomial for the Monte Carlo comparison")->capture_default_str();
  rs->add_option("--n", rs_n, "prefix length for the Monte Carlo comparison")->capture_default_str();
  rs->add_option("--samples", rs_samples, "Monte Carlo samples (0: envelope only)");
  detail::add_common(rs, common);
  rs->callback([&] {
    command = "rss-envelope";
    action = [&] {
      config["Theta"] = static_cast<double>(big_theta);
      config["s"] = static_cast<double>(s_param);
      std::vector<double> xd(xs.begin(), xs.end());
      config["x"] = xd;
      const bool mc = rs_samples > 0 && !rs_seq.empty();
      Document d{{"x", "lower", "upper", "f_bar"}, {}, {}};
      std::vector<TailRatio> ratios;
      if (mc) {
        seq_text = rs_seq;
        auto seq = load(rs_n);
        auto f = io::parse_poly(poly_text);
        config["n"] = rs_n;
        config["samples"] = rs_samples;
        long double sigma = std::sqrt(to_long_double(sum_moment(f, seq, rs_n, 2, common.node_budget())));
        ratios = mc_tail_ratio(f, seq, rs_n, sigma, xs, common.mc(rs_samples));
        d.columns.insert(d.columns.end(), {"mc_ratio", "mc_stderr", "inside"});
      }
      finish_config();
      for (std::size_t i = 0; i < xs.size(); ++i) {
        auto env = rss_envelope({big_theta, s_param, xs[i]});
        std::vector<json> r{detail::real(xs[i]), detail::real(env.lower), detail::real(env.upper), detail::real(env.f_bar)};
        if (mc) {
          r.push_back(detail::real(ratios[i].ratio));
          r.push_back(detail::real(ratios[i].stderr_));
          r.push_back(env.lower <= ratios[i].ratio && ratios[i].ratio <= env.upper);
        }
        d.rows.push_back(std::move(r));
      }
      return d;
    };
  });

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    Document doc = action();
    if (common.out.empty()) {
      detail::write(out, doc, common, command, config);
    } else {
      std::ofstream file(common.out, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + common.out + "'");
      detail::write(file, doc, common, command, config);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lacuna::cli

#endif  // LACUNA_CLI_HPP
