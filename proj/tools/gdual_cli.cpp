// gdual_cli: frames, duals and Gabor windows from the command line.
//
// Exit codes: 0 ok, 2 a numeric condition failed, 3 bad input (parse,
// shape, or grid).

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gdual/gdual.hpp"
#include "gdual/io.hpp"

using namespace gdual;
using io::json;

namespace {

struct RunReport {
  std::string command;
  std::vector<std::string> inputs;
  json verdicts = json::object();
  std::vector<std::string> artifacts;
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::LatticeMismatch:
    case ErrorKind::OffGrid:
      return 3;
    default:
      return 2;
  }
}

void say(const std::string &key, const json &value) {
  std::cout << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
}

// verdicts[key] = value, echoed to stdout
void record(RunReport &r, const std::string &key, const json &value) {
  r.verdicts[key] = value;
  say(key, value);
}

void write_json(RunReport &r, const std::string &path, const json &j) {
  io::write_text(path, j.dump(2) + "\n");
  r.artifacts.push_back(path);
}

Frame load_frame(RunReport &r, const std::string &path) {
  r.inputs.push_back(path);
  return io::frame_from_json(io::load_json(path));
}

json bounds_json(const FrameBounds &b) { return json{{"lower", b.lower}, {"upper", b.upper}}; }

// "zero" or "random:seed:scale"; a missing seed falls back to --seed.
Annihilator parse_theta(const Frame &phi, const std::string &spec, std::uint64_t default_seed) {
  if (spec == "zero") return Annihilator::zero(phi);
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty() || parts[0] != "random" || parts.size() > 3) {
    throw Error(ErrorKind::ParseError, "--theta must be zero or random:seed:scale");
  }
  try {
    const std::uint64_t seed =
        parts.size() >= 2 && !parts[1].empty() ? std::stoull(parts[1]) : default_seed;
    const double scale = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
    return random_annihilator(phi, seed, scale);
  } catch (const std::logic_error &) {
    throw Error(ErrorKind::ParseError, "bad number in --theta " + spec);
  }
}

int parse_order(const std::string &text) {
  try {
    std::size_t used = 0;
    const int n = std::stoi(text, &used);
    if (used == text.size() && n >= 1) return n;
  } catch (const std::logic_error &) {
  }
  throw Error(ErrorKind::ParseError, "bad spline order '" + text + "'");
}

// bspline:N | char:c | gauss:alpha (exp(-alpha x^2) centred at 0)
SampledWindow window_from_spec(const std::string &spec, const GridSpec &grid) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "bspline") return sample_bspline(parse_order(arg), grid);
  if (kind == "char") return sample_char(parse_rational(arg), grid);
  if (kind == "gauss") {
    double alpha = 0.0;
    try {
      alpha = std::stod(arg);
    } catch (const std::logic_error &) {
      throw Error(ErrorKind::ParseError, "bad gauss parameter '" + arg + "'");
    }
    return sample_centered(grid, [alpha](double x) { return Complex(std::exp(-alpha * x * x), 0.0); });
  }
  throw Error(ErrorKind::ParseError, "unknown window '" + spec + "' (bspline:N, char:c, gauss:alpha)");
}

// Spline order from a "bspline:N" spec, or the explicit --order.
int order_for(const std::string &spec, int explicit_order) {
  if (explicit_order > 0) return explicit_order;
  if (spec.rfind("bspline:", 0) == 0) return parse_order(spec.substr(8));
  if (spec.rfind("char:", 0) == 0) {
    const Rational c = parse_rational(spec.substr(5));
    return static_cast<int>((c.numerator() + c.denominator() - 1) / c.denominator());
  }
  throw Error(ErrorKind::ParseError, "--order is required for window " + spec);
}

struct WindowArgs {
  std::string spec;
  std::string file;
  int s = 10;
  int period = 20;

  void add(CLI::App *app, const std::string &name, const std::string &what) {
    app->add_option("--" + name, spec, what + " (bspline:N, char:c, gauss:alpha)");
    app->add_option("--" + name + "-file", file, what + " as window JSON");
  }

  SampledWindow load(RunReport &r) const {
    if (!file.empty()) {
      r.inputs.push_back(file);
      return io::window_from_json(io::load_json(file));
    }
    if (spec.empty()) throw Error(ErrorKind::ParseError, "a window spec or file is required");
    return window_from_spec(spec, GridSpec(s, period));
  }
};

void add_grid(CLI::App *app, WindowArgs &w) {
  app->add_option("--s", w.s, "samples per unit")->capture_default_str();
  app->add_option("--P", w.period, "period in units")->capture_default_str();
}

void spectrum_csv(RunReport &r, const std::string &path, const LinearMap &s) {
  const Spectrum sp = herm_eig(s);
  io::CsvWriter csv(path, {"k", "eigenvalue"});
  for (Eigen::Index k = 0; k < sp.eigenvalues.size(); ++k) csv.row(k, sp.eigenvalues(k));
  r.artifacts.push_back(path);
}

void walnut_csv(RunReport &r, const std::string &path, const SampledWindow &g, const Rational &a) {
  const SampledWindow w = walnut_weight(g, a);
  io::CsvWriter csv(path, {"j", "x", "G"});
  for (Eigen::Index j = 0; j < w.values.size(); ++j) csv.row(j, w.grid.point(j), w.values(j).real());
  r.artifacts.push_back(path);
}

void window_artifacts(RunReport &r, const SampledWindow &w, const std::string &out,
                      const std::string &csv) {
  if (!out.empty()) write_json(r, out, io::window_to_json(w));
  if (!csv.empty()) {
    io::write_window_csv(csv, w);
    r.artifacts.push_back(csv);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Dual, approximately dual and g-dual frames; Gabor windows on a periodic grid"};
  app.require_subcommand(1);
  std::string report_path;
  std::uint64_t seed = 0;
  app.add_option("--report", report_path, "write a JSON run report");
  app.add_option("--seed", seed, "seed for randomized commands")->capture_default_str();

  RunReport report;
  std::function<void()> action;

  // frame-info
  std::string info_path;
  auto *info = app.add_subcommand("frame-info", "bounds and Riesz status of a frame");
  info->add_option("frame", info_path)->required();
  info->callback([&] {
    action = [&] {
      const Frame phi = load_frame(report, info_path);
      const FrameBounds b = frame_bounds(phi);
      record(report, "dim", phi.dim());
      record(report, "count", phi.count());
      record(report, "bounds", bounds_json(b));
      record(report, "is_frame", is_frame(b));
      record(report, "riesz", is_riesz(phi));
      record(report, "condition", is_frame(b) ? json(b.upper / b.lower) : json("inf"));
    };
  });

  // dual
  std::string dual_path, dual_mode = "canonical", op_file, theta_spec = "zero", dual_out;
  auto *dual = app.add_subcommand("dual", "build a dual, approximate dual or g-dual");
  dual->add_option("frame", dual_path)->required();
  dual->add_option("--mode", dual_mode)->check(CLI::IsMember({"canonical", "approx", "gdual"}))->capture_default_str();
  dual->add_option("--op-file", op_file, "operator JSON: A for approx, A for gdual (mixed operator A^{-1})");
  dual->add_option("--theta", theta_spec, "zero | random:seed:scale")->capture_default_str();
  dual->add_option("--out", dual_out)->required();
  dual->callback([&] {
    action = [&] {
      const Frame phi = load_frame(report, dual_path);
      LinearMap a = identity(phi.dim());
      if (!op_file.empty()) {
        report.inputs.push_back(op_file);
        a = io::map_from_json(io::load_json(op_file));
      }
      const Annihilator theta = parse_theta(phi, theta_spec, seed);
      std::optional<Frame> out;
      LinearMap target = identity(phi.dim());
      if (dual_mode == "canonical") {
        out = canonical_dual(phi);
      } else if (dual_mode == "approx") {
        out = approx_dual_from_A(phi, a, theta);
        target = a;
      } else {
        out = gdual_from_A(phi, a, theta);
        target = inverse(a);
      }
      const LinearMap mixed = mixed_operator(phi, *out);
      record(report, "mode", dual_mode);
      record(report, "rate", approximation_rate(phi, *out));
      record(report, "mixed_residual", operator_norm(mixed - target));
      record(report, "theta_norm", theta.norm());
      write_json(report, dual_out, io::frame_to_json(*out));
    };
  });

  // verify
  std::string ver_phi, ver_psi;
  auto *verify = app.add_subcommand("verify", "classify a pair of frames");
  verify->add_option("phi", ver_phi)->required();
  verify->add_option("psi", ver_psi)->required();
  verify->callback([&] {
    action = [&] {
      const Frame phi = load_frame(report, ver_phi);
      const Frame psi = load_frame(report, ver_psi);
      const DualReport cls = classify_pair(phi, psi);
      record(report, "kind", std::string(to_string(cls.kind)));
      record(report, "rate", cls.rate);
      if (is_frame(phi)) {
        const DualReport fac = gdual_factorization(phi, psi);
        record(report, "factor_residual", fac.factor_residual);
        record(report, "dd_star_max", fac.dd_star_max);
        record(report, "bessel_bound_psi", fac.bessel_bound_psi);
        record(report, "dd_star_le_bessel", fac.bessel_check);
      } else {
        record(report, "factorization", "skipped: phi is not a frame");
      }
    };
  });

  // perturb
  std::string per_phi, per_psi, per_ad, per_out, per_mode = "approx";
  auto *perturb = app.add_subcommand("perturb", "carry a dual of phi over to a nearby frame psi");
  perturb->add_option("phi", per_phi)->required();
  perturb->add_option("psi", per_psi)->required();
  perturb->add_option("phi_ad", per_ad)->required();
  perturb->add_option("--mode", per_mode)->check(CLI::IsMember({"approx", "gdual"}))->capture_default_str();
  perturb->add_option("--out", per_out)->required();
  perturb->callback([&] {
    action = [&] {
      const Frame phi = load_frame(report, per_phi);
      const Frame psi = load_frame(report, per_psi);
      const Frame ad = load_frame(report, per_ad);
      const TransferResult t =
          per_mode == "approx" ? transfer_approx_dual(phi, psi, ad) : transfer_gdual(phi, psi, ad);
      record(report, "mixed_match_residual", t.mixed_match_residual);
      record(report, "predicted_diff_bound", t.predicted_diff_bound);
      record(report, "measured_diff_bound", t.measured_diff_bound);
      record(report, "bessel_diff", t.bessel_diff);
      record(report, "smallness", t.smallness);
      write_json(report, per_out, io::frame_to_json(t.psi_ad));
    };
  });

  // gabor
  auto *gabor = app.add_subcommand("gabor", "Gabor windows on a sampled periodic line");
  gabor->require_subcommand(1);

  WindowArgs win_w;
  std::string win_out, win_csv;
  auto *g_window = gabor->add_subcommand("window", "sample a window");
  win_w.add(g_window, "window", "window");
  add_grid(g_window, win_w);
  g_window->add_option("--out", win_out);
  g_window->add_option("--csv", win_csv);
  g_window->callback([&] {
    action = [&] {
      const SampledWindow w = win_w.load(report);
      record(report, "samples", w.values.size());
      record(report, "max_abs", w.values.cwiseAbs().maxCoeff());
      window_artifacts(report, w, win_out, win_csv);
    };
  });

  WindowArgs dual_w;
  std::string gd_b = "1/10", gd_method = "ck1", gd_out, gd_csv, gd_coeffs;
  int gd_order = 0;
  auto *g_dual = gabor->add_subcommand("dual", "dual window of a partition-of-unity window");
  dual_w.add(g_dual, "window", "window");
  add_grid(g_dual, dual_w);
  g_dual->add_option("--b", gd_b)->capture_default_str();
  g_dual->add_option("--method", gd_method)->check(CLI::IsMember({"ck1", "ck2"}))->capture_default_str();
  g_dual->add_option("--order", gd_order, "support length N of the window");
  g_dual->add_option("--coeffs", gd_coeffs, "ck2 coefficients a_{-N+1},...,a_{N-1}, comma separated");
  g_dual->add_option("--out", gd_out);
  g_dual->add_option("--csv", gd_csv);
  g_dual->callback([&] {
    action = [&] {
      const SampledWindow g = dual_w.load(report);
      const Rational b = parse_rational(gd_b);
      const int n = order_for(dual_w.spec, gd_order);
      SampledWindow d = g;
      if (gd_method == "ck1") {
        d = ck_dual1(g, n, b);
      } else {
        std::vector<double> coeffs;
        std::stringstream ss(gd_coeffs);
        try {
          for (std::string c; std::getline(ss, c, ',');) coeffs.push_back(std::stod(c));
        } catch (const std::logic_error &) {
          throw Error(ErrorKind::ParseError, "bad --coeffs list");
        }
        d = ck_dual2(g, n, b, coeffs);
      }
      const GaborLattice lat{Rational(1), b};
      record(report, "method", gd_method);
      record(report, "janssen_residual", janssen_residual(g, d, lat));
      window_artifacts(report, d, gd_out, gd_csv);
    };
  });

  WindowArgs ad_g, ad_gd, ad_scale;
  std::string ad_a = "1", ad_b = "1/10", ad_op, ad_out, ad_csv;
  int ad_order = 0;
  auto *g_ad = gabor->add_subcommand("approx-dual", "approximately dual window for an operator A");
  ad_g.add(g_ad, "window", "window g");
  ad_gd.add(g_ad, "dual", "dual window of g (default: ck1 dual)");
  ad_scale.add(g_ad, "scale-window", "A = S_L / M_L for this window on the same lattice");
  add_grid(g_ad, ad_g);
  g_ad->add_option("--a", ad_a)->capture_default_str();
  g_ad->add_option("--b", ad_b)->capture_default_str();
  g_ad->add_option("--order", ad_order);
  g_ad->add_option("--op-file", ad_op, "operator JSON for A");
  g_ad->add_option("--out", ad_out);
  g_ad->add_option("--csv", ad_csv);
  g_ad->callback([&] {
    action = [&] {
      const SampledWindow g = ad_g.load(report);
      const GaborLattice lat{parse_rational(ad_a), parse_rational(ad_b)};
      ad_gd.s = ad_scale.s = g.grid.samples_per_unit;
      ad_gd.period = ad_scale.period = g.grid.period;
      const SampledWindow gd = (ad_gd.spec.empty() && ad_gd.file.empty())
                                   ? ck_dual1(g, order_for(ad_g.spec, ad_order), lat.b)
                                   : ad_gd.load(report);
      LinearMap a = identity(g.grid.total());
      if (!ad_op.empty()) {
        report.inputs.push_back(ad_op);
        a = io::map_from_json(io::load_json(ad_op));
      } else if (!ad_scale.spec.empty() || !ad_scale.file.empty()) {
        const ScaledGaborOperator sc = scaled_gabor_operator(ad_scale.load(report), lat);
        record(report, "scaling_bounds", bounds_json(sc.bounds));
        a = sc.a;
      }
      const SampledWindow gad = approx_dual_window(g, gd, a, lat);
      const LinearMap mixed = mixed_operator(gabor_frame(g, lat), gabor_frame(gad, lat));
      record(report, "rate", operator_norm(identity(a.rows()) - mixed));
      record(report, "mixed_residual", operator_norm(mixed - a));
      window_artifacts(report, gad, ad_out, ad_csv);
    };
  });

  WindowArgs ver_g, ver_h;
  std::string gv_a = "1", gv_b = "1/10", gv_table, gv_walnut, gv_spectrum;
  bool gv_materialize = false;
  int gv_painless = 0;
  auto *g_verify = gabor->add_subcommand("verify", "Janssen residual of a window pair");
  ver_g.add(g_verify, "window", "window g");
  ver_h.add(g_verify, "dual", "window h (default: g itself)");
  add_grid(g_verify, ver_g);
  g_verify->add_option("--a", gv_a)->capture_default_str();
  g_verify->add_option("--b", gv_b)->capture_default_str();
  g_verify->add_flag("--materialize", gv_materialize, "also compute ||Id - T_G U_H|| from the frames");
  g_verify->add_option("--painless", gv_painless, "run the painless check on g with support length N");
  g_verify->add_option("--table", gv_table, "CSV of the residual per shift n");
  g_verify->add_option("--walnut", gv_walnut, "CSV of G(x) for g");
  g_verify->add_option("--spectrum", gv_spectrum, "CSV of the eigenvalues of S_g");
  g_verify->callback([&] {
    action = [&] {
      const SampledWindow g = ver_g.load(report);
      ver_h.s = g.grid.samples_per_unit;
      ver_h.period = g.grid.period;
      const SampledWindow h = (ver_h.spec.empty() && ver_h.file.empty()) ? g : ver_h.load(report);
      const GaborLattice lat{parse_rational(gv_a), parse_rational(gv_b)};
      const std::vector<double> table = janssen_table(g, h, lat);
      double worst = 0.0;
      for (double v : table) worst = std::max(worst, v);
      record(report, "janssen_residual", worst);
      record(report, "dual", worst <= 1e-10);
      if (gv_materialize) {
        record(report, "rate", approximation_rate(gabor_frame(g, lat), gabor_frame(h, lat)));
      }
      if (gv_painless > 0) {
        const PainlessReport p = painless_check(g, lat, gv_painless);
        record(report, "painless", json{{"diagonal", p.diagonal},
                                        {"off_diagonal_mass", p.off_diagonal_mass},
                                        {"deviation_G_over_b", p.deviation_g_over_b},
                                        {"deviation_b_over_G", p.deviation_b_over_g},
                                        {"matched", p.matched},
                                        {"bounds", bounds_json(p.bounds)}});
      }
      if (!gv_table.empty()) {
        io::CsvWriter csv(gv_table, {"n", "residual"});
        for (std::size_t n = 0; n < table.size(); ++n) csv.row(n, table[n]);
        report.artifacts.push_back(gv_table);
      }
      if (!gv_walnut.empty()) walnut_csv(report, gv_walnut, g, lat.a);
      if (!gv_spectrum.empty()) spectrum_csv(report, gv_spectrum, frame_operator(gabor_frame(g, lat)));
    };
  });

  bool sw_char = false;
  int sw_s = 8, sw_p = 6, sw_order = 2;
  std::string sw_out, sw_blist;
  auto *g_sweep = gabor->add_subcommand("sweep", "parameter sweeps with a CSV of verdicts");
  g_sweep->add_flag("--char", sw_char, "sweep c, c', a over the 1/4 grid in (0, 1]");
  g_sweep->add_option("--b-list", sw_blist, "comma separated b values for the ck1 dual of bspline:N");
  g_sweep->add_option("--order", sw_order, "N for --b-list")->capture_default_str();
  g_sweep->add_option("--s", sw_s)->capture_default_str();
  g_sweep->add_option("--P", sw_p)->capture_default_str();
  g_sweep->add_option("--out", sw_out)->required();
  g_sweep->callback([&] {
    action = [&] {
      const GridSpec grid(sw_s, sw_p);
      if (sw_char != sw_blist.empty()) {
        // exactly one of the two sweeps
        if (sw_char) throw Error(ErrorKind::ParseError, "choose --char or --b-list, not both");
        throw Error(ErrorKind::ParseError, "choose --char or --b-list");
      }
      int cells = 0, agree = 0;
      if (sw_char) {
        io::CsvWriter csv(sw_out, {"c", "c_prime", "a", "residual", "dual", "criterion", "agree"});
        for (int ci = 1; ci <= 4; ++ci) {
          for (int cj = 1; cj <= 4; ++cj) {
            for (int ak = 1; ak <= 4; ++ak) {
              const Rational c(ci, 4), cp(cj, 4), a(ak, 4);
              const double res = char_dual_residual(c, cp, a, grid);
              const bool dual_ok = res <= 1e-10;
              const bool crit = c <= 1 && cp <= 1 && a == std::min(c, cp);
              ++cells;
              agree += dual_ok == crit;
              csv.row(format_rational(c), format_rational(cp), format_rational(a), res, dual_ok, crit,
                      dual_ok == crit);
            }
          }
        }
      } else {
        io::CsvWriter csv(sw_out, {"b", "janssen_residual", "dual"});
        const SampledWindow g = sample_bspline(sw_order, grid);
        std::stringstream ss(sw_blist);
        for (std::string t; std::getline(ss, t, ',');) {
          const Rational b = parse_rational(t);
          const double res = janssen_residual(g, ck_dual1(g, sw_order, b), {Rational(1), b});
          ++cells;
          agree += res <= 1e-10;
          csv.row(format_rational(b), res, res <= 1e-10);
        }
      }
      report.artifacts.push_back(sw_out);
      record(report, "cells", cells);
      record(report, sw_char ? "agree" : "dual", agree);
    };
  });

  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  json error = nullptr;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 3;
  }
  std::vector<std::string> names;
  for (const CLI::App *sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    names.push_back(sub->get_name());
  }
  for (std::size_t i = 0; i < names.size(); ++i) report.command += (i ? " " : "") + names[i];

  try {
    action();
  } catch (const Error &e) {
    std::cerr << "error: " << e.what();
    if (e.measured()) std::cerr << " (measured " << *e.measured() << ")";
    std::cerr << '\n';
    error = json{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (e.measured()) error["measured"] = *e.measured();
    code = exit_code_for(e.kind());
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  if (!report_path.empty()) {
    json out{{"command", report.command},
             {"inputs", report.inputs},
             {"verdicts", report.verdicts},
             {"artifacts_written", report.artifacts},
             {"wall_time_ms", ms},
             {"exit_code", code}};
    if (!error.is_null()) out["error"] = error;
    try {
      io::write_text(report_path, out.dump(2) + "\n");
    } catch (const Error &e) {
      std::cerr << "error: " << e.what() << '\n';
      return 3;
    }
  }
  return code;
}
