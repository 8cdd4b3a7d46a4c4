// atlas: escape-speed classification, spider's-web loop certificates, and
// dynamic rays for the family f(z) = lambda * cosh(z)^q.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atlas/classify.hpp"
#include "atlas/dynamics.hpp"
#include "atlas/parallel.hpp"
#include "atlas/rays.hpp"
#include "atlas/spiderweb.hpp"
#include "atlas/tower.hpp"

namespace {

using atlas::Complex;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Complex literal grammar: "a", "bi", "a+bi", "a-bi"; decimal floats with
// optional exponent; bare "i" / "-i" allowed for the unit.
Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  auto to_num = [](std::string t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing junk");
    return v;
  };
  // Split at the last top-level sign (one not following e/E or leading).
  size_t split = std::string::npos;
  for (size_t k = 1; k < s.size(); ++k) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
    }
  }
  if (s.back() == 'i') {
    std::string im = s.substr(0, s.size() - 1);
    if (split == std::string::npos) return Complex(0.0, to_num(im));
    std::string re = s.substr(0, split);
    im = s.substr(split, s.size() - 1 - split);
    return Complex(to_num(re), to_num(im));
  }
  if (split != std::string::npos && s.find('i') != std::string::npos) {
    throw std::invalid_argument("malformed complex literal");
  }
  return Complex(to_num(s), 0.0);
}

struct FnOptions {
  std::string preset = "h";
  std::string lambda;
  int q = 0;

  atlas::FunctionSpec resolve() const {
    atlas::FunctionSpec f;
    if (preset == "h") {
      f = atlas::FunctionSpec::h();
    } else if (preset == "g") {
      f = atlas::FunctionSpec::g();
    } else if (preset == "cosh2") {
      f = atlas::FunctionSpec::cosh2();
    } else {
      throw std::invalid_argument("unknown --fn preset: " + preset);
    }
    if (!lambda.empty()) f.lambda = parse_complex(lambda);
    if (q != 0) f.q = q;
    if (f.lambda == Complex(0.0, 0.0) || (f.q != 1 && f.q != 2)) {
      throw std::invalid_argument("need lambda != 0 and q in {1, 2}");
    }
    return f;
  }
};

void add_fn_options(CLI::App* cmd, FnOptions& fn) {
  cmd->add_option("--fn", fn.preset, "function preset: h, g, cosh2")
      ->check(CLI::IsMember({"h", "g", "cosh2"}));
  cmd->add_option("--lambda", fn.lambda, "override lambda (complex a+bi)");
  cmd->add_option("--q", fn.q, "override power q (1 or 2)");
}

void add_classify_options(CLI::App* cmd, atlas::ClassifyParams& p,
                          std::string& mode) {
  cmd->add_option("--R", p.R, "schedule base radius (0 = per-function default)");
  cmd->add_option("--depth", p.N_depth, "verification depth N");
  cmd->add_option("--delay", p.K_delay, "max delay K searched");
  cmd->add_option("--maxiter", p.maxiter, "attraction iteration cap");
  cmd->add_option("--mode", mode, "rigorous_horizon or tower_heuristic")
      ->check(CLI::IsMember({"rigorous_horizon", "tower_heuristic"}));
}

atlas::ClassifyMode parse_mode(const std::string& mode) {
  return mode == "tower_heuristic" ? atlas::ClassifyMode::tower_heuristic
                                   : atlas::ClassifyMode::rigorous_horizon;
}

const char* mode_name(atlas::ClassifyMode m) {
  return m == atlas::ClassifyMode::rigorous_horizon ? "rigorous_horizon"
                                                    : "tower_heuristic";
}

void atomic_write(const std::string& path, const std::string& bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string rate_json(const atlas::RateEstimate& r) {
  std::string o = "{\"b\":[";
  for (size_t k = 0; k < r.b.size(); ++k) {
    if (k) o += ",";
    o += fmt(r.b[k]);
  }
  o += "],\"liminf_est\":" + fmt(r.liminf_est);
  o += ",\"limsup_est\":" + fmt(r.limsup_est);
  o += ",\"window_start\":" + std::to_string(r.window_start) + "}";
  return o;
}

std::string verdict_json(const atlas::ClassificationVerdict& v) {
  std::string o = "{";
  if (const auto* fe = std::get_if<atlas::FastEscaping>(&v.status)) {
    o += "\"delay\":" + std::to_string(fe->delay);
    o += ",\"depth\":" + std::to_string(fe->depth);
    o += ",\"mode\":\"";
    o += mode_name(fe->mode);
    o += "\",\"status\":\"fast_escaping\"";
  } else if (const auto* at = std::get_if<atlas::Attracted>(&v.status)) {
    o += "\"status\":\"attracted\",\"steps\":" + std::to_string(at->steps);
    o += ",\"target\":[" + fmt(at->target.real()) + "," +
         fmt(at->target.imag()) + "]";
  } else {
    const auto& u = std::get<atlas::Undetermined>(v.status);
    const char* r = u.reason == atlas::UndeterminedReason::precision
                        ? "precision"
                        : (u.reason == atlas::UndeterminedReason::horizon
                               ? "horizon"
                               : "maxiter");
    o += "\"reason\":\"";
    o += r;
    o += "\",\"status\":\"undetermined\"";
  }
  if (v.rate) o += ",\"rate\":" + rate_json(*v.rate);
  o += "}\n";
  return o;
}

// Fixed palettes: 9-step delay ramp (dark blue to white), attraction ramp
// by convergence steps, black for undetermined.
void verdict_color(const atlas::CellMark& m, unsigned char* px) {
  static const unsigned char delay_ramp[9][3] = {
      {8, 29, 88},    {34, 94, 168},  {29, 145, 192},
      {65, 182, 196}, {127, 205, 187}, {199, 233, 180},
      {237, 248, 177}, {255, 237, 160}, {255, 255, 217}};
  if (m.certified) {
    int k = std::min(std::max(m.delay, 0), 8);
    px[0] = delay_ramp[k][0];
    px[1] = delay_ramp[k][1];
    px[2] = delay_ramp[k][2];
  } else if (m.attracted) {
    int t = std::min(m.steps, 63);
    px[0] = static_cast<unsigned char>(120 + 2 * t);
    px[1] = static_cast<unsigned char>(30 + t);
    px[2] = static_cast<unsigned char>(60);
  } else {
    px[0] = px[1] = px[2] = 0;
  }
}

int run_selftest(const std::string& suite, unsigned seed);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "atlas: escape classification, spider's-web certificates, and dynamic "
      "rays for f(z) = lambda*cosh(z)^q"};
  app.require_subcommand(1);

  FnOptions fn;
  atlas::ClassifyParams params;
  std::string mode = "rigorous_horizon";
  std::string z_str, out_path, center_str = "0+0i", basepoint_str = "1.5+1.5i";
  std::string cert_path, address_str = "0";
  double S = 15.0, min_radius = 2.0, X0 = 10.0, lo = 0.0, hi = 5.0;
  int res = 512, threads = 0, N = 30, D = 30, sigma = 1, grid_pts = 10000;
  unsigned seed = 1;
  std::string suite = "all";

  auto* c_classify = app.add_subcommand("classify", "classify one point");
  add_fn_options(c_classify, fn);
  add_classify_options(c_classify, params, mode);
  c_classify->add_option("--z", z_str, "point, complex literal a+bi")
      ->required();

  auto* c_rate = app.add_subcommand("rate", "rate sequence b_n of one point");
  add_fn_options(c_rate, fn);
  c_rate->add_option("--z", z_str)->required();
  c_rate->add_option("--N", N, "orbit length");

  auto* c_fixed = app.add_subcommand("fixed-points", "real fixed points");
  add_fn_options(c_fixed, fn);
  c_fixed->add_option("--lo", lo);
  c_fixed->add_option("--hi", hi);
  c_fixed->add_option("--grid", grid_pts, "bracketing subintervals");

  auto* c_sched = app.add_subcommand("schedule", "maximum-modulus schedule");
  add_fn_options(c_sched, fn);
  c_sched->add_option("--R", params.R);
  c_sched->add_option("--depth", params.N_depth);

  auto* c_render = app.add_subcommand("render", "classification field as PPM");
  add_fn_options(c_render, fn);
  add_classify_options(c_render, params, mode);
  c_render->add_option("--grid-size", S, "half-width of the square grid");
  c_render->add_option("--res", res, "cells per side");
  c_render->add_option("--center", center_str);
  c_render->add_option("--out", out_path)->required();
  c_render->add_option("--threads", threads, "0 = auto (ATLAS_THREADS/cores)");

  auto* c_web = app.add_subcommand(
      "certify-web", "search a separating loop of certified points");
  add_fn_options(c_web, fn);
  add_classify_options(c_web, params, mode);
  c_web->add_option("--grid-size", S);
  c_web->add_option("--res", res);
  c_web->add_option("--center", center_str);
  c_web->add_option("--basepoint", basepoint_str);
  c_web->add_option("--min-radius", min_radius);
  c_web->add_option("--out", out_path)->required();
  c_web->add_option("--threads", threads);

  auto* c_verify = app.add_subcommand("verify-cert", "re-check a certificate");
  c_verify->add_option("--cert", cert_path)->required();
  c_verify->add_option("--depth", params.N_depth,
                       "stricter re-check depth (0 = certificate's own)");

  auto* c_ray = app.add_subcommand("ray", "trace a dynamic ray of g");
  c_ray->add_option("--address", address_str,
                    "comma-separated branch indices, zero-padded to D");
  c_ray->add_option("--sigma", sigma)->check(CLI::IsMember({-1, 1}));
  c_ray->add_option("--D", D, "pullback depth");
  c_ray->add_option("--X0", X0, "start abscissa on the real axis");

  auto* c_self = app.add_subcommand("selftest", "run the invariant suites");
  c_self->add_option("--suite", suite,
                     "all, joukowski, towers, rates, fixed-points, annulus, "
                     "schedule, rays");
  c_self->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    params.mode = parse_mode(mode);
    if (c_classify->parsed()) {
      auto v = atlas::classify(fn.resolve(), parse_complex(z_str), params);
      std::cout << verdict_json(v);
      return v.undetermined() ? 2 : 0;
    }
    if (c_rate->parsed()) {
      auto r = atlas::rate_sequence(fn.resolve(), parse_complex(z_str), N);
      std::cout << rate_json(r) << "\n";
      return 0;
    }
    if (c_fixed->parsed()) {
      auto pts = atlas::find_fixed_points_real(fn.resolve(), lo, hi, grid_pts);
      std::string o = "[";
      for (size_t k = 0; k < pts.size(); ++k) {
        if (k) o += ",";
        const char* t =
            pts[k].type == atlas::FixedPointReport::Type::attracting
                ? "attracting"
                : (pts[k].type == atlas::FixedPointReport::Type::repelling
                       ? "repelling"
                       : "neutral");
        o += "{\"location\":" + fmt(pts[k].location);
        o += ",\"multiplier\":" + fmt(pts[k].multiplier);
        o += ",\"type\":\"" + std::string(t) + "\"}";
      }
      std::cout << o << "]\n";
      return 0;
    }
    if (c_sched->parsed()) {
      atlas::FunctionSpec f = fn.resolve();
      double R = params.R == 0.0 ? f.default_radius() : params.R;
      auto sched = atlas::max_modulus_schedule(f, R, params.N_depth);
      std::string o = "[";
      for (size_t k = 0; k < sched.values.size(); ++k) {
        if (k) o += ",";
        const auto& t = sched.values[k];
        o += "{\"height\":" + std::to_string(t.height());
        o += ",\"mantissa\":" + fmt(t.mantissa());
        if (auto d = t.to_double()) o += ",\"value\":" + fmt(*d);
        o += "}";
      }
      std::cout << o << "]\n";
      return 0;
    }
    if (c_render->parsed()) {
      atlas::GridSpec grid{parse_complex(center_str), S, res};
      auto field = atlas::mark_grid(fn.resolve(), grid, params, threads);
      std::string ppm = "P6\n" + std::to_string(res) + " " +
                        std::to_string(res) + "\n255\n";
      size_t header = ppm.size();
      ppm.resize(header + static_cast<size_t>(res) * res * 3);
      auto* px = reinterpret_cast<unsigned char*>(ppm.data() + header);
      for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
          // image row 0 at the top = largest Im, so flip i
          verdict_color(field.at(res - 1 - i, j),
                        px + (static_cast<size_t>(i) * res + j) * 3);
        }
      }
      atomic_write(out_path, ppm);
      return 0;
    }
    if (c_web->parsed()) {
      if (!(min_radius < S / 2.0)) {
        std::cerr << "certify-web: need min-radius < grid-size / 2\n";
        return 1;
      }
      atlas::GridSpec grid{parse_complex(center_str), S, res};
      auto field = atlas::mark_grid(fn.resolve(), grid, params, threads);
      auto cert = atlas::find_separating_cycle(
          field, parse_complex(basepoint_str), min_radius);
      if (!cert) {
        std::cout << "{\"status\":\"not_found\"}\n";
        return 3;
      }
      atomic_write(out_path, atlas::certificate_to_json(*cert));
      std::cout << "{\"inner_radius\":" << fmt(cert->inner_radius)
                << ",\"status\":\"found\",\"vertices\":"
                << cert->vertices.size() << ",\"winding\":" << cert->winding
                << "}\n";
      return 0;
    }
    if (c_verify->parsed()) {
      std::ifstream in(cert_path, std::ios::binary);
      if (!in) {
        std::cerr << "verify-cert: cannot read " << cert_path << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      auto cert = atlas::certificate_from_json(ss.str());
      atlas::ClassifyParams stricter = cert.params;
      if (params.N_depth > 0 && c_verify->count("--depth")) {
        stricter.N_depth = params.N_depth;
      }
      bool ok = atlas::verify_certificate(cert.function, cert, stricter);
      std::cout << (ok ? "{\"verified\":true}\n" : "{\"verified\":false}\n");
      return ok ? 0 : 3;
    }
    if (c_ray->parsed()) {
      atlas::ExternalAddress addr;
      addr.sigma = sigma;
      std::stringstream ss(address_str);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) addr.entries.push_back(std::stoi(tok));
      }
      while (static_cast<int>(addr.entries.size()) < D) {
        addr.entries.push_back(0);
      }
      std::string o = "[";
      for (int d = 2; d <= D; ++d) {
        auto p = atlas::trace_ray(addr, d, X0);
        if (d > 2) o += ",";
        o += "{\"cauchy_error\":" + fmt(p.cauchy_error);
        o += ",\"depth\":" + std::to_string(p.depth);
        o += ",\"position\":[" + fmt(p.position.real()) + "," +
             fmt(p.position.imag()) + "]}";
      }
      std::cout << o << "]\n";
      return 0;
    }
    if (c_self->parsed()) {
      return run_selftest(suite, seed);
    }
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what()
              << "\n";
    return 1;
  }
  return 1;
}

namespace {

struct SuiteResult {
  std::string name;
  bool passed;
  std::string detail;
};

bool want(const std::string& suite, const char* name) {
  return suite == "all" || suite == name;
}

void check(std::vector<SuiteResult>& out, const std::string& name, bool ok,
           const std::string& detail) {
  out.push_back({name, ok, detail});
}

int run_selftest(const std::string& suite, unsigned seed) {
  using namespace atlas;
  std::vector<SuiteResult> results;
  std::mt19937 rng(seed);

  if (want(suite, "joukowski")) {
    FunctionSpec h = FunctionSpec::h();
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Complex z(u(rng), u(rng));
      Complex direct = evaluate(h, z);
      Complex jouk = (std::exp(z) + std::exp(-z)) / 2.0;
      worst = std::max(worst,
                       std::abs(direct - jouk) / (1.0 + std::abs(jouk)));
    }
    check(results, "joukowski-identity", worst <= 1e-12,
          "worst rel err " + fmt(worst));
    bool crit = true;
    const double pi = std::acos(-1.0);
    for (int k = -5; k <= 5; ++k) {
      Complex z(0.0, k * pi);
      double want_v = (k % 2 == 0) ? 1.0 : -1.0;
      if (std::abs(evaluate(h, z) - want_v) > 1e-12) crit = false;
      if (std::abs(derivative(h, z)) > 1e-10) crit = false;
    }
    check(results, "critical-values", crit, "cosh(k*pi*i) = (-1)^k, deriv 0");
  }

  if (want(suite, "towers")) {
    std::uniform_real_distribution<double> lg(-5.0, 690.0);  // up to ~1e299
    bool order_ok = true, round_ok = true;
    for (int t = 0; t < 100000; ++t) {
      double x = std::exp(lg(rng));
      double y = std::exp(lg(rng));
      auto a = TowerReal::from_real(x), b = TowerReal::from_real(y);
      Ordering ord = compare(a, b);
      if ((x < y && ord != Ordering::less) ||
          (x > y && ord != Ordering::greater) ||
          (x == y && ord != Ordering::equal)) {
        order_ok = false;
      }
      if (auto d = a.to_double()) {
        if (std::abs(*d - x) > 1e-12 * x) round_ok = false;
      } else {
        round_ok = false;
      }
    }
    check(results, "tower-order-fuzz", order_ok, "10^5 pairs");
    check(results, "tower-round-trip", round_ok, "1e-12 relative");
    bool inv = true;
    for (double x : {1.0, 2.5, 100.0, 1e100, 1e300}) {
      auto a = TowerReal::from_real(x);
      if (log_t(exp_t(a)) != a) inv = false;
    }
    check(results, "exp-log-inverse", inv, "canonical equality");
  }

  if (want(suite, "rates")) {
    bool all = true;
    std::string detail;
    for (double delta : {0.5, 1.0, 2.0}) {
      std::vector<TowerReal> a;
      TowerReal t = TowerReal::from_real(1.0);
      for (int n = 0; n <= 50; ++n) {
        a.push_back(t);
        t = exp_t(mul_scalar(t, delta));
      }
      if (growth_class_test(a) != GrowthClass::bounded_rate) {
        all = false;
        detail += " omega(" + fmt(delta) + ") not bounded";
      }
      for (double C : {1.5, 3.0, 10.0}) {
        std::vector<TowerReal> ac;
        for (const auto& v : a) ac.push_back(pow_t(v, C));
        if (growth_class_test(ac) != GrowthClass::bounded_rate) {
          all = false;
          detail += " power " + fmt(C) + " broke invariance";
        }
      }
    }
    std::vector<TowerReal> poly;
    for (int n = 0; n <= 50; ++n) poly.push_back(TowerReal::from_real(n + 1));
    if (growth_class_test(poly) != GrowthClass::decaying_rate) {
      all = false;
      detail += " polynomial not decaying";
    }
    check(results, "growth-rates", all, detail.empty() ? "prop-2.2 suite" : detail);
  }

  if (want(suite, "fixed-points")) {
    auto pts = find_fixed_points_real(FunctionSpec::g(), 0.0, 5.0, 10000);
    bool ok = pts.size() == 2 && std::abs(pts[0].location - 0.589) < 1e-3 &&
              std::abs(pts[0].multiplier) < 1.0 &&
              std::abs(pts[1].location - 2.127) < 1e-3 &&
              pts[1].multiplier > 1.0;
    check(results, "fixed-points-g", ok,
          pts.size() == 2 ? "p_a " + fmt(pts[0].location) + ", p_r " +
                                fmt(pts[1].location)
                          : "wrong count");
  }

  if (want(suite, "annulus")) {
    std::uniform_real_distribution<double> ur(1.0001, 50.0), uc(0.01, 0.8);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      double C = uc(rng);
      double d = hyperbolic_gap(C);
      worst = std::max(worst, std::abs(annulus_distance(ur(rng), d) - 2.0 * C));
    }
    check(results, "annulus-distance", worst <= 1e-9, "worst " + fmt(worst));
  }

  if (want(suite, "schedule")) {
    auto s = max_modulus_schedule(FunctionSpec::h(), 1.0, 2);
    bool ok = s.values.size() == 3;
    if (ok) {
      auto v1 = s.values[1].to_double(), v2 = s.values[2].to_double();
      ok = v1 && v2 && std::abs(*v1 - std::cosh(1.0)) < 1e-9 &&
           std::abs(*v2 - std::cosh(std::cosh(1.0))) < 1e-9;
    }
    bool threw = false;
    try {
      max_modulus_schedule(FunctionSpec::g(), 0.5, 4);
    } catch (const ScheduleError&) {
      threw = true;
    }
    check(results, "schedule-h", ok, "cosh iterates from 1");
    check(results, "schedule-g-invalid-radius", threw,
          "M(r) <= r detected below p_r");
  }

  if (want(suite, "rays")) {
    ExternalAddress zero;
    zero.entries.assign(45, 0);
    auto deep = trace_ray(zero, 40, 10.0);
    bool near = std::abs(deep.position - Complex(2.126755, 0.0)) < 1e-4;
    bool cauchy = true;
    double prev = 1e300;
    for (int d = 5; d <= 40; d += 5) {
      auto p = trace_ray(zero, d, 10.0);
      if (p.cauchy_error > prev) cauchy = false;
      prev = p.cauchy_error;
    }
    check(results, "ray-endpoint", near && cauchy,
          "zero address contracts to p_r");
  }

  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%-28s %s  %s\n", r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.detail.c_str());
    all_pass = all_pass && r.passed;
  }
  if (results.empty()) {
    std::fprintf(stderr, "selftest: unknown suite '%s'\n", suite.c_str());
    return 1;
  }
  return all_pass ? 0 : 4;
}

}  // namespace
