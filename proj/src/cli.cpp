#include "pcvx3/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "pcvx3/aniso_scale.hpp"
#include "pcvx3/bergman.hpp"
#include "pcvx3/error.hpp"
#include "pcvx3/io.hpp"
#include "pcvx3/kernels.hpp"
#include "pcvx3/levi.hpp"
#include "pcvx3/normal_form.hpp"
#include "pcvx3/qmc.hpp"

namespace pcvx3::cli {

using io::json;

std::vector<double> parse_delta_spec(const std::string& spec) {
  std::stringstream ss(spec);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
    throw Error(ErrorKind::ParseError, "delta spec must be lo:hi:n, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    const int n = std::stoi(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
    return log_spaced(lo, hi, n);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ParseError, "delta spec must be lo:hi:n, got '" + spec + "'");
  }
}

namespace {

// A flag whose value falls back to the config file and then to a default.
template <class T>
struct Flag {
  T value{};
  CLI::Option* opt = nullptr;

  bool given() const { return opt != nullptr && opt->count() > 0; }
};

struct Common {
  Flag<std::string> config;
  Flag<std::string> out;
  Flag<std::string> input;
  Flag<double> tol;
  Flag<std::uint64_t> seed;
  bool no_timestamp = false;
  json cfg = json::object();

  void add(CLI::App* app, bool with_input) {
    config.opt = app->add_option("--config", config.value, "JSON run configuration; flags override it");
    out.opt = app->add_option("--out", out.value, "output directory");
    if (with_input) input.opt = app->add_option("--input", input.value, "jet JSON file or inline JSON object");
    tol.opt = app->add_option("--tol", tol.value, "tolerance");
    seed.opt = app->add_option("--seed", seed.value, "sampling seed");
    app->add_flag("--no-timestamp", no_timestamp, "omit the generated_at field");
  }

  void load() {
    if (config.given()) {
      cfg = io::load_json(config.value);
      if (!cfg.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
    }
    if (!no_timestamp && cfg.contains("no_timestamp") && cfg["no_timestamp"].is_boolean())
      no_timestamp = cfg["no_timestamp"].get<bool>();
  }

  template <class T>
  T pick(const Flag<T>& f, const char* key, T def) const {
    if (f.given()) return f.value;
    if (cfg.contains(key)) {
      try {
        return cfg[key].get<T>();
      } catch (const json::exception&) {
        throw Error(ErrorKind::ParseError, std::string("config key '") + key + "' has the wrong type");
      }
    }
    return def;
  }

  template <class T>
  std::optional<T> pick_opt(const Flag<T>& f, const char* key) const {
    if (f.given() || cfg.contains(key)) return pick(f, key, T{});
    return std::nullopt;
  }

  std::string input_text() const {
    const auto in = pick_opt(input, "input");
    if (!in) throw Error(ErrorKind::InvalidArgument, "--input is required");
    return *in;
  }

  std::vector<double> deltas(const Flag<std::string>& f, const std::string& def) const {
    if (f.given()) return parse_delta_spec(f.value);
    if (cfg.contains("deltas")) {
      const json& d = cfg["deltas"];
      if (d.is_string()) return parse_delta_spec(d.get<std::string>());
      if (d.is_array()) {
        std::vector<double> v;
        for (const auto& x : d) {
          if (!x.is_number()) throw Error(ErrorKind::ParseError, "config deltas must be numbers");
          v.push_back(x.get<double>());
        }
        return v;
      }
      throw Error(ErrorKind::ParseError, "config deltas must be 'lo:hi:n' or an array");
    }
    return parse_delta_spec(def);
  }

  void stamp(json& j) const {
    if (no_timestamp) return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["generated_at"] = buf;
  }

  std::optional<std::filesystem::path> out_dir() const {
    const auto o = pick_opt(out, "out");
    if (!o) return std::nullopt;
    return std::filesystem::path(*o);
  }
};

void emit(const Common& c, const std::string& name, const std::string& content) {
  if (const auto dir = c.out_dir()) io::write_atomic(*dir / name, content);
}

std::vector<int> parse_int_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, std::string(what) + " must be comma-separated integers");
    }
  }
  if (v.size() != n) throw Error(ErrorKind::ParseError, std::string(what) + " needs " + std::to_string(n) + " entries");
  return v;
}

SamplerKind parse_sampler(const std::string& s) {
  if (s == "auto") return SamplerKind::Automatic;
  if (s == "box") return SamplerKind::Box;
  if (s == "log") return SamplerKind::LogStretched;
  throw Error(ErrorKind::ParseError, "sampler must be auto, box or log");
}

// ---- normalize ------------------------------------------------------------

struct NormalizeCmd {
  Common common;
  Flag<int> max_stage, trunc, grid_count;
  Flag<double> grid_radius;

  void add(CLI::App* app) {
    common.add(app, true);
    max_stage.opt = app->add_option("--max-stage", max_stage.value, "last stage to attempt");
    trunc.opt = app->add_option("--trunc", trunc.value, "override the input truncation degree");
    grid_radius.opt = app->add_option("--grid-radius", grid_radius.value, "half-width of the z1 grid");
    grid_count.opt = app->add_option("--grid-count", grid_count.value, "z1 grid points per axis");
  }

  int run(std::ostream& out) {
    common.load();
    Jet phi = io::load_jet(common.input_text());
    if (const auto t = common.pick_opt(trunc, "trunc")) phi = phi.with_trunc(*t);
    const int td = phi.trunc_degree();
    NormalizeOptions opts;
    opts.max_stage = common.pick(max_stage, "max_stage", std::max(1, std::min(16, td / 2 - 1)));
    if (td < 2 * (opts.max_stage + 1))
      throw Error(ErrorKind::InvalidArgument, "truncation degree " + std::to_string(td) +
                                                  " < 2(max stage + 1) = " + std::to_string(2 * (opts.max_stage + 1)));
    opts.tol = common.pick(common.tol, "tol", kVanishRelative);
    opts.grid.radius = common.pick(grid_radius, "grid_radius", 0.5);
    opts.grid.count = common.pick(grid_count, "grid_count", 9);

    const NormalizationResult r = normalize_iterate(phi, opts);
    json j = io::normalization_to_json(r);
    common.stamp(j);
    emit(common, "normalize.json", j.dump(2) + "\n");
    out << j.dump() << "\n";
    return r.halted ? kExitOk : kExitNotHalted;
  }
};

// ---- levi -----------------------------------------------------------------

struct LeviCmd {
  Common common;
  Flag<int> n, grid_count;
  Flag<double> grid_radius;

  void add(CLI::App* app) {
    common.add(app, true);
    n.opt = app->add_option("--n", n.value, "ambient dimension (2 or 3)");
    grid_radius.opt = app->add_option("--grid-radius", grid_radius.value, "grid half-width in every real direction");
    grid_count.opt = app->add_option("--grid-count", grid_count.value, "grid points per real direction");
  }

  int run(std::ostream& out) {
    common.load();
    const Jet phi = io::load_jet(common.input_text());
    GridSpec g;
    const double rad = common.pick(grid_radius, "grid_radius", 0.5);
    g.radius_z1 = g.radius_z2 = g.radius_t = rad;
    g.count = common.pick(grid_count, "grid_count", 9);
    const auto grid = tensor_grid(g);
    const LeviReport rep =
        pseudoconvexity_scan(phi, grid, common.pick(common.tol, "tol", kLeviTolerance), common.pick(n, "n", 3));
    json j = io::levi_verdict(rep);
    common.stamp(j);
    emit(common, "levi.csv", io::levi_csv(rep));
    emit(common, "levi.json", j.dump(2) + "\n");
    out << j.dump() << "\n";
    return rep.pseudoconvex() ? kExitOk : kExitVerdictFailed;
  }
};

// ---- scale-probe ------------------------------------------------------------

struct ScaleProbeCmd {
  Common common;
  Flag<std::string> weights, deltas, deriv;
  Flag<int> ell;
  Flag<std::size_t> samples;

  void add(CLI::App* app) {
    common.add(app, true);
    weights.opt = app->add_option("--weights", weights.value, "fiber weights d,d,d_t (default 1,1,2)");
    ell.opt = app->add_option("--ell", ell.value, "homogeneity degree of the limit");
    deltas.opt = app->add_option("--deltas", deltas.value, "lo:hi:n (default 1e-3:1e-1:5)");
    deriv.opt = app->add_option("--deriv", deriv.value, "derivative orders a,b,c,d,e (default none)");
    samples.opt = app->add_option("--samples", samples.value, "sample points (default 1000)");
  }

  int run(std::ostream& out) {
    common.load();
    const Jet f = io::load_jet(common.input_text());
    const auto wv = parse_int_list(common.pick(weights, "weights", std::string("1,1,2")), 3, "weights");
    const WeightVector w(wv);
    const auto l = common.pick_opt(ell, "ell");
    if (!l) throw Error(ErrorKind::InvalidArgument, "--ell is required");
    const auto dv = common.deltas(deltas, "1e-3:1e-1:5");
    const auto dd = parse_int_list(common.pick(deriv, "deriv", std::string("0,0,0,0,0")), 5, "deriv");
    const ExponentKey dk{dd[0], dd[1], dd[2], dd[3], dd[4]};
    const std::size_t ns = common.pick(samples, "samples", std::size_t{1000});

    HaltonSequence h(5, common.pick(common.seed, "seed", std::uint64_t{1}));
    std::vector<Point5> pts(ns);
    double u[5];
    for (auto& p : pts) {
      h.next(u);
      p = {cplx(u[0] - 0.5, u[1] - 0.5), cplx(u[2] - 0.5, u[3] - 0.5), u[4] - 0.5};
    }
    const ScalingProbeReport rep =
        scaling_convergence_probe(f, w, *l, dv, pts, dk, common.pick(common.tol, "tol", kVanishRelative));
    json foot = {{"ell", *l}, {"weights", wv}, {"samples", ns}};
    foot["fitted_rate"] = rep.fitted_rate ? json(*rep.fitted_rate) : json(nullptr);
    common.stamp(foot);
    emit(common, "scale_probe.csv", io::scale_probe_csv(rep, foot));
    out << foot.dump() << "\n";
    return kExitOk;
  }
};

// ---- bergman --------------------------------------------------------------

struct ModelFlags {
  Flag<double> tau, c, window;

  void add(CLI::App* app, const std::string& prefix) {
    tau.opt = app->add_option("--" + prefix + "tau", tau.value, "model type exponent");
    c.opt = app->add_option("--" + prefix + "c", c.value, "model constant C");
    window.opt = app->add_option("--" + prefix + "window", window.value, "window radius");
  }

  ModelDomain get(const Common& com, const std::string& prefix, double tau_def) const {
    auto key = [&](const char* k) {
      static thread_local std::string s;
      s = prefix + k;
      return s.c_str();
    };
    ModelDomain m;
    m.tau = com.pick(tau, key("tau"), tau_def);
    m.C = com.pick(c, key("c"), 1.0);
    m.eps = com.pick(window, key("window"), 1.0);
    m.validate();
    return m;
  }
};

struct SamplingFlags {
  Flag<int> degree_cap;
  Flag<std::size_t> samples;
  Flag<std::string> deltas, sampler;

  void add(CLI::App* app) {
    degree_cap.opt = app->add_option("--degree-cap", degree_cap.value, "basis degree cap (default 12)");
    samples.opt = app->add_option("--samples", samples.value, "accepted samples (default 200000)");
    deltas.opt = app->add_option("--deltas", deltas.value, "lo:hi:n (default 1e-2:1e-1:8)");
    sampler.opt = app->add_option("--sampler", sampler.value, "auto, box or log");
  }

  SamplePlan plan(const Common& com) const {
    SamplePlan p;
    p.accepted = com.pick(samples, "samples", std::size_t{200000});
    p.seed = com.pick(com.seed, "seed", std::uint64_t{1});
    p.sampler = parse_sampler(com.pick(sampler, "sampler", std::string("auto")));
    return p;
  }
};

struct BergmanCmd {
  Common common;
  ModelFlags model;
  SamplingFlags sampling;
  Flag<std::string> domain;
  Flag<double> radius;

  void add(CLI::App* app) {
    common.add(app, false);
    model.add(app, "");
    sampling.add(app);
    domain.opt = app->add_option("--domain", domain.value, "model (default) or disc");
    radius.opt = app->add_option("--radius", radius.value, "disc radius (disc domain)");
  }

  int run(std::ostream& out) {
    common.load();
    const std::string dom = common.pick(domain, "domain", std::string("model"));
    const int cap = common.pick(sampling.degree_cap, "degree_cap", 12);
    SamplePlan plan = sampling.plan(common);
    if (dom == "disc") return run_disc(out, cap, plan);
    if (dom != "model") throw Error(ErrorKind::ParseError, "domain must be model or disc");

    const ModelDomain m = model.get(common, "", 2.0);
    KernelProbe probe{common.deltas(sampling.deltas, "1e-2:1e-1:8")};
    BasisSpec spec;
    spec.degree_cap = cap;
    spec.pole_scales = default_pole_scales(probe.deltas);
    const KernelEstimate est = kernel_diag_estimate(m, probe, spec, plan);
    json j = io::kernel_summary(est, 0.2);
    j["seed"] = plan.seed;
    j["degree_cap"] = cap;
    common.stamp(j);
    emit(common, "bergman.csv", io::kernel_csv(est));
    emit(common, "bergman.json", j.dump(2) + "\n");
    out << j.dump() << "\n";
    return est.sandwich_holds() ? kExitOk : kExitVerdictFailed;
  }

  int run_disc(std::ostream& out, int cap, SamplePlan plan) {
    DiscFixture d;
    d.radius = common.pick(radius, "radius", 1.0);
    if (!(d.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "disc radius must be > 0");
    plan.sampler = SamplerKind::Box;
    const SampleSet s = draw_samples(d, plan);
    BasisSpec spec;
    spec.degree_cap = cap;
    spec.complex_dim = 1;
    const OrthoBasis ob = gram_orthobasis(BasisSet(spec), s);
    const double k = ob.kernel_diag({0.0, 0.0});
    const double exact = 1.0 / (std::numbers::pi * d.radius * d.radius);
    json j = {{"domain", "disc"},
              {"radius", d.radius},
              {"degree_cap", cap},
              {"samples", s.size()},
              {"seed", plan.seed},
              {"k_hat_center", k},
              {"exact", exact},
              {"relative_error", std::abs(k - exact) / exact},
              {"gram", io::gram_to_json(ob.report())}};
    common.stamp(j);
    emit(common, "bergman_disc.json", j.dump(2) + "\n");
    out << j.dump() << "\n";
    return kExitOk;
  }
};

// ---- witness --------------------------------------------------------------

struct WitnessCmd {
  Common common;
  ModelFlags outer, inner;
  SamplingFlags sampling;
  Flag<double> mass_tol;

  void add(CLI::App* app) {
    common.add(app, false);
    outer.add(app, "");
    inner.add(app, "inner-");
    sampling.add(app);
    mass_tol.opt = app->add_option("--mass-tol", mass_tol.value, "tolerance of the mass inequality (default 1e-6)");
  }

  int run(std::ostream& out) {
    common.load();
    const ModelDomain m1 = outer.get(common, "", 4.0);
    const ModelDomain m2 = inner.get(common, "inner_", 2.0);
    KernelProbe probe{common.deltas(sampling.deltas, "1e-2:1e-1:8")};
    BasisSpec spec;
    spec.degree_cap = common.pick(sampling.degree_cap, "degree_cap", 12);
    spec.pole_scales = default_pole_scales(probe.deltas);
    WitnessOptions wo;
    wo.mass_tol = common.pick(mass_tol, "mass_tol", 1e-6);
    wo.kernel_rel_tol = common.pick(common.tol, "tol", wo.kernel_rel_tol);
    const WitnessReport rep = noncompactness_witness(m1, m2, probe, spec, sampling.plan(common), wo);
    json j = io::witness_summary(rep);
    common.stamp(j);
    emit(common, "witness.csv", io::witness_csv(rep));
    emit(common, "witness.json", j.dump(2) + "\n");
    out << j.dump() << "\n";
    return rep.all_ok() ? kExitOk : kExitVerdictFailed;
  }
};

// ---- contact-order ----------------------------------------------------------

struct ContactCmd {
  Common common;
  Flag<std::string> h2, h3;
  Flag<int> cap;

  void add(CLI::App* app) {
    common.add(app, true);
    h2.opt = app->add_option("--h2", h2.value, "second curve component (jet JSON)");
    h3.opt = app->add_option("--h3", h3.value, "third curve component (jet JSON)");
    cap.opt = app->add_option("--cap", cap.value, "largest order reported (default 16)");
  }

  int run(std::ostream& out) {
    common.load();
    const Jet phi = io::load_jet(common.input_text());
    const auto a = common.pick_opt(h2, "h2");
    const auto b = common.pick_opt(h3, "h3");
    if (!a || !b) throw Error(ErrorKind::InvalidArgument, "--h2 and --h3 are required");
    const int c = common.pick(cap, "cap", 16);
    const ContactOrder r =
        contact_order(phi, io::load_jet(*a), io::load_jet(*b), c, common.pick(common.tol, "tol", kVanishRelative));
    json j = {{"order", r.order}, {"saturated", r.saturated}, {"cap", c}};
    common.stamp(j);
    emit(common, "contact_order.json", j.dump(2) + "\n");
    out << j.dump() << "\n";
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  kernels::apply_thread_env();
  CLI::App app{"pcvx3: normal forms, Levi scans and Bergman-kernel experiments"};
  app.require_subcommand(1);

  NormalizeCmd normalize;
  LeviCmd levi;
  ScaleProbeCmd probe;
  BergmanCmd bergman;
  WitnessCmd witness;
  ContactCmd contact;
  auto* s_norm = app.add_subcommand("normalize", "iterate shears until a mixed derivative appears");
  auto* s_levi = app.add_subcommand("levi", "scan the Levi form on a grid");
  auto* s_probe = app.add_subcommand("scale-probe", "convergence of anisotropic rescalings");
  auto* s_berg = app.add_subcommand("bergman", "subspace Bergman-kernel diagonal on a model domain");
  auto* s_wit = app.add_subcommand("witness", "kernel inequality chain on nested models");
  auto* s_con = app.add_subcommand("contact-order", "vanishing order of the defining function along a curve");
  normalize.add(s_norm);
  levi.add(s_levi);
  probe.add(s_probe);
  bergman.add(s_berg);
  witness.add(s_wit);
  contact.add(s_con);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*s_norm) return normalize.run(out);
    if (*s_levi) return levi.run(out);
    if (*s_probe) return probe.run(out);
    if (*s_berg) return bergman.run(out);
    if (*s_wit) return witness.run(out);
    if (*s_con) return contact.run(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pcvx3::cli
