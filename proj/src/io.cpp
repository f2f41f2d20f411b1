#include "pcvx3/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "pcvx3/error.hpp"

namespace pcvx3::io {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json jet_to_json(const Jet& j) {
  json coeffs = json::object();
  for (const auto& [k, c] : j.terms()) coeffs[k.to_string()] = complex_to_json(c);
  return {{"trunc_degree", j.trunc_degree()}, {"real", j.real_flag()}, {"coeffs", coeffs}};
}

namespace {

double number_at(const json& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorKind::ParseError, what + " must be a number");
  return v.get<double>();
}

}  // namespace

Jet jet_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "jet must be a JSON object");
  if (!doc.contains("trunc_degree") || !doc["trunc_degree"].is_number_integer())
    throw Error(ErrorKind::ParseError, "jet needs an integer trunc_degree");
  const int trunc = doc["trunc_degree"].get<int>();
  if (trunc < 0) throw Error(ErrorKind::ParseError, "trunc_degree must be >= 0");
  bool real = false;
  if (doc.contains("real")) {
    if (!doc["real"].is_boolean()) throw Error(ErrorKind::ParseError, "real must be a boolean");
    real = doc["real"].get<bool>();
  }
  Jet j(trunc, real);
  if (!doc.contains("coeffs")) return j;
  const json& cs = doc["coeffs"];
  if (!cs.is_object()) throw Error(ErrorKind::ParseError, "coeffs must be an object");
  for (const auto& [key, val] : cs.items()) {
    ExponentKey k;
    try {
      k = ExponentKey::parse(key);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, e.detail());
    }
    cplx c;
    if (val.is_array() && val.size() == 2) {
      c = {number_at(val[0], "coefficient " + key), number_at(val[1], "coefficient " + key)};
    } else if (val.is_number()) {
      c = val.get<double>();
    } else {
      throw Error(ErrorKind::ParseError, "coefficient " + key + " must be [re, im] or a number");
    }
    if (k.total() > trunc)
      throw Error(ErrorKind::ParseError, "key " + key + " exceeds trunc_degree " + std::to_string(trunc));
    j.add_term(k, c);
  }
  return j.prune(0.0);
}

json load_json(const std::string& path_or_text) {
  std::string text;
  const auto first = path_or_text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && path_or_text[first] == '{') {
    text = path_or_text;
  } else {
    std::ifstream in(path_or_text, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path_or_text);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

Jet load_jet(const std::string& path_or_text) { return jet_from_json(load_json(path_or_text)); }

json normalization_to_json(const NormalizationResult& r) {
  json shears = json::array();
  for (const auto& s : r.final_state.shears) shears.push_back({{"stage", s.stage}, {"c", jet_to_json(s.c)}});
  return {{"tau", r.tau},
          {"z_star", complex_to_json(r.z_star)},
          {"j0", r.j0},
          {"k0", r.k0},
          {"witness", complex_to_json(r.witness)},
          {"halted", r.halted},
          {"final_stage", r.final_state.stage},
          {"shears", shears},
          {"final_phi", jet_to_json(r.final_state.phi)}};
}

std::string levi_csv(const LeviReport& r) {
  std::string s = "re_z1,im_z1,re_z2,im_z2,t,lambda_min\n";
  for (const auto& row : r.rows) {
    const auto& p = row.point;
    s += fmt(p.z1.real()) + "," + fmt(p.z1.imag()) + "," + fmt(p.z2.real()) + "," + fmt(p.z2.imag()) + "," +
         fmt(p.t) + "," + fmt(row.lambda_min) + "\n";
  }
  return s;
}

json levi_verdict(const LeviReport& r) {
  json v = {{"pseudoconvex", r.pseudoconvex()}, {"global_min", r.global_min}, {"tol", r.tol},
            {"points", r.rows.size()}};
  if (!r.rows.empty()) {
    const auto& p = r.rows[r.worst_index].point;
    v["worst_point"] = {{"z1", complex_to_json(p.z1)}, {"z2", complex_to_json(p.z2)}, {"t", p.t}};
  }
  return v;
}

std::string scale_probe_csv(const ScalingProbeReport& r, const json& footer) {
  std::string s = "delta,max_deviation\n";
  for (std::size_t i = 0; i < r.deltas.size(); ++i) s += fmt(r.deltas[i]) + "," + fmt(r.max_deviation[i]) + "\n";
  s += "# " + footer.dump() + "\n";
  return s;
}

std::string kernel_csv(const KernelEstimate& e) {
  std::string s = "delta,K_hat,upper_bound,slope_so_far\n";
  for (const auto& r : e.rows)
    s += fmt(r.delta) + "," + fmt(r.k_hat) + "," + fmt(r.upper_bound) + "," + fmt(r.slope_so_far) + "\n";
  return s;
}

json gram_to_json(const GramReport& g) {
  return {{"basis_size", g.basis_size},
          {"kept", g.kept},
          {"cutoff_count", g.cutoff_count},
          {"max_eigenvalue", g.max_eigenvalue},
          {"min_kept_eigenvalue", g.min_kept_eigenvalue},
          {"condition", g.condition}};
}

json kernel_summary(const KernelEstimate& e, double fit_tolerance) {
  json j = {{"tau", e.model.tau},
            {"C", e.model.C},
            {"window", e.model.eps},
            {"target_slope", e.target_slope()},
            {"sandwich_holds", e.sandwich_holds()},
            {"samples", e.samples},
            {"volume", e.volume},
            {"gram", gram_to_json(e.gram)}};
  if (e.fit) {
    const bool good = std::abs(e.fit->deviation) <= fit_tolerance;
    j["fit"] = {{"slope", e.fit->slope},
                {"residual", e.fit->residual},
                {"target", e.fit->target},
                {"deviation", e.fit->deviation},
                {"tolerance", fit_tolerance},
                {"quality", good ? "good" : "poor"}};
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

std::string witness_csv(const WitnessReport& r) {
  std::string s = "n,delta_n,K1,K2,ratio,mass,f_at_z0\n";
  for (const auto& w : r.rows)
    s += std::to_string(w.n) + "," + fmt(w.delta) + "," + fmt(w.k1) + "," + fmt(w.k2) + "," + fmt(w.ratio) + "," +
         fmt(w.mass) + "," + fmt(w.f_at_z0) + "\n";
  return s;
}

json witness_summary(const WitnessReport& r) {
  json rows = json::array();
  for (const auto& w : r.rows) rows.push_back({{"n", w.n}, {"chain_ok", w.chain_ok}, {"monotone_ok", w.monotone_ok}});
  return {{"all_ok", r.all_ok()},
          {"mass_tol", r.mass_tol},
          {"kernel_rel_tol", r.kernel_tol},
          {"containment_checked", r.containment_checked},
          {"gram", gram_to_json(r.gram)},
          {"rows", rows}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace pcvx3::io
