// movelab: command-line surface over the measure laboratory. Every subcommand
// builds one report object; --json dumps it verbatim and the table renderer
// reads the same strings, so both modes show identical numbers.
//
// Exit codes: 0 computed, 1 boolean verdict is false, 2 usage, 3 numeric/size.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "movelab/determinantal.hpp"
#include "movelab/domination.hpp"
#include "movelab/extraction.hpp"
#include "movelab/families.hpp"
#include "movelab/measure.hpp"
#include "movelab/measure_io.hpp"
#include "movelab/tolerance.hpp"

namespace {

using namespace movelab;
using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  double tol = 1e-9;
  bool json = false;
  unsigned long long seed = 0;  // reserved for randomized sweeps
  int ncap = 0;                 // 0 = keep MOVELAB_NCAP / defaults
};

template <class T>
std::string fmt(const T& v) {
  if constexpr (scalar_traits<T>::exact)
    return rat_to_string(v);
  else
    return double_to_string(v);
}

// CLI rate/probability arguments accept "1/3", "0.25", "9e-1"; float-mode
// measures get the nearest double of the parsed rational.
template <class T>
T scalar_from_string(const std::string& s) {
  Rat q = rat_from_string(s);
  if constexpr (scalar_traits<T>::exact)
    return q;
  else
    return q.get_d();
}

const char* yesno(bool b) { return b ? "yes" : "no"; }

template <class T>
const char* mode_name() {
  return scalar_traits<T>::exact ? "exact" : "float";
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

ordered_json doc_json(const AnyMeasure& m) { return ordered_json::parse(measure_to_json(m)); }
ordered_json doc_json(const AnySigned& v) { return ordered_json::parse(signed_to_json(v)); }

// Measures print as their file document, so stdout pipes back into the tools.
void emit_measure(const AnyMeasure& m, const std::string& out) {
  if (out.empty())
    std::cout << measure_to_json(m);
  else
    write_measure_file(out, m);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrKind::ParseError, "cannot write " + path);
  f << text;
}

// ---------------------------------------------------------------- analyze --

template <class T>
ordered_json analyze_report(const BasicMeasure<T>& mu, const RunConfig& rc) {
  ordered_json rep;
  rep["command"] = "analyze";
  rep["n"] = mu.sites();
  rep["mode"] = mode_name<T>();
  const bool upset = support_is_up_set(mu);
  rep["support_is_up_set"] = upset;

  const auto tr = insertion_tolerance(mu);
  ordered_json tj;
  tj["insertion"] = fmt(tr.insertion);
  tj["insertion_witness"] = {
      {"site", tr.insertion_witness.site},
      {"rest", config_to_bitstring(tr.insertion_witness.rest, mu.sites() - 1)}};
  tj["deletion"] = fmt(tr.deletion);
  tj["deletion_witness"] = {
      {"site", tr.deletion_witness.site},
      {"rest", config_to_bitstring(tr.deletion_witness.rest, mu.sites() - 1)}};
  tj["finite_energy"] = fmt(tr.finite_energy);
  rep["tolerance"] = tj;

  const T& ones = mu[mu.ground().full_mask()];
  ordered_json dj;
  dj["all_ones_mass"] = fmt(ones);
  dj["rigid"] = ones > 0;
  try {
    const auto rig = rigidity(mu, rc.tol);
    dj["p_max"] = fmt(rig.p_max);
    // movability radius of (pi_{p_max - tol}, mu): tiny when rigid
    dj["probe_radius"] = fmt(rig.sup_eps_down);
  } catch (const Error& e) {
    if (e.kind() != ErrKind::SizeExceeded) throw;
    dj["p_max"] = nullptr;
    dj["note"] = std::string("skipped: ") + e.what();
  }
  rep["domination"] = dj;

  if constexpr (scalar_traits<T>::exact) {
    ordered_json ej;
    ej["up"] = fmt(max_extract_eps(mu, ExtractDirection::up, rc.tol));
    ej["down"] = fmt(max_extract_eps(mu, ExtractDirection::down, rc.tol));
    ej["both"] = fmt(max_extract_eps(mu, ExtractDirection::both, rc.tol));
    rep["max_extract_eps"] = ej;
  } else {
    rep["max_extract_eps"] = nullptr;
    rep["extraction_note"] =
        "rates need exact mode: float entries cannot certify signs at the boundary";
  }

  ordered_json pj;
  pj["I_uniformly_upwards_extractable"] = upset;
  pj["II_uniformly_insertion_tolerant"] = tr.insertion > 0;
  pj["III_rigid"] = ones > 0;
  pj["IV_dominates_some_product"] = ones > 0;
  rep["properties"] = pj;
  rep["equivalences"] = {"(I) <=> (II) <=> supp(mu) is an up-set",
                         "(III) <=> (IV) <=> mu(all-ones) > 0"};
  return rep;
}

void print_analyze_table(const ordered_json& r) {
  std::cout << "n: " << r["n"] << "   mode: " << r["mode"].get<std::string>() << "\n";
  std::cout << "support is an up-set: " << yesno(r["support_is_up_set"].get<bool>()) << "\n";
  const auto& t = r["tolerance"];
  std::cout << "insertion tolerance: " << t["insertion"].get<std::string>() << "   (site "
            << t["insertion_witness"]["site"] << ", rest \""
            << t["insertion_witness"]["rest"].get<std::string>() << "\")\n";
  std::cout << "deletion tolerance:  " << t["deletion"].get<std::string>() << "   (site "
            << t["deletion_witness"]["site"] << ", rest \""
            << t["deletion_witness"]["rest"].get<std::string>() << "\")\n";
  std::cout << "finite energy:       " << t["finite_energy"].get<std::string>() << "\n";
  const auto& d = r["domination"];
  std::cout << "all-ones mass: " << d["all_ones_mass"].get<std::string>() << "\n";
  if (d["p_max"].is_null())
    std::cout << "p_max: " << d["note"].get<std::string>() << "\n";
  else
    std::cout << "p_max: " << d["p_max"].get<std::string>()
              << "   probe radius: " << d["probe_radius"].get<std::string>() << "\n";
  std::cout << "rigid: " << yesno(d["rigid"].get<bool>()) << "\n";
  if (r["max_extract_eps"].is_null()) {
    std::cout << "max extraction rates: n/a (" << r["extraction_note"].get<std::string>()
              << ")\n";
  } else {
    const auto& e = r["max_extract_eps"];
    std::cout << "max extraction rate up:   " << e["up"].get<std::string>() << "\n";
    std::cout << "max extraction rate down: " << e["down"].get<std::string>() << "\n";
    std::cout << "max extraction rate both: " << e["both"].get<std::string>() << "\n";
  }
  const auto& p = r["properties"];
  std::cout << "properties:\n";
  std::cout << "  (I)   uniformly upwards extractable: "
            << yesno(p["I_uniformly_upwards_extractable"].get<bool>()) << "\n";
  std::cout << "  (II)  uniformly insertion tolerant:  "
            << yesno(p["II_uniformly_insertion_tolerant"].get<bool>()) << "\n";
  std::cout << "  (III) rigid:                         " << yesno(p["III_rigid"].get<bool>())
            << "\n";
  std::cout << "  (IV)  dominates some pi_p, p > 0:    "
            << yesno(p["IV_dominates_some_product"].get<bool>()) << "\n";
  for (const auto& line : r["equivalences"]) std::cout << "  " << line.get<std::string>() << "\n";
}

// --------------------------------------------------------------- dominate --

template <class T>
int run_dominate(const BasicMeasure<T>& m1, const BasicMeasure<T>& m2, const RunConfig& rc,
                 bool want_down, bool want_up, const std::string& cert_path) {
  const auto cert = dominates(m1, m2);
  const int n = m1.sites();

  ordered_json rep, cj;
  rep["command"] = "dominate";
  rep["mode"] = mode_name<T>();
  rep["dominated"] = cert.dominated;
  cj["dominated"] = cert.dominated;
  cj["n"] = n;
  cj["mode"] = mode_name<T>();
  if (cert.dominated) {
    rep["coupling_pairs"] = cert.coupling.size();
    if (want_down) rep["sup_eps_down"] = fmt(sup_eps_down(m1, m2, rc.tol));
    if (want_up) rep["sup_eps_up"] = fmt(sup_eps_up(m1, m2, rc.tol));
    ordered_json pairs = ordered_json::array();
    for (const auto& [lo, hi, mass] : cert.coupling)
      pairs.push_back({config_to_bitstring(lo, n), config_to_bitstring(hi, n), fmt(mass)});
    cj["coupling"] = std::move(pairs);
  } else {
    T margin = scalar_traits<T>::zero();
    ordered_json vio = ordered_json::array();
    for (Config c : cert.violator.members) {
      margin += m1[c] - m2[c];
      vio.push_back(config_to_bitstring(c, n));
    }
    rep["violator_size"] = cert.violator.members.size();
    rep["margin"] = fmt(margin);
    rep["violator"] = vio;
    cj["violator"] = std::move(vio);
    cj["margin"] = fmt(margin);
  }
  if (!cert_path.empty()) {
    write_text_file(cert_path, cj.dump(2) + "\n");
    rep["certificate_file"] = cert_path;
  }

  if (rc.json) {
    print_json(rep);
  } else {
    std::cout << "mu1 <= mu2: " << yesno(cert.dominated) << "\n";
    if (cert.dominated) {
      std::cout << "coupling pairs: " << cert.coupling.size() << "\n";
      if (want_down)
        std::cout << "sup eps down: " << rep["sup_eps_down"].get<std::string>() << "\n";
      if (want_up) std::cout << "sup eps up: " << rep["sup_eps_up"].get<std::string>() << "\n";
    } else {
      std::cout << "violating up-set (" << rep["violator_size"] << " configurations), margin "
                << rep["margin"].get<std::string>() << ":\n";
      for (const auto& b : rep["violator"]) std::cout << "  " << b.get<std::string>() << "\n";
    }
    if (!cert_path.empty()) std::cout << "certificate written to " << cert_path << "\n";
  }
  return cert.dominated ? 0 : 1;
}

// ---------------------------------------------------------------- extract --

template <class T>
int run_extract(const BasicMeasure<T>& mu, const RunConfig& rc, ExtractDirection dir,
                const std::string& eps_s, bool want_max, const std::string& out) {
  ordered_json rep;
  rep["command"] = "extract";
  rep["mode"] = mode_name<T>();
  rep["direction"] = direction_name(dir);

  T eps;
  if (want_max) {
    const T star = max_extract_eps(mu, dir, rc.tol);  // exact mode only
    rep["max_eps"] = fmt(star);
    rep["max_eps_approx"] = double_to_string(to_double(star));
    eps = star / 2;
  } else {
    eps = scalar_from_string<T>(eps_s);
  }
  rep["eps"] = fmt(eps);

  const SignedVector<T> sv = extract(mu, dir, eps);
  const bool nn = sv.is_nonnegative();
  rep["nonnegative"] = nn;
  if (nn) {
    AnyMeasure m = sv.to_measure();
    rep["result"] = doc_json(m);
    if (!out.empty()) write_measure_file(out, m);
  } else {
    AnySigned v = sv;
    rep["result"] = doc_json(v);
    if (!out.empty()) write_signed_file(out, v);
  }
  if (!out.empty()) rep["written"] = out;

  if (rc.json) {
    print_json(rep);
  } else {
    std::cout << "direction: " << rep["direction"].get<std::string>() << "\n";
    if (want_max)
      std::cout << "max extraction rate: " << rep["max_eps"].get<std::string>() << " (approx "
                << rep["max_eps_approx"].get<std::string>() << ")\n";
    std::cout << "eps: " << rep["eps"].get<std::string>() << "\n";
    std::cout << "nonnegative (genuine measure): " << yesno(nn) << "\n";
    if (out.empty())
      std::cout << rep["result"].dump(2) << "\n";
    else
      std::cout << "written to " << out << "\n";
  }
  return nn ? 0 : 1;
}

// ----------------------------------------------------------------- family --

MeasureQ exchangeable_from_counts(const CountDistribution<Rat>& cd) {
  GroundSet g(cd.n());
  std::vector<Rat> probs(g.space_size());
  for (Config c = 0; c < probs.size(); ++c) {
    int k = popcount(c);
    probs[c] = cd[k] / Rat(binomial_coeff(static_cast<unsigned long>(cd.n()),
                                          static_cast<unsigned long>(k)));
  }
  return MeasureQ(std::move(g), std::move(probs));
}

// Families that emit several measures print them under one object in json
// mode and as labeled documents in table mode, unless files were requested.
int emit_named(const RunConfig& rc,
               const std::vector<std::tuple<std::string, AnyMeasure, std::string>>& items) {
  bool all_to_files = true;
  for (const auto& [name, m, out] : items) {
    if (!out.empty())
      write_measure_file(out, m);
    else
      all_to_files = false;
  }
  if (all_to_files) return 0;
  if (items.size() == 1) {
    emit_measure(std::get<1>(items.front()), "");
    return 0;
  }
  if (rc.json) {
    ordered_json rep;
    for (const auto& [name, m, out] : items) rep[name] = doc_json(m);
    print_json(rep);
  } else {
    for (const auto& [name, m, out] : items) {
      std::cout << name << ":\n";
      std::cout << measure_to_json(m);
    }
  }
  return 0;
}

// -------------------------------------------------------------------- det --

int run_det(const RunConfig& rc, const std::string& spec, int window, bool gm, bool hm,
            bool want_fourier, int fourier_k, const std::vector<long long>& ones,
            const std::string& out) {
  const KernelFunction f = KernelFunction::parse(spec);
  ordered_json rep;
  rep["command"] = "det";
  rep["kernel"] = spec;
  bool any = false;

  if (window > 0) {
    any = true;
    AnyMeasure w = window_measure(f, window);
    rep["window"] = doc_json(w);
    if (!out.empty()) {
      write_measure_file(out, w);
      rep["written"] = out;
    }
  }
  if (gm) {
    any = true;
    rep["geometric_mean"] = double_to_string(geometric_mean(f));
  }
  if (hm) {
    any = true;
    rep["harmonic_mean"] = double_to_string(harmonic_mean(f));
  }
  if (want_fourier) {
    any = true;
    const std::complex<double> z = fourier_coefficient(f, fourier_k);
    rep["fourier"] = {{"k", fourier_k},
                      {"re", double_to_string(z.real())},
                      {"im", double_to_string(z.imag())}};
  }
  if (!ones.empty()) {
    any = true;
    ordered_json pts = ordered_json::array();
    for (long long p : ones) pts.push_back(p);
    rep["ones_points"] = pts;
    rep["ones_probability"] = double_to_string(ones_probability(f, ones));
  }
  if (!any) {
    // no action flags: describe the parsed kernel
    ordered_json pieces = ordered_json::array();
    for (const auto& pc : f.pieces()) {
      ordered_json coeffs = ordered_json::array();
      for (const auto& c : pc.coeffs) coeffs.push_back(rat_to_string(c));
      pieces.push_back(
          {{"lo", rat_to_string(pc.lo)}, {"hi", rat_to_string(pc.hi)}, {"coeffs", coeffs}});
    }
    rep["pieces"] = pieces;
    rep["has_gap"] = f.has_gap();
  }

  if (rc.json) {
    print_json(rep);
    return 0;
  }
  if (rep.contains("window")) std::cout << rep["window"].dump(2) << "\n";
  if (rep.contains("written")) std::cout << "window written to " << out << "\n";
  if (gm) std::cout << "geometric mean: " << rep["geometric_mean"].get<std::string>() << "\n";
  if (hm) std::cout << "harmonic mean: " << rep["harmonic_mean"].get<std::string>() << "\n";
  if (want_fourier)
    std::cout << "fourier coefficient k=" << fourier_k << ": "
              << rep["fourier"]["re"].get<std::string>() << " + "
              << rep["fourier"]["im"].get<std::string>() << "i\n";
  if (!ones.empty())
    std::cout << "ones probability: " << rep["ones_probability"].get<std::string>() << "\n";
  if (!any) std::cout << rep.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "movelab: exact laboratory for stochastic domination, movability, tolerance,\n"
      "and extraction of measures on {0,1}^n. Measure files are JSON documents\n"
      "{n, mode, entries: [[bitstring, value], ...]}; site 0 is the leftmost bit."};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig rc;
  app.add_option("--tol", rc.tol, "bisection tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--json", rc.json, "emit one JSON report instead of a table");
  app.add_option("--seed", rc.seed, "seed for randomized sweeps")->capture_default_str();
  app.add_option("--ncap", rc.ncap, "override site caps (same as env MOVELAB_NCAP)")
      ->check(CLI::Range(1, 26));

  auto* cmd_an = app.add_subcommand(
      "analyze", "tolerance, rigidity, extraction rates, and the property vector (I)-(IV)");
  std::string an_file;
  cmd_an->add_option("file", an_file, "measure file")->required();

  auto* cmd_dom = app.add_subcommand("dominate", "decide mu1 <= mu2; exit 1 when not dominated");
  std::string dom_file1, dom_file2, dom_cert;
  bool dom_down = false, dom_up = false;
  cmd_dom->add_option("file1", dom_file1, "lower measure file")->required();
  cmd_dom->add_option("file2", dom_file2, "upper measure file")->required();
  cmd_dom->add_flag("--sup-eps-down", dom_down, "largest eps with mu1 <= mu2^(-,eps)");
  cmd_dom->add_flag("--sup-eps-up", dom_up, "largest eps with mu1^(+,eps) <= mu2");
  cmd_dom->add_option("--certificate", dom_cert, "write coupling/violator JSON here");

  auto* cmd_noise = app.add_subcommand("noise", "push a measure through the noise channel");
  std::string noise_file, noise_down = "0", noise_up = "0", noise_out;
  cmd_noise->add_option("file", noise_file, "measure file")->required();
  cmd_noise->add_option("--down", noise_down, "per-site 1->0 rate")->capture_default_str();
  cmd_noise->add_option("--up", noise_up, "per-site 0->1 rate")->capture_default_str();
  cmd_noise->add_option("-o,--out", noise_out, "output file (default: print document)");

  auto* cmd_ex = app.add_subcommand(
      "extract", "invert the noise channel: find nu with nu^(channel) = mu; exit 1 if signed");
  std::string ex_file, ex_dir = "up", ex_eps, ex_out;
  bool ex_max = false;
  cmd_ex->add_option("file", ex_file, "measure file")->required();
  cmd_ex->add_option("--direction", ex_dir, "up | down | both")
      ->check(CLI::IsMember({"up", "down", "both"}))
      ->capture_default_str();
  auto* ex_eps_opt = cmd_ex->add_option("--eps", ex_eps, "extraction rate");
  cmd_ex->add_flag("--max", ex_max, "find the largest feasible rate, then extract at half of it")
      ->excludes(ex_eps_opt);
  cmd_ex->add_option("-o,--out", ex_out, "output file (default: print document)");

  auto* cmd_fam = app.add_subcommand("family", "construct the worked measure families");
  cmd_fam->require_subcommand(1);

  auto* fam_hajek = cmd_fam->add_subcommand("hajek", "parity block: even-count levels doubled");
  int hajek_k = 2;
  std::string hajek_out;
  fam_hajek->add_option("--k", hajek_k, "sites")->required();
  fam_hajek->add_option("-o,--out", hajek_out, "output file");

  auto* fam_blocks = cmd_fam->add_subcommand(
      "blocks", "rigid-but-not-tolerant block: thin singletons, heavy all-ones");
  int blocks_k = 2;
  std::string blocks_base = "1/2", blocks_out;
  fam_blocks->add_option("--k", blocks_k, "sites")->required();
  fam_blocks->add_option("--base", blocks_base, "all-ones mass is 1 - base^k")
      ->capture_default_str();
  fam_blocks->add_option("-o,--out", blocks_out, "output file");

  auto* fam_mix = cmd_fam->add_subcommand(
      "mixture", "dominated pair nu = (pi_q + delta_0)/2, mu = (pi_p + delta_0)/2");
  std::string mix_p, mix_q, mix_out_nu, mix_out_mu;
  int mix_n = 2;
  fam_mix->add_option("--p", mix_p, "upper product level")->required();
  fam_mix->add_option("--q", mix_q, "lower product level")->required();
  fam_mix->add_option("--n", mix_n, "sites")->required();
  fam_mix->add_option("--out-nu", mix_out_nu, "output file for nu");
  fam_mix->add_option("--out-mu", mix_out_mu, "output file for mu");

  auto* fam_pairs = cmd_fam->add_subcommand(
      "pairs", "locked adjacent pairs: even/odd pairings and their mixture");
  int pairs_n = 4;
  std::string pairs_out_even, pairs_out_odd, pairs_out_mixed;
  fam_pairs->add_option("--n", pairs_n, "sites (even, >= 4)")->required();
  fam_pairs->add_option("--out-even", pairs_out_even, "output file for the even pairing");
  fam_pairs->add_option("--out-odd", pairs_out_odd, "output file for the odd pairing");
  fam_pairs->add_option("--out-mixed", pairs_out_mixed, "output file for the mixture");

  auto* fam_cb = cmd_fam->add_subcommand(
      "condbin", "binomial count law conditioned on count >= m");
  int cb_k = 2, cb_m = 0;
  std::string cb_p, cb_out;
  fam_cb->add_option("--k", cb_k, "sites")->required();
  fam_cb->add_option("--p", cb_p, "success probability")->required();
  fam_cb->add_option("--m", cb_m, "conditioning threshold")->capture_default_str();
  fam_cb->add_option("-o,--out", cb_out, "write the exchangeable measure expansion here");

  auto* cmd_det = app.add_subcommand(
      "det",
      "determinantal windows for a piecewise-polynomial kernel on [0,1].\n"
      "Grammar: terms joined by ';', each an optional '[lo,hi]' domain prefix plus\n"
      "'const:p' | 'indicator:a,b:height' | 'poly:c0,c1,...'; numbers are rationals\n"
      "or decimals. Example: \"[0,0.5]poly:0,1;[0.5,1]const:0.5\"");
  std::string det_spec, det_out;
  int det_window = 0, det_fourier_k = 0;
  bool det_gm = false, det_hm = false;
  std::vector<long long> det_ones;
  cmd_det->add_option("--f", det_spec, "kernel spec")->required();
  cmd_det->add_option("--window", det_window, "emit the window measure on n sites")
      ->check(CLI::PositiveNumber);
  cmd_det->add_flag("--gm", det_gm, "geometric mean exp(integral log f)");
  cmd_det->add_flag("--hm", det_hm, "harmonic mean 1/(integral 1/f)");
  auto* det_four_opt = cmd_det->add_option("--fourier", det_fourier_k, "fourier coefficient");
  cmd_det->add_option("--ones", det_ones, "P(all ones) at these window points")
      ->delimiter(',');
  cmd_det->add_option("-o,--out", det_out, "output file for --window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (rc.ncap >= 1) setenv("MOVELAB_NCAP", std::to_string(rc.ncap).c_str(), 1);

  try {
    if (*cmd_an) {
      const AnyMeasure m = read_measure_file(an_file);
      return std::visit(
          [&](const auto& mm) {
            ordered_json rep = analyze_report(mm, rc);
            rep["file"] = an_file;
            if (rc.json)
              print_json(rep);
            else
              print_analyze_table(rep);
            return 0;
          },
          m);
    }

    if (*cmd_dom) {
      const AnyMeasure a = read_measure_file(dom_file1);
      const AnyMeasure b = read_measure_file(dom_file2);
      if (is_exact(a) != is_exact(b))
        fail(ErrKind::ModeMismatch, "dominate needs both files in the same mode");
      return std::visit(
          [&](const auto& m1) {
            using M = std::decay_t<decltype(m1)>;
            return run_dominate(m1, std::get<M>(b), rc, dom_down, dom_up, dom_cert);
          },
          a);
    }

    if (*cmd_noise) {
      const AnyMeasure m = read_measure_file(noise_file);
      std::visit(
          [&](const auto& mm) {
            using T = std::decay_t<decltype(mm[0])>;
            NoiseChannel<T> ch(scalar_from_string<T>(noise_down),
                               scalar_from_string<T>(noise_up));
            emit_measure(apply_channel(mm, ch), noise_out);
          },
          m);
      return 0;
    }

    if (*cmd_ex) {
      if (!ex_max && ex_eps.empty()) {
        std::cerr << "extract: need --eps or --max\n";
        return 2;
      }
      const ExtractDirection dir = ex_dir == "up"     ? ExtractDirection::up
                                   : ex_dir == "down" ? ExtractDirection::down
                                                      : ExtractDirection::both;
      const AnyMeasure m = read_measure_file(ex_file);
      return std::visit(
          [&](const auto& mm) { return run_extract(mm, rc, dir, ex_eps, ex_max, ex_out); }, m);
    }

    if (*fam_hajek)
      return emit_named(rc, {{"hajek", hajek_block<Rat>(hajek_k), hajek_out}});

    if (*fam_blocks)
      return emit_named(
          rc, {{"blocks", nonrigid_block<Rat>(blocks_k, rat_from_string(blocks_base)),
                blocks_out}});

    if (*fam_mix) {
      auto [nu, mu] =
          mixture_example<Rat>(rat_from_string(mix_p), rat_from_string(mix_q), mix_n);
      return emit_named(rc, {{"nu", std::move(nu), mix_out_nu}, {"mu", std::move(mu), mix_out_mu}});
    }

    if (*fam_pairs) {
      auto [even, odd, mixed] = paired_doubling<Rat>(pairs_n);
      return emit_named(rc, {{"even", std::move(even), pairs_out_even},
                             {"odd", std::move(odd), pairs_out_odd},
                             {"mixed", std::move(mixed), pairs_out_mixed}});
    }

    if (*fam_cb) {
      const auto cd = conditioned_binomial<Rat>(cb_k, rat_from_string(cb_p), cb_m);
      ordered_json rep;
      rep["command"] = "condbin";
      rep["k"] = cb_k;
      rep["p"] = rat_to_string(rat_from_string(cb_p));
      rep["m"] = cb_m;
      ordered_json counts = ordered_json::array();
      for (int j = 0; j <= cd.n(); ++j) counts.push_back(rat_to_string(cd[j]));
      rep["counts"] = counts;
      if (!cb_out.empty()) {
        write_measure_file(cb_out, exchangeable_from_counts(cd));
        rep["written"] = cb_out;
      }
      if (rc.json) {
        print_json(rep);
      } else {
        for (int j = 0; j <= cd.n(); ++j)
          std::cout << "P(count = " << j << ") = " << rep["counts"][j].get<std::string>() << "\n";
        if (!cb_out.empty()) std::cout << "measure written to " << cb_out << "\n";
      }
      return 0;
    }

    if (*cmd_det)
      return run_det(rc, det_spec, det_window, det_gm, det_hm, det_four_opt->count() > 0,
                     det_fourier_k, det_ones, det_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
