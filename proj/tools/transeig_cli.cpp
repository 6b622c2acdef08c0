// Command line driver: symbolic tables, eigenvalue searches and experiments.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "transeig/errors.hpp"
#include "transeig/harness.hpp"
#include "transeig/parametrix.hpp"

using namespace transeig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

constexpr const char* kProblemSchema = R"(problem config, one of
  {"n1": {"radius": R, "coeffs": [c0, c1, ...]}, "n2": {"radius": R, "coeffs": [...]}}
  {"base": {"radius": R, "coeffs": [...]}, "amplitude": c, "order": j}
where n(r) = sum_t coeffs[t] r^(2t) must be positive on [0, R].)";

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

roots::DiskProblem read_problem(const std::string& path) {
  try {
    return roots::DiskProblem::from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

radial::ContactFamily read_family(const std::string& path) {
  try {
    return radial::ContactFamily::from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int parse_mmax(const std::string& text) {
  if (text == "auto") return -1;
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size() && v >= 0) return v;
  } catch (const std::logic_error&) {
  }
  throw ParseError("--mmax must be 'auto' or a non-negative integer, got '" + text + "'");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

// Summary JSON goes next to the CSV: eigs.csv -> eigs.json.
void emit_summary(const std::string& csv_path, const nlohmann::json& j) {
  std::string text = j.dump(2) + "\n";
  if (csv_path.empty() || csv_path == "-") {
    std::cerr << text;
    return;
  }
  std::filesystem::path p(csv_path);
  emit(p.replace_extension(".json").string(), text);
}

// ---------------------------------------------------------------------------

int run_symbols(int order, const std::string& format, const std::string& out) {
  if (order < 1) throw ParseError("--order must be >= 1");
  parametrix::ParametrixTables t = parametrix::build_tables(order);
  bool eik_ok = true, tr_ok = true;
  std::string eik_msg, tr_msg;
  try {
    parametrix::eikonal_residual(t.eikonal);
  } catch (const RecursionBug& e) {
    eik_ok = false;
    eik_msg = e.what();
  }
  try {
    parametrix::transport_residual(t.eikonal, t.transport);
  } catch (const RecursionBug& e) {
    tr_ok = false;
    tr_msg = e.what();
  }
  parametrix::CheckReport ndep = parametrix::verify_n_dependence(t);
  parametrix::CheckReport cs = parametrix::verify_c_constants(t, order);
  parametrix::DegreeReport deg = parametrix::degree_report(t);
  const bool passed = eik_ok && tr_ok && ndep.passed() && cs.passed() && deg.passed();

  auto failures_json = [](const std::vector<parametrix::IdentityFailure>& fs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& f : fs) a.push_back({{"identity", f.identity}, {"k", f.k}, {"j", f.j}, {"l", f.l}, {"detail", f.detail}});
    return a;
  };

  if (format == "json") {
    nlohmann::json phi = nlohmann::json::object(), a = nlohmann::json::object();
    for (int k = 1; k <= t.eikonal.order; ++k) phi[std::to_string(k)] = t.eikonal.at(k).to_string();
    for (const auto& [kj, e] : t.transport.a) a[std::to_string(kj.first) + "," + std::to_string(kj.second)] = e.to_string();
    nlohmann::json degree = nlohmann::json::array();
    for (const auto& d : deg.entries) degree.push_back({{"name", d.name}, {"minExponent", d.min_exponent}, {"bound", d.bound}});
    nlohmann::json j = {
        {"order", order},
        {"phi", phi},
        {"a", a},
        {"dn", t.dn.to_string()},
        {"checks",
         {{"eikonalResidual", {{"passed", eik_ok}, {"detail", eik_msg}}},
          {"transportResidual", {{"passed", tr_ok}, {"detail", tr_msg}}},
          {"nDependence", {{"checked", ndep.checked}, {"failures", failures_json(ndep.failures)}}},
          {"cConstants", {{"checked", cs.checked}, {"failures", failures_json(cs.failures)}}},
          {"degree", {{"entries", degree}, {"failures", failures_json(deg.failures)}}},
          {"passed", passed}}}};
    emit(out, j.dump(2) + "\n");
  } else if (format == "text") {
    std::ostringstream os;
    for (int k = 1; k <= t.eikonal.order; ++k) os << "phi_" << k << " = " << t.eikonal.at(k).to_string() << "\n";
    for (const auto& [kj, e] : t.transport.a) {
      os << "a_{" << kj.first << "," << kj.second << "} = " << e.to_string() << "\n";
    }
    os << "dn = " << t.dn.to_string() << "\n";
    os << "check eikonal residual: " << (eik_ok ? "ok" : "FAILED " + eik_msg) << "\n";
    os << "check transport residual: " << (tr_ok ? "ok" : "FAILED " + tr_msg) << "\n";
    os << "check n-dependence: " << ndep.checked << " identities, " << ndep.failures.size() << " failures\n";
    os << "check c_s constants: " << cs.checked << " identities, " << cs.failures.size() << " failures\n";
    for (const auto& d : deg.entries) os << "degree " << d.name << ": " << d.min_exponent << " >= " << d.bound << "\n";
    os << "checks " << (passed ? "passed" : "FAILED") << "\n";
    emit(out, os.str());
  } else {
    throw ParseError("--format must be text or json");
  }
  return passed ? kExitOk : kExitFailed;
}

int run_roots(const std::string& config, const std::string& re, const std::string& im, const std::string& mmax,
              int jobs, const std::string& out) {
  roots::DiskProblem p = read_problem(config);
  roots::Box region = roots::Box::from_ranges(re, im);
  int m_max = parse_mmax(mmax);
  if (m_max < 0) m_max = roots::auto_mode_limit(p, region);
  roots::SearchOptions opt;
  opt.jobs = jobs;
  roots::SearchResult res = roots::find_eigenvalues(p, region, m_max, opt);
  emit(out, roots::records_csv(res.records));
  int counted = 0, weighted = 0;
  bool residuals = true;
  for (int c : res.mode_counts) counted += c;
  for (const auto& r : res.records) {
    weighted += r.multiplicity;
    residuals = residuals && r.residual <= opt.newton_tol;
  }
  std::cerr << res.records.size() << " eigenvalues over modes 0.." << m_max << ", winding total " << counted
            << ", unresolved boxes " << res.unresolved.size() << "\n";
  return (!res.partial() && residuals && counted == weighted) ? kExitOk : kExitFailed;
}

int run_scan(const std::string& family, double re_max, double im_max, const std::string& mmax, int jobs,
             const std::string& out) {
  radial::ContactFamily f = read_family(family);
  harness::ScanOptions opt;
  opt.m_max = parse_mmax(mmax);
  opt.search.jobs = jobs;
  harness::RegionScanResult r = harness::scan_free_region(f, re_max, im_max, opt);
  emit(out, roots::records_csv(r.records));
  emit_summary(out, harness::summary_json(r));
  return (r.violations.empty() && !r.partial) ? kExitOk : kExitFailed;
}

int run_strip(const std::string& config, const std::string& re, const std::string& cal, double im_max,
              const std::string& mmax, int jobs, const std::string& out) {
  roots::DiskProblem p = read_problem(config);
  roots::Box w = roots::Box::from_ranges(re, cal);  // reuse the a:b parser
  harness::StripOptions opt;
  opt.im_max = im_max;
  opt.m_max = parse_mmax(mmax);
  opt.search.jobs = jobs;
  harness::StripReport r = harness::strip_check(p, {w.re_min, w.re_max}, {w.im_min, w.im_max}, opt);
  emit(out, roots::records_csv(r.records));
  emit_summary(out, harness::summary_json(r));
  return r.passed() ? kExitOk : kExitFailed;
}

int run_count(const std::string& config, double c0, double r_max, double im_max, const std::string& mmax, int jobs,
              double tolerance, const std::string& out) {
  roots::DiskProblem p = read_problem(config);
  harness::CountingOptions opt;
  opt.im_max = im_max;
  opt.m_max = parse_mmax(mmax);
  opt.search.jobs = jobs;
  harness::CountingResult r = harness::weyl_count(p, c0, r_max, opt);
  emit(out, harness::staircase_csv(r));
  emit_summary(out, harness::summary_json(r));
  bool ok = r.monotone() && !r.partial && (tolerance <= 0.0 || r.rel_err_at_rmax <= tolerance);
  return ok ? kExitOk : kExitFailed;
}

int run_selftest() {
  bool all = true;
  for (const auto& [name, ok] : harness::selftest()) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    all = all && ok;
  }
  return all ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission eigenvalue workbench"};
  app.require_subcommand(1);

  int order = 3;
  std::string format = "text";
  std::string out;
  auto* symbols = app.add_subcommand("symbols", "Parametrix tables and their exact checks");
  symbols->add_option("--order", order, "Transport order s")->capture_default_str();
  symbols->add_option("--format", format, "text or json")->capture_default_str();
  symbols->add_option("--out", out, "Output path (default stdout)");

  std::string config, re = "0.5:60", im = "-12:12", mmax = "auto";
  int jobs = 1;
  auto* rootsc = app.add_subcommand("roots", "Enumerate eigenvalues in a box");
  rootsc->add_option("--config", config, "Problem JSON")->required();
  rootsc->add_option("--re", re, "Re lambda range a:b")->capture_default_str();
  rootsc->add_option("--im", im, "Im lambda range a:b")->capture_default_str();
  rootsc->add_option("--mmax", mmax, "Largest angular mode, or auto")->capture_default_str();
  rootsc->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  rootsc->add_option("--out", out, "CSV path (default stdout)");

  std::string family;
  double re_max = 80.0, im_max = 12.0;
  auto* scan = app.add_subcommand("scan", "Parabolic eigenvalue-free region scan for a contact family");
  scan->add_option("--family", family, "Contact family JSON")->required();
  scan->add_option("--re-max", re_max, "Largest Re lambda")->capture_default_str();
  scan->add_option("--im-max", im_max, "Largest |Im lambda|")->capture_default_str();
  scan->add_option("--mmax", mmax, "Largest angular mode, or auto")->capture_default_str();
  scan->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  scan->add_option("--out", out, "CSV path; the summary goes to the same stem with .json");

  std::string re_window = "20:60", cal_window = "5:20";
  auto* strip = app.add_subcommand("strip", "Strip check for a non-degenerate pair");
  strip->add_option("--config", config, "Problem JSON")->required();
  strip->add_option("--re", re_window, "Checked Re lambda window a:b")->capture_default_str();
  strip->add_option("--cal", cal_window, "Calibration Re lambda window a:b")->capture_default_str();
  strip->add_option("--im-max", im_max, "Largest |Im lambda|")->capture_default_str();
  strip->add_option("--mmax", mmax, "Largest angular mode, or auto")->capture_default_str();
  strip->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  strip->add_option("--out", out, "CSV path; the summary goes to the same stem with .json");

  double c0 = 0.5, r_max = 40.0, count_im = 0.0, tolerance = 0.0;
  auto* count = app.add_subcommand("count", "Weyl counting staircase");
  count->add_option("--config", config, "Problem JSON")->required();
  count->add_option("--c0", c0, "Lower cutoff on |lambda|")->capture_default_str();
  count->add_option("--rmax", r_max, "Upper cutoff on |lambda|")->capture_default_str();
  count->add_option("--im-max", count_im, "Largest |Im lambda| searched (0 = min(rmax, 30))")->capture_default_str();
  count->add_option("--mmax", mmax, "Largest angular mode, or auto")->capture_default_str();
  count->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  count->add_option("--tolerance", tolerance, "Fail if relErrAtRmax exceeds this (0 = report only)");
  count->add_option("--out", out, "CSV path; the summary goes to the same stem with .json");

  auto* selftest = app.add_subcommand("selftest", "Quick internal checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*symbols) return run_symbols(order, format, out);
    if (*rootsc) return run_roots(config, re, im, mmax, jobs, out);
    if (*scan) return run_scan(family, re_max, im_max, mmax, jobs, out);
    if (*strip) return run_strip(config, re_window, cal_window, im_max, mmax, jobs, out);
    if (*count) return run_count(config, c0, r_max, count_im, mmax, jobs, tolerance, out);
    if (*selftest) return run_selftest();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << kProblemSchema << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
