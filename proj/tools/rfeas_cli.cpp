// rfeas command-line front end. Links only the C interface.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfeas/rfeas.h"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;

// Failure carrying the message shown to the user; always exits 2.
struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(int status) {
  if (status != RFEAS_OK) {
    throw CliError(std::string(rfeas_status_name(status)) + ": " + rfeas_last_error());
  }
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Report text: at least 6 significant digits, still exact on re-parse.
std::string human(double v) {
  const std::string s = num(v);
  int digits = 0;
  bool leading = true;
  for (char c : s) {
    if (c == 'e') break;
    if (c < '0' || c > '9') continue;
    if (c != '0') leading = false;
    if (!leading) ++digits;
  }
  if (digits >= 6 || !std::isfinite(v)) return s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", v);
  return buf;
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using ProblemH = Handle<rfeas_problem, rfeas_problem_free>;
using RegionH = Handle<rfeas_region, rfeas_region_free>;
using PsiH = Handle<rfeas_psi, rfeas_psi_free>;
using BboxH = Handle<rfeas_bbox, rfeas_bbox_free>;
using BoundaryH = Handle<rfeas_boundary, rfeas_boundary_free>;
using FieldH = Handle<rfeas_field, rfeas_field_free>;
using SweepH = Handle<rfeas_sweep, rfeas_sweep_free>;
using CriticalH = Handle<rfeas_critical, rfeas_critical_free>;

struct Args {
  std::string builtin;
  std::string problem_file;
  std::string point;
  long long samples = -1;
  std::uint64_t seed = 0;
  int grid = 256;
  std::string method = "mc";
  int starts = 8;
  std::vector<std::string> vars;
  std::vector<std::string> ranges;
  std::string out;
  double tol = -1.0;
  unsigned threads = 0;
  bool json = false;
  std::string box;
  bool list = false;
  std::string emit;
};

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  if (b < e && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e) throw CliError("invalid number '" + text + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(' ') - b + 1);
}

// "a=1,b=2" → names and values, in the given order.
void parse_point(const std::string& text, std::vector<std::string>& names, std::vector<double>& values) {
  if (trim(text).empty()) return;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CliError("point entry '" + item + "' is not NAME=VALUE");
    const std::string name = trim(item.substr(0, eq));
    if (name.empty()) throw CliError("point entry '" + item + "' has no name");
    names.push_back(name);
    values.push_back(parse_number(item.substr(eq + 1), "--point"));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("Io: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
  out.close();
  if (!out) throw CliError("Io: cannot write '" + path + "'");
}

ProblemH load_problem(const Args& a) {
  if (a.builtin.empty() == a.problem_file.empty()) throw CliError("give exactly one of --builtin or --problem");
  rfeas_problem* p = nullptr;
  if (!a.builtin.empty()) {
    check(rfeas_problem_load_builtin(a.builtin.c_str(), &p));
  } else {
    const std::string text = read_file(a.problem_file);
    const int status = rfeas_problem_parse(text.c_str(), &p);
    if (status != RFEAS_OK) throw CliError(a.problem_file + ": " + rfeas_last_error());
  }
  ProblemH h(p);
  for (size_t i = 0; i < rfeas_problem_warning_count(p); ++i) {
    std::cerr << "warning: " << rfeas_problem_warning(p, i) << "\n";
  }
  return h;
}

rfeas_options solver_options(const Args& a) {
  rfeas_options o;
  rfeas_options_init(&o);
  o.seed = a.seed;
  o.threads = a.threads;
  return o;
}

RegionH make_region(const rfeas_problem* p, int mode, const Args& a) {
  const rfeas_options o = solver_options(a);
  rfeas_region* r = nullptr;
  check(rfeas_region_create(p, mode, &o, &r));
  return RegionH(r);
}

struct SamplingBox {
  std::vector<double> lo, hi;
};

// Region domain, or "--box lo:hi,lo:hi" in coordinate order.
SamplingBox sampling_box(const rfeas_region* r, const Args& a) {
  SamplingBox b;
  const size_t n = rfeas_region_dims(r);
  if (a.box.empty()) {
    b.lo.resize(n);
    b.hi.resize(n);
    for (size_t i = 0; i < n; ++i) rfeas_region_domain(r, i, &b.lo[i], &b.hi[i]);
    return b;
  }
  const auto parts = split(a.box, ',');
  if (parts.size() != n) {
    throw CliError("--box needs " + std::to_string(n) + " intervals, got " + std::to_string(parts.size()));
  }
  for (const auto& part : parts) {
    const auto ends = split(part, ':');
    if (ends.size() != 2) throw CliError("--box interval '" + part + "' is not lo:hi");
    b.lo.push_back(parse_number(ends[0], "--box"));
    b.hi.push_back(parse_number(ends[1], "--box"));
  }
  return b;
}

json box_json(const rfeas_region* r, const SamplingBox& b) {
  json out = json::array();
  for (size_t i = 0; i < b.lo.size(); ++i) {
    out.push_back({{"name", rfeas_region_coordinate(r, i)}, {"lo", b.lo[i]}, {"hi", b.hi[i]}});
  }
  return out;
}

void print_box(const rfeas_region* r, const SamplingBox& b) {
  for (size_t i = 0; i < b.lo.size(); ++i) {
    std::cout << "  " << rfeas_region_coordinate(r, i) << ": [" << human(b.lo[i]) << ", " << human(b.hi[i]) << "]\n";
  }
}

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_eval(const Args& a) {
  ProblemH p = load_problem(a);
  std::vector<std::string> names;
  std::vector<double> values;
  parse_point(a.point, names, values);
  std::vector<const char*> cnames;
  for (const auto& n : names) cnames.push_back(n.c_str());
  const rfeas_options o = solver_options(a);
  rfeas_psi* raw = nullptr;
  check(rfeas_psi_evaluate(p.get(), cnames.data(), values.data(), names.size(), &o, &raw));
  PsiH r(raw);
  const double tol = a.tol < 0.0 ? 1e-9 : a.tol;
  const double psi = rfeas_psi_value(r.get());
  const char* verdict = std::fabs(psi) <= tol ? "boundary" : (psi < 0.0 ? "feasible" : "infeasible");
  const bool closed = rfeas_psi_control_count(r.get()) > 0;

  if (rfeas_psi_outside_domain(r.get())) std::cerr << "warning: point lies outside the declared bounds\n";
  if (!rfeas_psi_converged(r.get())) std::cerr << "warning: inner minimization did not converge\n";

  if (a.json) {
    json j;
    j["command"] = "eval";
    j["problem"] = rfeas_problem_name(p.get());
    json pt = json::object();
    for (size_t i = 0; i < names.size(); ++i) pt[names[i]] = values[i];
    j["point"] = pt;
    j["psi"] = psi;
    j["verdict"] = verdict;
    j["tolerance"] = tol;
    j["active_constraint"] = rfeas_psi_active_label(r.get());
    json cs = json::array();
    for (size_t i = 0; i < rfeas_psi_constraint_count(r.get()); ++i) {
      cs.push_back({{"label", rfeas_psi_constraint_label(r.get(), i)}, {"value", rfeas_psi_constraint_value(r.get(), i)}});
    }
    j["constraints"] = cs;
    if (closed) {
      json z = json::object();
      for (size_t i = 0; i < rfeas_psi_control_count(r.get()); ++i) {
        z[rfeas_psi_control_name(r.get(), i)] = rfeas_psi_control_value(r.get(), i);
      }
      j["z_star"] = z;
    } else {
      j["z_star"] = nullptr;
    }
    j["converged"] = rfeas_psi_converged(r.get()) != 0;
    j["inner_evaluations"] = rfeas_psi_inner_evals(r.get());
    j["outside_domain"] = rfeas_psi_outside_domain(r.get()) != 0;
    emit_json(j);
  } else {
    std::cout << "problem: " << rfeas_problem_name(p.get()) << "\n";
    std::cout << "psi: " << human(psi) << "\n";
    std::cout << "verdict: " << verdict << "\n";
    if (closed) {
      for (size_t i = 0; i < rfeas_psi_control_count(r.get()); ++i) {
        std::cout << "z*: " << rfeas_psi_control_name(r.get(), i) << " = "
                  << human(rfeas_psi_control_value(r.get(), i)) << "\n";
      }
    }
    std::cout << "active constraint: " << rfeas_psi_active_label(r.get()) << "\n";
    std::cout << "constraints:\n";
    for (size_t i = 0; i < rfeas_psi_constraint_count(r.get()); ++i) {
      std::cout << "  " << rfeas_psi_constraint_label(r.get(), i) << ": "
                << human(rfeas_psi_constraint_value(r.get(), i)) << "\n";
    }
  }
  return std::string(verdict) == "infeasible" ? kExitInfeasible : kExitOk;
}

int cmd_volume(const Args& a) {
  ProblemH p = load_problem(a);
  RegionH r = make_region(p.get(), RFEAS_REGION_FEASIBILITY, a);
  const SamplingBox b = sampling_box(r.get(), a);
  const long long samples = a.samples < 0 ? 1000000 : a.samples;
  rfeas_volume_result v;
  check(rfeas_volume(r.get(), b.lo.data(), b.hi.data(), samples, a.seed, a.threads, &v));
  if (a.json) {
    json j;
    j["command"] = "volume";
    j["problem"] = rfeas_problem_name(p.get());
    j["volume"] = v.volume;
    j["std_error"] = v.std_error;
    j["hits"] = v.hits;
    j["samples"] = v.samples;
    j["seed"] = v.seed;
    j["box"] = box_json(r.get(), b);
    emit_json(j);
  } else {
    std::cout << "problem: " << rfeas_problem_name(p.get()) << "\n";
    std::cout << "volume: " << human(v.volume) << " +- " << human(v.std_error) << "\n";
    std::cout << "hits: " << v.hits << "\n";
    std::cout << "samples: " << v.samples << "\n";
    std::cout << "seed: " << v.seed << "\n";
    std::cout << "box:\n";
    print_box(r.get(), b);
  }
  return kExitOk;
}

int cmd_bbox(const Args& a) {
  ProblemH p = load_problem(a);
  RegionH r = make_region(p.get(), RFEAS_REGION_FEASIBILITY, a);
  const SamplingBox b = sampling_box(r.get(), a);
  rfeas_bbox* raw = nullptr;
  if (a.method == "mc") {
    check(rfeas_bbox_mc(r.get(), b.lo.data(), b.hi.data(), a.samples < 0 ? 1000000 : a.samples, a.seed, a.threads,
                        &raw));
  } else if (a.method == "opt") {
    check(rfeas_bbox_opt(r.get(), b.lo.data(), b.hi.data(), a.starts, a.samples < 0 ? 20000 : a.samples, a.seed,
                         a.threads, &raw));
  } else {
    throw CliError("--method must be mc or opt");
  }
  BboxH bb(raw);
  const size_t n = rfeas_bbox_dims(bb.get());
  if (a.json) {
    json j;
    j["command"] = "bbox";
    j["problem"] = rfeas_problem_name(p.get());
    j["method"] = rfeas_bbox_method(bb.get());
    json bounds = json::array();
    for (size_t i = 0; i < n; ++i) {
      double lo, hi;
      rfeas_bbox_bounds(bb.get(), i, &lo, &hi);
      bounds.push_back({{"name", rfeas_region_coordinate(r.get(), i)}, {"lo", lo}, {"hi", hi}});
    }
    j["bounds"] = bounds;
    j["samples"] = rfeas_bbox_samples(bb.get());
    j["hits"] = rfeas_bbox_hits(bb.get());
    j["evaluations"] = rfeas_bbox_evaluations(bb.get());
    j["seed"] = a.seed;
    if (a.method == "opt") {
      json ex = json::array();
      std::vector<double> x(n);
      for (size_t i = 0; i < rfeas_bbox_extremum_count(bb.get()); ++i) {
        double value, residual;
        rfeas_bbox_extremum(bb.get(), i, &value, &residual, x.data());
        ex.push_back({{"coordinate", rfeas_region_coordinate(r.get(), i / 2)},
                      {"direction", i % 2 == 0 ? "+" : "-"},
                      {"value", value},
                      {"residual", residual},
                      {"x", x}});
      }
      j["extrema"] = ex;
    }
    j["box"] = box_json(r.get(), b);
    emit_json(j);
  } else {
    std::cout << "problem: " << rfeas_problem_name(p.get()) << "\n";
    std::cout << "method: " << rfeas_bbox_method(bb.get()) << "\n";
    std::cout << "bounds:\n";
    for (size_t i = 0; i < n; ++i) {
      double lo, hi;
      rfeas_bbox_bounds(bb.get(), i, &lo, &hi);
      std::cout << "  " << rfeas_region_coordinate(r.get(), i) << ": [" << human(lo) << ", " << human(hi) << "]\n";
    }
    std::cout << "samples: " << rfeas_bbox_samples(bb.get()) << "\n";
    std::cout << "hits: " << rfeas_bbox_hits(bb.get()) << "\n";
    std::cout << "evaluations: " << rfeas_bbox_evaluations(bb.get()) << "\n";
    std::cout << "seed: " << a.seed << "\n";
    if (a.method == "opt") {
      std::cout << "residuals:\n";
      for (size_t i = 0; i < rfeas_bbox_extremum_count(bb.get()); ++i) {
        double value, residual;
        std::vector<double> x(n);
        rfeas_bbox_extremum(bb.get(), i, &value, &residual, x.data());
        std::cout << "  " << (i % 2 == 0 ? "+" : "-") << rfeas_region_coordinate(r.get(), i / 2) << ": "
                  << human(residual) << "\n";
      }
    }
  }
  return kExitOk;
}

std::string sidecar_path(const std::string& out, const std::string& from_ext, const std::string& to_ext) {
  if (out.size() > from_ext.size() && out.compare(out.size() - from_ext.size(), from_ext.size(), from_ext) == 0) {
    return out.substr(0, out.size() - from_ext.size()) + to_ext;
  }
  return out + to_ext;
}

std::string boundary_svg(const rfeas_boundary* bd, const SamplingBox& b) {
  const double w = 800.0;
  const double h = std::max(200.0, std::min(1600.0, w * (b.hi[1] - b.lo[1]) / (b.hi[0] - b.lo[0])));
  auto px = [&](double x) { return (x - b.lo[0]) / (b.hi[0] - b.lo[0]) * w; };
  auto py = [&](double y) { return (b.hi[1] - y) / (b.hi[1] - b.lo[1]) * h; };
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
  for (size_t i = 0; i < rfeas_boundary_polyline_count(bd); ++i) {
    s << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    const size_t n = rfeas_boundary_vertex_count(bd, i);
    const size_t total = rfeas_boundary_closed(bd, i) ? n + 1 : n;
    for (size_t k = 0; k < total; ++k) {
      double x, y;
      rfeas_boundary_vertex(bd, i, k % n, &x, &y);
      if (k) s << ' ';
      s << num(px(x)) << ',' << num(py(y));
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_boundary(const Args& a) {
  ProblemH p = load_problem(a);
  RegionH r = make_region(p.get(), RFEAS_REGION_FULL, a);
  if (rfeas_region_dims(r.get()) != 2) {
    throw CliError("DimensionMismatch: boundary needs exactly 2 free variables, problem has " +
                   std::to_string(rfeas_region_dims(r.get())));
  }
  const SamplingBox b = sampling_box(r.get(), a);
  const double tol = a.tol < 0.0 ? 1e-10 : a.tol;
  rfeas_boundary* raw = nullptr;
  check(rfeas_boundary_extract(r.get(), b.lo.data(), b.hi.data(), a.grid, tol, a.threads, &raw));
  BoundaryH bd(raw);

  std::ostringstream csv;
  csv << "polyline_id,vertex_id,x,y\n";
  for (size_t i = 0; i < rfeas_boundary_polyline_count(bd.get()); ++i) {
    for (size_t k = 0; k < rfeas_boundary_vertex_count(bd.get(), i); ++k) {
      double x, y;
      rfeas_boundary_vertex(bd.get(), i, k, &x, &y);
      csv << i << ',' << k << ',' << num(x) << ',' << num(y) << '\n';
    }
  }
  std::string svg_path;
  if (!a.out.empty()) {
    write_file(a.out, csv.str());
    svg_path = sidecar_path(a.out, ".csv", ".svg");
    write_file(svg_path, boundary_svg(bd.get(), b));
  }

  const size_t lines = rfeas_boundary_polyline_count(bd.get());
  size_t closed = 0;
  for (size_t i = 0; i < lines; ++i) closed += rfeas_boundary_closed(bd.get(), i) ? 1 : 0;
  if (a.json) {
    json j;
    j["command"] = "boundary";
    j["problem"] = rfeas_problem_name(p.get());
    j["x"] = rfeas_region_coordinate(r.get(), 0);
    j["y"] = rfeas_region_coordinate(r.get(), 1);
    j["grid"] = a.grid;
    j["tolerance"] = tol;
    j["max_residual"] = rfeas_boundary_max_residual(bd.get());
    json pl = json::array();
    for (size_t i = 0; i < lines; ++i) {
      json verts = json::array();
      for (size_t k = 0; k < rfeas_boundary_vertex_count(bd.get(), i); ++k) {
        double x, y;
        rfeas_boundary_vertex(bd.get(), i, k, &x, &y);
        verts.push_back({x, y});
      }
      pl.push_back({{"id", i}, {"closed", rfeas_boundary_closed(bd.get(), i) != 0}, {"vertices", verts}});
    }
    j["polylines"] = pl;
    j["box"] = box_json(r.get(), b);
    if (!a.out.empty()) {
      j["csv"] = a.out;
      j["svg"] = svg_path;
    }
    emit_json(j);
  } else if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::cout << "problem: " << rfeas_problem_name(p.get()) << "\n";
    std::cout << "polylines: " << lines << " (" << closed << " closed)\n";
    std::cout << "max residual: " << human(rfeas_boundary_max_residual(bd.get())) << "\n";
    std::cout << "csv: " << a.out << "\n";
    std::cout << "svg: " << svg_path << "\n";
  }
  return kExitOk;
}

// Diverging palette: white at 0, blue for positive (inside), red for negative.
std::array<unsigned char, 3> palette(double v, double scale) {
  static constexpr double kPos[3] = {33, 102, 172};
  static constexpr double kNeg[3] = {178, 24, 43};
  const double t = scale > 0.0 ? std::min(1.0, std::fabs(v) / scale) : 0.0;
  const double* end = v >= 0.0 ? kPos : kNeg;
  std::array<unsigned char, 3> c{};
  for (int k = 0; k < 3; ++k) c[k] = static_cast<unsigned char>(std::lround(255.0 + t * (end[k] - 255.0)));
  return c;
}

int cmd_heatmap(const Args& a) {
  ProblemH p = load_problem(a);
  if (a.out.empty()) throw CliError("heatmap needs --out");
  RegionH r = make_region(p.get(), RFEAS_REGION_FULL, a);
  if (rfeas_region_dims(r.get()) != 2) {
    throw CliError("DimensionMismatch: heatmap needs exactly 2 free variables, problem has " +
                   std::to_string(rfeas_region_dims(r.get())));
  }
  const SamplingBox b = sampling_box(r.get(), a);
  rfeas_field* raw = nullptr;
  check(rfeas_field_compute(r.get(), b.lo.data(), b.hi.data(), a.grid, a.grid, a.threads, &raw));
  FieldH f(raw);
  const int nx = rfeas_field_nx(f.get());
  const int ny = rfeas_field_ny(f.get());
  const double* vals = rfeas_field_values(f.get());
  double vmin = vals[0], vmax = vals[0];
  for (int i = 0; i < nx * ny; ++i) {
    vmin = std::min(vmin, vals[i]);
    vmax = std::max(vmax, vals[i]);
  }
  const double scale = std::max(std::fabs(vmin), std::fabs(vmax));

  std::string ppm = "P6\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
  for (int row = 0; row < ny; ++row) {
    const int iy = ny - 1 - row;  // top row is the highest y
    for (int ix = 0; ix < nx; ++ix) {
      const auto c = palette(vals[static_cast<size_t>(iy) * nx + ix], scale);
      ppm.append(reinterpret_cast<const char*>(c.data()), 3);
    }
  }
  write_file(a.out, ppm);
  const std::string side = a.out + ".txt";
  std::ostringstream s;
  s << "format: P6 " << nx << "x" << ny << ", row 0 = highest " << rfeas_region_coordinate(r.get(), 1) << "\n";
  s << "x: " << rfeas_region_coordinate(r.get(), 0) << " [" << human(b.lo[0]) << ", " << human(b.hi[0]) << "]\n";
  s << "y: " << rfeas_region_coordinate(r.get(), 1) << " [" << human(b.lo[1]) << ", " << human(b.hi[1]) << "]\n";
  s << "pixels: value of R at cell centers\n";
  s << "value range: [" << human(vmin) << ", " << human(vmax) << "]\n";
  s << "color: linear from white (255,255,255) at R = 0\n";
  s << "  to (33,102,172) at R = +" << human(scale) << " (inside)\n";
  s << "  to (178,24,43) at R = -" << human(scale) << " (outside)\n";
  write_file(side, s.str());

  if (a.json) {
    json j;
    j["command"] = "heatmap";
    j["problem"] = rfeas_problem_name(p.get());
    j["width"] = nx;
    j["height"] = ny;
    j["x"] = rfeas_region_coordinate(r.get(), 0);
    j["y"] = rfeas_region_coordinate(r.get(), 1);
    j["min"] = vmin;
    j["max"] = vmax;
    j["scale"] = scale;
    j["box"] = box_json(r.get(), b);
    j["image"] = a.out;
    j["sidecar"] = side;
    emit_json(j);
  } else {
    std::cout << "problem: " << rfeas_problem_name(p.get()) << "\n";
    std::cout << "image: " << a.out << " (" << nx << "x" << ny << ")\n";
    std::cout << "value range: [" << human(vmin) << ", " << human(vmax) << "]\n";
    std::cout << "sidecar: " << side << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const Args& a) {
  ProblemH p = load_problem(a);
  if (a.vars.empty()) throw CliError("sweep needs --var");
  if (a.vars.size() != a.ranges.size()) throw CliError("give one --range per --var");
  std::vector<const char*> axis;
  std::vector<double> lo, hi, step;
  for (size_t k = 0; k < a.vars.size(); ++k) {
    axis.push_back(a.vars[k].c_str());
    const auto parts = split(a.ranges[k], ':');
    if (parts.size() != 3) throw CliError("--range '" + a.ranges[k] + "' is not lo:hi:step");
    lo.push_back(parse_number(parts[0], "--range"));
    hi.push_back(parse_number(parts[1], "--range"));
    step.push_back(parse_number(parts[2], "--range"));
  }
  std::vector<std::string> fnames;
  std::vector<double> fvalues;
  parse_point(a.point, fnames, fvalues);
  std::vector<const char*> cf;
  for (const auto& n : fnames) cf.push_back(n.c_str());
  const rfeas_options o = solver_options(a);
  rfeas_sweep* raw = nullptr;
  check(rfeas_sweep_run(p.get(), axis.data(), lo.data(), hi.data(), step.data(), axis.size(), cf.data(),
                        fvalues.data(), cf.size(), &o, &raw));
  SweepH s(raw);
  const size_t rows = rfeas_sweep_rows(s.get());
  const size_t nc = rfeas_sweep_control_count(s.get());
  for (size_t i = 0; i < rows; ++i) {
    if (!rfeas_sweep_converged(s.get(), i)) std::cerr << "warning: row " << i << " did not converge\n";
  }

  std::ostringstream csv;
  for (size_t k = 0; k < axis.size(); ++k) csv << axis[k] << ',';
  csv << "psi";
  for (size_t c = 0; c < nc; ++c) csv << ',' << rfeas_sweep_control_name(s.get(), c) << '*';
  csv << ",active_label\n";
  for (size_t i = 0; i < rows; ++i) {
    for (size_t k = 0; k < axis.size(); ++k) csv << num(rfeas_sweep_x(s.get(), i, k)) << ',';
    csv << num(rfeas_sweep_psi(s.get(), i));
    for (size_t c = 0; c < nc; ++c) csv << ',' << num(rfeas_sweep_control_value(s.get(), i, c));
    csv << ',' << rfeas_sweep_active_label(s.get(), i) << '\n';
  }
  if (!a.out.empty()) write_file(a.out, csv.str());

  if (a.json) {
    json j;
    j["command"] = "sweep";
    j["problem"] = rfeas_problem_name(p.get());
    j["axes"] = a.vars;
    json fixed = json::object();
    for (size_t i = 0; i < fnames.size(); ++i) fixed[fnames[i]] = fvalues[i];
    j["fixed"] = fixed;
    json out = json::array();
    for (size_t i = 0; i < rows; ++i) {
      json row;
      json x = json::object();
      for (size_t k = 0; k < axis.size(); ++k) x[axis[k]] = rfeas_sweep_x(s.get(), i, k);
      row["x"] = x;
      row["psi"] = rfeas_sweep_psi(s.get(), i);
      if (nc) {
        json z = json::object();
        for (size_t c = 0; c < nc; ++c) z[rfeas_sweep_control_name(s.get(), c)] = rfeas_sweep_control_value(s.get(), i, c);
        row["z_star"] = z;
      } else {
        row["z_star"] = nullptr;
      }
      row["active_label"] = rfeas_sweep_active_label(s.get(), i);
      row["converged"] = rfeas_sweep_converged(s.get(), i) != 0;
      out.push_back(row);
    }
    j["rows"] = out;
    if (!a.out.empty()) j["csv"] = a.out;
    emit_json(j);
  } else if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::cout << "rows: " << rows << "\ncsv: " << a.out << "\n";
  }
  return kExitOk;
}

int cmd_critical(const Args& a) {
  ProblemH p = load_problem(a);
  const rfeas_options o = solver_options(a);
  rfeas_critical* raw = nullptr;
  check(rfeas_critical_search(p.get(), &o, &raw));
  CriticalH c(raw);
  const size_t n = rfeas_critical_dims(c.get());
  if (!rfeas_critical_converged(c.get())) std::cerr << "warning: search did not converge\n";
  if (a.json) {
    json j;
    j["command"] = "critical";
    j["problem"] = rfeas_problem_name(p.get());
    json x = json::object();
    for (size_t i = 0; i < n; ++i) x[rfeas_critical_name(c.get(), i)] = rfeas_critical_x(c.get(), i);
    j["x_star"] = x;
    j["psi_max"] = rfeas_critical_psi(c.get());
    json ties = json::array();
    for (size_t t = 0; t < rfeas_critical_tie_count(c.get()); ++t) {
      json tx = json::object();
      for (size_t i = 0; i < n; ++i) tx[rfeas_critical_name(c.get(), i)] = rfeas_critical_tie_x(c.get(), t, i);
      ties.push_back({{"x", tx}, {"psi", rfeas_critical_tie_psi(c.get(), t)}});
    }
    j["ties"] = ties;
    j["converged"] = rfeas_critical_converged(c.get()) != 0;
    j["evaluations"] = rfeas_critical_evaluations(c.get());
    emit_json(j);
  } else {
    std::cout << "problem: " << rfeas_problem_name(p.get()) << "\n";
    std::cout << "critical point:";
    for (size_t i = 0; i < n; ++i) {
      std::cout << (i ? ", " : " ") << rfeas_critical_name(c.get(), i) << " = " << human(rfeas_critical_x(c.get(), i));
    }
    std::cout << "\npsi max: " << human(rfeas_critical_psi(c.get())) << "\n";
    if (rfeas_critical_tie_count(c.get()) > 1) {
      std::cout << "ties:\n";
      for (size_t t = 0; t < rfeas_critical_tie_count(c.get()); ++t) {
        std::cout << " ";
        for (size_t i = 0; i < n; ++i) {
          std::cout << " " << rfeas_critical_name(c.get(), i) << " = " << human(rfeas_critical_tie_x(c.get(), t, i));
        }
        std::cout << "  psi = " << human(rfeas_critical_tie_psi(c.get(), t)) << "\n";
      }
    }
    std::cout << "evaluations: " << rfeas_critical_evaluations(c.get()) << "\n";
  }
  return kExitOk;
}

int cmd_builtin(const Args& a) {
  if (a.list == !a.emit.empty()) throw CliError("builtin needs exactly one of --list or --emit NAME");
  if (a.list) {
    if (a.json) {
      json names = json::array();
      for (size_t i = 0; i < rfeas_builtin_count(); ++i) names.push_back(rfeas_builtin_name(i));
      emit_json({{"command", "builtin"}, {"builtins", names}});
    } else {
      for (size_t i = 0; i < rfeas_builtin_count(); ++i) std::cout << rfeas_builtin_name(i) << "\n";
    }
    return kExitOk;
  }
  const char* text = nullptr;
  check(rfeas_builtin_text(a.emit.c_str(), &text));
  if (!a.out.empty()) write_file(a.out, text);
  if (a.json) {
    emit_json({{"command", "builtin"}, {"name", a.emit}, {"text", text}});
  } else if (a.out.empty()) {
    std::cout << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasibility analysis of constraint sets with R-functions", "rfeas"};
  app.require_subcommand(1);
  Args a;

  auto add_source = [&](CLI::App* c) {
    c->add_option("--builtin", a.builtin, "Built-in problem name");
    c->add_option("--problem", a.problem_file, "Problem file");
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", a.seed, "Random seed");
    c->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
    c->add_flag("--json", a.json, "Machine-readable output");
  };

  auto* eval = app.add_subcommand("eval", "Feasibility function at a point");
  add_source(eval);
  add_common(eval);
  eval->add_option("--point", a.point, "NAME=VALUE,... for the uncertain parameters");
  eval->add_option("--tol", a.tol, "Boundary tolerance (default 1e-9)");

  auto* volume = app.add_subcommand("volume", "Monte Carlo volume of the feasible region");
  add_source(volume);
  add_common(volume);
  volume->add_option("--samples", a.samples, "Sample count (default 1000000)");
  volume->add_option("--box", a.box, "Sampling box lo:hi,lo:hi,...");

  auto* bbox = app.add_subcommand("bbox", "Axis-aligned bounding box of the feasible region");
  add_source(bbox);
  add_common(bbox);
  bbox->add_option("--method", a.method, "mc or opt")->check(CLI::IsMember({"mc", "opt"}));
  bbox->add_option("--samples", a.samples, "Samples (mc default 1000000, opt start pool default 20000)");
  bbox->add_option("--starts", a.starts, "Starts per direction for opt");
  bbox->add_option("--box", a.box, "Sampling box lo:hi,lo:hi,...");

  auto* boundary = app.add_subcommand("boundary", "Zero contour of a 2-D region as CSV and SVG");
  add_source(boundary);
  add_common(boundary);
  boundary->add_option("--grid", a.grid, "Cells per axis (default 256)");
  boundary->add_option("--tol", a.tol, "Vertex residual tolerance (default 1e-10)");
  boundary->add_option("--out", a.out, "CSV path; the SVG goes next to it");
  boundary->add_option("--box", a.box, "Plot box lo:hi,lo:hi");

  auto* heatmap = app.add_subcommand("heatmap", "Binary PPM heatmap of R over a 2-D region");
  add_source(heatmap);
  add_common(heatmap);
  heatmap->add_option("--grid", a.grid, "Pixels per axis (default 256)");
  heatmap->add_option("--out", a.out, "PPM path")->required();
  heatmap->add_option("--box", a.box, "Plot box lo:hi,lo:hi");

  auto* sw = app.add_subcommand("sweep", "Feasibility function over a grid of parameter values");
  add_source(sw);
  add_common(sw);
  sw->add_option("--var", a.vars, "Swept parameter (repeatable)");
  sw->add_option("--range", a.ranges, "lo:hi:step for each --var");
  sw->add_option("--point", a.point, "Fixed values for the other parameters");
  sw->add_option("--out", a.out, "CSV path (default stdout)");

  auto* critical = app.add_subcommand("critical", "Worst-case parameter values");
  add_source(critical);
  add_common(critical);

  auto* builtin = app.add_subcommand("builtin", "List or print built-in problems");
  builtin->add_flag("--list", a.list, "List names");
  builtin->add_option("--emit", a.emit, "Print a problem file");
  builtin->add_option("--out", a.out, "Write the problem file here");
  builtin->add_flag("--json", a.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*eval) return cmd_eval(a);
    if (*volume) return cmd_volume(a);
    if (*bbox) return cmd_bbox(a);
    if (*boundary) return cmd_boundary(a);
    if (*heatmap) return cmd_heatmap(a);
    if (*sw) return cmd_sweep(a);
    if (*critical) return cmd_critical(a);
    if (*builtin) return cmd_builtin(a);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
