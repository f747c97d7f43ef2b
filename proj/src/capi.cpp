#include "rfeas/rfeas.h"

#include <cmath>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "rfeas/builtins.hpp"
#include "rfeas/dsl.hpp"
#include "rfeas/error.hpp"
#include "rfeas/region.hpp"
#include "rfeas/solver.hpp"

using namespace rfeas;

struct rfeas_problem {
  Problem problem;
  std::string emitted;
};

struct rfeas_region {
  ImplicitFunction fn;
};

struct rfeas_psi {
  PsiEval eval;
  std::vector<std::string> control_names;
  std::vector<double> control_values;
};

struct rfeas_bbox {
  BoundingBox box;
  std::vector<DirectionExtremum> extrema;
};

struct rfeas_boundary {
  Boundary2D b;
};

struct rfeas_field {
  GridField g;
};

struct rfeas_sweep {
  SweepResult result;
  std::vector<std::string> controls;
};

struct rfeas_critical {
  CriticalResult result;
  std::vector<std::string> names;
};

namespace {

thread_local std::string g_error;
thread_local int g_line = 0;
thread_local int g_column = 0;

template <class F>
int guarded(F&& body) {
  g_line = 0;
  g_column = 0;
  try {
    body();
    g_error.clear();
    return RFEAS_OK;
  } catch (const SyntaxError& e) {
    g_error = e.what();
    g_line = e.line();
    g_column = e.column();
    return static_cast<int>(e.code());
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return RFEAS_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return RFEAS_INTERNAL;
  } catch (...) {
    g_error = "unknown failure";
    return RFEAS_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

SolverOptions to_solver(const rfeas_options* o) {
  SolverOptions s;
  if (!o) return s;
  s.coarse_grid_per_dim = o->coarse_grid_per_dim;
  s.multistart_count = o->multistart_count;
  s.z_tolerance = o->z_tolerance;
  s.value_tolerance = o->value_tolerance;
  s.max_inner_evals = o->max_inner_evals;
  s.seed = o->seed;
  s.threads = o->threads;
  s.check();
  return s;
}

Box box_for(const rfeas_region* r, const double* lo, const double* hi) {
  require((lo == nullptr) == (hi == nullptr), "lo and hi must both be given or both be NULL");
  if (!lo) return r->fn.domain;
  Box b;
  b.lo.assign(lo, lo + r->fn.dims());
  b.hi.assign(hi, hi + r->fn.dims());
  return b;
}

template <class T>
const char* str_at(const std::vector<T>& v, std::size_t i) {
  return i < v.size() ? v[i].c_str() : nullptr;
}

}  // namespace

extern "C" {

void rfeas_options_init(rfeas_options* opts) {
  if (!opts) return;
  const SolverOptions s;
  opts->coarse_grid_per_dim = s.coarse_grid_per_dim;
  opts->multistart_count = s.multistart_count;
  opts->z_tolerance = s.z_tolerance;
  opts->value_tolerance = s.value_tolerance;
  opts->max_inner_evals = s.max_inner_evals;
  opts->seed = s.seed;
  opts->threads = s.threads;
}

const char* rfeas_last_error(void) { return g_error.c_str(); }

void rfeas_last_error_position(int* line, int* column) {
  if (line) *line = g_line;
  if (column) *column = g_column;
}

const char* rfeas_status_name(int status) { return error_code_name(static_cast<ErrorCode>(status)); }

size_t rfeas_builtin_count(void) { return builtin_names().size(); }

const char* rfeas_builtin_name(size_t index) { return str_at(builtin_names(), index); }

int rfeas_builtin_text(const char* name, const char** text) {
  return guarded([&] {
    require(name && text, "null argument");
    *text = builtin_text(name).data();
  });
}

int rfeas_problem_parse(const char* text, rfeas_problem** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new rfeas_problem{parse_problem(text), {}};
  });
}

int rfeas_problem_load_builtin(const char* name, rfeas_problem** out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = new rfeas_problem{load_builtin(name), {}};
  });
}

void rfeas_problem_free(rfeas_problem* p) { delete p; }

const char* rfeas_problem_name(const rfeas_problem* p) { return p->problem.name.c_str(); }

double rfeas_problem_alpha(const rfeas_problem* p) { return p->problem.alpha; }

int rfeas_problem_has_controls(const rfeas_problem* p) { return p->problem.has_controls() ? 1 : 0; }

size_t rfeas_problem_variable_count(const rfeas_problem* p) { return p->problem.variables.size(); }

const char* rfeas_problem_variable_name(const rfeas_problem* p, size_t i) {
  return i < p->problem.variables.size() ? p->problem.variables[i].name.c_str() : nullptr;
}

int rfeas_problem_variable_role(const rfeas_problem* p, size_t i) {
  if (i >= p->problem.variables.size()) return -1;
  return static_cast<int>(p->problem.variables[i].role);
}

void rfeas_problem_variable_bounds(const rfeas_problem* p, size_t i, double* lo, double* hi) {
  if (i >= p->problem.variables.size()) return;
  const VariableSpec& v = p->problem.variables[i];
  const bool design = v.role == Role::Design;
  if (lo) *lo = design ? v.fixed_value : v.lo;
  if (hi) *hi = design ? v.fixed_value : v.hi;
}

size_t rfeas_problem_constraint_count(const rfeas_problem* p) { return p->problem.constraints.size(); }

const char* rfeas_problem_constraint_label(const rfeas_problem* p, size_t i) {
  return i < p->problem.constraints.size() ? p->problem.constraints[i].label.c_str() : nullptr;
}

size_t rfeas_problem_warning_count(const rfeas_problem* p) { return p->problem.warnings.size(); }

const char* rfeas_problem_warning(const rfeas_problem* p, size_t i) { return str_at(p->problem.warnings, i); }

const char* rfeas_problem_emit(rfeas_problem* p) {
  p->emitted = emit_problem(p->problem);
  return p->emitted.c_str();
}

int rfeas_psi_evaluate(const rfeas_problem* p, const char* const* names, const double* values, size_t count,
                       const rfeas_options* opts, rfeas_psi** out) {
  return guarded([&] {
    require(p && out && (count == 0 || (names && values)), "null argument");
    Env x;
    for (size_t i = 0; i < count; ++i) {
      require(names[i] != nullptr, "null variable name");
      const VariableSpec* v = p->problem.find(names[i]);
      if (!v) throw Error(ErrorCode::UnknownVariable, std::string("unknown variable '") + names[i] + "'");
      if (v->role != Role::Uncertain) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("variable '") + names[i] + "' is not an uncertain parameter");
      }
      if (!x.emplace(names[i], values[i]).second) {
        throw Error(ErrorCode::InvalidArgument, std::string("variable '") + names[i] + "' given twice");
      }
    }
    const SolverOptions s = to_solver(opts);
    const RegionExpr region = build_region(p->problem);
    auto r = std::make_unique<rfeas_psi>();
    r->eval = evaluate_psi(p->problem, region, x, s);
    if (r->eval.z_star) {
      for (const auto& [n, v] : *r->eval.z_star) {
        r->control_names.push_back(n);
        r->control_values.push_back(v);
      }
    }
    *out = r.release();
  });
}

void rfeas_psi_free(rfeas_psi* r) { delete r; }
double rfeas_psi_value(const rfeas_psi* r) { return r->eval.psi; }
int rfeas_psi_converged(const rfeas_psi* r) { return r->eval.converged ? 1 : 0; }
long rfeas_psi_inner_evals(const rfeas_psi* r) { return r->eval.inner_evals; }
int rfeas_psi_outside_domain(const rfeas_psi* r) { return r->eval.outside_domain ? 1 : 0; }
const char* rfeas_psi_active_label(const rfeas_psi* r) { return r->eval.active_label.c_str(); }
size_t rfeas_psi_constraint_count(const rfeas_psi* r) { return r->eval.per_constraint.size(); }

const char* rfeas_psi_constraint_label(const rfeas_psi* r, size_t i) {
  return i < r->eval.per_constraint.size() ? r->eval.per_constraint[i].first.c_str() : nullptr;
}

double rfeas_psi_constraint_value(const rfeas_psi* r, size_t i) {
  return i < r->eval.per_constraint.size() ? r->eval.per_constraint[i].second : NAN;
}

size_t rfeas_psi_control_count(const rfeas_psi* r) { return r->control_names.size(); }
const char* rfeas_psi_control_name(const rfeas_psi* r, size_t i) { return str_at(r->control_names, i); }

double rfeas_psi_control_value(const rfeas_psi* r, size_t i) {
  return i < r->control_values.size() ? r->control_values[i] : NAN;
}

int rfeas_region_create(const rfeas_problem* p, int mode, const rfeas_options* opts, rfeas_region** out) {
  return guarded([&] {
    require(p && out, "null argument");
    require(mode == RFEAS_REGION_FULL || mode == RFEAS_REGION_FEASIBILITY, "unknown region mode");
    const SolverOptions s = to_solver(opts);
    auto r = std::make_unique<rfeas_region>();
    r->fn = mode == RFEAS_REGION_FULL ? region_function(p->problem) : feasibility_function(p->problem, s);
    *out = r.release();
  });
}

void rfeas_region_free(rfeas_region* r) { delete r; }
size_t rfeas_region_dims(const rfeas_region* r) { return r->fn.dims(); }
const char* rfeas_region_coordinate(const rfeas_region* r, size_t i) { return str_at(r->fn.names, i); }

void rfeas_region_domain(const rfeas_region* r, size_t i, double* lo, double* hi) {
  if (i >= r->fn.dims()) return;
  if (lo) *lo = r->fn.domain.lo[i];
  if (hi) *hi = r->fn.domain.hi[i];
}

int rfeas_region_value(const rfeas_region* r, const double* x, size_t n, double* out) {
  return guarded([&] {
    require(r && x && out, "null argument");
    if (n != r->fn.dims()) throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension");
    *out = r->fn(std::span<const double>(x, n));
  });
}

int rfeas_classify(const rfeas_region* r, const double* x, size_t n, double tol, int* membership) {
  return guarded([&] {
    require(r && x && membership, "null argument");
    switch (classify(r->fn, std::span<const double>(x, n), tol)) {
      case Membership::Feasible: *membership = RFEAS_FEASIBLE; break;
      case Membership::Infeasible: *membership = RFEAS_INFEASIBLE; break;
      case Membership::Boundary: *membership = RFEAS_BOUNDARY; break;
    }
  });
}

int rfeas_volume(const rfeas_region* r, const double* lo, const double* hi, long long samples, uint64_t seed,
                 unsigned threads, rfeas_volume_result* out) {
  return guarded([&] {
    require(r && out, "null argument");
    const VolumeEstimate v = mc_volume(r->fn, box_for(r, lo, hi), samples, seed, threads);
    out->volume = v.volume;
    out->std_error = v.std_error;
    out->samples = v.samples;
    out->hits = v.hits;
    out->seed = v.seed;
  });
}

int rfeas_bbox_mc(const rfeas_region* r, const double* lo, const double* hi, long long samples, uint64_t seed,
                  unsigned threads, rfeas_bbox** out) {
  return guarded([&] {
    require(r && out, "null argument");
    auto b = std::make_unique<rfeas_bbox>();
    b->box = mc_bbox(r->fn, box_for(r, lo, hi), samples, seed, threads);
    *out = b.release();
  });
}

int rfeas_bbox_opt(const rfeas_region* r, const double* lo, const double* hi, int starts, long long start_samples,
                   uint64_t seed, unsigned threads, rfeas_bbox** out) {
  return guarded([&] {
    require(r && out, "null argument");
    OptBoxOptions o;
    o.starts_per_direction = starts;
    o.start_samples = start_samples;
    o.seed = seed;
    o.threads = threads;
    OptBoxResult res = opt_bbox(r->fn, box_for(r, lo, hi), o);
    auto b = std::make_unique<rfeas_bbox>();
    b->box = std::move(res.box);
    b->extrema = std::move(res.extrema);
    *out = b.release();
  });
}

void rfeas_bbox_free(rfeas_bbox* b) { delete b; }
size_t rfeas_bbox_dims(const rfeas_bbox* b) { return b->box.lo.size(); }

void rfeas_bbox_bounds(const rfeas_bbox* b, size_t i, double* lo, double* hi) {
  if (i >= b->box.lo.size()) return;
  if (lo) *lo = b->box.lo[i];
  if (hi) *hi = b->box.hi[i];
}

const char* rfeas_bbox_method(const rfeas_bbox* b) { return b->box.method.c_str(); }
long long rfeas_bbox_samples(const rfeas_bbox* b) { return b->box.samples; }
long long rfeas_bbox_hits(const rfeas_bbox* b) { return b->box.hits; }
long long rfeas_bbox_evaluations(const rfeas_bbox* b) { return b->box.evaluations; }
size_t rfeas_bbox_extremum_count(const rfeas_bbox* b) { return b->extrema.size(); }

void rfeas_bbox_extremum(const rfeas_bbox* b, size_t i, double* value, double* residual, double* x) {
  if (i >= b->extrema.size()) return;
  const DirectionExtremum& e = b->extrema[i];
  if (value) *value = e.value;
  if (residual) *residual = e.residual;
  if (x) {
    for (size_t k = 0; k < e.x.size(); ++k) x[k] = e.x[k];
  }
}

int rfeas_boundary_extract(const rfeas_region* r, const double* lo, const double* hi, int grid, double tol,
                           unsigned threads, rfeas_boundary** out) {
  return guarded([&] {
    require(r && out, "null argument");
    auto b = std::make_unique<rfeas_boundary>();
    if (r->fn.dims() != 2) {
      throw Error(ErrorCode::DimensionMismatch, "boundary extraction needs exactly 2 free variables, got " +
                                                    std::to_string(r->fn.dims()));
    }
    b->b = boundary_2d(r->fn, box_for(r, lo, hi), grid, tol, threads);
    *out = b.release();
  });
}

void rfeas_boundary_free(rfeas_boundary* b) { delete b; }
size_t rfeas_boundary_polyline_count(const rfeas_boundary* b) { return b->b.polylines.size(); }

int rfeas_boundary_closed(const rfeas_boundary* b, size_t i) {
  return i < b->b.closed.size() && b->b.closed[i] ? 1 : 0;
}

size_t rfeas_boundary_vertex_count(const rfeas_boundary* b, size_t i) {
  return i < b->b.polylines.size() ? b->b.polylines[i].size() : 0;
}

void rfeas_boundary_vertex(const rfeas_boundary* b, size_t i, size_t k, double* x, double* y) {
  if (i >= b->b.polylines.size() || k >= b->b.polylines[i].size()) return;
  if (x) *x = b->b.polylines[i][k][0];
  if (y) *y = b->b.polylines[i][k][1];
}

double rfeas_boundary_max_residual(const rfeas_boundary* b) { return b->b.max_residual; }

int rfeas_field_compute(const rfeas_region* r, const double* lo, const double* hi, int nx, int ny,
                        unsigned threads, rfeas_field** out) {
  return guarded([&] {
    require(r && out, "null argument");
    if (r->fn.dims() != 2) {
      throw Error(ErrorCode::DimensionMismatch, "grid field needs exactly 2 free variables, got " +
                                                    std::to_string(r->fn.dims()));
    }
    auto f = std::make_unique<rfeas_field>();
    f->g = grid_field(r->fn, box_for(r, lo, hi), nx, ny, threads);
    *out = f.release();
  });
}

void rfeas_field_free(rfeas_field* f) { delete f; }
int rfeas_field_nx(const rfeas_field* f) { return f->g.nx; }
int rfeas_field_ny(const rfeas_field* f) { return f->g.ny; }
const double* rfeas_field_values(const rfeas_field* f) { return f->g.values.data(); }

int rfeas_sweep_run(const rfeas_problem* p, const char* const* axis_names, const double* lo, const double* hi,
                    const double* step, size_t axes, const char* const* fixed_names, const double* fixed_values,
                    size_t fixed, const rfeas_options* opts, rfeas_sweep** out) {
  return guarded([&] {
    require(p && out && (axes == 0 || (axis_names && lo && hi && step)), "null argument");
    require(fixed == 0 || (fixed_names && fixed_values), "null argument");
    std::vector<SweepAxis> ax;
    for (size_t k = 0; k < axes; ++k) {
      require(axis_names[k] != nullptr, "null axis name");
      ax.push_back({axis_names[k], lo[k], hi[k], step[k]});
    }
    Env fx;
    for (size_t i = 0; i < fixed; ++i) {
      require(fixed_names[i] != nullptr, "null variable name");
      const VariableSpec* v = p->problem.find(fixed_names[i]);
      if (!v) throw Error(ErrorCode::UnknownVariable, std::string("unknown variable '") + fixed_names[i] + "'");
      fx[fixed_names[i]] = fixed_values[i];
    }
    auto s = std::make_unique<rfeas_sweep>();
    s->result = sweep(p->problem, ax, fx, to_solver(opts));
    for (const VariableSpec* v : p->problem.with_role(Role::Control)) s->controls.push_back(v->name);
    *out = s.release();
  });
}

void rfeas_sweep_free(rfeas_sweep* s) { delete s; }
size_t rfeas_sweep_rows(const rfeas_sweep* s) { return s->result.rows.size(); }
size_t rfeas_sweep_axis_count(const rfeas_sweep* s) { return s->result.axes.size(); }
const char* rfeas_sweep_axis_name(const rfeas_sweep* s, size_t k) { return str_at(s->result.axes, k); }

double rfeas_sweep_x(const rfeas_sweep* s, size_t row, size_t k) {
  if (row >= s->result.rows.size() || k >= s->result.axes.size()) return NAN;
  return s->result.rows[row].x.at(s->result.axes[k]);
}

double rfeas_sweep_psi(const rfeas_sweep* s, size_t row) {
  return row < s->result.rows.size() ? s->result.rows[row].psi : NAN;
}

int rfeas_sweep_converged(const rfeas_sweep* s, size_t row) {
  return row < s->result.rows.size() && s->result.rows[row].converged ? 1 : 0;
}

const char* rfeas_sweep_active_label(const rfeas_sweep* s, size_t row) {
  return row < s->result.rows.size() ? s->result.rows[row].active_label.c_str() : nullptr;
}

size_t rfeas_sweep_control_count(const rfeas_sweep* s) { return s->controls.size(); }
const char* rfeas_sweep_control_name(const rfeas_sweep* s, size_t i) { return str_at(s->controls, i); }

double rfeas_sweep_control_value(const rfeas_sweep* s, size_t row, size_t i) {
  if (row >= s->result.rows.size() || i >= s->controls.size()) return NAN;
  const auto& z = s->result.rows[row].z_star;
  return z ? z->at(s->controls[i]) : NAN;
}

int rfeas_critical_search(const rfeas_problem* p, const rfeas_options* opts, rfeas_critical** out) {
  return guarded([&] {
    require(p && out, "null argument");
    auto c = std::make_unique<rfeas_critical>();
    c->result = critical_search(p->problem, to_solver(opts));
    c->names = uncertain_names(p->problem);
    *out = c.release();
  });
}

void rfeas_critical_free(rfeas_critical* c) { delete c; }
double rfeas_critical_psi(const rfeas_critical* c) { return c->result.psi_max; }
int rfeas_critical_converged(const rfeas_critical* c) { return c->result.converged ? 1 : 0; }
long rfeas_critical_evaluations(const rfeas_critical* c) { return c->result.evaluations; }
size_t rfeas_critical_dims(const rfeas_critical* c) { return c->names.size(); }
const char* rfeas_critical_name(const rfeas_critical* c, size_t i) { return str_at(c->names, i); }

double rfeas_critical_x(const rfeas_critical* c, size_t i) {
  return i < c->names.size() ? c->result.x_star.at(c->names[i]) : NAN;
}

size_t rfeas_critical_tie_count(const rfeas_critical* c) { return c->result.ties.size(); }

double rfeas_critical_tie_psi(const rfeas_critical* c, size_t t) {
  return t < c->result.ties.size() ? c->result.ties[t].psi : NAN;
}

double rfeas_critical_tie_x(const rfeas_critical* c, size_t t, size_t i) {
  if (t >= c->result.ties.size() || i >= c->names.size()) return NAN;
  return c->result.ties[t].x.at(c->names[i]);
}

}  // extern "C"
