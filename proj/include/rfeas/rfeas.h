#ifndef RFEAS_RFEAS_H
#define RFEAS_RFEAS_H

/*
 * C interface to the feasibility library. Every function returning int
 * returns an RFEAS_* status; on failure rfeas_last_error() describes it
 * (thread-local, valid until the next call on the same thread).
 * Strings returned by accessors are owned by the handle they came from.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RFEAS_BUILDING)
#    define RFEAS_API __declspec(dllexport)
#  else
#    define RFEAS_API __declspec(dllimport)
#  endif
#else
#  define RFEAS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  RFEAS_OK = 0,
  RFEAS_INVALID_ARGUMENT = 1,
  RFEAS_SYNTAX = 2,
  RFEAS_DUPLICATE_VARIABLE = 3,
  RFEAS_UNKNOWN_VARIABLE = 4,
  RFEAS_ALPHA_OUT_OF_RANGE = 5,
  RFEAS_MISSING_BOUNDS = 6,
  RFEAS_INVALID_BOUNDS = 7,
  RFEAS_INVALID_PROBLEM = 8,
  RFEAS_UNBOUND_VARIABLE = 9,
  RFEAS_DIVISION_BY_ZERO = 10,
  RFEAS_DOMAIN = 11,
  RFEAS_NON_FINITE_RESULT = 12,
  RFEAS_NON_FINITE_INPUT = 13,
  RFEAS_HAS_CONTROL_VARIABLES = 14,
  RFEAS_NO_CONTROL_VARIABLES = 15,
  RFEAS_NO_FEASIBLE_SAMPLES = 16,
  RFEAS_NO_CONVERGENCE = 17,
  RFEAS_DIMENSION_MISMATCH = 18,
  RFEAS_UNKNOWN_BUILTIN = 19,
  RFEAS_IO = 20,
  RFEAS_INTERNAL = 99
};

enum { RFEAS_ROLE_UNCERTAIN = 0, RFEAS_ROLE_CONTROL = 1, RFEAS_ROLE_DESIGN = 2 };

enum { RFEAS_FEASIBLE = 0, RFEAS_INFEASIBLE = 1, RFEAS_BOUNDARY = 2 };

/* Coordinates of a region handle. */
enum {
  /* R over uncertain and control variables. */
  RFEAS_REGION_FULL = 0,
  /* Uncertain variables only; the projection through min over controls
     when the problem has any, otherwise the same as FULL. */
  RFEAS_REGION_FEASIBILITY = 1
};

typedef struct rfeas_problem rfeas_problem;
typedef struct rfeas_region rfeas_region;
typedef struct rfeas_psi rfeas_psi;
typedef struct rfeas_bbox rfeas_bbox;
typedef struct rfeas_boundary rfeas_boundary;
typedef struct rfeas_field rfeas_field;
typedef struct rfeas_sweep rfeas_sweep;
typedef struct rfeas_critical rfeas_critical;

typedef struct {
  int coarse_grid_per_dim;
  int multistart_count;
  double z_tolerance;
  double value_tolerance;
  long max_inner_evals;
  uint64_t seed;
  unsigned threads; /* 0 = available parallelism */
} rfeas_options;

RFEAS_API void rfeas_options_init(rfeas_options* opts);

RFEAS_API const char* rfeas_last_error(void);
/* 1-based position of the last syntax error, 0 when not applicable. */
RFEAS_API void rfeas_last_error_position(int* line, int* column);
RFEAS_API const char* rfeas_status_name(int status);

/* Built-in problems */
RFEAS_API size_t rfeas_builtin_count(void);
RFEAS_API const char* rfeas_builtin_name(size_t index);
RFEAS_API int rfeas_builtin_text(const char* name, const char** text);

/* Problems */
RFEAS_API int rfeas_problem_parse(const char* text, rfeas_problem** out);
RFEAS_API int rfeas_problem_load_builtin(const char* name, rfeas_problem** out);
RFEAS_API void rfeas_problem_free(rfeas_problem* p);
RFEAS_API const char* rfeas_problem_name(const rfeas_problem* p);
RFEAS_API double rfeas_problem_alpha(const rfeas_problem* p);
RFEAS_API int rfeas_problem_has_controls(const rfeas_problem* p);
RFEAS_API size_t rfeas_problem_variable_count(const rfeas_problem* p);
RFEAS_API const char* rfeas_problem_variable_name(const rfeas_problem* p, size_t i);
RFEAS_API int rfeas_problem_variable_role(const rfeas_problem* p, size_t i);
/* Bounds for uncertain/control variables; lo = hi = value for designs. */
RFEAS_API void rfeas_problem_variable_bounds(const rfeas_problem* p, size_t i, double* lo, double* hi);
RFEAS_API size_t rfeas_problem_constraint_count(const rfeas_problem* p);
RFEAS_API const char* rfeas_problem_constraint_label(const rfeas_problem* p, size_t i);
RFEAS_API size_t rfeas_problem_warning_count(const rfeas_problem* p);
RFEAS_API const char* rfeas_problem_warning(const rfeas_problem* p, size_t i);
/* Canonical problem-file text; owned by p. */
RFEAS_API const char* rfeas_problem_emit(rfeas_problem* p);

/* Feasibility function at a point. Names/values bind uncertain variables. */
RFEAS_API int rfeas_psi_evaluate(const rfeas_problem* p, const char* const* names, const double* values,
                                 size_t count, const rfeas_options* opts, rfeas_psi** out);
RFEAS_API void rfeas_psi_free(rfeas_psi* r);
RFEAS_API double rfeas_psi_value(const rfeas_psi* r);
RFEAS_API int rfeas_psi_converged(const rfeas_psi* r);
RFEAS_API long rfeas_psi_inner_evals(const rfeas_psi* r);
RFEAS_API int rfeas_psi_outside_domain(const rfeas_psi* r);
RFEAS_API const char* rfeas_psi_active_label(const rfeas_psi* r);
RFEAS_API size_t rfeas_psi_constraint_count(const rfeas_psi* r);
RFEAS_API const char* rfeas_psi_constraint_label(const rfeas_psi* r, size_t i);
RFEAS_API double rfeas_psi_constraint_value(const rfeas_psi* r, size_t i);
/* Number of controls in z*; 0 for open-loop problems. */
RFEAS_API size_t rfeas_psi_control_count(const rfeas_psi* r);
RFEAS_API const char* rfeas_psi_control_name(const rfeas_psi* r, size_t i);
RFEAS_API double rfeas_psi_control_value(const rfeas_psi* r, size_t i);

/* Regions */
RFEAS_API int rfeas_region_create(const rfeas_problem* p, int mode, const rfeas_options* opts, rfeas_region** out);
RFEAS_API void rfeas_region_free(rfeas_region* r);
RFEAS_API size_t rfeas_region_dims(const rfeas_region* r);
RFEAS_API const char* rfeas_region_coordinate(const rfeas_region* r, size_t i);
RFEAS_API void rfeas_region_domain(const rfeas_region* r, size_t i, double* lo, double* hi);
RFEAS_API int rfeas_region_value(const rfeas_region* r, const double* x, size_t n, double* out);
RFEAS_API int rfeas_classify(const rfeas_region* r, const double* x, size_t n, double tol, int* membership);

/* Sampling box arguments (lo, hi) may be NULL to use the region's domain. */

typedef struct {
  double volume;
  double std_error;
  long long samples;
  long long hits;
  uint64_t seed;
} rfeas_volume_result;

RFEAS_API int rfeas_volume(const rfeas_region* r, const double* lo, const double* hi, long long samples,
                           uint64_t seed, unsigned threads, rfeas_volume_result* out);

RFEAS_API int rfeas_bbox_mc(const rfeas_region* r, const double* lo, const double* hi, long long samples,
                            uint64_t seed, unsigned threads, rfeas_bbox** out);
/* Directions ±e_k; starts drawn from start_samples feasible MC points. */
RFEAS_API int rfeas_bbox_opt(const rfeas_region* r, const double* lo, const double* hi, int starts,
                             long long start_samples, uint64_t seed, unsigned threads, rfeas_bbox** out);
RFEAS_API void rfeas_bbox_free(rfeas_bbox* b);
RFEAS_API size_t rfeas_bbox_dims(const rfeas_bbox* b);
RFEAS_API void rfeas_bbox_bounds(const rfeas_bbox* b, size_t i, double* lo, double* hi);
RFEAS_API const char* rfeas_bbox_method(const rfeas_bbox* b);
RFEAS_API long long rfeas_bbox_samples(const rfeas_bbox* b);
RFEAS_API long long rfeas_bbox_hits(const rfeas_bbox* b);
RFEAS_API long long rfeas_bbox_evaluations(const rfeas_bbox* b);
/* Per-direction results of rfeas_bbox_opt (0 for mc boxes). Direction
   2k is +e_k, 2k+1 is −e_k. x receives dims values. */
RFEAS_API size_t rfeas_bbox_extremum_count(const rfeas_bbox* b);
RFEAS_API void rfeas_bbox_extremum(const rfeas_bbox* b, size_t i, double* value, double* residual, double* x);

RFEAS_API int rfeas_boundary_extract(const rfeas_region* r, const double* lo, const double* hi, int grid,
                                     double tol, unsigned threads, rfeas_boundary** out);
RFEAS_API void rfeas_boundary_free(rfeas_boundary* b);
RFEAS_API size_t rfeas_boundary_polyline_count(const rfeas_boundary* b);
RFEAS_API int rfeas_boundary_closed(const rfeas_boundary* b, size_t i);
RFEAS_API size_t rfeas_boundary_vertex_count(const rfeas_boundary* b, size_t i);
RFEAS_API void rfeas_boundary_vertex(const rfeas_boundary* b, size_t i, size_t k, double* x, double* y);
RFEAS_API double rfeas_boundary_max_residual(const rfeas_boundary* b);

RFEAS_API int rfeas_field_compute(const rfeas_region* r, const double* lo, const double* hi, int nx, int ny,
                                  unsigned threads, rfeas_field** out);
RFEAS_API void rfeas_field_free(rfeas_field* f);
RFEAS_API int rfeas_field_nx(const rfeas_field* f);
RFEAS_API int rfeas_field_ny(const rfeas_field* f);
/* Row-major, row 0 at the lowest y, cell-center values. */
RFEAS_API const double* rfeas_field_values(const rfeas_field* f);

/* Sweep over a grid of uncertain values; the last axis varies fastest. */
RFEAS_API int rfeas_sweep_run(const rfeas_problem* p, const char* const* axis_names, const double* lo,
                              const double* hi, const double* step, size_t axes, const char* const* fixed_names,
                              const double* fixed_values, size_t fixed, const rfeas_options* opts,
                              rfeas_sweep** out);
RFEAS_API void rfeas_sweep_free(rfeas_sweep* s);
RFEAS_API size_t rfeas_sweep_rows(const rfeas_sweep* s);
RFEAS_API size_t rfeas_sweep_axis_count(const rfeas_sweep* s);
RFEAS_API const char* rfeas_sweep_axis_name(const rfeas_sweep* s, size_t k);
RFEAS_API double rfeas_sweep_x(const rfeas_sweep* s, size_t row, size_t k);
RFEAS_API double rfeas_sweep_psi(const rfeas_sweep* s, size_t row);
RFEAS_API int rfeas_sweep_converged(const rfeas_sweep* s, size_t row);
RFEAS_API const char* rfeas_sweep_active_label(const rfeas_sweep* s, size_t row);
RFEAS_API size_t rfeas_sweep_control_count(const rfeas_sweep* s);
RFEAS_API const char* rfeas_sweep_control_name(const rfeas_sweep* s, size_t i);
RFEAS_API double rfeas_sweep_control_value(const rfeas_sweep* s, size_t row, size_t i);

/* Worst-case point: maximizes psi over the uncertain box. */
RFEAS_API int rfeas_critical_search(const rfeas_problem* p, const rfeas_options* opts, rfeas_critical** out);
RFEAS_API void rfeas_critical_free(rfeas_critical* c);
RFEAS_API double rfeas_critical_psi(const rfeas_critical* c);
RFEAS_API int rfeas_critical_converged(const rfeas_critical* c);
RFEAS_API long rfeas_critical_evaluations(const rfeas_critical* c);
RFEAS_API size_t rfeas_critical_dims(const rfeas_critical* c);
RFEAS_API const char* rfeas_critical_name(const rfeas_critical* c, size_t i);
RFEAS_API double rfeas_critical_x(const rfeas_critical* c, size_t i);
/* Distinct maximizers within the value tolerance, best first. */
RFEAS_API size_t rfeas_critical_tie_count(const rfeas_critical* c);
RFEAS_API double rfeas_critical_tie_psi(const rfeas_critical* c, size_t t);
RFEAS_API double rfeas_critical_tie_x(const rfeas_critical* c, size_t t, size_t i);

#ifdef __cplusplus
}
#endif

#endif
