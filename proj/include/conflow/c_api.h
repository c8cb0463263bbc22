#ifndef CONFLOW_C_API_H
#define CONFLOW_C_API_H

#include <stddef.h>

#if defined(_WIN32)
#define CF_API __declspec(dllexport)
#else
#define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; every function returning int returns one of these. */
enum {
  CF_OK = 0,
  CF_INVALID_ARGUMENT = 1,
  CF_DIMENSION_MISMATCH = 2,
  CF_UNSOLVABLE_ON_TORUS = 3,
  CF_CRITICAL_POINT = 4,
  CF_BRANCH_DISCONTINUITY = 5,
  CF_NOT_NORMALIZED = 6,
  CF_NON_REAL_INPUT = 7,
  CF_UNSUPPORTED_ORDER = 8,
  CF_BLOW_UP = 9,
  CF_NOT_ON_SPHERE = 10,
  CF_NOT_NULL = 11,
  CF_NOT_FORWARD = 12,
  CF_POINT_AT_INFINITY = 13,
  CF_DEGENERATE_METRIC = 14,
  CF_PROJECTION_LEAK = 15,
  CF_NOT_NORMAL = 16,
  CF_NOT_IMPLEMENTED_DIM = 17,
  CF_NOT_INTEGRABLE = 18,
  CF_HOLONOMY_DEFECT = 19,
  CF_CONFORMAL_CONSTRAINT_VIOLATED = 20,
  CF_REALITY_VIOLATION = 21,
  CF_NONZERO_NORMAL_DEGREE = 22,
  CF_NON_INTEGER_DEGREE = 23,
  CF_CONFORMAL_DRIFT = 24,
  CF_NOT_ISOTHERMIC = 25,
  CF_KAPPA_VANISHES = 26,
  CF_NOT_UNIT = 27,
  CF_NOT_CONSTRAINED_WILLMORE = 28,
  CF_NOT_CMC = 29,
  CF_NON_CONSTANT = 30,
  CF_NON_PERIODIC = 31,
  CF_IO_ERROR = 32,
  CF_CONFIG_ERROR = 33,
  CF_INTERNAL_ERROR = 99
};

CF_API const char* cf_version(void);
CF_API const char* cf_status_name(int status);
/* Message of the last failure on the calling thread. */
CF_API const char* cf_last_error(void);
CF_API int cf_set_threads(int n);

/* ------------------------------------------------------------------ fields */

typedef struct cf_field cf_field;

/* data holds nx*ny*d (re, im) pairs, point-major as in the CSV layout; NULL gives zeros. */
CF_API int cf_field_create(int nx, int ny, double Lx, double Ly, int d, const double* data, cf_field** out);
CF_API int cf_field_shape(const cf_field* f, int* nx, int* ny, double* Lx, double* Ly, int* d);
CF_API int cf_field_copy_data(const cf_field* f, double* data);
CF_API int cf_field_read_csv(const char* path, cf_field** out);
CF_API int cf_field_write_csv(const cf_field* f, const char* path);
CF_API void cf_field_free(cf_field* f);

/* ---------------------------------------------------------------- surfaces */

typedef struct cf_surface cf_surface;

/* Named generators: "clifford" (n), "cmc_gauge" (a, b, n), "perturbed_clifford" (eps, steps),
   "rotation_torus" (rho, wobble, lobes, n; the x period is set by the profile).
   Unknown names or keys give CF_CONFIG_ERROR. */
CF_API int cf_surface_corpus(const char* name, int nx, int ny, const char* const* keys, const double* values,
                             int nparams, cf_surface** out);
/* f has d = n + 1 real components. */
CF_API int cf_surface_from_field(const cf_field* f, cf_surface** out);
CF_API int cf_surface_field(const cf_surface* s, cf_field** out);
CF_API int cf_surface_dim(const cf_surface* s, int* n);
CF_API int cf_surface_embed_up(const cf_surface* s, cf_surface** out);
CF_API int cf_surface_write_obj(const cf_surface* s, const char* path);
/* Max over the lattice of |f - shift(g, dx, dy)|. */
CF_API int cf_surface_shift_distance(const cf_surface* f, const cf_surface* g, double dx, double dy, double* out);
CF_API void cf_surface_free(cf_surface* s);

typedef struct {
  double sphere_defect;
  double conformal_ratio;
  double min_metric;
  int pass;
} cf_conformality;

CF_API int cf_surface_conformality(const cf_surface* s, double sphere_tol, double conformal_tol, cf_conformality* out);

typedef struct {
  double kappa_diff;
  double c_diff;
  double mean_curvature_sup;
} cf_crosscheck;

CF_API int cf_surface_crosscheck(const cf_surface* s, cf_crosscheck* out);

/* -------------------------------------------------------------- invariants */

typedef struct cf_invariants cf_invariants;

enum { CF_INV_C = 0, CF_INV_KAPPA = 1, CF_INV_Q = 2, CF_INV_CHI = 3 };

CF_API int cf_invariants_extract(const cf_surface* s, double leak_tol, cf_invariants** out);
/* Umbilic map into S^2 from its closed-form lift jet. */
CF_API int cf_invariants_umbilic(int nx, int ny, cf_invariants** out);
/* kappa = cos(sqrt(2c) x) k1 + sin(sqrt(2c) x) k2 on a flat normal bundle of the given rank. */
CF_API int cf_invariants_helix(int nx, int ny, double Lx, double Ly, double c, const double* k1, const double* k2,
                               int rank, double tol, cf_invariants** out);
/* c (d = 1) and kappa (d = rank) on a flat normal frame. */
CF_API int cf_invariants_from_fields(const cf_field* c, const cf_field* kappa, cf_invariants** out);
CF_API int cf_invariants_get(const cf_invariants* inv, int which, cf_field** out);
CF_API int cf_invariants_rank(const cf_invariants* inv, int* rank);
CF_API void cf_invariants_free(cf_invariants* inv);

typedef struct {
  double gauss, codazzi, ricci;
  double willmore;          /* integral of |kappa|^2 */
  double frame_defect;      /* 0 unless has_lift */
  double projection_leak;
  int has_lift;             /* 0 for invariant-only data on a flat normal frame */
} cf_residuals;

CF_API int cf_invariants_residuals(const cf_invariants* inv, cf_residuals* out);

typedef struct {
  int degree;
  double gap;
} cf_degree;

CF_API int cf_invariants_degree(const cf_invariants* inv, double gap_tol, cf_degree* out);

/* ---------------------------------------------------------- reconstruction */

typedef struct {
  double integrability_tol;
  double holonomy_tol;
  int check_holonomy;
  int substeps;
} cf_reconstruct_options;

typedef struct {
  double holonomy;
  double roundtrip;
  double span_defect;
} cf_reconstruct_report;

CF_API void cf_reconstruct_defaults(cf_reconstruct_options* opt);
/* Scalar c and kappa (n = 3). */
CF_API int cf_reconstruct(const cf_field* c, const cf_field* kappa, const cf_reconstruct_options* opt,
                          cf_surface** out, cf_reconstruct_report* report);

/* ------------------------------------------------------------------- flows */

typedef struct cf_flow cf_flow;

enum { CF_FLOW_TRANSLATION = 0, CF_FLOW_NV = 1, CF_FLOW_DS = 2 };
enum { CF_MODE_LIFT = 0, CF_MODE_INVARIANTS = 1 };

typedef struct {
  int kind;
  int mode;
  double dt;
  int filter_order;
  double leak_tol, solvability_tol, conformal_tol, reality_tol, blowup;
} cf_flow_spec;

typedef struct {
  int step;
  double t;
  double willmore;
  double gauss, codazzi, ricci;
  double imag_kappa;
  double conformality;
} cf_flow_record;

CF_API void cf_flow_defaults(cf_flow_spec* spec);
/* Lift mode starts from a surface; invariant mode from scalar (c, kappa). */
CF_API int cf_flow_create(const cf_surface* s, const cf_flow_spec* spec, cf_flow** out);
CF_API int cf_flow_create_invariants(const cf_field* c, const cf_field* kappa, const cf_flow_spec* spec, cf_flow** out);
CF_API int cf_flow_step(cf_flow* flow, cf_flow_record* rec);
CF_API int cf_flow_record_now(const cf_flow* flow, cf_flow_record* rec);
/* Lift mode only. */
CF_API int cf_flow_surface(const cf_flow* flow, cf_surface** out);
CF_API int cf_flow_invariants(const cf_flow* flow, cf_invariants** out);
CF_API void cf_flow_free(cf_flow* flow);

/* --------------------------------------------------------------------- KdV */

typedef struct cf_kdv cf_kdv;

/* values: n (re, im) pairs along a periodic line of length L. */
CF_API int cf_kdv_create(int n, double L, const double* values, cf_kdv** out);
CF_API int cf_kdv_step(cf_kdv* k, double dt, int order, double blowup);
CF_API int cf_kdv_state(const cf_kdv* k, double* t, double* values);
CF_API void cf_kdv_free(cf_kdv* k);
CF_API int cf_kdv_rhs(int n, double L, const double* c, int order, double* out);
CF_API int cf_line_deriv(int n, double L, const double* f, int order, double* out);
CF_API int cf_line_dealias(int n, const double* f, double* out);

/* --------------------------------------------------------- special surfaces */

CF_API int cf_special_dupin(const cf_invariants* inv, double* schwarzian_zbar, double* quartic_z);
CF_API int cf_special_isothermic(const cf_invariants* inv, double* out);
CF_API int cf_special_calapso(const cf_invariants* inv, double tol, double* out);
CF_API int cf_special_willmore(const cf_invariants* inv, double* full, double* willmore, double* codazzi);
CF_API int cf_special_constrained_willmore(const cf_invariants* inv, double q_re, double q_im, double* out);
CF_API int cf_special_t_transform(const cf_invariants* inv, double r, double tol, cf_invariants** out);
CF_API int cf_special_associated_family(const cf_invariants* inv, double q_re, double q_im, double l_re, double l_im,
                                        double tol, cf_invariants** out, double* q_out_re, double* q_out_im);

typedef struct {
  double v0[8];
  int v0_len;
  double H, K;
  double constancy_defect, curvature_defect, mean_curvature_defect, metric_defect, cmc_residual;
} cf_space_form;

CF_API int cf_special_cmc_vector(const cf_invariants* inv, double H, double tol, cf_space_form* out);

typedef struct {
  double H, K;
  double cmc_residual;
  double defect;  /* Lawson: |K_r + H_r^2 - K - H^2|; C*: curvature formula mismatch */
} cf_space_form_member;

CF_API int cf_special_lawson(const cf_invariants* inv, const cf_space_form* data, double r, double tol,
                             cf_space_form_member* out);
CF_API int cf_special_cstar(const cf_invariants* inv, const cf_space_form* data, double l_re, double l_im, double tol,
                            cf_space_form_member* out);
/* k holds rank components of n (re, im) pairs each. */
CF_API int cf_special_elastica(const double* k, int rank, int n, double L, double h_re, double h_im, double gamma,
                               double* out);
CF_API int cf_special_isothermic_willmore(const cf_invariants* inv, double* isothermic, double* willmore,
                                          double* gradient);

#ifdef __cplusplus
}
#endif

#endif
