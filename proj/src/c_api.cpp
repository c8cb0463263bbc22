#include "conflow/c_api.h"

#include <cmath>
#include <map>
#include <set>
#include <string>

#include "conflow/corpus.hpp"
#include "conflow/flows.hpp"
#include "conflow/io.hpp"
#include "conflow/special.hpp"

using namespace conflow;

struct cf_field {
  VectorField f;
};

struct cf_surface {
  Immersion imm;
};

struct cf_invariants {
  Frame fr;
  Invariants inv;
  bool has_lift = false;
};

struct cf_flow {
  FlowState s;
  FlowSpec spec;
  int step = 0;
};

struct cf_kdv {
  KdVState s;
};

namespace {

thread_local std::string g_last_error;

template <class F>
int guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CF_INTERNAL_ERROR;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::invalid_argument, std::string("null ") + what);
}

VectorField unpack(int nx, int ny, double Lx, double Ly, int d, const double* data) {
  if (d < 1) throw Error(ErrorCode::invalid_argument, "fiber dimension must be positive");
  TorusLattice lat(nx, ny, Lx, Ly);
  VectorField f(lat, d);
  if (data)
    for (std::size_t p = 0; p < lat.size(); ++p)
      for (int c = 0; c < d; ++c) f[c][p] = {data[2 * (p * d + c)], data[2 * (p * d + c) + 1]};
  return f;
}

Line unpack_line(int n, const double* v) {
  need(v, "values");
  if (n < 4 || n % 2) throw Error(ErrorCode::invalid_argument, "line length must be even and >= 4");
  Line out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = {v[2 * i], v[2 * i + 1]};
  return out;
}

void pack_line(const Line& l, double* out) {
  for (std::size_t i = 0; i < l.size(); ++i) {
    out[2 * i] = l[i].real();
    out[2 * i + 1] = l[i].imag();
  }
}

const ScalarField& scalar_of(const cf_field* f, const char* what) {
  need(f, what);
  if (f->f.dim() != 1) throw Error(ErrorCode::dimension_mismatch, std::string(what) + " must be a scalar field");
  return f->f[0];
}

int as_int(double v, const std::string& key) {
  if (v != std::floor(v) || std::abs(v) > 1e6) throw Error(ErrorCode::config_error, key + " must be an integer");
  return static_cast<int>(v);
}

cf_flow_record to_c(const FlowRecord& r) {
  return {r.step, r.t, r.willmore, r.gauss, r.codazzi, r.ricci, r.imag_kappa, r.conformality};
}

FlowSpec to_spec(const cf_flow_spec* s) {
  need(s, "spec");
  FlowSpec out;
  switch (s->kind) {
    case CF_FLOW_TRANSLATION: out.kind = FlowKind::translation; break;
    case CF_FLOW_NV: out.kind = FlowKind::novikov_veselov; break;
    case CF_FLOW_DS: out.kind = FlowKind::davey_stewartson; break;
    default: throw Error(ErrorCode::invalid_argument, "unknown flow kind");
  }
  if (s->mode != CF_MODE_LIFT && s->mode != CF_MODE_INVARIANTS) throw Error(ErrorCode::invalid_argument, "unknown flow mode");
  out.mode = s->mode == CF_MODE_LIFT ? FlowMode::evolve_lift : FlowMode::evolve_invariants;
  if (!(s->dt > 0)) throw Error(ErrorCode::invalid_argument, "time step must be positive");
  if (s->filter_order < 0) throw Error(ErrorCode::invalid_argument, "filter order must be non-negative");
  out.dt = s->dt;
  out.filter_order = s->filter_order;
  out.tol = {s->leak_tol, s->solvability_tol, s->conformal_tol, s->reality_tol, s->blowup};
  return out;
}

cf_invariants* wrap(const Frame& fr, Invariants inv, bool lift) { return new cf_invariants{fr, std::move(inv), lift}; }

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_status_name(int status) {
  if (status == CF_INTERNAL_ERROR) return "InternalError";
  if (status < 0 || status > CF_CONFIG_ERROR) return "Unknown";
  return error_name(static_cast<ErrorCode>(status));
}

const char* cf_last_error(void) { return g_last_error.c_str(); }

int cf_set_threads(int n) {
  return guard([&] {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "thread count must be positive");
    set_thread_count(n);
  });
}

int cf_field_create(int nx, int ny, double Lx, double Ly, int d, const double* data, cf_field** out) {
  return guard([&] {
    need(out, "out");
    *out = new cf_field{unpack(nx, ny, Lx, Ly, d, data)};
  });
}

int cf_field_shape(const cf_field* f, int* nx, int* ny, double* Lx, double* Ly, int* d) {
  return guard([&] {
    need(f, "field");
    const TorusLattice& lat = f->f.lattice();
    if (nx) *nx = lat.nx();
    if (ny) *ny = lat.ny();
    if (Lx) *Lx = lat.Lx();
    if (Ly) *Ly = lat.Ly();
    if (d) *d = f->f.dim();
  });
}

int cf_field_copy_data(const cf_field* f, double* data) {
  return guard([&] {
    need(f, "field");
    need(data, "data");
    const int d = f->f.dim();
    for (std::size_t p = 0; p < f->f.lattice().size(); ++p)
      for (int c = 0; c < d; ++c) {
        data[2 * (p * d + c)] = f->f[c][p].real();
        data[2 * (p * d + c) + 1] = f->f[c][p].imag();
      }
  });
}

int cf_field_read_csv(const char* path, cf_field** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new cf_field{read_field_csv(path)};
  });
}

int cf_field_write_csv(const cf_field* f, const char* path) {
  return guard([&] {
    need(f, "field");
    need(path, "path");
    write_field_csv(f->f, path);
  });
}

void cf_field_free(cf_field* f) { delete f; }

int cf_surface_corpus(const char* name, int nx, int ny, const char* const* keys, const double* values, int nparams,
                      cf_surface** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    if (nparams < 0 || (nparams > 0 && (!keys || !values))) throw Error(ErrorCode::invalid_argument, "bad parameter list");
    const std::string n(name);
    static const std::map<std::string, std::set<std::string>> allowed{
        {"clifford", {"n"}},
        {"cmc_gauge", {"a", "b", "n"}},
        {"perturbed_clifford", {"eps", "steps"}},
        {"rotation_torus", {"rho", "wobble", "lobes", "n"}}};
    auto it = allowed.find(n);
    if (it == allowed.end()) throw Error(ErrorCode::config_error, "unknown corpus surface '" + n + "'");
    std::map<std::string, double> par;
    for (int i = 0; i < nparams; ++i) {
      need(keys[i], "key");
      if (!it->second.count(keys[i])) throw Error(ErrorCode::config_error, "unknown parameter '" + std::string(keys[i]) + "' for " + n);
      par[keys[i]] = values[i];
    }
    auto get = [&](const std::string& k, double def) { return par.count(k) ? par[k] : def; };
    const int dim = as_int(get("n", 3), "n");
    if (dim != 3 && dim != 4) throw Error(ErrorCode::config_error, "n must be 3 or 4");
    Immersion imm;
    if (n == "clifford") {
      imm = clifford_torus(TorusLattice(nx, ny), dim);
    } else if (n == "cmc_gauge") {
      imm = cmc_gauge_torus(TorusLattice(nx, ny), as_int(get("a", 1), "a"), as_int(get("b", 2), "b"), dim);
    } else if (n == "perturbed_clifford") {
      imm = perturbed_clifford(TorusLattice(nx, ny), get("eps", 0.05), as_int(get("steps", 20), "steps"));
    } else {
      RevolutionProfile p;
      p.rho = get("rho", p.rho);
      p.wobble = get("wobble", p.wobble);
      p.lobes = as_int(get("lobes", p.lobes), "lobes");
      imm = revolution_isothermic(nx, ny, p, dim);
    }
    *out = new cf_surface{std::move(imm)};
  });
}

int cf_surface_from_field(const cf_field* f, cf_surface** out) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    if (f->f.dim() < 4) throw Error(ErrorCode::dimension_mismatch, "surface fields need at least four components");
    if (f->f.sup_imag() > 0) throw Error(ErrorCode::non_real_input, "surface coordinates must be real");
    *out = new cf_surface{Immersion{f->f.dim() - 1, f->f}};
  });
}

int cf_surface_field(const cf_surface* s, cf_field** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    *out = new cf_field{s->imm.f};
  });
}

int cf_surface_dim(const cf_surface* s, int* n) {
  return guard([&] {
    need(s, "surface");
    need(n, "n");
    *n = s->imm.n;
  });
}

int cf_surface_embed_up(const cf_surface* s, cf_surface** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    *out = new cf_surface{embed_up(s->imm)};
  });
}

int cf_surface_write_obj(const cf_surface* s, const char* path) {
  return guard([&] {
    need(s, "surface");
    need(path, "path");
    write_obj(s->imm, path);
  });
}

int cf_surface_shift_distance(const cf_surface* f, const cf_surface* g, double dx, double dy, double* out) {
  return guard([&] {
    need(f, "surface");
    need(g, "surface");
    need(out, "out");
    if (f->imm.f.dim() != g->imm.f.dim() || !(f->imm.f.lattice() == g->imm.f.lattice()))
      throw Error(ErrorCode::dimension_mismatch, "surfaces differ in shape");
    double m = 0;
    for (int i = 0; i < f->imm.f.dim(); ++i) m = std::max(m, (f->imm.f[i] - shift(g->imm.f[i], dx, dy)).sup_norm());
    *out = m;
  });
}

void cf_surface_free(cf_surface* s) { delete s; }

int cf_surface_conformality(const cf_surface* s, double sphere_tol, double conformal_tol, cf_conformality* out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    ConformalReport r = check_conformal(s->imm, sphere_tol, conformal_tol);
    *out = {r.sphere_defect, r.conformal_ratio, r.min_metric, r.pass ? 1 : 0};
  });
}

int cf_surface_crosscheck(const cf_surface* s, cf_crosscheck* out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    CrosscheckReport r = euclidean_crosscheck(s->imm);
    *out = {r.kappa_diff, r.c_diff, r.mean_curvature_sup};
  });
}

int cf_invariants_extract(const cf_surface* s, double leak_tol, cf_invariants** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    Frame fr = build_frame(s->imm);
    Invariants inv = extract_invariants(fr, leak_tol);
    *out = wrap(fr, std::move(inv), true);
  });
}

int cf_invariants_umbilic(int nx, int ny, cf_invariants** out) {
  return guard([&] {
    need(out, "out");
    Frame fr = frame_from_jet(umbilic_sphere_jet(TorusLattice(nx, ny)), 3);
    Invariants inv = extract_invariants(fr);
    *out = wrap(fr, std::move(inv), true);
  });
}

int cf_invariants_helix(int nx, int ny, double Lx, double Ly, double c, const double* k1, const double* k2, int rank,
                        double tol, cf_invariants** out) {
  return guard([&] {
    need(k1, "k1");
    need(k2, "k2");
    need(out, "out");
    if (rank < 1) throw Error(ErrorCode::invalid_argument, "rank must be positive");
    HelixParams p{c, std::vector<double>(k1, k1 + rank), std::vector<double>(k2, k2 + rank)};
    TorusLattice lat(nx, ny, Lx, Ly);
    Invariants inv = helix_kappa(p, lat, tol);
    *out = wrap(flat_normal_frame(lat, rank), std::move(inv), false);
  });
}

int cf_invariants_from_fields(const cf_field* c, const cf_field* kappa, cf_invariants** out) {
  return guard([&] {
    const ScalarField& cc = scalar_of(c, "c");
    need(kappa, "kappa");
    need(out, "out");
    if (!(cc.lattice() == kappa->f.lattice())) throw Error(ErrorCode::dimension_mismatch, "c and kappa live on different lattices");
    Frame fr = flat_normal_frame(cc.lattice(), kappa->f.dim());
    Invariants inv = invariants_from(fr, cc, kappa->f);
    *out = wrap(fr, std::move(inv), false);
  });
}

int cf_invariants_get(const cf_invariants* inv, int which, cf_field** out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    switch (which) {
      case CF_INV_C: *out = new cf_field{VectorField({inv->inv.c})}; break;
      case CF_INV_KAPPA: *out = new cf_field{inv->inv.kappa}; break;
      case CF_INV_Q: *out = new cf_field{VectorField({inv->inv.q})}; break;
      case CF_INV_CHI: *out = new cf_field{inv->inv.chi}; break;
      default: throw Error(ErrorCode::invalid_argument, "unknown invariant");
    }
  });
}

int cf_invariants_rank(const cf_invariants* inv, int* rank) {
  return guard([&] {
    need(inv, "invariants");
    need(rank, "rank");
    *rank = inv->inv.kappa.dim();
  });
}

void cf_invariants_free(cf_invariants* inv) { delete inv; }

int cf_invariants_residuals(const cf_invariants* inv, cf_residuals* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    IntegrabilityReport r = integrability_residuals(inv->inv, inv->fr);
    *out = {r.gauss,
            r.codazzi,
            r.ricci,
            willmore_energy(inv->inv.kappa),
            inv->has_lift ? frame_defect(inv->fr) : 0.0,
            inv->inv.projection_leak,
            inv->has_lift ? 1 : 0};
  });
}

int cf_invariants_degree(const cf_invariants* inv, double gap_tol, cf_degree* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    DegreeReport r = degree_normal_bundle(inv->inv, gap_tol);
    *out = {r.degree, r.gap};
  });
}

void cf_reconstruct_defaults(cf_reconstruct_options* opt) {
  if (!opt) return;
  ReconstructOptions d;
  *opt = {d.integrability_tol, d.holonomy_tol, d.check_holonomy ? 1 : 0, d.substeps};
}

int cf_reconstruct(const cf_field* c, const cf_field* kappa, const cf_reconstruct_options* opt, cf_surface** out,
                   cf_reconstruct_report* report) {
  return guard([&] {
    const ScalarField& cc = scalar_of(c, "c");
    const ScalarField& kk = scalar_of(kappa, "kappa");
    need(out, "out");
    ReconstructOptions o;
    if (opt) o = {opt->integrability_tol, opt->holonomy_tol, opt->check_holonomy != 0, opt->substeps};
    Reconstruction r = reconstruct_surface(cc, kk, o);
    if (report) *report = {r.holonomy, r.roundtrip, r.span_defect};
    *out = new cf_surface{std::move(r.imm)};
  });
}

void cf_flow_defaults(cf_flow_spec* spec) {
  if (!spec) return;
  FlowSpec d;
  *spec = {CF_FLOW_NV, CF_MODE_LIFT, d.dt, d.filter_order, d.tol.leak, d.tol.solvability, d.tol.conformal,
           d.tol.reality, d.tol.blowup};
}

int cf_flow_create(const cf_surface* s, const cf_flow_spec* spec, cf_flow** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    FlowSpec fs = to_spec(spec);
    if (fs.mode != FlowMode::evolve_lift) throw Error(ErrorCode::invalid_argument, "surface input needs lift mode");
    *out = new cf_flow{lift_state(s->imm, fs.tol), fs, 0};
  });
}

int cf_flow_create_invariants(const cf_field* c, const cf_field* kappa, const cf_flow_spec* spec, cf_flow** out) {
  return guard([&] {
    const ScalarField& cc = scalar_of(c, "c");
    const ScalarField& kk = scalar_of(kappa, "kappa");
    need(out, "out");
    FlowSpec fs = to_spec(spec);
    if (fs.mode != FlowMode::evolve_invariants) throw Error(ErrorCode::invalid_argument, "invariant input needs invariant mode");
    *out = new cf_flow{invariant_state(cc, kk), fs, 0};
  });
}

int cf_flow_step(cf_flow* flow, cf_flow_record* rec) {
  return guard([&] {
    need(flow, "flow");
    flow->s = flow_step(flow->s, flow->spec);
    ++flow->step;
    if (rec) *rec = to_c(flow_record(flow->s, flow->step));
  });
}

int cf_flow_record_now(const cf_flow* flow, cf_flow_record* rec) {
  return guard([&] {
    need(flow, "flow");
    need(rec, "record");
    *rec = to_c(flow_record(flow->s, flow->step));
  });
}

int cf_flow_surface(const cf_flow* flow, cf_surface** out) {
  return guard([&] {
    need(flow, "flow");
    need(out, "out");
    if (flow->s.mode != FlowMode::evolve_lift) throw Error(ErrorCode::invalid_argument, "invariant-mode flows carry no surface");
    *out = new cf_surface{flow->s.imm};
  });
}

int cf_flow_invariants(const cf_flow* flow, cf_invariants** out) {
  return guard([&] {
    need(flow, "flow");
    need(out, "out");
    *out = wrap(flow->s.frame, flow->s.inv, flow->s.mode == FlowMode::evolve_lift);
  });
}

void cf_flow_free(cf_flow* flow) { delete flow; }

int cf_kdv_create(int n, double L, const double* values, cf_kdv** out) {
  return guard([&] {
    need(out, "out");
    if (!(L > 0)) throw Error(ErrorCode::invalid_argument, "period must be positive");
    *out = new cf_kdv{KdVState{L, 0.0, unpack_line(n, values)}};
  });
}

int cf_kdv_step(cf_kdv* k, double dt, int order, double blowup) {
  return guard([&] {
    need(k, "kdv");
    k->s = kdv_step(k->s, dt, order, KdVOptions{blowup});
  });
}

int cf_kdv_state(const cf_kdv* k, double* t, double* values) {
  return guard([&] {
    need(k, "kdv");
    if (t) *t = k->s.t;
    if (values) pack_line(k->s.c, values);
  });
}

void cf_kdv_free(cf_kdv* k) { delete k; }

int cf_kdv_rhs(int n, double L, const double* c, int order, double* out) {
  return guard([&] {
    need(out, "out");
    Line cc = unpack_line(n, c);
    pack_line(kdv_rhs(cc, kdv_hierarchy_b(cc, order, L), L), out);
  });
}

int cf_line_deriv(int n, double L, const double* f, int order, double* out) {
  return guard([&] {
    need(out, "out");
    pack_line(line_deriv(unpack_line(n, f), L, order), out);
  });
}

int cf_line_dealias(int n, const double* f, double* out) {
  return guard([&] {
    need(out, "out");
    pack_line(line_dealias(unpack_line(n, f)), out);
  });
}

int cf_special_dupin(const cf_invariants* inv, double* schwarzian_zbar, double* quartic_z) {
  return guard([&] {
    need(inv, "invariants");
    DupinReport r = dupin_residual(inv->inv);
    if (schwarzian_zbar) *schwarzian_zbar = r.schwarzian_zbar;
    if (quartic_z) *quartic_z = r.quartic_z;
  });
}

int cf_special_isothermic(const cf_invariants* inv, double* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    *out = isothermic_residual(inv->inv);
  });
}

int cf_special_calapso(const cf_invariants* inv, double tol, double* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    if (inv->inv.kappa.dim() != 1) throw Error(ErrorCode::not_implemented_dim, "needs a scalar Hopf differential");
    *out = calapso_residual(inv->inv.kappa[0], tol);
  });
}

int cf_special_willmore(const cf_invariants* inv, double* full, double* willmore, double* codazzi) {
  return guard([&] {
    need(inv, "invariants");
    WillmoreReport r = willmore_residual(inv->fr, inv->inv);
    if (full) *full = r.full;
    if (willmore) *willmore = r.willmore;
    if (codazzi) *codazzi = r.codazzi;
  });
}

int cf_special_constrained_willmore(const cf_invariants* inv, double q_re, double q_im, double* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    *out = constrained_willmore_residual(inv->fr, inv->inv, {q_re, q_im});
  });
}

int cf_special_t_transform(const cf_invariants* inv, double r, double tol, cf_invariants** out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    *out = wrap(inv->fr, t_transform(inv->fr, inv->inv, r, tol), false);
  });
}

int cf_special_associated_family(const cf_invariants* inv, double q_re, double q_im, double l_re, double l_im,
                                 double tol, cf_invariants** out, double* q_out_re, double* q_out_im) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    AssociatedMember m = willmore_associated_family(inv->fr, inv->inv, {q_re, q_im}, {l_re, l_im}, tol);
    if (q_out_re) *q_out_re = m.q.real();
    if (q_out_im) *q_out_im = m.q.imag();
    *out = wrap(inv->fr, std::move(m.inv), false);
  });
}

int cf_special_cmc_vector(const cf_invariants* inv, double H, double tol, cf_space_form* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    if (!inv->has_lift) throw Error(ErrorCode::invalid_argument, "the space form vector needs a lifted surface");
    SpaceFormData d = cmc_vector(inv->fr, inv->inv, H, tol);
    *out = {};
    out->v0_len = static_cast<int>(std::min<std::size_t>(d.v0.size(), 8));
    for (int i = 0; i < out->v0_len; ++i) out->v0[i] = d.v0[i];
    out->H = d.H;
    out->K = d.K;
    out->constancy_defect = d.constancy_defect;
    out->curvature_defect = d.curvature_defect;
    out->mean_curvature_defect = d.mean_curvature_defect;
    out->metric_defect = d.metric_defect;
    out->cmc_residual = d.cmc_residual;
  });
}

namespace {

SpaceFormData from_c(const cf_space_form* d) {
  need(d, "space form data");
  SpaceFormData s;
  s.v0.assign(d->v0, d->v0 + std::clamp(d->v0_len, 0, 8));
  s.H = d->H;
  s.K = d->K;
  return s;
}

}  // namespace

int cf_special_lawson(const cf_invariants* inv, const cf_space_form* data, double r, double tol,
                      cf_space_form_member* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    LawsonMember m = lawson_family(inv->fr, from_c(data), inv->inv, r, tol);
    *out = {m.H, m.K, m.cmc_residual, m.lawson_defect};
  });
}

int cf_special_cstar(const cf_invariants* inv, const cf_space_form* data, double l_re, double l_im, double tol,
                     cf_space_form_member* out) {
  return guard([&] {
    need(inv, "invariants");
    need(out, "out");
    CStarMember m = cstar_action(inv->fr, from_c(data), inv->inv, {l_re, l_im}, tol);
    *out = {m.H, m.K, m.cmc_residual, m.curvature_defect};
  });
}

int cf_special_elastica(const double* k, int rank, int n, double L, double h_re, double h_im, double gamma,
                        double* out) {
  return guard([&] {
    need(k, "k");
    need(out, "out");
    if (rank < 1) throw Error(ErrorCode::invalid_argument, "rank must be positive");
    std::vector<Line> comps;
    for (int i = 0; i < rank; ++i) comps.push_back(unpack_line(n, k + 2 * static_cast<std::size_t>(i) * n));
    *out = elastica_residual(comps, L, {h_re, h_im}, gamma);
  });
}

int cf_special_isothermic_willmore(const cf_invariants* inv, double* isothermic, double* willmore, double* gradient) {
  return guard([&] {
    need(inv, "invariants");
    IsothermicWillmoreReport r = isothermic_willmore_report(inv->fr, inv->inv);
    if (isothermic) *isothermic = r.isothermic;
    if (willmore) *willmore = r.willmore;
    if (gradient) *gradient = r.gradient;
  });
}

}  // extern "C"
