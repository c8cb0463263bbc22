#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "handles.hpp"

namespace fs = std::filesystem;
using namespace cfcli;
using cplx = std::complex<double>;

namespace {

constexpr double two_pi = 6.283185307179586477;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0 ? 0.0 : v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(is), {}};
}

// ------------------------------------------------------------------ run state

struct OutputCfg {
  fs::path dir;
  std::string report;
  bool wall_time = false;
};

struct Run {
  std::string command;
  int threads = 1;
  OutputCfg out;
  json config;
  json results = json::object();
  json checks = json::array();
  json files = json::array();
  json error;
  bool ok = true;

  void check(const std::string& name, double value, double tol) {
    const bool pass = std::isfinite(value) && value <= tol;
    checks.push_back({{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
    ok = ok && pass;
  }

  fs::path path(const std::string& name) const { return out.dir / name; }

  void emitted(const std::string& name) {
    const std::string bytes = slurp(path(name));
    files.push_back({{"path", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream os(path(name), std::ios::binary);
    os << text;
    if (!os) throw Failure("io", "cannot write " + path(name).string());
    os.close();
    emitted(name);
  }

  void write_field(const std::string& name, const cf_field* f) {
    call(cf_field_write_csv(f, path(name).string().c_str()));
    emitted(name);
  }

  void write_mesh(const std::string& name, const cf_surface* s) {
    call(cf_surface_write_obj(s, path(name).string().c_str()));
    emitted(name);
  }
};

OutputCfg read_output(Section& root) {
  OutputCfg o;
  root.section("output", [&](Section& s) {
    o.dir = s.text("dir", "conflow_out");
    o.report = s.text("report", "report.json");
    o.wall_time = s.flag("wall_time", false);
    if (o.report.empty() || o.report.find('/') != std::string::npos)
      throw ConfigError("config.output.report must be a plain file name");
  });
  return o;
}

// ------------------------------------------------------------------ surfaces

struct SurfaceCfg {
  std::string name;
  long seed = 0;
  int nx = 32, ny = 32;
  std::vector<std::string> keys;
  std::vector<double> values;
  std::string file;
  double helix_c = 0.5, helix_tol = 1e-8, Lx = two_pi, Ly = two_pi;
  std::vector<double> k1, k2;

  bool immersion() const { return name != "umbilic_sphere_map" && name != "helix_isothermic"; }
};

const std::vector<std::string> surface_names{"clifford", "cmc_gauge", "perturbed_clifford", "rotation_torus",
                                             "umbilic_sphere_map", "helix_isothermic", "custom_file"};

SurfaceCfg read_surface(Section& root) {
  SurfaceCfg sc;
  root.section("surface", [&](Section& s) {
    sc.name = s.choice("name", "clifford", surface_names);
    sc.seed = s.integer("seed", 0);
    s.section("params", [&](Section& p) {
      auto num = [&](const std::string& k, double def) {
        sc.keys.push_back(k);
        sc.values.push_back(p.number(k, def));
      };
      auto whole = [&](const std::string& k, long def) {
        sc.keys.push_back(k);
        sc.values.push_back(static_cast<double>(p.integer(k, def)));
      };
      if (sc.name == "clifford") {
        whole("n", 3);
      } else if (sc.name == "cmc_gauge") {
        whole("a", 1);
        whole("b", 2);
        whole("n", 3);
      } else if (sc.name == "perturbed_clifford") {
        num("eps", 0.05);
        whole("steps", 20);
      } else if (sc.name == "rotation_torus") {
        num("rho", 0.88137358701954302);
        num("wobble", 0.02);
        whole("lobes", 2);
        whole("n", 3);
      } else if (sc.name == "custom_file") {
        sc.file = p.text("path");
      } else if (sc.name == "helix_isothermic") {
        sc.helix_c = p.number("c", 0.5);
        sc.k1 = p.numbers("k1", {1, 0});
        sc.k2 = p.numbers("k2", {0, 1});
        sc.Lx = p.number("Lx", two_pi);
        sc.Ly = p.number("Ly", two_pi);
        sc.helix_tol = p.number("tol", 1e-8);
      }
    });
  });
  if (sc.name == "custom_file") {
    root.forbid("lattice", "for custom_file surfaces; the file fixes the lattice");
  } else {
    root.section("lattice", [&](Section& s) {
      sc.nx = static_cast<int>(s.integer("nx", 32));
      sc.ny = static_cast<int>(s.integer("ny", 32));
    });
  }
  return sc;
}

struct Tolerances {
  double sphere = 1e-10, conformal = 1e-8, leak = 1e-7, pde = 1e-8, frame = 1e-9, crosscheck = 1e-7;
};

Tolerances read_tolerances(Section& root, bool full) {
  Tolerances t;
  root.section("tolerances", [&](Section& s) {
    t.sphere = s.number("sphere", t.sphere);
    t.conformal = s.number("conformal", t.conformal);
    t.leak = s.number("leak", t.leak);
    t.pde = s.number("pde", t.pde);
    if (full) {
      t.frame = s.number("frame", t.frame);
      t.crosscheck = s.number("crosscheck", t.crosscheck);
    }
  });
  return t;
}

struct Loaded {
  Surface surface;
  Inv inv;
  int n = 3;
};

/// Input problems (missing or malformed files) are configuration errors.
Surface load_custom(const std::string& path) {
  try {
    Field f = make<Field>([&](cf_field** o) { return cf_field_read_csv(path.c_str(), o); });
    return make<Surface>([&](cf_surface** o) { return cf_surface_from_field(f.get(), o); });
  } catch (const NumericError& e) {
    throw ConfigError("custom_file " + path + ": " + e.what());
  }
}

Surface build_surface(const SurfaceCfg& sc) {
  if (sc.name == "custom_file") return load_custom(sc.file);
  std::vector<const char*> keys;
  for (const auto& k : sc.keys) keys.push_back(k.c_str());
  try {
    return make<Surface>([&](cf_surface** o) {
      return cf_surface_corpus(sc.name.c_str(), sc.nx, sc.ny, keys.data(), sc.values.data(),
                               static_cast<int>(keys.size()), o);
    });
  } catch (const NumericError& e) {
    if (e.status == CF_CONFIG_ERROR || e.status == CF_INVALID_ARGUMENT) throw ConfigError(e.what());
    throw;
  }
}

json conformality_json(const cf_conformality& c) {
  return {{"sphere_defect", c.sphere_defect}, {"conformal_ratio", c.conformal_ratio}, {"min_metric", c.min_metric},
          {"pass", c.pass != 0}};
}

json lattice_json(const cf_field* f) {
  int nx, ny, d;
  double Lx, Ly;
  call(cf_field_shape(f, &nx, &ny, &Lx, &Ly, &d));
  return {{"nx", nx}, {"ny", ny}, {"Lx", Lx}, {"Ly", Ly}};
}

/// Builds the surface (checking conformality) or the invariant-only data.
Loaded load(const SurfaceCfg& sc, const Tolerances& tol, Run& run, bool extract = true) {
  Loaded l;
  if (sc.name == "umbilic_sphere_map") {
    try {
      l.inv = make<Inv>([&](cf_invariants** o) { return cf_invariants_umbilic(sc.nx, sc.ny, o); });
    } catch (const NumericError& e) {
      if (e.status == CF_INVALID_ARGUMENT) throw ConfigError(e.what());
      throw;
    }
    return l;
  }
  if (sc.name == "helix_isothermic") {
    const int rank = static_cast<int>(sc.k1.size());
    if (sc.k2.size() != sc.k1.size()) throw ConfigError("config.surface.params.k1 and k2 must have equal length");
    l.inv = make<Inv>([&](cf_invariants** o) {
      return cf_invariants_helix(sc.nx, sc.ny, sc.Lx, sc.Ly, sc.helix_c, sc.k1.data(), sc.k2.data(), rank,
                                 sc.helix_tol, o);
    });
    l.n = rank + 2;
    return l;
  }
  l.surface = build_surface(sc);
  call(cf_surface_dim(l.surface.get(), &l.n));
  Field f = make<Field>([&](cf_field** o) { return cf_surface_field(l.surface.get(), o); });
  run.results["lattice"] = lattice_json(f.get());
  cf_conformality c;
  call(cf_surface_conformality(l.surface.get(), tol.sphere, tol.conformal, &c));
  run.results["conformality"] = conformality_json(c);
  if (!c.pass) throw Failure("NonConformal", "input surface fails the conformality check");
  if (extract)
    l.inv = make<Inv>([&](cf_invariants** o) { return cf_invariants_extract(l.surface.get(), tol.leak, o); });
  return l;
}

struct FieldStats {
  double sup = 0, abs_min = 0, abs_max = 0;
};

std::vector<cplx> field_values(const cf_field* f, int* d = nullptr) {
  int nx, ny, dim;
  call(cf_field_shape(f, &nx, &ny, nullptr, nullptr, &dim));
  std::vector<double> raw(2 * static_cast<std::size_t>(nx) * ny * dim);
  call(cf_field_copy_data(f, raw.data()));
  std::vector<cplx> v(raw.size() / 2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {raw[2 * i], raw[2 * i + 1]};
  if (d) *d = dim;
  return v;
}

/// Pointwise norm statistics of a vector field.
FieldStats stats(const cf_field* f) {
  int d = 1;
  auto v = field_values(f, &d);
  FieldStats s;
  s.abs_min = INFINITY;
  for (std::size_t p = 0; p < v.size() / d; ++p) {
    double n2 = 0;
    for (int c = 0; c < d; ++c) {
      n2 += std::norm(v[p * d + c]);
      s.sup = std::max(s.sup, std::abs(v[p * d + c]));
    }
    s.abs_min = std::min(s.abs_min, std::sqrt(n2));
    s.abs_max = std::max(s.abs_max, std::sqrt(n2));
  }
  return s;
}

json residuals_json(const cf_residuals& r) {
  json j = {{"gauss", r.gauss}, {"codazzi", r.codazzi}, {"ricci", r.ricci}, {"willmore_energy", r.willmore}};
  if (r.has_lift) {
    j["frame_defect"] = r.frame_defect;
    j["projection_leak"] = r.projection_leak;
  }
  return j;
}

// ------------------------------------------------------------ subcommands

using Command = std::function<void(Run&)>;

Command cmd_invariants(Section& root) {
  SurfaceCfg sc = read_surface(root);
  Tolerances tol = read_tolerances(root, false);
  return [sc, tol](Run& run) {
    Loaded l = load(sc, tol, run);
    Field c = make<Field>([&](cf_field** o) { return cf_invariants_get(l.inv.get(), CF_INV_C, o); });
    Field k = make<Field>([&](cf_field** o) { return cf_invariants_get(l.inv.get(), CF_INV_KAPPA, o); });
    run.write_field("c.csv", c.get());
    run.write_field("kappa.csv", k.get());
    cf_residuals r;
    call(cf_invariants_residuals(l.inv.get(), &r));
    FieldStats cs = stats(c.get()), ks = stats(k.get());
    run.results["c_sup"] = cs.sup;
    run.results["kappa_abs_min"] = ks.abs_min;
    run.results["kappa_abs_max"] = ks.abs_max;
    run.results["integrability"] = residuals_json(r);
    run.check("gauss", r.gauss, tol.pde);
    run.check("codazzi", r.codazzi, tol.pde);
    run.check("ricci", r.ricci, tol.pde);
  };
}

Command cmd_check(Section& root) {
  SurfaceCfg sc = read_surface(root);
  Tolerances tol = read_tolerances(root, true);
  return [sc, tol](Run& run) {
    Loaded l = load(sc, tol, run);
    cf_residuals r;
    call(cf_invariants_residuals(l.inv.get(), &r));
    run.results["integrability"] = residuals_json(r);
    run.check("gauss", r.gauss, tol.pde);
    run.check("codazzi", r.codazzi, tol.pde);
    run.check("ricci", r.ricci, tol.pde);
    if (r.has_lift) {
      run.check("frame_defect", r.frame_defect, tol.frame);
      run.check("projection_leak", r.projection_leak, tol.leak);
    }
    if (l.surface && l.n == 3) {
      cf_crosscheck x;
      call(cf_surface_crosscheck(l.surface.get(), &x));
      run.results["euclidean_crosscheck"] = {
          {"kappa_diff", x.kappa_diff}, {"c_diff", x.c_diff}, {"mean_curvature_sup", x.mean_curvature_sup}};
      run.check("crosscheck_kappa", x.kappa_diff, tol.crosscheck);
      run.check("crosscheck_c", x.c_diff, tol.crosscheck);
    }
  };
}

struct FlowCfg {
  cf_flow_spec spec{};
  long steps = 100;
  long snapshot_every = 0;
  bool embed_up = false;
};

Command cmd_flow(Section& root) {
  SurfaceCfg sc = read_surface(root);
  Tolerances tol = read_tolerances(root, false);
  if (!sc.immersion()) throw ConfigError("flow needs an immersed surface, not " + sc.name);
  FlowCfg fc;
  cf_flow_defaults(&fc.spec);
  root.section("flow", [&](Section& s) {
    const std::string kind = s.choice("kind", "nv", {"nv", "ds", "translation"});
    const std::string mode = s.choice("mode", "lift", {"lift", "invariants"});
    fc.spec.kind = kind == "nv" ? CF_FLOW_NV : kind == "ds" ? CF_FLOW_DS : CF_FLOW_TRANSLATION;
    fc.spec.mode = mode == "lift" ? CF_MODE_LIFT : CF_MODE_INVARIANTS;
    fc.spec.dt = s.number("dt", 1e-4);
    fc.steps = s.integer("steps", 100);
    fc.spec.filter_order = static_cast<int>(s.integer("filter_order", 0));
    fc.snapshot_every = s.integer("snapshot_every", 0);
    fc.embed_up = s.flag("embed_up", false);
    s.section("tolerances", [&](Section& t) {
      fc.spec.leak_tol = t.number("leak", fc.spec.leak_tol);
      fc.spec.solvability_tol = t.number("solvability", fc.spec.solvability_tol);
      fc.spec.conformal_tol = t.number("conformal", fc.spec.conformal_tol);
      fc.spec.reality_tol = t.number("reality", fc.spec.reality_tol);
      fc.spec.blowup = t.number("blowup", fc.spec.blowup);
    });
    if (!(fc.spec.dt > 0)) throw ConfigError("config.flow.dt must be positive");
    if (fc.steps < 0 || fc.snapshot_every < 0 || fc.spec.filter_order < 0)
      throw ConfigError("config.flow step counts and filter order must be non-negative");
    if (fc.spec.mode == CF_MODE_INVARIANTS && (fc.snapshot_every > 0 || fc.embed_up || fc.spec.kind == CF_FLOW_DS))
      throw ConfigError("invariant mode evolves scalar (c, kappa): no snapshots, embed_up or ds");
  });
  return [sc, tol, fc](Run& run) {
    Loaded l = load(sc, tol, run, fc.spec.mode == CF_MODE_INVARIANTS);
    Surface start;
    if (fc.embed_up) {
      start = make<Surface>([&](cf_surface** o) { return cf_surface_embed_up(l.surface.get(), o); });
      ++l.n;
    } else {
      start = std::move(l.surface);
    }
    Flow flow;
    if (fc.spec.mode == CF_MODE_LIFT) {
      flow = make<Flow>([&](cf_flow** o) { return cf_flow_create(start.get(), &fc.spec, o); });
    } else {
      if (l.n != 3) throw ConfigError("invariant mode needs a surface in S^3");
      Field c = make<Field>([&](cf_field** o) { return cf_invariants_get(l.inv.get(), CF_INV_C, o); });
      Field k = make<Field>([&](cf_field** o) { return cf_invariants_get(l.inv.get(), CF_INV_KAPPA, o); });
      flow = make<Flow>([&](cf_flow** o) { return cf_flow_create_invariants(c.get(), k.get(), &fc.spec, o); });
    }

    std::ostringstream csv;
    csv << "step,t,willmore,gauss,codazzi,ricci,imag_kappa,conformality\n";
    auto row = [&](const cf_flow_record& r) {
      csv << r.step << ',' << fmt(r.t) << ',' << fmt(r.willmore) << ',' << fmt(r.gauss) << ',' << fmt(r.codazzi) << ','
          << fmt(r.ricci) << ',' << fmt(r.imag_kappa) << ',' << fmt(r.conformality) << '\n';
    };
    json snaps = json::array();
    auto snapshot = [&](long step) {
      if (fc.snapshot_every <= 0 || step % fc.snapshot_every) return;
      Surface s = make<Surface>([&](cf_surface** o) { return cf_flow_surface(flow.get(), o); });
      char name[32];
      std::snprintf(name, sizeof name, "mesh_%06ld.obj", step);
      run.write_mesh(name, s.get());
      json e = {{"step", step}, {"file", name}};
      if (l.n == 4) {
        Field f = make<Field>([&](cf_field** o) { return cf_surface_field(s.get(), o); });
        auto v = field_values(f.get());
        double m = 0;
        for (std::size_t p = 4; p < v.size(); p += 5) m = std::max(m, std::abs(v[p]));
        e["max_abs_last_coordinate"] = m;
      }
      snaps.push_back(e);
    };

    cf_flow_record r0, r;
    call(cf_flow_record_now(flow.get(), &r0));
    row(r0);
    snapshot(0);
    double w_drift = 0, gauss = r0.gauss, codazzi = r0.codazzi, ricci = r0.ricci, conf = r0.conformality,
           imag = r0.imag_kappa;
    r = r0;
    auto summarize = [&] {
      run.results["steps_completed"] = r.step;
      run.results["t_final"] = r.t;
      run.results["willmore_initial"] = r0.willmore;
      run.results["willmore_final"] = r.willmore;
      run.results["willmore_rel_drift_max"] = w_drift;
      run.results["gauss_max"] = gauss;
      run.results["codazzi_max"] = codazzi;
      run.results["ricci_max"] = ricci;
      run.results["conformality_max"] = conf;
      run.results["imag_kappa_initial"] = r0.imag_kappa;
      run.results["imag_kappa_max"] = imag;
      run.results["imag_kappa_growth"] = imag - r0.imag_kappa;
      run.results["snapshots"] = snaps;
    };
    try {
      for (long i = 1; i <= fc.steps; ++i) {
        call(cf_flow_step(flow.get(), &r));
        row(r);
        w_drift = std::max(w_drift, std::abs(r.willmore - r0.willmore) / std::max(std::abs(r0.willmore), 1e-300));
        gauss = std::max(gauss, r.gauss);
        codazzi = std::max(codazzi, r.codazzi);
        ricci = std::max(ricci, r.ricci);
        conf = std::max(conf, r.conformality);
        imag = std::max(imag, r.imag_kappa);
        snapshot(i);
      }
    } catch (...) {
      run.write_text("flow.csv", csv.str());
      summarize();
      throw;
    }
    run.write_text("flow.csv", csv.str());
    summarize();
    Inv fin = make<Inv>([&](cf_invariants** o) { return cf_flow_invariants(flow.get(), o); });
    Field c = make<Field>([&](cf_field** o) { return cf_invariants_get(fin.get(), CF_INV_C, o); });
    Field k = make<Field>([&](cf_field** o) { return cf_invariants_get(fin.get(), CF_INV_KAPPA, o); });
    run.write_field("c_final.csv", c.get());
    run.write_field("kappa_final.csv", k.get());
    if (fc.spec.mode == CF_MODE_LIFT) {
      Surface last = make<Surface>([&](cf_surface** o) { return cf_flow_surface(flow.get(), o); });
      if (fc.spec.kind == CF_FLOW_TRANSLATION) {
        double d = 0;
        call(cf_surface_shift_distance(last.get(), start.get(), r.t, 0, &d));
        run.results["shift_error"] = d;
      }
      Field f = make<Field>([&](cf_field** o) { return cf_surface_field(last.get(), o); });
      run.write_field("surface_final.csv", f.get());
    }
  };
}

struct ReconCfg {
  std::string source;
  std::string c_file, kappa_file;
  double kappa_scale = 1, roundtrip_tol = 1e-6, span_tol = 1e-8;
  cf_reconstruct_options opt{};
};

Command cmd_reconstruct(Section& root) {
  ReconCfg rc;
  cf_reconstruct_defaults(&rc.opt);
  std::optional<SurfaceCfg> sc;
  int nx = 32, ny = 32;
  Tolerances tol;
  root.section("reconstruct", [&](Section& s) {
    rc.source = s.choice("source", "surface", {"surface", "files", "zero"});
    if (rc.source == "files") {
      rc.c_file = s.text("c_file");
      rc.kappa_file = s.text("kappa_file");
    } else {
      s.forbid("c_file", "unless source is files");
      s.forbid("kappa_file", "unless source is files");
    }
    rc.kappa_scale = s.number("kappa_scale", 1.0);
    rc.roundtrip_tol = s.number("roundtrip_tol", 1e-6);
    rc.span_tol = s.number("span_tol", 1e-8);
    rc.opt.integrability_tol = s.number("integrability_tol", rc.opt.integrability_tol);
    rc.opt.holonomy_tol = s.number("holonomy_tol", rc.opt.holonomy_tol);
    rc.opt.check_holonomy = s.flag("check_holonomy", rc.opt.check_holonomy != 0) ? 1 : 0;
    rc.opt.substeps = static_cast<int>(s.integer("substeps", rc.opt.substeps));
  });
  if (rc.source == "surface") {
    sc = read_surface(root);
    tol = read_tolerances(root, false);
    if (!sc->immersion()) throw ConfigError("reconstruct needs an immersed surface, not " + sc->name);
  } else {
    root.forbid("surface", "unless reconstruct.source is surface");
    root.forbid("tolerances", "unless reconstruct.source is surface");
    if (rc.source == "zero") {
      root.section("lattice", [&](Section& s) {
        nx = static_cast<int>(s.integer("nx", 32));
        ny = static_cast<int>(s.integer("ny", 32));
      });
    } else {
      root.forbid("lattice", "when invariants come from files");
    }
  }
  return [rc, sc, tol, nx, ny](Run& run) {
    Field c, k;
    if (rc.source == "surface") {
      Loaded l = load(*sc, tol, run);
      if (l.n != 3) throw ConfigError("reconstruction needs a surface in S^3");
      c = make<Field>([&](cf_field** o) { return cf_invariants_get(l.inv.get(), CF_INV_C, o); });
      k = make<Field>([&](cf_field** o) { return cf_invariants_get(l.inv.get(), CF_INV_KAPPA, o); });
    } else if (rc.source == "files") {
      try {
        c = make<Field>([&](cf_field** o) { return cf_field_read_csv(rc.c_file.c_str(), o); });
        k = make<Field>([&](cf_field** o) { return cf_field_read_csv(rc.kappa_file.c_str(), o); });
      } catch (const NumericError& e) {
        throw ConfigError(e.what());
      }
    } else {
      try {
        c = make<Field>([&](cf_field** o) { return cf_field_create(nx, ny, two_pi, two_pi, 1, nullptr, o); });
        k = make<Field>([&](cf_field** o) { return cf_field_create(nx, ny, two_pi, two_pi, 1, nullptr, o); });
      } catch (const NumericError& e) {
        throw ConfigError(e.what());
      }
    }
    if (rc.kappa_scale != 1) {
      int nx_, ny_, d;
      double Lx, Ly;
      call(cf_field_shape(k.get(), &nx_, &ny_, &Lx, &Ly, &d));
      std::vector<double> raw(2 * static_cast<std::size_t>(nx_) * ny_ * d);
      call(cf_field_copy_data(k.get(), raw.data()));
      for (double& v : raw) v *= rc.kappa_scale;
      k = make<Field>([&](cf_field** o) { return cf_field_create(nx_, ny_, Lx, Ly, d, raw.data(), o); });
    }
    run.results["input_lattice"] = lattice_json(c.get());
    cf_reconstruct_report rep{};
    Surface s = make<Surface>([&](cf_surface** o) { return cf_reconstruct(c.get(), k.get(), &rc.opt, o, &rep); });
    run.results["holonomy"] = rep.holonomy;
    run.results["roundtrip_error"] = rep.roundtrip;
    run.results["span_defect"] = rep.span_defect;
    run.write_mesh("mesh.obj", s.get());
    if (rep.holonomy <= rc.opt.holonomy_tol)
      run.check("roundtrip", rep.roundtrip, rc.roundtrip_tol);
    else
      run.results["roundtrip_skipped"] = "the reconstructed surface does not close, so it is not a sampled torus";
    if (rc.source == "zero") run.check("span", rep.span_defect, rc.span_tol);
  };
}

struct KdVCfg {
  int n = 256, order = 3;
  double L = two_pi, dt = 1e-4, blowup = 1e8, drift_tol = 1e-8, printed_tol = 1e-9;
  long steps = 1000, record_every = 1;
  double mean = 0;
  std::vector<std::array<double, 3>> modes;  // k, cos, sin
};

std::vector<double> pack(const std::vector<cplx>& v) {
  std::vector<double> out;
  for (cplx z : v) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
  return out;
}

std::vector<cplx> unpack(const std::vector<double>& raw) {
  std::vector<cplx> v(raw.size() / 2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {raw[2 * i], raw[2 * i + 1]};
  return v;
}

Command cmd_kdv(Section& root) {
  KdVCfg kc;
  root.section("kdv", [&](Section& s) {
    kc.n = static_cast<int>(s.integer("n", 256));
    kc.L = s.number("L", two_pi);
    kc.order = static_cast<int>(s.integer("order", 3));
    kc.dt = s.number("dt", 1e-4);
    kc.steps = s.integer("steps", 1000);
    kc.record_every = s.integer("record_every", 1);
    kc.blowup = s.number("blowup", 1e8);
    kc.drift_tol = s.number("drift_tol", 1e-8);
    kc.printed_tol = s.number("printed_tol", 1e-9);
    s.section("initial", [&](Section& i) {
      kc.mean = i.number("mean", 0.0);
      i.list("modes", [&](Section& m) {
        const long k = m.integer("k");
        kc.modes.push_back({static_cast<double>(k), m.number("cos", 0.0), m.number("sin", 0.0)});
        if (k < 1 || 2 * k >= kc.n) throw ConfigError(m.path() + ".k must lie in [1, n/2)");
      });
    });
    if (kc.n < 8 || kc.n % 2) throw ConfigError("config.kdv.n must be even and >= 8");
    if (!(kc.L > 0) || !(kc.dt > 0)) throw ConfigError("config.kdv.L and dt must be positive");
    if (kc.order != 1 && kc.order != 3 && kc.order != 5) throw ConfigError("config.kdv.order must be 1, 3 or 5");
    if (kc.steps < 0 || kc.record_every < 1) throw ConfigError("config.kdv.steps >= 0 and record_every >= 1 required");
  });
  return [kc](Run& run) {
    std::vector<cplx> c(static_cast<std::size_t>(kc.n), kc.mean);
    for (int i = 0; i < kc.n; ++i) {
      const double x = i * kc.L / kc.n;
      for (const auto& m : kc.modes) {
        const double a = two_pi * m[0] * x / kc.L;
        c[i] += m[1] * std::cos(a) + m[2] * std::sin(a);
      }
    }
    auto integrals = [&](const std::vector<cplx>& v) {
      cplx i1 = 0, i2 = 0;
      double sup = 0;
      for (cplx z : v) {
        i1 += z;
        i2 += z * z;
        sup = std::max(sup, std::abs(z));
      }
      const double h = kc.L / kc.n;
      return std::array<double, 3>{(i1 * h).real(), (i2 * h).real(), sup};
    };

    if (kc.order == 5) {
      auto raw = pack(c);
      std::vector<double> rhs(raw.size()), d1(raw.size()), d2(raw.size()), d3(raw.size()), d5(raw.size());
      call(cf_kdv_rhs(kc.n, kc.L, raw.data(), 5, rhs.data()));
      call(cf_line_deriv(kc.n, kc.L, raw.data(), 1, d1.data()));
      call(cf_line_deriv(kc.n, kc.L, raw.data(), 2, d2.data()));
      call(cf_line_deriv(kc.n, kc.L, raw.data(), 3, d3.data()));
      call(cf_line_deriv(kc.n, kc.L, raw.data(), 5, d5.data()));
      auto v1 = unpack(d1), v2 = unpack(d2), v3 = unpack(d3), v5 = unpack(d5);
      std::vector<cplx> printed(c.size());
      for (std::size_t i = 0; i < c.size(); ++i)
        printed[i] = v5[i] + 5.0 * c[i] * v3[i] + 10.0 * v1[i] * v2[i] + 7.5 * c[i] * c[i] * v1[i];
      auto pr = pack(printed);
      std::vector<double> prd(pr.size());
      call(cf_line_dealias(kc.n, pr.data(), prd.data()));
      auto a = unpack(rhs), b = unpack(prd);
      double diff = 0, scale = 1;
      for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
      }
      run.results["printed_fifth_order_residual"] = diff / scale;
      run.check("printed_fifth_order", diff / scale, kc.printed_tol);
    }

    auto raw = pack(c);
    KdV kdv = make<KdV>([&](cf_kdv** o) { return cf_kdv_create(kc.n, kc.L, raw.data(), o); });
    std::ostringstream csv;
    csv << "step,t,int_c,int_c2,sup_c\n";
    const auto q0 = integrals(c);
    double d1 = 0, d2 = 0, t = 0;
    auto record = [&](long step) {
      call(cf_kdv_state(kdv.get(), &t, raw.data()));
      const auto q = integrals(unpack(raw));
      d1 = std::max(d1, std::abs(q[0] - q0[0]) / std::max(std::abs(q0[0]), 1.0));
      d2 = std::max(d2, std::abs(q[1] - q0[1]) / std::max(std::abs(q0[1]), 1.0));
      if (step % kc.record_every == 0 || step == kc.steps)
        csv << step << ',' << fmt(t) << ',' << fmt(q[0]) << ',' << fmt(q[1]) << ',' << fmt(q[2]) << '\n';
    };
    record(0);
    try {
      for (long i = 1; i <= kc.steps; ++i) {
        call(cf_kdv_step(kdv.get(), kc.dt, kc.order, kc.blowup));
        record(i);
      }
    } catch (...) {
      run.write_text("kdv.csv", csv.str());
      throw;
    }
    run.write_text("kdv.csv", csv.str());
    run.results["int_c_initial"] = q0[0];
    run.results["int_c2_initial"] = q0[1];
    run.results["int_c_drift"] = d1;
    run.results["int_c2_drift"] = d2;
    run.results["t_final"] = t;
    run.check("int_c_drift", d1, kc.drift_tol);
    run.check("int_c2_drift", d2, kc.drift_tol);
  };
}

// ---------------------------------------------------------------- special

const std::vector<std::string> special_ops{"dupin",          "isothermic", "calapso",    "willmore",
                                           "constrained_willmore", "t_transform", "associated_family", "cmc_vector",
                                           "lawson",         "cstar",      "elastica",   "isothermic_willmore",
                                           "degree"};

struct SpecialCfg {
  std::string op;
  double tol = 1e-8, H = 0, gamma = -0.75, L = 2 * two_pi, omega = 0.5, gap_tol = 0.1;
  int n = 64;
  std::vector<double> q{0, 0}, h{1, 0}, rs, k1{1, 0}, k2{0, 1};
  std::vector<std::vector<double>> lambdas;
  long count = 8;
};

json space_form_json(const cf_space_form& d) {
  return {{"v0", std::vector<double>(d.v0, d.v0 + d.v0_len)},
          {"H", d.H},
          {"K", d.K},
          {"constancy_defect", d.constancy_defect},
          {"curvature_defect", d.curvature_defect},
          {"mean_curvature_defect", d.mean_curvature_defect},
          {"metric_defect", d.metric_defect},
          {"cmc_residual", d.cmc_residual}};
}

Command cmd_special(Section& root) {
  SpecialCfg sp;
  root.section("special", [&](Section& s) {
    sp.op = s.choice("op", "willmore", special_ops);
    s.section("params", [&](Section& p) {
      const std::string& op = sp.op;
      if (op == "elastica") {
        sp.n = static_cast<int>(p.integer("n", 64));
        sp.L = p.number("L", 2 * two_pi);
        sp.omega = p.number("omega", 0.5);
        sp.k1 = p.numbers("k1", {1, 0});
        sp.k2 = p.numbers("k2", {0, 1});
        sp.h = p.complex("h", {1, 0});
        sp.gamma = p.number("gamma", -0.75);
        sp.tol = p.number("tol", 1e-10);
        if (sp.k1.size() != sp.k2.size() || sp.k1.empty())
          throw ConfigError("config.special.params.k1 and k2 must be non-empty of equal length");
      } else if (op == "degree") {
        sp.gap_tol = p.number("gap_tol", 0.1);
        sp.tol = p.number("tol", 1e-8);
      } else {
        if (op == "constrained_willmore") sp.q = p.complex("q", {0, 0});
        if (op == "t_transform") sp.rs = p.numbers("r", {-1, 0.5, 3});
        if (op == "associated_family") {
          sp.q = p.complex("q", {0, 0});
          sp.count = p.integer("count", 8);
          if (sp.count < 1) throw ConfigError("config.special.params.count must be positive");
        }
        if (op == "cmc_vector" || op == "lawson" || op == "cstar") sp.H = p.number("H");
        if (op == "lawson") sp.rs = p.numbers("r", {0, 1, 2});
        if (op == "cstar") sp.lambdas = p.pairs("lambda", {{1, 0}, {0, 1}, {-1, 0}, {0.6, 0.8}});
        sp.tol = p.number("tol", op == "lawson" ? 1e-9 : 1e-8);
      }
    });
  });
  std::optional<SurfaceCfg> sc;
  Tolerances tol;
  if (sp.op == "elastica") {
    root.forbid("surface", "for elastica");
    root.forbid("lattice", "for elastica");
    root.forbid("tolerances", "for elastica");
  } else {
    sc = read_surface(root);
    tol = read_tolerances(root, false);
  }
  return [sp, sc, tol](Run& run) {
    json& res = run.results;
    if (sp.op == "elastica") {
      const int rank = static_cast<int>(sp.k1.size());
      std::vector<double> k(2 * static_cast<std::size_t>(rank) * sp.n, 0.0);
      for (int c = 0; c < rank; ++c)
        for (int i = 0; i < sp.n; ++i) {
          const double s = i * sp.L / sp.n;
          k[2 * (static_cast<std::size_t>(c) * sp.n + i)] = std::cos(sp.omega * s) * sp.k1[c] + std::sin(sp.omega * s) * sp.k2[c];
        }
      double r = 0;
      call(cf_special_elastica(k.data(), rank, sp.n, sp.L, sp.h[0], sp.h[1], sp.gamma, &r));
      res["elastica_residual"] = r;
      run.check("elastica", r, sp.tol);
      return;
    }
    Loaded l = load(*sc, tol, run);
    cf_invariants* inv = l.inv.get();
    auto integrability = [&](const cf_invariants* h) {
      cf_residuals r;
      call(cf_invariants_residuals(h, &r));
      return r;
    };
    const cf_residuals base = integrability(inv);
    res["integrability"] = residuals_json(base);
    const std::string& op = sp.op;
    if (op == "dupin") {
      double a, b;
      call(cf_special_dupin(inv, &a, &b));
      res["schwarzian_zbar"] = a;
      res["quartic_z"] = b;
      run.check("schwarzian_zbar", a, sp.tol);
      run.check("quartic_z", b, sp.tol);
    } else if (op == "isothermic") {
      double a;
      call(cf_special_isothermic(inv, &a));
      res["imag_kappa"] = a;
      run.check("isothermic", a, sp.tol);
    } else if (op == "calapso") {
      double a;
      call(cf_special_calapso(inv, sp.tol, &a));
      res["calapso_residual"] = a;
      run.check("calapso", a, sp.tol);
    } else if (op == "willmore") {
      double a, b, c;
      call(cf_special_willmore(inv, &a, &b, &c));
      res["full"] = a;
      res["willmore"] = b;
      res["codazzi"] = c;
      run.check("willmore", a, sp.tol);
    } else if (op == "constrained_willmore") {
      double a;
      call(cf_special_constrained_willmore(inv, sp.q[0], sp.q[1], &a));
      res["constrained_willmore_residual"] = a;
      run.check("constrained_willmore", a, sp.tol);
    } else if (op == "isothermic_willmore") {
      double a, b, c;
      call(cf_special_isothermic_willmore(inv, &a, &b, &c));
      res["isothermic"] = a;
      res["willmore"] = b;
      res["gradient"] = c;
      run.check("gradient", c, sp.tol);
    } else if (op == "degree") {
      cf_degree d;
      call(cf_invariants_degree(inv, sp.gap_tol, &d));
      res["degree"] = d.degree;
      res["gap"] = d.gap;
      run.check("degree_gap", d.gap, sp.tol);
    } else if (op == "t_transform") {
      json members = json::array();
      for (double r : sp.rs) {
        Inv t = make<Inv>([&](cf_invariants** o) { return cf_special_t_transform(inv, r, sp.tol, o); });
        const cf_residuals tr = integrability(t.get());
        const double worst = std::max({tr.gauss, tr.codazzi, tr.ricci});
        members.push_back({{"r", r}, {"integrability", residuals_json(tr)}});
        run.check("t_transform_r=" + label(r), worst, std::max(sp.tol, 10 * std::max({base.gauss, base.codazzi, base.ricci})));
      }
      res["members"] = members;
    } else if (op == "associated_family") {
      double q0 = 0;
      call(cf_special_constrained_willmore(inv, sp.q[0], sp.q[1], &q0));
      res["constrained_willmore_residual"] = q0;
      json members = json::array();
      for (long i = 0; i < sp.count; ++i) {
        const cplx lam = std::polar(1.0, two_pi * static_cast<double>(i) / static_cast<double>(sp.count));
        double qr = 0, qi = 0, w = 0;
        Inv m = make<Inv>([&](cf_invariants** o) {
          return cf_special_associated_family(inv, sp.q[0], sp.q[1], lam.real(), lam.imag(), sp.tol, o, &qr, &qi);
        });
        call(cf_special_constrained_willmore(m.get(), qr, qi, &w));
        const cf_residuals mr = integrability(m.get());
        members.push_back({{"lambda", {lam.real(), lam.imag()}},
                           {"q", {qr, qi}},
                           {"constrained_willmore_residual", w},
                           {"integrability", residuals_json(mr)}});
        run.check("associated_family_" + std::to_string(i), w, sp.tol);
      }
      res["members"] = members;
    } else {
      cf_space_form d;
      call(cf_special_cmc_vector(inv, sp.H, sp.tol, &d));
      res["space_form"] = space_form_json(d);
      run.check("constancy_defect", d.constancy_defect, sp.tol);
      if (op == "lawson") {
        json members = json::array();
        for (double r : sp.rs) {
          cf_space_form_member m;
          call(cf_special_lawson(inv, &d, r, sp.tol, &m));
          members.push_back({{"r", r}, {"H", m.H}, {"K", m.K}, {"K_plus_H2", m.K + m.H * m.H},
                             {"cmc_residual", m.cmc_residual}, {"lawson_defect", m.defect}});
          run.check("lawson_r=" + label(r), m.defect, sp.tol);
        }
        res["members"] = members;
      } else if (op == "cstar") {
        json members = json::array();
        for (const auto& l : sp.lambdas) {
          cf_space_form_member m;
          call(cf_special_cstar(inv, &d, l[0], l[1], sp.tol, &m));
          members.push_back({{"lambda", l}, {"H", m.H}, {"K", m.K}, {"cmc_residual", m.cmc_residual},
                             {"curvature_defect", m.defect}});
          const std::string tag = "cstar_" + label(l[0]) + "_" + label(l[1]);
          run.check(tag + "_cmc", m.cmc_residual, sp.tol);
          if (std::abs(std::hypot(l[0], l[1]) - 1) < 1e-12) {
            run.check(tag + "_H", std::abs(m.H - d.H), sp.tol);
            run.check(tag + "_K", std::abs(m.K - d.K), sp.tol);
          }
        }
        res["members"] = members;
      }
    }
  };
}

// -------------------------------------------------------------------- driver

const std::map<std::string, Command (*)(Section&)> commands{
    {"invariants", cmd_invariants}, {"check", cmd_check}, {"flow", cmd_flow},
    {"reconstruct", cmd_reconstruct}, {"kdv", cmd_kdv}, {"special", cmd_special}};

void write_report(Run& run, double seconds) {
  json rep;
  rep["command"] = run.command;
  rep["software"] = {{"name", "conflow"}, {"version", cf_version()}};
  rep["threads"] = run.threads;
  rep["config"] = run.config;
  rep["status"] = run.ok ? "pass" : "fail";
  rep["checks"] = run.checks;
  rep["results"] = run.results;
  rep["files"] = run.files;
  if (!run.error.is_null()) rep["error"] = run.error;
  if (run.out.wall_time) rep["wall_time_s"] = seconds;
  std::ofstream os(run.path(run.out.report), std::ios::binary);
  os << rep.dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write report " + run.path(run.out.report).string());
}

int execute(const std::string& command, const std::string& config_path, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run;
  run.command = command;
  run.threads = threads;
  Command job;
  try {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot read config " + config_path);
    json raw;
    try {
      raw = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
    Section root(raw, "config");
    run.out = read_output(root);
    job = commands.at(command)(root);
    root.finish();
    run.config = root.resolved;
    std::error_code ec;
    fs::create_directories(run.out.dir, ec);
    if (ec || !fs::is_directory(run.out.dir)) throw ConfigError("cannot create output directory " + run.out.dir.string());
  } catch (const ConfigError& e) {
    std::cerr << "conflow: config error: " << e.what() << '\n';
    return 2;
  }

  int code = 0;
  try {
    job(run);
  } catch (const ConfigError& e) {
    run.ok = false;
    run.error = {{"kind", "config"}, {"message", e.what()}};
    code = 2;
  } catch (const NumericError& e) {
    run.ok = false;
    run.error = {{"kind", "numeric"}, {"code", cf_status_name(e.status)}, {"message", e.what()}};
    code = 3;
  } catch (const Failure& e) {
    run.ok = false;
    run.error = {{"kind", "numeric"}, {"code", e.name}, {"message", e.what()}};
    code = 3;
  }
  if (code == 0 && !run.ok) code = 3;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_report(run, seconds);
  } catch (const std::exception& e) {
    std::cerr << "conflow: " << e.what() << '\n';
    return code ? code : 3;
  }
  std::cerr << "conflow " << command << ": " << (run.ok ? "pass" : "fail");
  if (!run.error.is_null()) std::cerr << " (" << run.error["message"].get<std::string>() << ")";
  std::cerr << ", " << run.files.size() << " files, " << std::fixed << std::setprecision(3) << seconds << " s\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conflow: Moebius-invariant surface theory on sampled conformal tori"};
  app.require_subcommand(1);
  std::string config;
  for (const auto& [name, fn] : commands) {
    (void)fn;
    app.add_subcommand(name, name + " run driven by a JSON config")
        ->add_option("config", config, "path to the JSON config")
        ->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  int threads = 1;
  if (const char* env = std::getenv("CONFLOW_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end || v < 1 || v > 1024) {
      std::cerr << "conflow: CONFLOW_THREADS must be a positive integer\n";
      return 2;
    }
    threads = static_cast<int>(v);
  }
  if (cf_set_threads(threads) != CF_OK) {
    std::cerr << "conflow: " << cf_last_error() << '\n';
    return 2;
  }
  return execute(app.get_subcommands().front()->get_name(), config, threads);
}
