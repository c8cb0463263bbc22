#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "conflow/c_api.h"

namespace cfcli {

struct FieldFree { void operator()(cf_field* p) const { cf_field_free(p); } };
struct SurfaceFree { void operator()(cf_surface* p) const { cf_surface_free(p); } };
struct InvariantsFree { void operator()(cf_invariants* p) const { cf_invariants_free(p); } };
struct FlowFree { void operator()(cf_flow* p) const { cf_flow_free(p); } };
struct KdVFree { void operator()(cf_kdv* p) const { cf_kdv_free(p); } };

using Field = std::unique_ptr<cf_field, FieldFree>;
using Surface = std::unique_ptr<cf_surface, SurfaceFree>;
using Inv = std::unique_ptr<cf_invariants, InvariantsFree>;
using Flow = std::unique_ptr<cf_flow, FlowFree>;
using KdV = std::unique_ptr<cf_kdv, KdVFree>;

/// A library call that returned a non-zero status.
struct NumericError : std::runtime_error {
  NumericError(int s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  int status;
};

/// A check that the run cannot continue past.
struct Failure : std::runtime_error {
  Failure(std::string n, const std::string& msg) : std::runtime_error(msg), name(std::move(n)) {}
  std::string name;
};

inline void call(int status) {
  if (status != CF_OK) throw NumericError(status, cf_last_error());
}

template <class H, class F>
H make(F&& fn) {
  typename H::pointer p = nullptr;
  call(fn(&p));
  return H(p);
}

}  // namespace cfcli
