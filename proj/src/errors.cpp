#include "conflow/errors.hpp"

namespace conflow {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "Ok";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::unsolvable_on_torus: return "UnsolvableOnTorus";
    case ErrorCode::critical_point: return "CriticalPoint";
    case ErrorCode::branch_discontinuity: return "BranchDiscontinuity";
    case ErrorCode::not_normalized: return "NotNormalized";
    case ErrorCode::non_real_input: return "NonRealInput";
    case ErrorCode::unsupported_order: return "UnsupportedOrder";
    case ErrorCode::blow_up: return "BlowUp";
    case ErrorCode::not_on_sphere: return "NotOnSphere";
    case ErrorCode::not_null: return "NotNull";
    case ErrorCode::not_forward: return "NotForward";
    case ErrorCode::point_at_infinity: return "PointAtInfinity";
    case ErrorCode::degenerate_metric: return "DegenerateMetric";
    case ErrorCode::projection_leak: return "ProjectionLeak";
    case ErrorCode::not_normal: return "NotNormal";
    case ErrorCode::not_implemented_dim: return "NotImplementedDim";
    case ErrorCode::not_integrable: return "NotIntegrable";
    case ErrorCode::holonomy_defect: return "HolonomyDefect";
    case ErrorCode::conformal_constraint_violated: return "ConformalConstraintViolated";
    case ErrorCode::reality_violation: return "RealityViolation";
    case ErrorCode::nonzero_normal_degree: return "NonzeroNormalDegree";
    case ErrorCode::non_integer_degree: return "NonIntegerDegree";
    case ErrorCode::conformal_drift: return "ConformalDrift";
    case ErrorCode::not_isothermic: return "NotIsothermic";
    case ErrorCode::kappa_vanishes: return "KappaVanishes";
    case ErrorCode::not_unit: return "NotUnit";
    case ErrorCode::not_constrained_willmore: return "NotConstrainedWillmore";
    case ErrorCode::not_cmc: return "NotCmc";
    case ErrorCode::non_constant: return "NonConstant";
    case ErrorCode::non_periodic: return "NonPeriodic";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace conflow
