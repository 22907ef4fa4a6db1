//! Geometry of the symmetrised bidisc Γ and of rational Γ-inner maps.

mod distance;
mod map;
mod point;

pub use distance::{caratheodory_distance, kobayashi_defect};
pub use map::{
    is_full, is_superficial, is_symmetrization, royal_nodes, royal_polynomial, structural_form,
    verify_gamma_inner, CommonForm, GammaInnerCheck, GammaMap, RoyalAnalysis, RoyalNode, StructuralForm,
    Symmetrization,
};
pub use point::{membership, membership_tol, phi, GammaPoint, Membership, MembershipKind, MEMBERSHIP_TOL};
