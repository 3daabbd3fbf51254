//! Polynomial spaces, quadrature and curl evaluators.

pub mod basis;
pub mod hcurl_rect;
pub mod lagrange;
pub mod legendre;
pub mod poly;
pub mod quadrature;

pub use basis::{simplex_modal_basis, ElementBasis, ScalarBasis, SpaceKind};
pub use hcurl_rect::{pi_projector, HcurlFunction, HcurlGroup, HcurlRectBasis, PiProjection};
pub use lagrange::LagrangeSpace;
pub use legendre::legendre_phi;
pub use quadrature::{quadrature_rule, QuadratureRule, RefShape};
