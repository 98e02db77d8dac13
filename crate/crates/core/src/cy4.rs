//! Invariants of the smooth Weierstrass fourfold over a base threefold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mori;
use crate::toric::ToricVariety;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cy4Report {
    pub chi_x: i64,
    pub ell: Option<i64>,
    pub h11_x: i64,
    pub weierstrass_smooth: bool,
    /// Set when the Weierstrass model may be singular and `chi_x` is only formal.
    pub formal_value: bool,
}

/// `12 c_1 c_2 + 360 c_1^3` with `c_1 c_2 = 24`.
pub fn chi_x_from_degree(minus_k_cubed: i64) -> i64 {
    288 + 360 * minus_k_cubed
}

/// Euler characteristic over a toric base; checks `c_1 c_2 = 24` first.
pub fn chi_x(v: &ToricVariety) -> Result<i64> {
    let c1c2 = v.c1c2();
    if c1c2 != 24 {
        return Err(Error::Consistency(format!("c1·c2 = {c1c2} on `{}`, expected 24", v.name())));
    }
    Ok(12 * c1c2 + 360 * v.anticanonical_degree())
}

/// `ℓ` with `χ = 144(17 + 5ℓ)`, when it is a non-negative integer.
pub fn ell_index(chi: i64) -> Option<i64> {
    if chi % 144 != 0 {
        return None;
    }
    let q = chi / 144 - 17;
    (q >= 0 && q % 5 == 0).then_some(q / 5)
}

/// `h^{1,1}(X) = h^{1,1}(B) + 1` for a fibration with one section.
pub fn h11_x(base_h11: i64) -> i64 {
    base_h11 + 1
}

/// `−K_B` very ample; on smooth complete toric varieties ample suffices.
pub fn weierstrass_smoothness_criterion(v: &ToricVariety) -> Result<bool> {
    mori::is_ample(v, &v.anticanonical_class())
}

pub fn cy4_report(v: &ToricVariety) -> Result<Cy4Report> {
    let chi = chi_x(v)?;
    let smooth = weierstrass_smoothness_criterion(v)?;
    Ok(Cy4Report {
        chi_x: chi,
        ell: ell_index(chi),
        h11_x: h11_x(v.picard_rank() as i64),
        weierstrass_smooth: smooth,
        formal_value: !smooth,
    })
}
