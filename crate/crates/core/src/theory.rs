//! Thirteen-parameter displacement field with a zig-zag term, and the six
//! plate theories obtained by switching nodal unknowns off.
//!
//! ```text
//! u = u0 + z θx + z² βx + z³ φx + S(z) ψx
//! v = v0 + z θy + z² βy + z³ φy + S(z) ψy
//! w = w0 + z w1 + z² Γ
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layup::{Layup, Side};

/// Nodal unknowns in their fixed global order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dof {
    U0,
    V0,
    W0,
    ThetaX,
    ThetaY,
    W1,
    BetaX,
    BetaY,
    Gamma,
    PhiX,
    PhiY,
    PsiX,
    PsiY,
}

pub const NUM_DOFS: usize = 13;

impl Dof {
    pub const ALL: [Dof; NUM_DOFS] = [
        Dof::U0,
        Dof::V0,
        Dof::W0,
        Dof::ThetaX,
        Dof::ThetaY,
        Dof::W1,
        Dof::BetaX,
        Dof::BetaY,
        Dof::Gamma,
        Dof::PhiX,
        Dof::PhiY,
        Dof::PsiX,
        Dof::PsiY,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Dof::U0 => "u0",
            Dof::V0 => "v0",
            Dof::W0 => "w0",
            Dof::ThetaX => "theta_x",
            Dof::ThetaY => "theta_y",
            Dof::W1 => "w1",
            Dof::BetaX => "beta_x",
            Dof::BetaY => "beta_y",
            Dof::Gamma => "Gamma",
            Dof::PhiX => "phi_x",
            Dof::PhiY => "phi_y",
            Dof::PsiX => "psi_x",
            Dof::PsiY => "psi_y",
        }
    }
}

/// Nodal values in the fixed 13-slot order. Inactive slots hold zero.
pub type NodalDofs = [f64; NUM_DOFS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TheoryVariant {
    #[serde(rename = "HSDT13")]
    Hsdt13,
    #[serde(rename = "HSDT11A")]
    Hsdt11A,
    #[serde(rename = "HSDT11B")]
    Hsdt11B,
    #[serde(rename = "HSDT9")]
    Hsdt9,
    #[serde(rename = "TSDT7")]
    Tsdt7,
    #[serde(rename = "FSDT5")]
    Fsdt5,
}

impl TheoryVariant {
    pub const ALL: [TheoryVariant; 6] = [
        TheoryVariant::Hsdt13,
        TheoryVariant::Hsdt11A,
        TheoryVariant::Hsdt11B,
        TheoryVariant::Hsdt9,
        TheoryVariant::Tsdt7,
        TheoryVariant::Fsdt5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoryVariant::Hsdt13 => "HSDT13",
            TheoryVariant::Hsdt11A => "HSDT11A",
            TheoryVariant::Hsdt11B => "HSDT11B",
            TheoryVariant::Hsdt9 => "HSDT9",
            TheoryVariant::Tsdt7 => "TSDT7",
            TheoryVariant::Fsdt5 => "FSDT5",
        }
    }

    /// Active unknowns as a bit set over [`Dof::index`].
    pub fn mask(self) -> u16 {
        use Dof::*;
        let dofs: &[Dof] = match self {
            TheoryVariant::Hsdt13 => &Dof::ALL,
            TheoryVariant::Hsdt11A => &[U0, V0, W0, ThetaX, ThetaY, BetaX, BetaY, PhiX, PhiY, PsiX, PsiY],
            TheoryVariant::Hsdt11B => &[U0, V0, W0, ThetaX, ThetaY, W1, BetaX, BetaY, Gamma, PhiX, PhiY],
            TheoryVariant::Hsdt9 => &[U0, V0, W0, ThetaX, ThetaY, BetaX, BetaY, PhiX, PhiY],
            TheoryVariant::Tsdt7 => &[U0, V0, W0, ThetaX, ThetaY, BetaX, BetaY],
            TheoryVariant::Fsdt5 => &[U0, V0, W0, ThetaX, ThetaY],
        };
        dofs.iter().fold(0, |m, d| m | 1 << d.index())
    }

    pub fn is_active(self, dof: Dof) -> bool {
        self.mask() & (1 << dof.index()) != 0
    }

    /// Whether the transverse displacement varies through the thickness.
    pub fn has_stretch(self) -> bool {
        self.is_active(Dof::W1)
    }

    pub fn active_dofs(self) -> Vec<Dof> {
        Dof::ALL.into_iter().filter(|&d| self.is_active(d)).collect()
    }

    pub fn num_active(self) -> usize {
        self.mask().count_ones() as usize
    }

    /// Slot of `dof` within this variant's per-node unknowns.
    pub fn slot(self, dof: Dof) -> Option<usize> {
        self.is_active(dof)
            .then(|| (self.mask() & ((1u16 << dof.index()) - 1)).count_ones() as usize)
    }
}

impl fmt::Display for TheoryVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoryVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoryVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "theory variant",
                name: s.to_string(),
            })
    }
}

/// Zig-zag function `S = 2 (-1)^k z_k / h_k` and its slope. Layers are
/// numbered from `k = 1` at the bottom.
pub fn zigzag_value(layup: &Layup, z: f64, side: Option<Side>) -> Result<(f64, f64)> {
    let k = layup.layer_index(z, side)?;
    let layer = &layup.layers()[k];
    let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let hk = layer.thickness();
    let slope = 2.0 * sign / hk;
    Ok((slope * (z - layer.mid()), slope))
}

/// Displacement `(u, v, w)` at height `z` from the 13 generalized values.
/// Inactive unknowns of `variant` contribute nothing.
pub fn displacement_expansion(
    dofs: &NodalDofs,
    z: f64,
    layup: &Layup,
    side: Option<Side>,
    variant: TheoryVariant,
) -> Result<[f64; 3]> {
    let (s, _) = zigzag_value(layup, z, side)?;
    let d = |dof: Dof| if variant.is_active(dof) { dofs[dof.index()] } else { 0.0 };
    let (z2, z3) = (z * z, z * z * z);
    let u = d(Dof::U0) + z * d(Dof::ThetaX) + z2 * d(Dof::BetaX) + z3 * d(Dof::PhiX) + s * d(Dof::PsiX);
    let v = d(Dof::V0) + z * d(Dof::ThetaY) + z2 * d(Dof::BetaY) + z3 * d(Dof::PhiY) + s * d(Dof::PsiY);
    let w = d(Dof::W0) + z * d(Dof::W1) + z2 * d(Dof::Gamma);
    Ok([u, v, w])
}

/// Number of membrane/bending strain resultants: five families of
/// `(eps_xx, eps_yy, eps_zz, gamma_xy)`.
pub const NUM_BM: usize = 20;
/// Number of transverse shear resultants: four families of `(gamma_xz, gamma_yz)`.
pub const NUM_SHEAR: usize = 8;
pub const NUM_STRAINS: usize = NUM_BM + NUM_SHEAR;

/// Thickness functions multiplying the membrane/bending families `eps_0..eps_4`.
pub fn bm_weights(z: f64, s: f64) -> [f64; 5] {
    [1.0, z, z * z, z * z * z, s]
}

/// Thickness functions multiplying the shear families `gamma_0..gamma_3`.
pub fn shear_weights(z: f64, ds: f64) -> [f64; 4] {
    [1.0, z, z * z, ds]
}

/// What a nodal unknown feeds into the strain resultants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Value,
    DerivX,
    DerivY,
}

/// One entry of the strain operator: resultant row, source of the field, coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainTerm {
    pub row: usize,
    pub source: Source,
    pub coeff: f64,
}

const fn bm(family: usize, comp: usize) -> usize {
    4 * family + comp
}

const fn sh(family: usize, comp: usize) -> usize {
    NUM_BM + 2 * family + comp
}

const XX: usize = 0;
const YY: usize = 1;
const ZZ: usize = 2;
const XY: usize = 3;
const XZ: usize = 0;
const YZ: usize = 1;

const fn t(row: usize, source: Source, coeff: f64) -> StrainTerm {
    StrainTerm { row, source, coeff }
}

use Source::{DerivX, DerivY, Value};

/// Strain-operator entries indexed by [`Dof::index`].
const TERMS: [&[StrainTerm]; NUM_DOFS] = [
    // U0
    &[t(bm(0, XX), DerivX, 1.0), t(bm(0, XY), DerivY, 1.0)],
    // V0
    &[t(bm(0, YY), DerivY, 1.0), t(bm(0, XY), DerivX, 1.0)],
    // W0
    &[t(sh(0, XZ), DerivX, 1.0), t(sh(0, YZ), DerivY, 1.0)],
    // ThetaX
    &[t(bm(1, XX), DerivX, 1.0), t(bm(1, XY), DerivY, 1.0), t(sh(0, XZ), Value, 1.0)],
    // ThetaY
    &[t(bm(1, YY), DerivY, 1.0), t(bm(1, XY), DerivX, 1.0), t(sh(0, YZ), Value, 1.0)],
    // W1
    &[t(bm(0, ZZ), Value, 1.0), t(sh(1, XZ), DerivX, 1.0), t(sh(1, YZ), DerivY, 1.0)],
    // BetaX
    &[t(bm(2, XX), DerivX, 1.0), t(bm(2, XY), DerivY, 1.0), t(sh(1, XZ), Value, 2.0)],
    // BetaY
    &[t(bm(2, YY), DerivY, 1.0), t(bm(2, XY), DerivX, 1.0), t(sh(1, YZ), Value, 2.0)],
    // Gamma
    &[t(bm(1, ZZ), Value, 2.0), t(sh(2, XZ), DerivX, 1.0), t(sh(2, YZ), DerivY, 1.0)],
    // PhiX
    &[t(bm(3, XX), DerivX, 1.0), t(bm(3, XY), DerivY, 1.0), t(sh(2, XZ), Value, 3.0)],
    // PhiY
    &[t(bm(3, YY), DerivY, 1.0), t(bm(3, XY), DerivX, 1.0), t(sh(2, YZ), Value, 3.0)],
    // PsiX
    &[t(bm(4, XX), DerivX, 1.0), t(bm(4, XY), DerivY, 1.0), t(sh(3, XZ), Value, 1.0)],
    // PsiY
    &[t(bm(4, YY), DerivY, 1.0), t(bm(4, XY), DerivX, 1.0), t(sh(3, YZ), Value, 1.0)],
];

/// Strain-operator entries of one nodal unknown.
pub fn strain_terms(dof: Dof) -> &'static [StrainTerm] {
    TERMS[dof.index()]
}

/// Strain operator of a variant: for each active unknown (in slot order) its terms.
pub fn strain_operators(variant: TheoryVariant) -> Vec<(Dof, &'static [StrainTerm])> {
    variant.active_dofs().into_iter().map(|d| (d, strain_terms(d))).collect()
}

/// Strain resultants at a point from the field values and first derivatives
/// of all 13 unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainState {
    pub resultants: [f64; NUM_STRAINS],
}

impl StrainState {
    pub fn from_fields(
        variant: TheoryVariant,
        value: &NodalDofs,
        dx: &NodalDofs,
        dy: &NodalDofs,
    ) -> Self {
        let mut r = [0.0; NUM_STRAINS];
        for (dof, terms) in strain_operators(variant) {
            let i = dof.index();
            for term in terms {
                let f = match term.source {
                    Source::Value => value[i],
                    Source::DerivX => dx[i],
                    Source::DerivY => dy[i],
                };
                r[term.row] += term.coeff * f;
            }
        }
        Self { resultants: r }
    }

    /// Family `j` (0..5) of membrane/bending resultants.
    pub fn eps(&self, j: usize) -> [f64; 4] {
        let s = &self.resultants[4 * j..4 * j + 4];
        [s[0], s[1], s[2], s[3]]
    }

    /// Family `j` (0..4) of shear resultants. Family 3 still needs the zig-zag slope.
    pub fn gamma(&self, j: usize) -> [f64; 2] {
        let s = &self.resultants[NUM_BM + 2 * j..NUM_BM + 2 * j + 2];
        [s[0], s[1]]
    }

    /// `(eps_xx, eps_yy, eps_zz, gamma_xy)` at height `z`.
    pub fn bm_at(&self, z: f64, s: f64) -> [f64; 4] {
        let w = bm_weights(z, s);
        let mut e = [0.0; 4];
        for (j, wj) in w.iter().enumerate() {
            let f = self.eps(j);
            for c in 0..4 {
                e[c] += wj * f[c];
            }
        }
        e
    }

    /// `(gamma_xz, gamma_yz)` at height `z`.
    pub fn shear_at(&self, z: f64, ds: f64) -> [f64; 2] {
        let w = shear_weights(z, ds);
        let mut g = [0.0; 2];
        for (j, wj) in w.iter().enumerate() {
            let f = self.gamma(j);
            g[0] += wj * f[0];
            g[1] += wj * f[1];
        }
        g
    }
}
