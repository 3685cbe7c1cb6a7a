//! Log-determinants of `−∂_u² + B²` on the cylinder `[0, r] × Y`.
//!
//! Every boundary pair splits the signed spectrum into three sides (negative,
//! positive, kernel). Each side is assigned one per-mode condition, and the
//! regularized sum of closed-form mode determinants reduces to
//!
//! ```text
//!   Σ_side λ       → ½ ζ_{|B|}(−1)
//!   Σ_side 1       → ½ ζ_{B²}(0)
//!   Σ_side log λ   → −¼ ζ'_{B²}(0)
//! ```
//!
//! plus the absolutely convergent `Σ m log(1 − e^{−2λr})` on Dirichlet sides.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gluing::q_logdet;
use crate::modes::{log_one_minus_exp2, ModeBc};
use crate::spectral::TangentialModel;
use crate::sum::NeumaierSum;

/// Target for truncating convergent mode sums.
pub const TAIL_TOL: f64 = 1e-15;

/// One end condition of a cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndCondition {
    Dirichlet,
    /// `P_<`
    ApsNeg,
    /// `P_≥`
    ApsNonneg,
    /// `P_>`
    ApsPos,
    /// `P_≤`
    ApsNonpos,
    /// `∂_u + |B|`
    RobinAbsB,
}

impl EndCondition {
    fn label(self) -> &'static str {
        match self {
            Self::Dirichlet => "D",
            Self::ApsNeg => "P<",
            Self::ApsNonneg => "P>=",
            Self::ApsPos => "P>",
            Self::ApsNonpos => "P<=",
            Self::RobinAbsB => "R",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s.trim() {
            "D" => Self::Dirichlet,
            "P<" => Self::ApsNeg,
            "P>=" | "P≥" => Self::ApsNonneg,
            "P>" => Self::ApsPos,
            "P<=" | "P≤" => Self::ApsNonpos,
            "R" => Self::RobinAbsB,
            _ => return None,
        })
    }
}

/// A supported boundary pair for the cylinder `[0, r] × Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CylinderBc {
    left: EndCondition,
    right: EndCondition,
}

impl CylinderBc {
    pub const DD: Self = Self {
        left: EndCondition::Dirichlet,
        right: EndCondition::Dirichlet,
    };
    pub const D_PNEG: Self = Self {
        left: EndCondition::Dirichlet,
        right: EndCondition::ApsNeg,
    };
    pub const D_PNONPOS: Self = Self {
        left: EndCondition::Dirichlet,
        right: EndCondition::ApsNonpos,
    };
    pub const PNONNEG_D: Self = Self {
        left: EndCondition::ApsNonneg,
        right: EndCondition::Dirichlet,
    };
    pub const PPOS_D: Self = Self {
        left: EndCondition::ApsPos,
        right: EndCondition::Dirichlet,
    };
    pub const D_ROBIN: Self = Self {
        left: EndCondition::Dirichlet,
        right: EndCondition::RobinAbsB,
    };

    pub const ALL: [Self; 6] = [
        Self::DD,
        Self::D_PNEG,
        Self::D_PNONPOS,
        Self::PNONNEG_D,
        Self::PPOS_D,
        Self::D_ROBIN,
    ];

    pub fn new(left: EndCondition, right: EndCondition) -> Result<Self> {
        let bc = Self { left, right };
        if Self::ALL.contains(&bc) {
            Ok(bc)
        } else {
            Err(Error::UnsupportedBoundary(bc.to_string()))
        }
    }

    pub fn left(&self) -> EndCondition {
        self.left
    }

    pub fn right(&self) -> EndCondition {
        self.right
    }

    /// Mode conditions on the (negative, positive, kernel) sides.
    fn sides(&self) -> [ModeBc; 3] {
        use ModeBc::*;
        match (self.left, self.right) {
            (EndCondition::Dirichlet, EndCondition::Dirichlet) => [Dirichlet, Dirichlet, Dirichlet],
            (EndCondition::Dirichlet, EndCondition::ApsNeg) => [Dirichlet, RobinAbs, Neumann],
            (EndCondition::Dirichlet, EndCondition::ApsNonpos) => [Dirichlet, RobinAbs, Dirichlet],
            (EndCondition::ApsNonneg, EndCondition::Dirichlet) => [RobinAbs, Dirichlet, Dirichlet],
            (EndCondition::ApsPos, EndCondition::Dirichlet) => [RobinAbs, Dirichlet, Neumann],
            (EndCondition::Dirichlet, EndCondition::RobinAbsB) => [RobinAbs, RobinAbs, Neumann],
            _ => unreachable!("validated at construction"),
        }
    }
}

impl fmt::Display for CylinderBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.left.label(), self.right.label())
    }
}

impl FromStr for CylinderBc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedBoundary(s.to_string());
        let (l, r) = s.split_once(',').ok_or_else(bad)?;
        Self::new(
            EndCondition::parse(l).ok_or_else(bad)?,
            EndCondition::parse(r).ok_or_else(bad)?,
        )
    }
}

impl Serialize for CylinderBc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Per-mode end conditions `(left, right)` for a signed eigenvalue of `B`.
///
/// An APS end imposes Dirichlet data on the modes its first projector
/// retains and `∂ + |B|` (Neumann on the kernel) on the rest.
pub fn mode_bc_projection(bc: CylinderBc, lambda_signed: f64) -> (ModeBc, ModeBc) {
    let [neg, pos, ker] = bc.sides();
    let free = if lambda_signed < 0.0 {
        neg
    } else if lambda_signed > 0.0 {
        pos
    } else {
        ker
    };
    if bc.left == EndCondition::Dirichlet {
        (ModeBc::Dirichlet, free)
    } else {
        (free, ModeBc::Dirichlet)
    }
}

/// A coefficient paired with the spectral invariant it multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Piece {
    pub coeff: f64,
    pub invariant: f64,
    pub value: f64,
}

impl Piece {
    pub fn new(coeff: f64, invariant: f64) -> Self {
        let value = if coeff == 0.0 { 0.0 } else { coeff * invariant };
        Self {
            coeff,
            invariant,
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Pieces {
    /// Paired with `ζ_{|B|}(−1)`.
    pub linear_in_r: Piece,
    /// Paired with `ζ_{B²}(0)`.
    pub count_part: Piece,
    /// Paired with `ζ'_{B²}(0)`.
    pub log_part: Piece,
    pub kernel_part: f64,
    pub convergent_tail: f64,
}

/// A regularized real number with its assembly decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegScalar {
    pub value: f64,
    pub pieces: Pieces,
    pub est_error: f64,
}

impl RegScalar {
    pub fn from_pieces(pieces: Pieces, est_error: f64) -> Self {
        let value = Self::recombine(&pieces);
        Self {
            value,
            pieces,
            est_error,
        }
    }

    /// Sum of the pieces in a fixed order.
    pub fn recombine(p: &Pieces) -> f64 {
        let mut acc = NeumaierSum::new();
        for x in [
            p.linear_in_r.value,
            p.count_part.value,
            p.log_part.value,
            p.kernel_part,
            p.convergent_tail,
        ] {
            acc.add(x);
        }
        acc.value()
    }
}

/// `T(r) = Σ_{λ>0} m log(1 − e^{−2λr})` over magnitudes, with its error.
pub fn exp_tail(model: &TangentialModel, r: f64) -> Result<(f64, f64)> {
    if r.is_infinite() {
        return Ok((0.0, 0.0));
    }
    let mut acc = NeumaierSum::new();
    let mut mag = 0.0;
    let envelope = |lambda: f64| -log_one_minus_exp2(lambda * r);
    let bound = model.walk_lines(TAIL_TOL, envelope, |line| {
        let t = line.mult() * log_one_minus_exp2(line.lambda * r);
        acc.add(t);
        mag += t.abs();
        Ok(())
    })?;
    Ok((acc.value(), bound + 4.0 * f64::EPSILON * mag))
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "cylinder length must be finite and > 0, got {r}"
        )));
    }
    Ok(())
}

/// `log Det(−∂_u² + B²)` on `[0, r] × Y` with boundary pair `bc`.
pub fn cylinder_logdet(model: &TangentialModel, r: f64, bc: CylinderBc) -> Result<RegScalar> {
    check_r(r)?;
    let inv = model.invariants()?;
    let [neg, pos, ker] = bc.sides();

    // Per side: (linear weight, log 2 weight, −log λ weight, Dirichlet tail).
    let weights = |m: ModeBc| -> (f64, f64, f64, bool) {
        match m {
            ModeBc::Dirichlet => (1.0, 0.0, -1.0, true),
            ModeBc::RobinAbs | ModeBc::Neumann => (1.0, 1.0, 0.0, false),
        }
    };
    let (a_n, b_n, g_n, t_n) = weights(neg);
    let (a_p, b_p, g_p, t_p) = weights(pos);

    let linear = Piece::new(r * (a_n + a_p) / 2.0, inv.zeta_abs_b_m1);
    let count = Piece::new(LN_2 * (b_n + b_p) / 2.0, inv.zeta_b2_0);
    let log = Piece::new(-(g_n + g_p) / 4.0, inv.zeta_b2_deriv_0);

    let dd_sides = t_n as u8 + t_p as u8;
    let (tail, tail_err) = if dd_sides > 0 {
        exp_tail(model, r)?
    } else {
        (0.0, 0.0)
    };

    let k = model.kernel_dim() as f64;
    let kernel_part = if k == 0.0 {
        0.0
    } else {
        match ker {
            ModeBc::Dirichlet => k * (2.0 * r).ln(),
            _ => k * LN_2,
        }
    };

    let pieces = Pieces {
        linear_in_r: linear,
        count_part: count,
        log_part: log,
        kernel_part,
        convergent_tail: dd_sides as f64 * tail,
    };
    let est_error = linear.coeff.abs() * inv.zeta_abs_b_m1_err
        + count.coeff.abs() * inv.zeta_b2_0_err
        + log.coeff.abs() * inv.zeta_b2_deriv_0_err
        + dd_sides as f64 * tail_err
        + 8.0
            * f64::EPSILON
            * (linear.value.abs() + count.value.abs() + log.value.abs() + kernel_part.abs());
    Ok(RegScalar::from_pieces(pieces, est_error))
}

/// Outcome of the Robin/APS gluing identity at one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GluingResidual {
    pub r: f64,
    /// `logdet(D,P<) + logdet(P≥,D) − 2 logdet(D,D)`
    pub lhs: f64,
    /// `log Det Q_r`
    pub rhs: f64,
    pub residual: f64,
    pub est_error: f64,
}

/// `[logdet(D,P<) + logdet(P≥,D) − 2 logdet(D,D)] − log Det Q_r`.
pub fn gluing_residual(model: &TangentialModel, r: f64) -> Result<GluingResidual> {
    let a = cylinder_logdet(model, r, CylinderBc::D_PNEG)?;
    let b = cylinder_logdet(model, r, CylinderBc::PNONNEG_D)?;
    let c = cylinder_logdet(model, r, CylinderBc::DD)?;
    let q = q_logdet(model, r)?;
    let mut lhs = NeumaierSum::new();
    lhs.add(a.value);
    lhs.add(b.value);
    lhs.add(-2.0 * c.value);
    let lhs = lhs.value();
    let residual = lhs - q.value;
    let scale = a.value.abs() + b.value.abs() + 2.0 * c.value.abs() + q.value.abs();
    let est_error =
        a.est_error + b.est_error + 2.0 * c.est_error + q.est_error + 4.0 * f64::EPSILON * scale;
    Ok(GluingResidual {
        r,
        lhs,
        rhs: q.value,
        residual,
        est_error,
    })
}
