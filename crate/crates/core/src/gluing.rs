//! Dirichlet-to-Neumann layer: cap operators, the four DtN variants on the
//! stretched manifold, `Det Q_r`, the adiabatic bracket, and the 2×2 block
//! operators controlling injectivity of the glued problem.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::cylinder::{exp_tail, Piece, Pieces, RegScalar, TAIL_TOL};
use crate::error::{Error, Result};
use crate::spectral::TangentialModel;
use crate::sum::NeumaierSum;

/// Perturbation `c (1 + λ²)^{−β}` added to `|λ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub c: f64,
    pub beta: f64,
}

impl Perturbation {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.c * (1.0 + lambda * lambda).powf(-self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapMu {
    /// `|λ| + p(λ)`
    AbsBPlus(Option<Perturbation>),
    /// Identically zero.
    Zero,
}

/// Diagonal model of a cap Dirichlet-to-Neumann operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapOperator {
    mu: CapMu,
    kernel_value: f64,
}

/// On-disk cap description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapFile {
    pub mu: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pert: Option<Perturbation>,
    #[serde(default)]
    pub kernel_value: f64,
}

impl CapOperator {
    /// `mu(λ) = |λ|`.
    pub fn abs_b() -> Self {
        Self {
            mu: CapMu::AbsBPlus(None),
            kernel_value: 0.0,
        }
    }

    /// `mu(λ) = |λ| + c (1 + λ²)^{−β}`, `β ≥ 1`.
    pub fn abs_b_perturbed(c: f64, beta: f64) -> Result<Self> {
        if !c.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidCap(
                "perturbation parameters must be finite".into(),
            ));
        }
        if beta < 1.0 {
            return Err(Error::InvalidCap(format!(
                "perturbation exponent must be ≥ 1, got {beta}"
            )));
        }
        Ok(Self {
            mu: CapMu::AbsBPlus(Some(Perturbation { c, beta })),
            kernel_value: 0.0,
        })
    }

    pub fn zero() -> Self {
        Self {
            mu: CapMu::Zero,
            kernel_value: 0.0,
        }
    }

    pub fn with_kernel_value(self, kernel_value: f64) -> Result<Self> {
        if !(kernel_value >= 0.0) || !kernel_value.is_finite() {
            return Err(Error::InvalidCap(format!(
                "kernel_value must be finite and ≥ 0, got {kernel_value}"
            )));
        }
        Ok(Self {
            kernel_value,
            ..self
        })
    }

    pub fn from_file(file: &CapFile) -> Result<Self> {
        let cap = match (file.mu.as_str(), file.pert) {
            ("absB_plus", None) => Self::abs_b(),
            ("absB_plus", Some(p)) => Self::abs_b_perturbed(p.c, p.beta)?,
            ("zero", None) => Self::zero(),
            ("zero", Some(_)) => {
                return Err(Error::InvalidCap(
                    "the zero cap takes no perturbation".into(),
                ))
            }
            (other, _) => return Err(Error::InvalidCap(format!("unknown cap kind {other:?}"))),
        };
        cap.with_kernel_value(file.kernel_value)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CapFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidCap(format!("malformed cap JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn mu_kind(&self) -> CapMu {
        self.mu
    }

    pub fn kernel_value(&self) -> f64 {
        self.kernel_value
    }

    /// Eigenvalue on the `±λ` mode pair, `λ > 0`.
    pub fn mu(&self, lambda: f64) -> f64 {
        let lambda = lambda.abs();
        match self.mu {
            CapMu::AbsBPlus(None) => lambda,
            CapMu::AbsBPlus(Some(p)) => lambda + p.eval(lambda),
            CapMu::Zero => 0.0,
        }
    }

    /// Checks `mu ≥ 0` on the spectrum and `Σ m |p| / |λ| < ∞`.
    pub fn validate_for(&self, model: &TangentialModel) -> Result<()> {
        let CapMu::AbsBPlus(Some(p)) = self.mu else {
            return Ok(());
        };
        if let Some(lmin) = model.lambda_min() {
            // mu is bounded below by λ_min − |c| (1 + λ_min²)^{−β} on the spectrum.
            if p.c < 0.0 && lmin + p.eval(lmin) < 0.0 {
                return Err(Error::InvalidCap(format!(
                    "cap eigenvalue negative at lambda = {lmin}"
                )));
            }
        }
        // m(λ) ~ λ^{g−1}, |p| ~ λ^{−2β}: Σ m |p| / λ converges iff 2β > g − 1.
        let degree = model.spectral_growth() - 1.0;
        if !model.is_finite() && !(2.0 * p.beta > degree) {
            return Err(Error::InvalidCap(format!(
                "perturbation decay 2β = {} does not dominate multiplicity degree {degree}",
                2.0 * p.beta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DtnVariant {
    M1Dirichlet,
    M2Dirichlet,
    /// `P_<` on the first half-cylinder.
    M1Aps,
    /// `P_>` on the second half-cylinder.
    M2Aps,
}

/// `|λ| (coth(|λ|r) − 1) = 2|λ| / (e^{2|λ|r} − 1)`.
fn coth_excess(lambda: f64, r: f64) -> f64 {
    if r.is_infinite() {
        0.0
    } else {
        2.0 * lambda / (2.0 * lambda * r).exp_m1()
    }
}

/// `(mu(λ) + |λ|, excess)` with the DtN eigenvalue equal to their sum.
fn dtn_parts(cap: &CapOperator, lambda: f64, r: f64, variant: DtnVariant) -> Result<(f64, f64)> {
    if lambda == 0.0 {
        return Err(Error::KernelMode);
    }
    if !(r > 0.0) {
        return Err(Error::InvalidProblem(format!("r must be > 0, got {r}")));
    }
    let mag = lambda.abs();
    let base = cap.mu(mag) + mag;
    let curved = match variant {
        DtnVariant::M1Dirichlet | DtnVariant::M2Dirichlet => true,
        DtnVariant::M1Aps => lambda < 0.0,
        DtnVariant::M2Aps => lambda > 0.0,
    };
    Ok((base, if curved { coth_excess(mag, r) } else { 0.0 }))
}

/// Eigenvalue of a DtN operator on the signed mode `λ ≠ 0`.
pub fn dtn_eigenvalue(cap: &CapOperator, lambda: f64, r: f64, variant: DtnVariant) -> Result<f64> {
    let (base, excess) = dtn_parts(cap, lambda, r, variant)?;
    Ok(base + excess)
}

fn require_no_kernel(model: &TangentialModel) -> Result<()> {
    match model.kernel_dim() {
        0 => Ok(()),
        k => Err(Error::KernelPresent(k)),
    }
}

/// `−log(1 − e^{−2x})` bound used as the envelope of the DtN differences.
fn dtn_envelope(lambda: f64, r: f64) -> f64 {
    if r.is_infinite() {
        0.0
    } else {
        2.0 * coth_excess(lambda, r) / lambda.max(f64::MIN_POSITIVE)
    }
}

/// `Σ_{λ≠0} m log(dtn_A(λ) / dtn_B(λ))`, absolutely convergent.
pub fn dtn_difference_logdet(
    model: &TangentialModel,
    cap: &CapOperator,
    r: f64,
    a: DtnVariant,
    b: DtnVariant,
) -> Result<f64> {
    Ok(dtn_difference_detail(model, cap, r, a, b)?.0)
}

/// Value and error bound of [`dtn_difference_logdet`].
pub fn dtn_difference_detail(
    model: &TangentialModel,
    cap: &CapOperator,
    r: f64,
    a: DtnVariant,
    b: DtnVariant,
) -> Result<(f64, f64)> {
    require_no_kernel(model)?;
    cap.validate_for(model)?;
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut acc = NeumaierSum::new();
    let mut mag = 0.0;
    let tail = model.walk_lines(
        TAIL_TOL,
        |l| dtn_envelope(l, r),
        |line| {
            for lam in [-line.lambda, line.lambda] {
                let (base, ea) = dtn_parts(cap, lam, r, a)?;
                let (_, eb) = dtn_parts(cap, lam, r, b)?;
                if ea != eb {
                    let t = line.mult() * ((ea / base).ln_1p() - (eb / base).ln_1p());
                    acc.add(t);
                    mag += t.abs();
                }
            }
            Ok(())
        },
    )?;
    Ok((acc.value(), tail + 4.0 * f64::EPSILON * mag))
}

/// Trace of the varying part `K_r = R_A R_B^{-1} − I` and `log det(I + K_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceCheck {
    pub r: f64,
    pub trace: f64,
    pub logdet: f64,
}

/// For a pair of DtN variants on one cap, the trace of `K_r` and the
/// log-determinant it controls; both vanish as `r → ∞`.
pub fn dtn_trace(
    model: &TangentialModel,
    cap: &CapOperator,
    r: f64,
    a: DtnVariant,
    b: DtnVariant,
) -> Result<TraceCheck> {
    require_no_kernel(model)?;
    cap.validate_for(model)?;
    let mut trace = NeumaierSum::new();
    model.walk_lines(
        TAIL_TOL,
        |l| dtn_envelope(l, r),
        |line| {
            for lam in [-line.lambda, line.lambda] {
                let (base, ea) = dtn_parts(cap, lam, r, a)?;
                let (_, eb) = dtn_parts(cap, lam, r, b)?;
                trace.add(line.mult() * (ea - eb) / (base + eb));
            }
            Ok(())
        },
    )?;
    let logdet = dtn_difference_logdet(model, cap, r, a, b)?;
    Ok(TraceCheck {
        r,
        trace: trace.value(),
        logdet,
    })
}

/// `log Det Q_r = log 2 · ζ_{B²}(0) + ½ log Det B² − 2 T(r) + k log(1/r)`.
///
/// `r = ∞` is accepted for kernel-free models and yields the limit.
pub fn q_logdet(model: &TangentialModel, r: f64) -> Result<RegScalar> {
    if !(r > 0.0) || r.is_nan() {
        return Err(Error::InvalidProblem(format!("r must be > 0, got {r}")));
    }
    let k = model.kernel_dim() as f64;
    if k > 0.0 && r.is_infinite() {
        return Err(Error::KernelPresent(model.kernel_dim()));
    }
    let inv = model.invariants()?;
    let count = Piece::new(LN_2, inv.zeta_b2_0);
    let log = Piece::new(-0.5, inv.zeta_b2_deriv_0);
    let (tail, tail_err) = exp_tail(model, r)?;
    let kernel_part = if k > 0.0 { -k * r.ln() } else { 0.0 };
    let pieces = Pieces {
        linear_in_r: Piece::default(),
        count_part: count,
        log_part: log,
        kernel_part,
        convergent_tail: -2.0 * tail,
    };
    let est_error = LN_2 * inv.zeta_b2_0_err
        + 0.5 * inv.zeta_b2_deriv_0_err
        + 2.0 * tail_err
        + 8.0 * f64::EPSILON * (count.value.abs() + log.value.abs() + kernel_part.abs());
    Ok(RegScalar::from_pieces(pieces, est_error))
}

/// `log 2 · ζ_{B²}(0) + ½ log Det B²`, the large-`r` limit of `log Det Q_r`.
pub fn q_limit(model: &TangentialModel) -> Result<f64> {
    let inv = model.invariants()?;
    Ok(LN_2 * inv.zeta_b2_0 + 0.5 * inv.logdet_b2)
}

/// `Σ_{λ≠0} m e^{−2|λ|r} / (1 − e^{−2λ_min r})`, bounding `|log Det Q_r − limit|`.
pub fn q_limit_bound(model: &TangentialModel, r: f64) -> Result<f64> {
    let Some(lmin) = model.lambda_min() else {
        return Ok(0.0);
    };
    let denom = -(-2.0 * lmin * r).exp_m1();
    let mut acc = NeumaierSum::new();
    model.walk_lines(
        TAIL_TOL * denom,
        |l| 2.0 * (-2.0 * l * r).exp() / denom,
        |line| {
            acc.add(2.0 * line.mult() * (-2.0 * line.lambda * r).exp());
            Ok(())
        },
    )?;
    Ok(acc.value() / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketValue {
    pub r: f64,
    pub bracket: f64,
    pub limit: f64,
    pub residual: f64,
    pub est_error: f64,
}

/// `−log Det Q_r + Σ log(R_{M1,D}/R_{M1,P<}) + Σ log(R_{M2,D}/R_{M2,P>})`.
///
/// Tends to `−log 2 · ζ_{B²}(0) − ½ log Det B²` as `r → ∞`.
pub fn adiabatic_bracket(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
    r: f64,
) -> Result<BracketValue> {
    require_no_kernel(model)?;
    let q = q_logdet(model, r)?;
    let (d1, e1) =
        dtn_difference_detail(model, cap1, r, DtnVariant::M1Dirichlet, DtnVariant::M1Aps)?;
    let (d2, e2) =
        dtn_difference_detail(model, cap2, r, DtnVariant::M2Dirichlet, DtnVariant::M2Aps)?;
    let mut acc = NeumaierSum::new();
    acc.add(-q.value);
    acc.add(d1);
    acc.add(d2);
    let bracket = acc.value();
    let limit = -q_limit(model)?;
    Ok(BracketValue {
        r,
        bracket,
        limit,
        residual: bracket - limit,
        est_error: q.est_error + e1 + e2 + 4.0 * f64::EPSILON * (q.value.abs() + limit.abs()),
    })
}

/// Symmetric 2×2 block `[[a, b], [b, c]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Block2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Block2x2 {
    /// The block of `R_{−r,r}` on the `|λ|` mode pair.
    pub fn for_mode(cap1: &CapOperator, cap2: &CapOperator, lambda: f64, r: f64) -> Self {
        let lambda = lambda.abs();
        // A = 2λ / (e^{2rλ} − e^{−2rλ}) = λ / sinh(2rλ)
        let (amp, damp) = if r.is_infinite() {
            (0.0, 0.0)
        } else {
            let x = 2.0 * r * lambda;
            let amp = if x > 700.0 { 0.0 } else { lambda / x.sinh() };
            (amp, amp * (-x).exp())
        };
        Self {
            a: cap1.mu(lambda) + lambda + damp,
            b: -amp,
            c: cap2.mu(lambda) + lambda + damp,
        }
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a + self.c);
        let rad = (0.5 * (self.a - self.c)).hypot(self.b);
        (mean - rad, mean + rad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockMin {
    pub r: f64,
    pub min_eig: f64,
    pub argmin_lambda: f64,
}

/// Smallest eigenvalue of the blocks of `R_{−r,r}` over the spectrum.
///
/// The smaller eigenvalue is at least `|λ| − 1/(2r)`, so the scan stops once
/// that bound exceeds the running minimum.
pub fn r_blocks_min_eig(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
    r: f64,
) -> Result<BlockMin> {
    require_no_kernel(model)?;
    if !(r > 0.0) {
        return Err(Error::InvalidProblem(format!("r must be > 0, got {r}")));
    }
    let slack = if r.is_infinite() { 0.0 } else { 0.5 / r };
    let mut best = BlockMin {
        r,
        min_eig: f64::INFINITY,
        argmin_lambda: f64::NAN,
    };
    for line in model.lines() {
        if line.lambda - slack > best.min_eig {
            break;
        }
        let (lo, _) = Block2x2::for_mode(cap1, cap2, line.lambda, r).eigenvalues();
        if lo < best.min_eig {
            best.min_eig = lo;
            best.argmin_lambda = line.lambda;
        }
    }
    Ok(best)
}

/// Block minima over a grid of lengths and the smallest grid length `r₀`
/// beyond which every minimum is positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockScan {
    pub rows: Vec<BlockMin>,
    pub r0: Option<f64>,
}

pub fn blocks_threshold(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
    grid: &[f64],
) -> Result<BlockScan> {
    let rows = grid
        .iter()
        .map(|&r| r_blocks_min_eig(model, cap1, cap2, r))
        .collect::<Result<Vec<_>>>()?;
    let mut r0 = None;
    for row in rows.iter().rev() {
        if row.min_eig > 0.0 {
            r0 = Some(row.r);
        } else {
            break;
        }
    }
    Ok(BlockScan { rows, r0 })
}

/// A mode obstructing the no-extended-solution hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffendingMode {
    pub cap: u8,
    pub lambda: f64,
    pub kernel: bool,
}

/// Modes with `mu_i(λ) + |λ| = 0` and kernel modes with zero cap value.
pub fn extended_solution_detect(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
) -> Vec<OffendingMode> {
    let mut out = Vec::new();
    for (i, cap) in [(1u8, cap1), (2u8, cap2)] {
        if model.kernel_dim() > 0 && cap.kernel_value() <= 1e-12 {
            out.push(OffendingMode {
                cap: i,
                lambda: 0.0,
                kernel: true,
            });
        }
        // mu + |λ| ≥ |λ| − |c|, so only magnitudes below |c| + 1e-12 can vanish.
        let reach = match cap.mu_kind() {
            CapMu::AbsBPlus(Some(p)) => p.c.abs(),
            _ => 0.0,
        } + 1e-12;
        for line in model.lines().take_while(|l| l.lambda <= reach) {
            if cap.mu(line.lambda) + line.lambda <= 1e-12 {
                out.push(OffendingMode {
                    cap: i,
                    lambda: line.lambda,
                    kernel: false,
                });
            }
        }
    }
    out
}
