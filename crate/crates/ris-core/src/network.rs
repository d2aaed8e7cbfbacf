//! Microwave-network mathematics: reflection coefficients, Z/S parameter
//! conversions, the parameterized thin-dipole mutual impedance, assembly of
//! the array impedance/scattering matrices, and the coupled reflection
//! solve.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::RisArray;
use crate::linalg::{solve_dense_matrix, solve_dense_vector};
use crate::quadrature::cached_rule;
use crate::SPEED_OF_LIGHT;

/// Hard cap on quadrature points per half-interval during the convergence
/// doubling of [`mutual_impedance`].
const QUADRATURE_CAP: usize = 16_384;

/// Equivalent-dipole description of the mutual coupling between unit cells.
///
/// `h` is the equivalent dipole length and `d` the equivalent dipole spacing
/// of nearest neighbors; both are fitted quantities, distinct from the
/// physical cell pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingModel {
    h: f64,
    d: f64,
    z0: f64,
    quadrature_points: usize,
    self_impedance: Complex64,
}

impl CouplingModel {
    /// Default reference impedance in ohms.
    pub const DEFAULT_Z0: f64 = 50.0;
    /// Default quadrature points per half-interval.
    pub const DEFAULT_QUADRATURE_POINTS: usize = 512;

    /// Builds a model, validating `h > 0`, `d > 0`, `z0 > 0` and
    /// `quadrature_points >= 64`.
    pub fn new(h: f64, d: f64, z0: f64, quadrature_points: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::invalid(format!("dipole length must be positive, got {h}")));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::invalid(format!("dipole spacing must be positive, got {d}")));
        }
        if !(z0 > 0.0) || !z0.is_finite() {
            return Err(Error::invalid(format!(
                "reference impedance must be positive, got {z0}"
            )));
        }
        if quadrature_points < 64 {
            return Err(Error::invalid(format!(
                "quadrature_points must be at least 64, got {quadrature_points}"
            )));
        }
        Ok(Self {
            h,
            d,
            z0,
            quadrature_points,
            self_impedance: Complex64::new(z0, 0.0),
        })
    }

    /// Model with the default reference impedance and quadrature order.
    pub fn with_defaults(h: f64, d: f64) -> Result<Self> {
        Self::new(h, d, Self::DEFAULT_Z0, Self::DEFAULT_QUADRATURE_POINTS)
    }

    /// Overrides the matched self-impedance assumption on the Z_II diagonal.
    pub fn with_self_impedance(mut self, z: Complex64) -> Self {
        self.self_impedance = z;
        self
    }

    /// Equivalent dipole length in meters.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Equivalent nearest-neighbor dipole spacing in meters.
    pub fn d(&self) -> f64 {
        self.d
    }

    /// Reference impedance in ohms.
    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// Quadrature points per half-interval.
    pub fn quadrature_points(&self) -> usize {
        self.quadrature_points
    }

    /// Diagonal self-impedance used when assembling Z_II.
    pub fn self_impedance(&self) -> Complex64 {
        self.self_impedance
    }
}

/// N x N impedance matrix of the array, ohms.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceMatrix(DMatrix<Complex64>);

impl ImpedanceMatrix {
    /// Wraps a square matrix.
    pub fn from_entries(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("impedance matrix must be square"));
        }
        Ok(Self(m))
    }

    /// Matrix entries.
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Port count.
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    /// True for a zero-port matrix.
    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }
}

/// N x N scattering matrix of the array, dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix(DMatrix<Complex64>);

impl ScatteringMatrix {
    /// The uncoupled (all-zero) scattering matrix.
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// Wraps a square matrix.
    pub fn from_entries(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("scattering matrix must be square"));
        }
        Ok(Self(m))
    }

    /// Converts an impedance matrix, enforcing the symmetry the exact
    /// formula guarantees for reciprocal arrays.
    pub fn from_impedance(z: &ImpedanceMatrix, z0: f64) -> Result<Self> {
        let raw = z_to_s(z.entries(), z0)?;
        let sym = (&raw + raw.transpose()) * Complex64::new(0.5, 0.0);
        Ok(Self(sym))
    }

    /// Matrix entries.
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Port count.
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    /// True for a zero-port matrix.
    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }
}

/// Per-element reflection coefficients of a single-connected RIS, with a
/// uniform amplification coefficient `p >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionState {
    theta: Vec<Complex64>,
    amplification: f64,
}

impl ReflectionState {
    /// Builds a state from the diagonal of the reflection matrix.
    pub fn new(theta: Vec<Complex64>, amplification: f64) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("reflection state must have at least one element"));
        }
        if theta.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::invalid("reflection coefficients must be finite"));
        }
        if !(amplification >= 1.0) || !amplification.is_finite() {
            return Err(Error::invalid(format!(
                "amplification coefficient must satisfy p >= 1, got {amplification}"
            )));
        }
        Ok(Self {
            theta,
            amplification,
        })
    }

    /// Same per-element coefficients under a different amplification.
    pub fn with_amplification(&self, amplification: f64) -> Result<Self> {
        Self::new(self.theta.clone(), amplification)
    }

    /// Diagonal reflection coefficients (before amplification).
    pub fn theta_diag(&self) -> &[Complex64] {
        &self.theta
    }

    /// Amplification coefficient p.
    pub fn amplification(&self) -> f64 {
        self.amplification
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    /// Always false; states carry at least one element.
    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Effective diagonal `p * theta_n`.
    pub fn effective_diag(&self) -> Vec<Complex64> {
        self.theta.iter().map(|t| t * self.amplification).collect()
    }
}

/// Reflection coefficient of a loaded port: `(z_ris - z0) / (z_ris + z0)`.
pub fn reflection_from_load(z_ris: Complex64, z0: f64) -> Result<Complex64> {
    let denom = z_ris + z0;
    if denom.norm() == 0.0 {
        return Err(Error::Singular {
            context: "reflection_from_load",
            cond_estimate: f64::INFINITY,
        });
    }
    Ok((z_ris - z0) / denom)
}

/// Impedance-to-scattering conversion `S = (Z + z0 I)^-1 (Z - z0 I)`.
pub fn z_to_s(z: &DMatrix<Complex64>, z0: f64) -> Result<DMatrix<Complex64>> {
    if z.nrows() != z.ncols() {
        return Err(Error::invalid("matrix must be square"));
    }
    let n = z.nrows();
    let z0c = Complex64::new(z0, 0.0);
    let mut plus = z.clone();
    let mut minus = z.clone();
    for i in 0..n {
        plus[(i, i)] += z0c;
        minus[(i, i)] -= z0c;
    }
    solve_dense_matrix(&plus, &minus, "z_to_s")
}

/// Scattering-to-impedance conversion `Z = z0 (I + S)(I - S)^-1`.
pub fn s_to_z(s: &DMatrix<Complex64>, z0: f64) -> Result<DMatrix<Complex64>> {
    if s.nrows() != s.ncols() {
        return Err(Error::invalid("matrix must be square"));
    }
    let n = s.nrows();
    let one = Complex64::new(1.0, 0.0);
    let mut plus = s.clone();
    let mut minus = -s.clone();
    for i in 0..n {
        plus[(i, i)] += one;
        minus[(i, i)] += one;
    }
    // Z^T = (I - S)^-T (I + S)^T; with S symmetric in practice the transpose
    // dance only reorders rounding, and it lets one solve produce Z directly.
    let zt = solve_dense_matrix(&minus.transpose(), &plus.transpose(), "s_to_z")?;
    Ok(zt.transpose() * Complex64::new(z0, 0.0))
}

/// Mutual impedance of two parallel thin dipoles of length `h` at spacing
/// `d`, by the induced-EMF integral
///
/// ```text
/// Z(h,d) = -30 * integral over z in [-h/2, h/2] of sin(k0 (h/2 - |z|)) *
///          ( -j e^{-j k0 r1}/r1 - j e^{-j k0 r2}/r2
///            + 2j cos(k0 h/2) e^{-j k0 r0}/r0 ) dz
/// ```
///
/// Gauss-Legendre quadrature is applied separately on each half-interval
/// (the |z| kink sits at zero), starting at `quadrature_points` per half and
/// doubling until the modulus changes by less than 0.1%.
pub fn mutual_impedance(
    h: f64,
    d: f64,
    frequency: f64,
    quadrature_points: usize,
) -> Result<Complex64> {
    if !(h > 0.0) || !(d > 0.0) || !(frequency > 0.0) {
        return Err(Error::invalid(format!(
            "mutual impedance requires h > 0, d > 0, frequency > 0 (got h={h}, d={d}, f={frequency})"
        )));
    }
    if quadrature_points == 0 {
        return Err(Error::invalid("quadrature_points must be positive"));
    }
    let k0 = 2.0 * std::f64::consts::PI * frequency / SPEED_OF_LIGHT;
    let value = |points: usize| -> Result<Complex64> {
        let rule = cached_rule(points)?;
        let half = h / 2.0;
        let third = Complex64::new(0.0, 2.0) * (k0 * half).cos();
        let integrand = |z: f64| -> Complex64 {
            let r0 = (d * d + z * z).sqrt();
            let r1 = (d * d + (half - z) * (half - z)).sqrt();
            let r2 = (d * d + (half + z) * (half + z)).sqrt();
            let kernel = Complex64::new(0.0, -1.0) * Complex64::cis(-k0 * r1) / r1
                + Complex64::new(0.0, -1.0) * Complex64::cis(-k0 * r2) / r2
                + third * Complex64::cis(-k0 * r0) / r0;
            -30.0 * (k0 * (half - z.abs())).sin() * kernel
        };
        Ok(rule.integrate(-half, 0.0, integrand) + rule.integrate(0.0, half, integrand))
    };

    let mut points = quadrature_points.min(QUADRATURE_CAP);
    let mut prev = value(points)?;
    loop {
        let next_points = (points * 2).min(QUADRATURE_CAP);
        if next_points == points {
            // cap reached without the doubling check passing
            return Err(Error::QuadratureAccuracy {
                rel_change: f64::NAN,
                points,
            });
        }
        let cur = value(next_points)?;
        let scale = cur.norm().max(f64::MIN_POSITIVE);
        let rel = (cur - prev).norm() / scale;
        if rel < 1e-3 {
            return Ok(cur);
        }
        if next_points == QUADRATURE_CAP {
            if rel <= 1e-2 {
                return Ok(cur);
            }
            return Err(Error::QuadratureAccuracy {
                rel_change: rel,
                points: next_points,
            });
        }
        prev = cur;
        points = next_points;
    }
}

/// Assembles the array impedance matrix: matched diagonal, `Z(h, d)` for
/// horizontal/vertical neighbors at the cell pitch, `Z(h, sqrt(2) d)` for
/// diagonal neighbors, zero beyond.
pub fn assemble_z_ii(
    array: &RisArray,
    model: &CouplingModel,
    frequency: f64,
) -> Result<ImpedanceMatrix> {
    let n = array.len();
    let zd = mutual_impedance(model.h, model.d, frequency, model.quadrature_points)?;
    let zd2 = mutual_impedance(
        model.h,
        std::f64::consts::SQRT_2 * model.d,
        frequency,
        model.quadrature_points,
    )?;
    let spacing = array.spacing();
    let diag_spacing = std::f64::consts::SQRT_2 * spacing;
    let mut z = DMatrix::from_diagonal_element(n, n, model.self_impedance);
    let positions = array.positions();
    for m in 0..n {
        for nn in (m + 1)..n {
            let dist = (positions[m] - positions[nn]).norm();
            let value = if (dist - spacing).abs() <= 1e-9 {
                zd
            } else if (dist - diag_spacing).abs() <= 1e-9 {
                zd2
            } else {
                continue;
            };
            z[(m, nn)] = value;
            z[(nn, m)] = value;
        }
    }
    ImpedanceMatrix::from_entries(z)
}

/// The RIS-side factor of the coupled channel model:
/// `(Theta^-1 - S_II)^-1` with `Theta = p * diag(theta)`.
pub fn coupled_response(
    theta: &ReflectionState,
    s_ii: &ScatteringMatrix,
) -> Result<DMatrix<Complex64>> {
    let a = coupled_system_matrix(theta, s_ii)?;
    let identity = DMatrix::identity(theta.len(), theta.len());
    solve_dense_matrix(&a, &identity, "coupled_response")
}

/// Builds `Theta^-1 - S_II`, shared by the pattern and SNR paths.
pub(crate) fn coupled_system_matrix(
    theta: &ReflectionState,
    s_ii: &ScatteringMatrix,
) -> Result<DMatrix<Complex64>> {
    let n = theta.len();
    if s_ii.len() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} reflection coefficients vs {}x{} scattering matrix",
            n,
            s_ii.len(),
            s_ii.len()
        )));
    }
    let p = theta.amplification();
    let mut a = -s_ii.entries().clone();
    for (i, t) in theta.theta_diag().iter().enumerate() {
        if t.norm() == 0.0 {
            return Err(Error::invalid(format!(
                "reflection coefficient {i} is zero; Theta must be invertible"
            )));
        }
        a[(i, i)] += 1.0 / (p * t);
    }
    Ok(a)
}

/// Applies `(Theta^-1 - S_II)^-1` to a single vector without forming the
/// full inverse.
pub(crate) fn coupled_apply(
    theta: &ReflectionState,
    s_ii: &ScatteringMatrix,
    rhs: &nalgebra::DVector<Complex64>,
    context: &'static str,
) -> Result<nalgebra::DVector<Complex64>> {
    let a = coupled_system_matrix(theta, s_ii)?;
    solve_dense_vector(&a, rhs, context)
}
