//! Matrix structure groups.
//!
//! Supported kinds: U(1) as 1×1 complex, SU(2) as 2×2 complex, SO(3) and
//! O(2) as real matrices, plus products with a finite cyclic group Z_m. The
//! cyclic factor carries no algebra; it exists to realize nontrivial π₀
//! beyond the Z₂ of O(2). Exponential and logarithm are closed-form per kind
//! (complex exponential, Pauli decomposition, Rodrigues), not generic series.
//!
//! The chart of the logarithm is the ball of rotation angle `chart_radius`
//! (< π) around the identity; on it exp and log are mutually inverse and the
//! interchange rule exp(Ad(k).x) = k·exp(x)·k⁻¹ holds, which is what makes
//! the per-chart push-forward of the chart a bijection on compatible local
//! data.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, re, C, Mat};
use crate::manifold::SampledMap;
use crate::tol;

/// Base (connected-or-O2) matrix group kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    U1,
    SU2,
    SO3,
    O2,
}

/// Structure-group kind, optionally multiplied by a finite cyclic group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    U1,
    SU2,
    SO3,
    O2,
    ProductWithCyclic(BaseKind, u32),
}

impl GroupKind {
    pub fn base(&self) -> BaseKind {
        match self {
            GroupKind::U1 => BaseKind::U1,
            GroupKind::SU2 => BaseKind::SU2,
            GroupKind::SO3 => BaseKind::SO3,
            GroupKind::O2 => BaseKind::O2,
            GroupKind::ProductWithCyclic(b, _) => *b,
        }
    }

    /// Order of the cyclic factor; 1 when absent.
    pub fn cyclic_order(&self) -> u32 {
        match self {
            GroupKind::ProductWithCyclic(_, m) => *m,
            _ => 1,
        }
    }

    pub fn matrix_dim(&self) -> usize {
        match self.base() {
            BaseKind::U1 => 1,
            BaseKind::SU2 => 2,
            BaseKind::SO3 => 3,
            BaseKind::O2 => 2,
        }
    }

    /// Whether the base matrices are real (imaginary parts must vanish).
    pub fn is_real(&self) -> bool {
        matches!(self.base(), BaseKind::SO3 | BaseKind::O2)
    }

    /// Whether π₀ of the base has a reflection class (O(2)).
    pub fn has_reflection(&self) -> bool {
        self.base() == BaseKind::O2
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base() {
            BaseKind::U1 => "U1",
            BaseKind::SU2 => "SU2",
            BaseKind::SO3 => "SO3",
            BaseKind::O2 => "O2",
        };
        match self {
            GroupKind::ProductWithCyclic(_, m) => write!(f, "{base}xZ{m}"),
            _ => write!(f, "{base}"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    /// Parses "U1", "SU2", "SO3", "O2" and "<base>xZ<m>" (e.g. "U1xZ3").
    fn from_str(s: &str) -> Result<Self> {
        let parse_base = |b: &str| -> Result<BaseKind> {
            match b {
                "U1" => Ok(BaseKind::U1),
                "SU2" => Ok(BaseKind::SU2),
                "SO3" => Ok(BaseKind::SO3),
                "O2" => Ok(BaseKind::O2),
                _ => Err(Error::Unsupported(format!("unknown group kind '{b}'"))),
            }
        };
        if let Some((b, m)) = s.split_once("xZ") {
            let base = parse_base(b)?;
            let m: u32 = m
                .parse()
                .map_err(|_| Error::Unsupported(format!("bad cyclic order in '{s}'")))?;
            if m < 2 {
                return Err(Error::Unsupported(format!(
                    "cyclic order must be >= 2 in '{s}'"
                )));
            }
            Ok(GroupKind::ProductWithCyclic(base, m))
        } else {
            Ok(match parse_base(s)? {
                BaseKind::U1 => GroupKind::U1,
                BaseKind::SU2 => GroupKind::SU2,
                BaseKind::SO3 => GroupKind::SO3,
                BaseKind::O2 => GroupKind::O2,
            })
        }
    }
}

/// A matrix structure group together with its chart radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureGroup {
    pub kind: GroupKind,
    pub matrix_dim: usize,
    /// Radius (rotation angle, equals the operator norm of the logarithm) of
    /// the ball in the algebra on which exp is injective.
    pub chart_radius: f64,
}

impl StructureGroup {
    pub fn new(kind: GroupKind) -> Self {
        StructureGroup {
            kind,
            matrix_dim: kind.matrix_dim(),
            chart_radius: tol::DEFAULT_CHART_RADIUS,
        }
    }

    pub fn with_chart_radius(kind: GroupKind, chart_radius: f64) -> Result<Self> {
        if !(chart_radius > 0.0 && chart_radius < std::f64::consts::PI) {
            return Err(Error::Invariant(format!(
                "chart radius {chart_radius} must lie in (0, pi)"
            )));
        }
        Ok(StructureGroup {
            kind,
            matrix_dim: kind.matrix_dim(),
            chart_radius,
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: *self,
            matrix: linalg::eye(self.matrix_dim),
            cyclic: 0,
        }
    }

    pub fn zero_algebra(&self) -> AlgebraElement {
        AlgebraElement {
            group: *self,
            matrix: linalg::zeros(self.matrix_dim),
        }
    }
}

/// Class in π₀(K). For the supported kinds, π₀ is (Z₂ from O(2)) × Z_m, so a
/// class is a reflection flag and a residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pi0Class {
    pub kind: GroupKind,
    pub reflecting: bool,
    pub residue: u32,
}

impl Pi0Class {
    pub fn trivial(kind: GroupKind) -> Self {
        Pi0Class {
            kind,
            reflecting: false,
            residue: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        !self.reflecting && self.residue == 0
    }

    pub fn compose(&self, other: &Pi0Class) -> Result<Pi0Class> {
        if self.kind != other.kind {
            return Err(Error::GroupMismatch(
                "pi0 classes of different groups".into(),
            ));
        }
        let m = self.kind.cyclic_order();
        Ok(Pi0Class {
            kind: self.kind,
            reflecting: self.reflecting ^ other.reflecting,
            residue: (self.residue + other.residue) % m,
        })
    }

    pub fn inverse(&self) -> Pi0Class {
        let m = self.kind.cyclic_order();
        Pi0Class {
            kind: self.kind,
            reflecting: self.reflecting,
            residue: (m - self.residue) % m,
        }
    }
}

impl fmt::Display for Pi0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.reflecting, self.kind.cyclic_order()) {
            (false, 1) => write!(f, "e"),
            (true, 1) => write!(f, "r"),
            (false, _) => write!(f, "{}", self.residue),
            (true, _) => write!(f, "r*{}", self.residue),
        }
    }
}

/// Group element: a matrix satisfying the group's defining relations, plus
/// the residue of the cyclic factor when present.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub group: StructureGroup,
    pub matrix: Mat,
    pub cyclic: u32,
}

/// Element of the Lie algebra (anti-Hermitian / antisymmetric per kind).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub group: StructureGroup,
    pub matrix: Mat,
}

impl GroupElement {
    /// Validates the defining relations to [`tol::CONSTRUCTION`].
    pub fn new(group: StructureGroup, matrix: Mat, cyclic: u32) -> Result<Self> {
        let dim = group.matrix_dim;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Invariant(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let unitary = linalg::op_dist(&(matrix.adjoint() * &matrix), &linalg::eye(dim));
        if unitary > tol::CONSTRUCTION {
            return Err(Error::Invariant(format!(
                "unitarity/orthogonality residual {unitary:.3e}"
            )));
        }
        if group.kind.is_real() && linalg::max_imag(&matrix) > tol::CONSTRUCTION {
            return Err(Error::Invariant("real group with imaginary entries".into()));
        }
        let det = matrix.determinant();
        match group.kind.base() {
            BaseKind::SU2 | BaseKind::SO3 => {
                if (det - re(1.0)).norm() > tol::CONSTRUCTION {
                    return Err(Error::Invariant(format!(
                        "determinant {det} should be 1"
                    )));
                }
            }
            BaseKind::O2 => {
                if (det.norm() - 1.0).abs() > tol::CONSTRUCTION || det.im.abs() > tol::CONSTRUCTION
                {
                    return Err(Error::Invariant(format!(
                        "O(2) determinant {det} should be ±1"
                    )));
                }
            }
            BaseKind::U1 => {}
        }
        let m = group.kind.cyclic_order();
        if cyclic >= m {
            return Err(Error::Invariant(format!(
                "cyclic label {cyclic} out of range mod {m}"
            )));
        }
        Ok(GroupElement {
            group,
            matrix,
            cyclic,
        })
    }

    /// Nearest group element: polar projection plus the per-kind determinant
    /// fix. Used to pull interpolated or integrated matrices back onto the
    /// group manifold.
    pub fn project(group: StructureGroup, matrix: &Mat, cyclic: u32) -> Result<Self> {
        let mut u = linalg::polar_unitary(matrix);
        if group.kind.is_real() {
            u = linalg::realify(&u);
            u = linalg::polar_unitary(&u);
            u = linalg::realify(&u);
        }
        match group.kind.base() {
            BaseKind::U1 => {
                let z = u[(0, 0)];
                u[(0, 0)] = z / re(z.norm());
            }
            BaseKind::SU2 => {
                // det is a unit phase after unitarization; divide by its
                // principal square root so det becomes exactly 1.
                let det = u.determinant();
                let phase = det / re(det.norm());
                let half = C::from_polar(1.0, phase.arg() / 2.0);
                u /= half;
            }
            BaseKind::SO3 => {
                if u.determinant().re < 0.0 {
                    return Err(Error::Invariant(
                        "projection target has negative determinant, not in SO(3)".into(),
                    ));
                }
            }
            BaseKind::O2 => {}
        }
        GroupElement::new(group, u, cyclic)
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("product of mixed groups".into()));
        }
        let m = self.group.kind.cyclic_order();
        Ok(GroupElement {
            group: self.group,
            matrix: &self.matrix * &other.matrix,
            cyclic: (self.cyclic + other.cyclic) % m,
        })
    }

    /// Inverse; the matrix part is the conjugate transpose, which is valid
    /// because elements are unitary/orthogonal to construction tolerance.
    pub fn inverse(&self) -> GroupElement {
        let m = self.group.kind.cyclic_order();
        GroupElement {
            group: self.group,
            matrix: self.matrix.adjoint(),
            cyclic: (m - self.cyclic) % m,
        }
    }

    /// Canonical rotation angle in [0, π]; equals the operator norm of the
    /// logarithm on the identity component.
    pub fn angle(&self) -> f64 {
        match self.group.kind.base() {
            BaseKind::U1 => self.matrix[(0, 0)].arg().abs(),
            BaseKind::SU2 => {
                let tr = (self.matrix[(0, 0)] + self.matrix[(1, 1)]).re;
                (tr / 2.0).clamp(-1.0, 1.0).acos()
            }
            BaseKind::SO3 => {
                let tr = (self.matrix[(0, 0)] + self.matrix[(1, 1)] + self.matrix[(2, 2)]).re;
                ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
            }
            BaseKind::O2 => {
                if self.matrix.determinant().re < 0.0 {
                    // Reflections are not in the chart; report π.
                    std::f64::consts::PI
                } else {
                    self.matrix[(1, 0)].re.atan2(self.matrix[(0, 0)].re).abs()
                }
            }
        }
    }

    /// Whether the element lies in the chart domain of the logarithm.
    pub fn in_chart(&self) -> bool {
        self.component_class().is_trivial() && self.angle() < self.group.chart_radius
    }

    /// π₀ class: determinant sign for O(2), residue of the cyclic factor.
    pub fn component_class(&self) -> Pi0Class {
        let reflecting =
            self.group.kind.has_reflection() && self.matrix.determinant().re < 0.0;
        Pi0Class {
            kind: self.group.kind,
            reflecting,
            residue: self.cyclic,
        }
    }

    /// Eigenvalues of the matrix part, by the closed form of each kind.
    pub fn eigenvalues(&self) -> Vec<C> {
        match self.group.kind.base() {
            BaseKind::U1 => vec![self.matrix[(0, 0)]],
            BaseKind::SU2 => {
                let theta = self.angle();
                vec![C::from_polar(1.0, theta), C::from_polar(1.0, -theta)]
            }
            BaseKind::SO3 => {
                let theta = self.angle();
                vec![
                    re(1.0),
                    C::from_polar(1.0, theta),
                    C::from_polar(1.0, -theta),
                ]
            }
            BaseKind::O2 => {
                if self.matrix.determinant().re < 0.0 {
                    vec![re(1.0), re(-1.0)]
                } else {
                    let theta = self.matrix[(1, 0)].re.atan2(self.matrix[(0, 0)].re);
                    vec![C::from_polar(1.0, theta), C::from_polar(1.0, -theta)]
                }
            }
        }
    }
}

impl AlgebraElement {
    /// Validates algebra membership to [`tol::CONSTRUCTION`].
    pub fn new(group: StructureGroup, matrix: Mat) -> Result<Self> {
        let dim = group.matrix_dim;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Invariant(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let anti = linalg::op_norm(&(matrix.adjoint() + &matrix));
        if anti > tol::CONSTRUCTION {
            return Err(Error::Invariant(format!(
                "anti-Hermitian residual {anti:.3e}"
            )));
        }
        if group.kind.is_real() && linalg::max_imag(&matrix) > tol::CONSTRUCTION {
            return Err(Error::Invariant(
                "real algebra with imaginary entries".into(),
            ));
        }
        if group.kind.base() == BaseKind::SU2 {
            let tr = matrix[(0, 0)] + matrix[(1, 1)];
            if tr.norm() > tol::CONSTRUCTION {
                return Err(Error::Invariant(format!("su(2) trace {tr} should vanish")));
            }
        }
        Ok(AlgebraElement { group, matrix })
    }

    /// Nearest algebra element: anti-Hermitian part, trace removed for
    /// su(2), imaginary dust dropped for real kinds. Cleans finite-difference
    /// output.
    pub fn project(group: StructureGroup, matrix: &Mat) -> AlgebraElement {
        let mut x = (matrix - matrix.adjoint()) * re(0.5);
        if group.kind.base() == BaseKind::SU2 {
            let tr = (x[(0, 0)] + x[(1, 1)]) / re(2.0);
            x[(0, 0)] -= tr;
            x[(1, 1)] -= tr;
        }
        if group.kind.is_real() {
            x = linalg::realify(&x);
            // realify breaks anti-symmetry dust; re-antisymmetrize.
            x = (&x - x.transpose()) * re(0.5);
        }
        AlgebraElement { group, matrix: x }
    }

    pub fn scaled(&self, c: f64) -> AlgebraElement {
        AlgebraElement {
            group: self.group,
            matrix: &self.matrix * re(c),
        }
    }

    pub fn plus(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("sum of mixed algebras".into()));
        }
        Ok(AlgebraElement {
            group: self.group,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

fn cosc(t: f64) -> f64 {
    // (1 - cos t)/t².
    if t.abs() < 1e-4 {
        0.5 - t * t / 24.0
    } else {
        (1.0 - t.cos()) / (t * t)
    }
}

/// Lie-theoretic exponential, closed form per kind. The cyclic factor of a
/// product group contributes nothing: the result carries the identity class.
pub fn exp(x: &AlgebraElement) -> GroupElement {
    let g = x.group;
    let m = &x.matrix;
    let matrix = match g.kind.base() {
        BaseKind::U1 => {
            let mut out = linalg::zeros(1);
            out[(0, 0)] = m[(0, 0)].exp();
            out
        }
        BaseKind::SU2 => {
            // x² = -θ² I with θ² = det(x) ≥ 0 for traceless anti-Hermitian x.
            let theta = m.determinant().re.max(0.0).sqrt();
            linalg::eye(2) * re(theta.cos()) + m * re(sinc(theta))
        }
        BaseKind::SO3 => {
            let theta =
                (m[(2, 1)].re.powi(2) + m[(0, 2)].re.powi(2) + m[(1, 0)].re.powi(2)).sqrt();
            linalg::eye(3) + m * re(sinc(theta)) + (m * m) * re(cosc(theta))
        }
        BaseKind::O2 => {
            let theta = m[(1, 0)].re;
            let mut out = linalg::zeros(2);
            out[(0, 0)] = re(theta.cos());
            out[(0, 1)] = re(-theta.sin());
            out[(1, 0)] = re(theta.sin());
            out[(1, 1)] = re(theta.cos());
            out
        }
    };
    GroupElement {
        group: g,
        matrix,
        cyclic: 0,
    }
}

/// Principal logarithm. Requires the identity component and rotation angle
/// below the chart radius.
pub fn log(k: &GroupElement) -> Result<AlgebraElement> {
    if !k.component_class().is_trivial() {
        return Err(Error::OutOfChart(format!(
            "element in component {} of pi0, logarithm undefined",
            k.component_class()
        )));
    }
    let theta = k.angle();
    if theta >= k.group.chart_radius {
        return Err(Error::OutOfChart(format!(
            "rotation angle {theta:.6} >= chart radius {}",
            k.group.chart_radius
        )));
    }
    let m = &k.matrix;
    let matrix = match k.group.kind.base() {
        BaseKind::U1 => {
            let mut out = linalg::zeros(1);
            out[(0, 0)] = C::new(0.0, m[(0, 0)].arg());
            out
        }
        BaseKind::SU2 | BaseKind::SO3 => {
            // k = cos θ + sin θ·N with N the unit generator; recover θ·N.
            let anti = (m - m.adjoint()) * re(0.5);
            let factor = if theta.sin().abs() < 1e-8 {
                1.0 + theta * theta / 6.0
            } else {
                theta / theta.sin()
            };
            anti * re(factor)
        }
        BaseKind::O2 => {
            let t = m[(1, 0)].re.atan2(m[(0, 0)].re);
            let mut out = linalg::zeros(2);
            out[(0, 1)] = re(-t);
            out[(1, 0)] = re(t);
            out
        }
    };
    AlgebraElement::new(k.group, matrix)
}

/// Adjoint action Ad(k).x = k·x·k⁻¹.
pub fn ad(k: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    if k.group != x.group {
        return Err(Error::GroupMismatch("Ad with mixed groups".into()));
    }
    let m = &k.matrix * &x.matrix * k.matrix.adjoint();
    Ok(AlgebraElement::project(k.group, &m))
}

/// Left logarithmic derivative γ(t)⁻¹·γ′(t) of a sampled path into K, the
/// path derivative estimated by 4th-order central differences.
pub fn left_log_derivative(
    group: &StructureGroup,
    path: &SampledMap<Mat>,
    at: f64,
) -> Result<AlgebraElement> {
    if path.len() < 8 {
        return Err(Error::GridTooCoarse(format!(
            "left logarithmic derivative needs at least 8 samples, got {}",
            path.len()
        )));
    }
    let value = path.eval(at);
    let deriv = path.derivative_at(at);
    let k = GroupElement::project(*group, &value, 0)?;
    let x = k.matrix.adjoint() * deriv;
    Ok(AlgebraElement::project(*group, &x))
}

/// Random algebra element with operator norm equal to `norm`.
pub fn random_algebra<R: Rng + ?Sized>(
    group: &StructureGroup,
    rng: &mut R,
    norm: f64,
) -> AlgebraElement {
    let dim = group.matrix_dim;
    let mut m = linalg::zeros(dim);
    match group.kind.base() {
        BaseKind::U1 => {
            let s: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            m[(0, 0)] = C::new(0.0, s * norm);
        }
        BaseKind::SU2 => {
            let mut a = [0.0f64; 3];
            for v in a.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt().max(1e-12);
            let (x, y, z) = (a[0] / n * norm, a[1] / n * norm, a[2] / n * norm);
            // i(x σ₁ + y σ₂ + z σ₃): operator norm = |(x, y, z)|.
            m[(0, 0)] = C::new(0.0, z);
            m[(0, 1)] = C::new(y, x);
            m[(1, 0)] = C::new(-y, x);
            m[(1, 1)] = C::new(0.0, -z);
        }
        BaseKind::SO3 => {
            let mut a = [0.0f64; 3];
            for v in a.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt().max(1e-12);
            let (x, y, z) = (a[0] / n * norm, a[1] / n * norm, a[2] / n * norm);
            m[(0, 1)] = re(-z);
            m[(0, 2)] = re(y);
            m[(1, 0)] = re(z);
            m[(1, 2)] = re(-x);
            m[(2, 0)] = re(-y);
            m[(2, 1)] = re(x);
        }
        BaseKind::O2 => {
            let s: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            m[(0, 1)] = re(-s * norm);
            m[(1, 0)] = re(s * norm);
        }
    }
    AlgebraElement {
        group: *group,
        matrix: m,
    }
}

/// Random element of the identity component at rotation angle <= `radius`.
pub fn random_near_identity<R: Rng + ?Sized>(
    group: &StructureGroup,
    rng: &mut R,
    radius: f64,
) -> GroupElement {
    let norm = rng.gen_range(0.0..radius);
    exp(&random_algebra(group, rng, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Independent oracle: Taylor series with scaling and squaring.
    fn series_exp(m: &Mat) -> Mat {
        let dim = m.nrows();
        let norm = linalg::op_norm(m);
        let squarings = if norm > 0.25 {
            (norm / 0.25).log2().ceil() as u32
        } else {
            0
        };
        let scaled = m * re(0.5f64.powi(squarings as i32));
        let mut sum = linalg::eye(dim);
        let mut term = linalg::eye(dim);
        for k in 1..30 {
            term = &term * &scaled * re(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn groups() -> Vec<StructureGroup> {
        ["U1", "SU2", "SO3", "O2", "U1xZ3"]
            .iter()
            .map(|s| StructureGroup::new(s.parse().unwrap()))
            .collect()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for g in groups() {
            let e = exp(&g.zero_algebra());
            assert!(linalg::op_dist(&e.matrix, &linalg::eye(g.matrix_dim)) < 1e-15);
            assert!(e.component_class().is_trivial());
        }
    }

    #[test]
    fn u1_exp_of_i_pi_is_minus_one() {
        let g = StructureGroup::new(GroupKind::U1);
        let mut x = linalg::zeros(1);
        x[(0, 0)] = C::new(0.0, PI);
        let k = exp(&AlgebraElement::new(g, x).unwrap());
        assert!((k.matrix[(0, 0)] - re(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn so3_quarter_turn_about_z_matches_frozen_matrix() {
        let g = StructureGroup::new(GroupKind::SO3);
        let mut x = linalg::zeros(3);
        // Generator with axis e_z, angle π/2.
        x[(0, 1)] = re(-PI / 2.0);
        x[(1, 0)] = re(PI / 2.0);
        let k = exp(&AlgebraElement::new(g, x).unwrap());
        let expected = Mat::from_row_slice(
            3,
            3,
            &[
                re(0.0),
                re(-1.0),
                re(0.0),
                re(1.0),
                re(0.0),
                re(0.0),
                re(0.0),
                re(0.0),
                re(1.0),
            ],
        );
        assert!(linalg::op_dist(&k.matrix, &expected) < 1e-14);
    }

    #[test]
    fn log_of_identity_is_zero() {
        for g in groups() {
            let x = log(&g.identity()).unwrap();
            assert!(x.op_norm() < 1e-15);
        }
    }

    #[test]
    fn u1_log_of_i_is_i_pi_half() {
        let g = StructureGroup::new(GroupKind::U1);
        let mut m = linalg::zeros(1);
        m[(0, 0)] = C::new(0.0, 1.0);
        let k = GroupElement::new(g, m, 0).unwrap();
        let x = log(&k).unwrap();
        assert!((x.matrix[(0, 0)] - C::new(0.0, PI / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn log_of_o2_reflection_is_out_of_chart() {
        let g = StructureGroup::new(GroupKind::O2);
        let m = Mat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)]);
        let k = GroupElement::new(g, m, 0).unwrap();
        assert!(matches!(log(&k), Err(Error::OutOfChart(_))));
    }

    #[test]
    fn log_rejects_angles_beyond_chart_radius() {
        let g = StructureGroup::new(GroupKind::U1);
        let mut m = linalg::zeros(1);
        m[(0, 0)] = C::from_polar(1.0, 2.9);
        let k = GroupElement::new(g, m, 0).unwrap();
        assert!(matches!(log(&k), Err(Error::OutOfChart(_))));
    }

    #[test]
    fn exp_log_roundtrip_within_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in groups() {
            for _ in 0..20 {
                let norm = rng.gen_range(0.0..2.7);
                let x = random_algebra(&g, &mut rng, norm);
                let back = log(&exp(&x)).unwrap();
                assert!(
                    linalg::op_dist(&back.matrix, &x.matrix) < tol::IDENTITY,
                    "log(exp(x)) != x for {}",
                    g.kind
                );
            }
        }
    }

    #[test]
    fn exp_matches_series_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in groups() {
            for _ in 0..10 {
                let norm = rng.gen_range(0.0..2.0);
                let x = random_algebra(&g, &mut rng, norm);
                let fast = exp(&x);
                let oracle = series_exp(&x.matrix);
                assert!(
                    linalg::op_dist(&fast.matrix, &oracle) < 1e-12,
                    "closed-form exp deviates from series for {}",
                    g.kind
                );
            }
        }
    }

    #[test]
    fn ad_identity_and_zero_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in groups() {
            let x = random_algebra(&g, &mut rng, 0.8);
            let adx = ad(&g.identity(), &x).unwrap();
            assert!(linalg::op_dist(&adx.matrix, &x.matrix) < 1e-14);
            let k = random_near_identity(&g, &mut rng, 1.0);
            let z = ad(&k, &g.zero_algebra()).unwrap();
            assert!(z.op_norm() < 1e-14);
        }
    }

    #[test]
    fn su2_ad_by_torus_element_matches_direct_multiplication() {
        let g = StructureGroup::new(GroupKind::SU2);
        let alpha = 0.37f64;
        let mut k = linalg::zeros(2);
        k[(0, 0)] = C::from_polar(1.0, alpha);
        k[(1, 1)] = C::from_polar(1.0, -alpha);
        let k = GroupElement::new(g, k, 0).unwrap();
        let x = Mat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
        let x = AlgebraElement::new(g, x).unwrap();
        let got = ad(&k, &x).unwrap();
        let mut expected = linalg::zeros(2);
        expected[(0, 1)] = C::from_polar(1.0, 2.0 * alpha);
        expected[(1, 0)] = -C::from_polar(1.0, -2.0 * alpha);
        assert!(linalg::op_dist(&got.matrix, &expected) < 1e-14);
    }

    #[test]
    fn ad_is_a_homomorphism_and_interchanges_with_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in groups() {
            for _ in 0..20 {
                let k = random_near_identity(&g, &mut rng, 1.5);
                let h = random_near_identity(&g, &mut rng, 1.5);
                let x = random_algebra(&g, &mut rng, 1.0);
                let lhs = ad(&k.mul(&h).unwrap(), &x).unwrap();
                let rhs = ad(&k, &ad(&h, &x).unwrap()).unwrap();
                assert!(linalg::op_dist(&lhs.matrix, &rhs.matrix) < tol::IDENTITY);

                let inter_l = exp(&ad(&k, &x).unwrap());
                let inter_r = k
                    .mul(&exp(&x))
                    .unwrap()
                    .mul(&k.inverse())
                    .unwrap();
                assert!(
                    linalg::op_dist(&inter_l.matrix, &inter_r.matrix) < tol::IDENTITY,
                    "interchange fails for {}",
                    g.kind
                );
            }
        }
    }

    #[test]
    fn component_class_is_a_homomorphism() {
        let g = StructureGroup::new("O2xZ2".parse::<GroupKind>().unwrap());
        let refl = Mat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)]);
        let r = GroupElement::new(g, refl, 1).unwrap();
        let e = g.identity();
        assert!(e.component_class().is_trivial());
        assert!(r.component_class().reflecting);
        assert_eq!(r.component_class().residue, 1);
        let rr = r.mul(&r).unwrap();
        assert!(rr.component_class().is_trivial());
        assert_eq!(
            r.component_class().compose(&r.component_class()).unwrap(),
            rr.component_class()
        );
    }

    #[test]
    fn cyclic_label_is_the_class() {
        let g = StructureGroup::new("U1xZ3".parse::<GroupKind>().unwrap());
        let mut m = linalg::zeros(1);
        m[(0, 0)] = re(1.0);
        let k = GroupElement::new(g, m, 2).unwrap();
        assert_eq!(k.component_class().residue, 2);
        assert_eq!(k.inverse().component_class().residue, 1);
    }

    #[test]
    fn left_log_derivative_recovers_generator() {
        use crate::manifold::SampledMap;
        let g = StructureGroup::new(GroupKind::SU2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_algebra(&g, &mut rng, 0.9);
        // One-parameter subgroup sampled on [0, 1].
        let n = 128;
        let samples: Vec<Mat> = (0..n)
            .map(|j| {
                let t = j as f64 / (n - 1) as f64;
                exp(&x.scaled(t)).matrix
            })
            .collect();
        let path = SampledMap::on_interval(0.0, 1.0, samples).unwrap();
        let d = left_log_derivative(&g, &path, 0.5).unwrap();
        assert!(linalg::op_dist(&d.matrix, &x.matrix) < 1e-8);

        // Constant path.
        let k = random_near_identity(&g, &mut rng, 1.0);
        let samples: Vec<Mat> = (0..64).map(|_| k.matrix.clone()).collect();
        let path = SampledMap::on_interval(0.0, 1.0, samples).unwrap();
        let d = left_log_derivative(&g, &path, 0.3).unwrap();
        assert!(d.op_norm() < 1e-12);
    }

    #[test]
    fn u1_unit_speed_loop_has_log_derivative_two_pi_i() {
        use crate::manifold::SampledMap;
        let g = StructureGroup::new(GroupKind::U1);
        let n = 512;
        let samples: Vec<Mat> = (0..n)
            .map(|j| {
                let t = j as f64 / n as f64;
                let mut m = linalg::zeros(1);
                m[(0, 0)] = C::from_polar(1.0, 2.0 * PI * t);
                m
            })
            .collect();
        let path = SampledMap::on_circle(samples).unwrap();
        let d = left_log_derivative(&g, &path, 0.0).unwrap();
        assert!((d.matrix[(0, 0)] - C::new(0.0, 2.0 * PI)).norm() < 1e-8);
    }

    #[test]
    fn left_log_derivative_rejects_coarse_grids() {
        use crate::manifold::SampledMap;
        let g = StructureGroup::new(GroupKind::U1);
        let samples: Vec<Mat> = (0..6).map(|_| linalg::eye(1)).collect();
        let path = SampledMap::on_interval(0.0, 1.0, samples).unwrap();
        assert!(matches!(
            left_log_derivative(&g, &path, 0.5),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
