//! Shearlet dilation groups `H = S·D` in dimension `d ≥ 2`.
//!
//! An element is parametrized by a shear vector `s ∈ ℝ^{d-1}` and a signed
//! scale `a`, with matrix
//!
//! ```text
//! h_{s,a} = a · [ 1   -ᵗs Λ(a)  ]
//!               [ 0   B(s) Λ(a) ]
//! ```
//!
//! where `Λ(a) = diag(|a|^{λ_1}, …, |a|^{λ_{d-1}})` and `B` maps shears to
//! unipotent upper-triangular matrices.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

/// User-supplied shearing map `s ↦ B(s)`.
pub type ShearingMap = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
pub enum ShearingKind {
    /// `B ≡ I`.
    Standard,
    /// Upper-triangular Toeplitz matrix with `-s_k` on the k-th superdiagonal,
    /// using the first `d-2` shear components.
    Toeplitz,
    /// The 4-dimensional non-Abelian example built from the Heisenberg group.
    Heisenberg,
    Custom { name: String, map: ShearingMap },
}

impl fmt::Debug for ShearingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShearingKind::Standard => write!(f, "Standard"),
            ShearingKind::Toeplitz => write!(f, "Toeplitz"),
            ShearingKind::Heisenberg => write!(f, "Heisenberg"),
            ShearingKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DilationFamily {
    dim: usize,
    lambdas: Vec<f64>,
    kind: ShearingKind,
}

impl DilationFamily {
    /// Family with explicit exponents; axioms are not checked here (see [`verify_family`]).
    pub fn new(dim: usize, lambdas: Vec<f64>, kind: ShearingKind) -> Result<Self> {
        if dim < 2 {
            return domain(format!("dimension must be at least 2, got {dim}"));
        }
        if lambdas.len() != dim - 1 {
            return Err(Error::Shape { expected: dim - 1, got: lambdas.len() });
        }
        if matches!(kind, ShearingKind::Heisenberg) && dim != 4 {
            return domain("the Heisenberg shearing exists only for d = 4");
        }
        Ok(Self { dim, lambdas, kind })
    }

    /// The standard group `𝕊^γ`: `B ≡ I`, every `λ_k = γ - 1`.
    pub fn standard(dim: usize, gamma: f64) -> Result<Self> {
        Self::new(dim, vec![gamma - 1.0; dim.saturating_sub(1)], ShearingKind::Standard)
    }

    /// Toeplitz shearing with the compatible exponents `λ_k = k·λ_1`.
    pub fn toeplitz(dim: usize, lambda1: f64) -> Result<Self> {
        let lambdas = (1..dim).map(|k| k as f64 * lambda1).collect();
        Self::new(dim, lambdas, ShearingKind::Toeplitz)
    }

    /// The non-Abelian 4-dimensional group with `Λ(a) = diag(|a|^λ, |a|^{2λ}, |a|^{3λ})`.
    pub fn heisenberg(lambda: f64) -> Self {
        Self {
            dim: 4,
            lambdas: vec![lambda, 2.0 * lambda, 3.0 * lambda],
            kind: ShearingKind::Heisenberg,
        }
    }

    pub fn custom(dim: usize, lambdas: Vec<f64>, name: &str, map: ShearingMap) -> Result<Self> {
        Self::new(dim, lambdas, ShearingKind::Custom { name: name.to_string(), map })
    }

    /// Parses `standard:d=2,gamma=0.5`, `toeplitz:d=5,lambda1=0.5` or `heisenberg:lambda=0.5`.
    pub fn parse(id: &str) -> Result<Self> {
        let (kind, rest) = id.split_once(':').unwrap_or((id, ""));
        let mut d = None;
        let mut value = None;
        let mut key_seen = "";
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("malformed family parameter '{part}'")))?;
            let k = k.trim();
            let v = v.trim();
            match k {
                "d" => {
                    d = Some(v.parse::<usize>().map_err(|_| Error::Domain(format!("bad dimension '{v}'")))?)
                }
                "gamma" | "lambda1" | "lambda" => {
                    value = Some(parse_number(v)?);
                    key_seen = match k {
                        "gamma" => "gamma",
                        "lambda1" => "lambda1",
                        _ => "lambda",
                    };
                }
                other => return domain(format!("unknown family parameter '{other}'")),
            }
        }
        match (kind.trim(), key_seen) {
            ("standard", "gamma") => Self::standard(d.unwrap_or(2), value.unwrap_or(0.5)),
            ("standard", "") => Self::standard(d.unwrap_or(2), 0.5),
            ("toeplitz", "lambda1") => Self::toeplitz(d.unwrap_or(3), value.unwrap_or(-0.5)),
            ("heisenberg", "lambda") | ("heisenberg", "") => {
                if let Some(d) = d {
                    if d != 4 {
                        return domain("the Heisenberg family has d = 4");
                    }
                }
                Ok(Self::heisenberg(value.unwrap_or(-0.25)))
            }
            _ => domain(format!("unknown family id '{id}'")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn kind(&self) -> &ShearingKind {
        &self.kind
    }

    /// `λ_D = Σ λ_k`.
    pub fn lambda_sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// `Λ(a)` as a diagonal vector.
    pub fn scaling(&self, a: f64) -> DVector<f64> {
        DVector::from_iterator(self.dim - 1, self.lambdas.iter().map(|l| a.abs().powf(*l)))
    }

    /// `B(s)`.
    pub fn shearing(&self, s: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim - 1;
        match &self.kind {
            ShearingKind::Standard => DMatrix::identity(m, m),
            ShearingKind::Toeplitz => {
                let mut b = DMatrix::identity(m, m);
                for k in 1..m {
                    for i in 0..m - k {
                        b[(i, i + k)] = -s[k - 1];
                    }
                }
                b
            }
            ShearingKind::Heisenberg => {
                let mut b = DMatrix::identity(3, 3);
                b[(0, 1)] = -s[0];
                b[(0, 2)] = -s[1] - 0.5 * s[0] * s[0];
                b
            }
            ShearingKind::Custom { map, .. } => map(s),
        }
    }

    /// Canonical string id for known kinds.
    pub fn id(&self) -> String {
        match &self.kind {
            ShearingKind::Standard => format!("standard:d={},gamma={}", self.dim, self.lambdas[0] + 1.0),
            ShearingKind::Toeplitz => format!("toeplitz:d={},lambda1={}", self.dim, self.lambdas[0]),
            ShearingKind::Heisenberg => format!("heisenberg:lambda={}", self.lambdas[0]),
            ShearingKind::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    fn check_shear(&self, s: &DVector<f64>) -> Result<()> {
        if s.len() != self.dim - 1 {
            return Err(Error::Shape { expected: self.dim - 1, got: s.len() });
        }
        Ok(())
    }

    fn same_as(&self, other: &DilationFamily) -> bool {
        if self.dim != other.dim || self.lambdas != other.lambdas {
            return false;
        }
        match (&self.kind, &other.kind) {
            (ShearingKind::Standard, ShearingKind::Standard)
            | (ShearingKind::Toeplitz, ShearingKind::Toeplitz)
            | (ShearingKind::Heisenberg, ShearingKind::Heisenberg) => true,
            (ShearingKind::Custom { map: a, .. }, ShearingKind::Custom { map: b, .. }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

fn parse_number(v: &str) -> Result<f64> {
    if let Some((n, d)) = v.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| Error::Domain(format!("bad number '{v}'")))?;
        let d: f64 = d.trim().parse().map_err(|_| Error::Domain(format!("bad number '{v}'")))?;
        return Ok(n / d);
    }
    v.parse().map_err(|_| Error::Domain(format!("bad number '{v}'")))
}

/// Element `h_{s,a}` of a shearlet dilation group.
#[derive(Clone, Debug)]
pub struct GroupElement {
    family: Arc<DilationFamily>,
    s: DVector<f64>,
    a: f64,
    matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn family(&self) -> &Arc<DilationFamily> {
        &self.family
    }

    pub fn shear(&self) -> &DVector<f64> {
        &self.s
    }

    pub fn scale(&self) -> f64 {
        self.a
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Builds `h_{s,a}`.
pub fn build_element(family: &Arc<DilationFamily>, s: DVector<f64>, a: f64) -> Result<GroupElement> {
    if a == 0.0 || !a.is_finite() {
        return domain(format!("scale must be finite and nonzero, got {a}"));
    }
    family.check_shear(&s)?;
    let d = family.dim;
    let lam = family.scaling(a);
    let b = family.shearing(&s);
    let mut m = DMatrix::zeros(d, d);
    m[(0, 0)] = a;
    for j in 0..d - 1 {
        m[(0, j + 1)] = -a * s[j] * lam[j];
        for i in 0..d - 1 {
            m[(i + 1, j + 1)] = a * b[(i, j)] * lam[j];
        }
    }
    Ok(GroupElement { family: Arc::clone(family), s, a, matrix: m })
}

/// Identity element of `family`.
pub fn identity(family: &Arc<DilationFamily>) -> GroupElement {
    build_element(family, DVector::zeros(family.dim - 1), 1.0).expect("identity is valid")
}

/// Group product: `(s,a)(s',a') = (Λ(a)⁻¹s' + ᵗB(Λ(a)⁻¹s')s, aa')`.
pub fn compose(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    if !g1.family.same_as(&g2.family) {
        return domain("cannot compose elements of different families");
    }
    let fam = &g1.family;
    let lam = fam.scaling(g1.a);
    let u = g2.s.component_div(&lam);
    let s = &u + fam.shearing(&u).transpose() * &g1.s;
    build_element(fam, s, g1.a * g2.a)
}

/// Group inverse: `(s,a)⁻¹ = (-Λ(a)·ᵗB(s)⁻¹ s, 1/a)`.
pub fn inverse(g: &GroupElement) -> GroupElement {
    let fam = &g.family;
    let bt = fam.shearing(&g.s).transpose();
    // unipotent triangular, always invertible
    let u = bt
        .lu()
        .solve(&g.s)
        .expect("unipotent matrices are invertible");
    let s = -fam.scaling(g.a).component_mul(&u);
    build_element(fam, s, 1.0 / g.a).expect("inverse of a valid element is valid")
}

/// Dual action on the affine chart: `ᵗh_{s,a} n(v) = scale · n(v')` with
/// `v' = Λ(a)(ᵗB(s)v - s)`, `scale = a`, where `n(v) = (1, v)`.
pub fn dual_action(g: &GroupElement, v: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    g.family.check_shear(v)?;
    let fam = &g.family;
    let w = fam.shearing(&g.s).transpose() * v - &g.s;
    Ok((fam.scaling(g.a).component_mul(&w), g.a))
}

/// Left Haar density of `H` and of `G = ℝ^d ⋊ H` at scale `a`:
/// `(|a|^{λ_D - 1}, |a|^{-(d+1)})`.
pub fn haar_density(family: &DilationFamily, a: f64) -> Result<(f64, f64)> {
    if a == 0.0 || !a.is_finite() {
        return domain(format!("scale must be finite and nonzero, got {a}"));
    }
    let x = a.abs();
    Ok((x.powf(family.lambda_sum() - 1.0), x.powf(-(family.dim as f64 + 1.0))))
}

/// Maximum residual of each group axiom over random samples.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub samples: usize,
    pub unipotent: f64,
    pub identity: f64,
    pub product: f64,
    pub inverse: f64,
    pub compatibility: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl FamilyReport {
    /// `(metric, value)` pairs in report order.
    pub fn metrics(&self) -> [(&'static str, f64); 5] {
        [
            ("unipotent_residual", self.unipotent),
            ("identity_residual", self.identity),
            ("product_residual", self.product),
            ("inverse_residual", self.inverse),
            ("compatibility_residual", self.compatibility),
        ]
    }
}

pub const AXIOM_TOLERANCE: f64 = 1e-10;

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Samples shears uniformly in `[-2, 2]^{d-1}` and scales with `|a| ∈ [1/4, 4]`,
/// random sign, and records the worst residual of
/// `B(0) = I`, `B(u)B(v) = B(v + ᵗB(v)u)`, `B(u)⁻¹ = B(-ᵗB(u)⁻¹u)` and
/// `Λ(a)B(s)Λ(a)⁻¹ = B(Λ(a)⁻¹s)`.
pub fn verify_family(family: &DilationFamily, sample_count: usize, seed: u64) -> Result<FamilyReport> {
    if sample_count == 0 {
        return domain("sample_count must be at least 1");
    }
    let m = family.dim - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vec = |rng: &mut ChaCha8Rng| DVector::from_fn(m, |_, _| rng.random_range(-2.0..2.0));
    let zero = DVector::zeros(m);
    let identity_res = max_abs(&(family.shearing(&zero) - DMatrix::identity(m, m)));
    let (mut unip, mut prod, mut inv, mut compat) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..sample_count {
        let u = vec(&mut rng);
        let v = vec(&mut rng);
        let bu = family.shearing(&u);
        let bv = family.shearing(&v);
        for i in 0..m {
            unip = unip.max((bu[(i, i)] - 1.0).abs());
            for j in 0..i {
                unip = unip.max(bu[(i, j)].abs());
            }
        }
        let w = &v + bv.transpose() * &u;
        prod = prod.max(max_abs(&(&bu * &bv - family.shearing(&w))));
        let but_inv_u = bu.transpose().lu().solve(&u).unwrap_or_else(|| DVector::from_element(m, f64::NAN));
        let binv = family.shearing(&(-but_inv_u));
        inv = inv.max(max_abs(&(&bu * binv - DMatrix::identity(m, m))));
        let mag: f64 = rng.random_range(0.25_f64.ln()..4.0_f64.ln()).exp();
        let a = if rng.random_bool(0.5) { mag } else { -mag };
        let lam = family.scaling(a);
        let lhs = DMatrix::from_diagonal(&lam) * &bu * DMatrix::from_diagonal(&lam.map(|x| 1.0 / x));
        let rhs = family.shearing(&u.component_div(&lam));
        compat = compat.max(max_abs(&(lhs - rhs)));
    }
    let worst = [unip, identity_res, prod, inv, compat];
    let pass = worst.iter().all(|r| r.is_finite() && *r <= AXIOM_TOLERANCE);
    Ok(FamilyReport {
        samples: sample_count,
        unipotent: unip,
        identity: identity_res,
        product: prod,
        inverse: inv,
        compatibility: compat,
        tolerance: AXIOM_TOLERANCE,
        pass,
    })
}

/// Toeplitz parameter product `û ♯ v̂` defined by `T(û)T(v̂) = T(û ♯ v̂)`:
/// `(û ♯ v̂)_i = u_i + v_i - Σ_{j+k=i} u_k v_j`.
pub fn toeplitz_sharp(u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = u.len().min(v.len());
    (1..=n)
        .map(|i| {
            let conv: f64 = (1..i).map(|k| u[k - 1] * v[i - k - 1]).sum();
            u[i - 1] + v[i - 1] - conv
        })
        .collect()
}

/// Heisenberg Lie algebra element `X(q,p,t)`.
pub fn heisenberg_algebra(q: f64, p: f64, t: f64) -> Matrix4<f64> {
    Matrix4::new(
        0.0, q, p, t, //
        0.0, 0.0, q, p, //
        0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0,
    )
}

/// `exp(X(q,p,t)) = I + X + X²/2` (as `X³ = 0`) together with the group element
/// `g(-q, -(p + q²/2), -(t + qp/2))` it equals.
pub fn heisenberg_exp(family: &Arc<DilationFamily>, q: f64, p: f64, t: f64) -> Result<(Matrix4<f64>, GroupElement)> {
    if !matches!(family.kind, ShearingKind::Heisenberg) {
        return domain("heisenberg_exp needs the Heisenberg family");
    }
    let x = heisenberg_algebra(q, p, t);
    let exp = Matrix4::identity() + x + x * x * 0.5;
    let u = DVector::from_vec(vec![-q, -(p + 0.5 * q * q), -(t + 0.5 * q * p)]);
    Ok((exp, build_element(family, u, 1.0)?))
}
