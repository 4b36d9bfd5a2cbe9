//! Truncated coefficient rings and the quotient-ring model for power
//! operations: E0 = Z/p^N (truncation K = 1) or Z/2^N[a]/(a^K) (K > 1), the
//! quotient E0[z]/f(z) with canonical z-power reduction, window matrices of
//! the reduction map on the module basis z..z^(d-1), and presentation files
//! that package (p, h, f, tr(1), P(a)).

use crate::howell::ChainRing;
use serde::Deserialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RingError {
    #[error("invalid ring parameters: {0}")]
    Invalid(String),
    #[error("presentation parse error: {0}")]
    Parse(String),
    #[error("presentation structure error: {0}")]
    Structure(String),
}

/// Parameters of the truncated coefficient ring: residues mod p^N, a-adic
/// truncation a^K = 0. K = 1 is the plain Z/p^N case; K > 1 requires p = 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CoeffRingSpec {
    prime: u64,
    precision: u32,
    truncation: usize,
    modulus: u64,
}

impl CoeffRingSpec {
    pub fn new(prime: u64, precision: u32, truncation: usize) -> Result<Self, RingError> {
        if !crate::padic::is_prime(prime) {
            return Err(RingError::Invalid(format!("{prime} is not prime")));
        }
        if precision < 1 {
            return Err(RingError::Invalid("precision must be at least 1".into()));
        }
        if truncation < 1 {
            return Err(RingError::Invalid("truncation must be at least 1".into()));
        }
        if truncation > 1 && prime != 2 {
            return Err(RingError::Invalid(format!(
                "truncation {truncation} > 1 requires p = 2, got p = {prime}"
            )));
        }
        let mut m: u128 = 1;
        for _ in 0..precision {
            m = m
                .checked_mul(prime as u128)
                .filter(|&m| m < (1 << 62))
                .ok_or_else(|| {
                    RingError::Invalid(format!("modulus {prime}^{precision} out of range"))
                })?;
        }
        Ok(CoeffRingSpec { prime, precision, truncation, modulus: m as u64 })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn chain_ring(&self) -> ChainRing {
        ChainRing::new(self.prime, self.precision)
    }
}

/// An element sum c_i a^i of the truncated coefficient ring; exactly K
/// coefficients, each canonical in [0, p^N).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffElem {
    spec: CoeffRingSpec,
    coeffs: Vec<u64>,
}

impl CoeffElem {
    pub fn zero(spec: CoeffRingSpec) -> Self {
        CoeffElem { spec, coeffs: vec![0; spec.truncation] }
    }

    pub fn one(spec: CoeffRingSpec) -> Self {
        Self::from_int(spec, 1)
    }

    pub fn from_int(spec: CoeffRingSpec, v: i128) -> Self {
        let mut e = Self::zero(spec);
        e.coeffs[0] = v.rem_euclid(spec.modulus as i128) as u64;
        e
    }

    /// c * a^deg; zero when deg >= K since a^K = 0.
    pub fn monomial(spec: CoeffRingSpec, c: i128, deg: usize) -> Self {
        let mut e = Self::zero(spec);
        if deg < spec.truncation {
            e.coeffs[deg] = c.rem_euclid(spec.modulus as i128) as u64;
        }
        e
    }

    pub fn a_power(spec: CoeffRingSpec, deg: usize) -> Self {
        Self::monomial(spec, 1, deg)
    }

    /// Build from an ascending-degree coefficient list; degrees >= K are
    /// truncated away (a^K = 0).
    pub fn from_coeff_list(spec: CoeffRingSpec, coeffs: &[i64]) -> Self {
        let mut e = Self::zero(spec);
        for (i, &c) in coeffs.iter().enumerate().take(spec.truncation) {
            e.coeffs[i] = (c as i128).rem_euclid(spec.modulus as i128) as u64;
        }
        e
    }

    pub(crate) fn from_residues(spec: CoeffRingSpec, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(coeffs.len(), spec.truncation);
        debug_assert!(coeffs.iter().all(|&c| c < spec.modulus));
        CoeffElem { spec, coeffs }
    }

    pub fn spec(&self) -> CoeffRingSpec {
        self.spec
    }

    /// Residues of the coefficients, ascending a-degree; length K.
    pub fn residues(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Highest a-degree with a nonzero coefficient; None for zero.
    pub fn a_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn constant_coeff(&self) -> u64 {
        self.coeffs[0]
    }

    /// Units are exactly the elements whose a-degree-zero coefficient is a
    /// unit mod p (the rest is nilpotent).
    pub fn is_unit(&self) -> bool {
        self.coeffs[0] % self.spec.prime != 0
    }

    /// The maximal ideal is (p, a): constant-in-a coefficient divisible by p.
    pub fn in_max_ideal(&self) -> bool {
        self.coeffs[0] % self.spec.prime == 0
    }

    fn ring(&self) -> ChainRing {
        self.spec.chain_ring()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.spec, other.spec, "mixed coefficient rings");
        let r = self.ring();
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(&a, &b)| r.add(a, b))
            .collect();
        CoeffElem { spec: self.spec, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.spec, other.spec, "mixed coefficient rings");
        let r = self.ring();
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(&a, &b)| r.sub(a, b))
            .collect();
        CoeffElem { spec: self.spec, coeffs }
    }

    pub fn neg(&self) -> Self {
        let r = self.ring();
        CoeffElem { spec: self.spec, coeffs: self.coeffs.iter().map(|&a| r.neg(a)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.spec, other.spec, "mixed coefficient rings");
        let r = self.ring();
        let k = self.spec.truncation;
        let mut coeffs = vec![0u64; k];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= k {
                    break;
                }
                if b != 0 {
                    coeffs[i + j] = r.add(coeffs[i + j], r.mul(a, b));
                }
            }
        }
        CoeffElem { spec: self.spec, coeffs }
    }

    pub fn scale(&self, c: i128) -> Self {
        let r = self.ring();
        let c = r.reduce_i128(c);
        CoeffElem { spec: self.spec, coeffs: self.coeffs.iter().map(|&a| r.mul(a, c)).collect() }
    }

    /// Multiplication by a: shift coefficients up one degree, dropping a^K.
    pub fn mul_by_a(&self) -> Self {
        let k = self.spec.truncation;
        let mut coeffs = vec![0u64; k];
        coeffs[1..k].copy_from_slice(&self.coeffs[..k - 1]);
        CoeffElem { spec: self.spec, coeffs }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.spec);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a unit: factor out the unit constant, then a finite
    /// geometric series on the nilpotent remainder (a^K = 0 caps it).
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let r = self.ring();
        let c0_inv = Self::from_int(self.spec, r.inv_unit(self.coeffs[0]) as i128);
        let y = self.mul(&c0_inv); // 1 + nilpotent
        let one = Self::one(self.spec);
        let n = one.sub(&y); // nilpotent part, negated
        let mut acc = one.clone();
        let mut term = one;
        for _ in 1..self.spec.truncation {
            term = term.mul(&n);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Some(acc.mul(&c0_inv))
    }

    /// Grading used everywhere output order matters: by a-degree, then by
    /// the coefficient vector.
    pub fn sort_key(&self) -> (usize, Vec<u64>) {
        (self.a_degree().map_or(0, |d| d), self.coeffs.clone())
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "a")?,
                (1, _) => write!(f, "{c}a")?,
                (_, 1) => write!(f, "a^{i}")?,
                (_, _) => write!(f, "{c}a^{i}")?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for CoeffElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An element of E0[z]/f(z), stored as z-coefficients of degree < d = deg f.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaElem {
    coeffs: Vec<CoeffElem>,
}

impl SigmaElem {
    pub fn coeffs(&self) -> &[CoeffElem] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &CoeffElem {
        &self.coeffs[j]
    }

    /// Evaluation at z = 0; a ring map because f(0) = 0.
    pub fn eval_at_zero(&self) -> CoeffElem {
        self.coeffs[0].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn z_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }
}

impl fmt::Display for SigmaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{c}")?;
                continue;
            }
            let single_term = c.residues().iter().filter(|&&x| x != 0).count() == 1;
            let body = format!("{c}");
            if c.is_one() {
                // coefficient 1 is omitted
            } else if single_term {
                write!(f, "{body}")?;
            } else {
                write!(f, "({body})")?;
            }
            if j == 1 {
                write!(f, "z")?;
            } else {
                write!(f, "z^{j}")?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for SigmaElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The matrix of the window map at a shift: entry (i, j) is the z^(i+1)
/// coefficient of the reduction of z^(j+1+m) mod f, for i, j in 0..r with
/// r = deg f - 1. Shift 0 is the identity; shifts compose multiplicatively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMatrix {
    pub shift: u32,
    entries: Vec<Vec<CoeffElem>>,
}

impl WindowMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &CoeffElem {
        &self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[CoeffElem] {
        &self.entries[i]
    }

    pub fn mul(&self, other: &WindowMatrix) -> WindowMatrix {
        let r = self.size();
        assert_eq!(r, other.size());
        let spec = self.entries[0][0].spec();
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let mut acc = CoeffElem::zero(spec);
                        for k in 0..r {
                            acc = acc.add(&self.entries[i][k].mul(&other.entries[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        WindowMatrix { shift: self.shift + other.shift, entries }
    }

    /// Row vector times matrix: (v M)_j = sum_i v_i M[i][j].
    pub fn apply_left(&self, v: &[CoeffElem]) -> Vec<CoeffElem> {
        let r = self.size();
        assert_eq!(v.len(), r);
        let spec = self.entries[0][0].spec();
        (0..r)
            .map(|j| {
                let mut acc = CoeffElem::zero(spec);
                for i in 0..r {
                    acc = acc.add(&v[i].mul(&self.entries[i][j]));
                }
                acc
            })
            .collect()
    }
}

/// Soft content checks recorded at load time and reported by
/// `check_presentation` (structural problems are hard load errors instead).
#[derive(Clone, Copy, Debug)]
pub struct ContentFlags {
    pub f_constant_term_zero: bool,
    pub tr1_at_zero_is_two: bool,
    pub p_of_a_at_zero_is_a_squared: bool,
    pub leading_coeff_was_normalized: bool,
}

/// One E-theory's power-operation data: the coefficient ring, the monic
/// relation f(z) with f(0) = 0 presenting E0[z]/f(z), the transfer of 1, and
/// (when K > 1) the value of the power operation on a.
#[derive(Clone, Debug)]
pub struct ETheoryPresentation {
    spec: CoeffRingSpec,
    height: u32,
    /// Monic, length d+1, f[0] the constant term.
    f: Vec<CoeffElem>,
    tr1: SigmaElem,
    p_of_a: Option<SigmaElem>,
    flags: ContentFlags,
    /// Canonical reductions of z^0 .. z^cache_top, built once at load.
    z_cache: Vec<SigmaElem>,
    /// P(a)^i for i in 0..K, built once at load.
    p_of_a_powers: Vec<SigmaElem>,
}

/// On-disk presentation format: z-polynomials are lists of
/// (z-exponent, ascending a-coefficient list) pairs.
#[derive(Deserialize)]
struct PresFile {
    prime: u64,
    height: u32,
    #[serde(rename = "N")]
    precision: u32,
    #[serde(rename = "K")]
    truncation: usize,
    f: Vec<(u64, Vec<i64>)>,
    tr1: Vec<(u64, Vec<i64>)>,
    p_of_a: Option<Vec<(u64, Vec<i64>)>>,
}

pub const HEIGHT1_SRC: &str = include_str!("../presentations/height1.pres");
pub const HEIGHT2_SRC: &str = include_str!("../presentations/height2.pres");

const Z_CACHE_EXTRA: usize = 16;

impl ETheoryPresentation {
    /// Parse a presentation from TOML source, optionally overriding the
    /// file's default precision N and truncation K.
    pub fn from_toml_str(
        src: &str,
        precision_override: Option<u32>,
        truncation_override: Option<usize>,
    ) -> Result<Self, RingError> {
        let file: PresFile = toml::from_str(src).map_err(|e| RingError::Parse(e.to_string()))?;
        let n = precision_override.unwrap_or(file.precision);
        let k = truncation_override.unwrap_or(file.truncation);
        let spec = CoeffRingSpec::new(file.prime, n, k)?;

        let d = (file.prime as u128).pow(file.height);
        if file.height == 0 || d > 64 {
            return Err(RingError::Structure(format!("height {} out of range", file.height)));
        }
        let d = d as usize;

        let mut f = vec![CoeffElem::zero(spec); d + 1];
        for (exp, coeffs) in &file.f {
            let exp = *exp as usize;
            if exp > d {
                return Err(RingError::Structure(format!(
                    "f has a z^{exp} term but deg f must be p^h = {d}"
                )));
            }
            f[exp] = f[exp].add(&CoeffElem::from_coeff_list(spec, coeffs));
        }
        let lead = f[d].clone();
        if lead.is_zero() {
            return Err(RingError::Structure(format!(
                "f has no z^{d} term; deg f must be p^h = {d}"
            )));
        }
        let mut leading_coeff_was_normalized = false;
        if !lead.is_one() {
            let inv = lead
                .inverse()
                .ok_or_else(|| RingError::Structure("leading coefficient of f is not a unit".into()))?;
            for c in f.iter_mut() {
                *c = c.mul(&inv);
            }
            leading_coeff_was_normalized = true;
        }
        let f_constant_term_zero = f[0].is_zero();

        // z^d = -(f - z^d) once f is monic; build the reduction cache.
        let zd: Vec<CoeffElem> = f[..d].iter().map(|c| c.neg()).collect();
        let cache_top = 2 * d + Z_CACHE_EXTRA;
        let mut z_cache: Vec<SigmaElem> = Vec::with_capacity(cache_top + 1);
        let mut one = vec![CoeffElem::zero(spec); d];
        one[0] = CoeffElem::one(spec);
        z_cache.push(SigmaElem { coeffs: one });
        for _ in 0..cache_top {
            z_cache.push(step_z(spec, d, &zd, z_cache.last().unwrap()));
        }

        let build = |terms: &[(u64, Vec<i64>)]| -> SigmaElem {
            let mut acc = SigmaElem { coeffs: vec![CoeffElem::zero(spec); d] };
            for (exp, coeffs) in terms {
                let c = CoeffElem::from_coeff_list(spec, coeffs);
                let zk = &z_cache[*exp as usize];
                for (dst, src) in acc.coeffs.iter_mut().zip(zk.coeffs.iter()) {
                    *dst = dst.add(&src.mul(&c));
                }
            }
            acc
        };

        for (exp, _) in file.tr1.iter().chain(file.p_of_a.iter().flatten()) {
            if *exp as usize > cache_top {
                return Err(RingError::Structure(format!("z-exponent {exp} out of range")));
            }
        }
        let tr1 = build(&file.tr1);
        let tr1_at_zero_is_two =
            tr1.eval_at_zero() == CoeffElem::from_int(spec, 2);

        let p_of_a = match (&file.p_of_a, k > 1) {
            (Some(terms), true) => Some(build(terms)),
            (None, false) => None,
            (Some(_), false) => {
                return Err(RingError::Structure(
                    "p_of_a must be absent when K = 1 (there is no a)".into(),
                ))
            }
            (None, true) => {
                return Err(RingError::Structure("p_of_a is required when K > 1".into()))
            }
        };
        let p_of_a_at_zero_is_a_squared = match &p_of_a {
            Some(pa) => pa.eval_at_zero() == CoeffElem::a_power(spec, 2),
            None => true,
        };

        let mut p_of_a_powers = Vec::with_capacity(k);
        let mut sig_one = SigmaElem { coeffs: vec![CoeffElem::zero(spec); d] };
        sig_one.coeffs[0] = CoeffElem::one(spec);
        p_of_a_powers.push(sig_one);
        if let Some(pa) = &p_of_a {
            for i in 1..k {
                let prev = p_of_a_powers[i - 1].clone();
                p_of_a_powers.push(mul_reduced(spec, d, &z_cache, &prev, pa));
            }
        }

        let flags = ContentFlags {
            f_constant_term_zero,
            tr1_at_zero_is_two,
            p_of_a_at_zero_is_a_squared,
            leading_coeff_was_normalized,
        };
        Ok(ETheoryPresentation {
            spec,
            height: file.height,
            f,
            tr1,
            p_of_a,
            flags,
            z_cache,
            p_of_a_powers,
        })
    }

    /// The shipped degree-2 presentation (f = 2z - z^2, tr(1) = 2 - z).
    pub fn height1() -> Self {
        Self::from_toml_str(HEIGHT1_SRC, None, None).expect("embedded file is valid")
    }

    /// The shipped degree-4 presentation (f = z^4 - a z^2 - 2z,
    /// tr(1) = 2 + az - z^3, P(a) = a^2 + 3z - a z^2).
    pub fn height2() -> Self {
        Self::from_toml_str(HEIGHT2_SRC, None, None).expect("embedded file is valid")
    }

    pub fn with_params(src: &str, n: Option<u32>, k: Option<usize>) -> Result<Self, RingError> {
        Self::from_toml_str(src, n, k)
    }

    pub fn spec(&self) -> CoeffRingSpec {
        self.spec
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// d = deg f = p^h.
    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    /// Window size r = d - 1.
    pub fn window(&self) -> usize {
        self.degree() - 1
    }

    pub fn f_coeffs(&self) -> &[CoeffElem] {
        &self.f
    }

    pub fn tr1(&self) -> &SigmaElem {
        &self.tr1
    }

    pub fn p_of_a(&self) -> Option<&SigmaElem> {
        self.p_of_a.as_ref()
    }

    pub fn flags(&self) -> ContentFlags {
        self.flags
    }

    /// P(a)^i for i < K, from the load-time memo.
    pub fn p_of_a_power(&self, i: usize) -> &SigmaElem {
        &self.p_of_a_powers[i]
    }

    pub fn sigma_zero(&self) -> SigmaElem {
        SigmaElem { coeffs: vec![CoeffElem::zero(self.spec); self.degree()] }
    }

    pub fn sigma_one(&self) -> SigmaElem {
        let mut s = self.sigma_zero();
        s.coeffs[0] = CoeffElem::one(self.spec);
        s
    }

    pub fn sigma_constant(&self, c: &CoeffElem) -> SigmaElem {
        let mut s = self.sigma_zero();
        s.coeffs[0] = c.clone();
        s
    }

    /// Build from z-coefficients (degree < d).
    pub fn sigma_from_coeffs(&self, coeffs: Vec<CoeffElem>) -> SigmaElem {
        assert_eq!(coeffs.len(), self.degree());
        SigmaElem { coeffs }
    }

    /// Canonical representative of z^k mod f.
    pub fn reduce_z_power(&self, k: usize) -> SigmaElem {
        if k < self.z_cache.len() {
            return self.z_cache[k].clone();
        }
        let d = self.degree();
        let zd: Vec<CoeffElem> = self.f[..d].iter().map(|c| c.neg()).collect();
        let mut cur = self.z_cache.last().unwrap().clone();
        for _ in self.z_cache.len() - 1..k {
            cur = step_z(self.spec, d, &zd, &cur);
        }
        cur
    }

    pub fn sigma_add(&self, x: &SigmaElem, y: &SigmaElem) -> SigmaElem {
        SigmaElem {
            coeffs: x.coeffs.iter().zip(y.coeffs.iter()).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sigma_sub(&self, x: &SigmaElem, y: &SigmaElem) -> SigmaElem {
        SigmaElem {
            coeffs: x.coeffs.iter().zip(y.coeffs.iter()).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn sigma_scale(&self, x: &SigmaElem, c: &CoeffElem) -> SigmaElem {
        SigmaElem { coeffs: x.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn sigma_mul(&self, x: &SigmaElem, y: &SigmaElem) -> SigmaElem {
        mul_reduced(self.spec, self.degree(), &self.z_cache, x, y)
    }

    pub fn sigma_pow(&self, x: &SigmaElem, e: usize) -> SigmaElem {
        let mut acc = self.sigma_one();
        for _ in 0..e {
            acc = self.sigma_mul(&acc, x);
        }
        acc
    }

    /// The window matrix at a shift: column j holds the window coefficients
    /// of the reduction of z^(j+1+m).
    pub fn window_matrix(&self, m: u32) -> WindowMatrix {
        let r = self.window();
        let mut entries = vec![vec![CoeffElem::zero(self.spec); r]; r];
        for j in 0..r {
            let red = self.reduce_z_power(j + 1 + m as usize);
            debug_assert!(
                red.coeff(0).is_zero(),
                "z^k for k >= 1 must reduce with zero constant term (f(0) = 0)"
            );
            for i in 0..r {
                entries[i][j] = red.coeff(i + 1).clone();
            }
        }
        WindowMatrix { shift: m, entries }
    }
}

/// One reduction step: z * cur, folding the z^d overflow through
/// z^d = zd (the negated tail of monic f).
fn step_z(spec: CoeffRingSpec, d: usize, zd: &[CoeffElem], cur: &SigmaElem) -> SigmaElem {
    let mut next = vec![CoeffElem::zero(spec); d];
    for i in 0..d - 1 {
        next[i + 1] = cur.coeffs[i].clone();
    }
    let overflow = &cur.coeffs[d - 1];
    if !overflow.is_zero() {
        for i in 0..d {
            next[i] = next[i].add(&overflow.mul(&zd[i]));
        }
    }
    SigmaElem { coeffs: next }
}

/// Schoolbook product of two reduced elements, folded back below degree d
/// through the z-power cache.
fn mul_reduced(
    spec: CoeffRingSpec,
    d: usize,
    z_cache: &[SigmaElem],
    x: &SigmaElem,
    y: &SigmaElem,
) -> SigmaElem {
    let mut wide = vec![CoeffElem::zero(spec); 2 * d - 1];
    for (i, a) in x.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.coeffs.iter().enumerate() {
            if !b.is_zero() {
                wide[i + j] = wide[i + j].add(&a.mul(b));
            }
        }
    }
    let mut out = vec![CoeffElem::zero(spec); d];
    out.clone_from_slice(&wide[..d]);
    // Bring z^d .. z^(2d-2) down through the cached reductions.
    for deg in d..2 * d - 1 {
        let c = &wide[deg];
        if c.is_zero() {
            continue;
        }
        let red = &z_cache[deg];
        for i in 0..d {
            out[i] = out[i].add(&c.mul(&red.coeffs[i]));
        }
    }
    SigmaElem { coeffs: out }
}
