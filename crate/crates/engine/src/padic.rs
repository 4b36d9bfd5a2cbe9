//! Truncated p-adic integers with tracked precision, Hensel lifting for the
//! unit-root equation (1+pc)^(p^(k-1)) = 1 + b*p^k, and the Rezk logarithm
//! on units congruent to 1 mod p.

use std::fmt;
use thiserror::Error;

/// Moduli are capped at 2^62 so that a product of two residues fits in u128
/// and `residue * p` never overflows during lifts to higher precision.
const MOD_LIMIT: u128 = 1 << 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is rejected by this operation")]
    EvenPrime,
    #[error("modulus {p}^{n} exceeds the supported range (2^62)")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("residue {0} is not divisible by p")]
    NotDivisibleByP(u128),
    #[error("residue {0} is not a unit")]
    NotAUnit(u128),
    #[error("operand must be congruent to 1 mod p, got residue {0}")]
    NotOneModP(u128),
    #[error("precision {have} too low, need at least {need}")]
    PrecisionTooLow { have: u32, need: u32 },
    #[error("parameter {name} = {value} out of range")]
    BadParameter { name: &'static str, value: u64 },
    #[error("iteration failed to converge")]
    NoConvergence,
}

/// Trial-division primality check; inputs here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn checked_modulus(p: u64, n: u32) -> Result<u128, PadicError> {
    let mut m: u128 = 1;
    for _ in 0..n {
        m = m
            .checked_mul(p as u128)
            .filter(|&m| m <= MOD_LIMIT)
            .ok_or(PadicError::ModulusTooLarge { p, n })?;
    }
    Ok(m)
}

/// p-adic valuation of a residue, or the marker that the residue is zero to
/// the full tracked precision (every known digit is zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Known(u32),
    ZeroToPrecision,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Known(v) => write!(f, "{v}"),
            Valuation::ZeroToPrecision => write!(f, "zero-to-precision"),
        }
    }
}

/// An integer known modulo p^precision. The residue is always canonical,
/// i.e. in [0, p^precision). Sums and products carry the minimum of the two
/// input precisions; exact division by p costs one digit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PAdicInt {
    prime: u64,
    precision: u32,
    residue: u128,
}

impl PAdicInt {
    pub fn new(prime: u64, value: i128, precision: u32) -> Result<Self, PadicError> {
        if !is_prime(prime) {
            return Err(PadicError::NotPrime(prime));
        }
        let m = checked_modulus(prime, precision)?;
        let r = value.rem_euclid(m as i128) as u128;
        Ok(PAdicInt { prime, precision, residue: r })
    }

    /// Internal constructor from an already-canonical residue.
    fn raw(prime: u64, residue: u128, precision: u32) -> Self {
        debug_assert!(residue < checked_modulus(prime, precision).unwrap());
        PAdicInt { prime, precision, residue }
    }

    pub fn zero(prime: u64, precision: u32) -> Result<Self, PadicError> {
        Self::new(prime, 0, precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn modulus(&self) -> u128 {
        checked_modulus(self.prime, self.precision).expect("modulus was validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    /// Forget digits: reduce to a smaller or equal precision.
    pub fn reduce_to(&self, precision: u32) -> Self {
        assert!(precision <= self.precision, "reduce_to cannot raise precision");
        let m = checked_modulus(self.prime, precision).unwrap();
        PAdicInt::raw(self.prime, self.residue % m, precision)
    }

    fn align(self, other: Self) -> (u128, u128, u32, u128) {
        assert_eq!(self.prime, other.prime, "mixed primes");
        let precision = self.precision.min(other.precision);
        let m = checked_modulus(self.prime, precision).unwrap();
        (self.residue % m, other.residue % m, precision, m)
    }

    pub fn add(self, other: Self) -> Self {
        let (a, b, n, m) = self.align(other);
        PAdicInt::raw(self.prime, (a + b) % m, n)
    }

    pub fn sub(self, other: Self) -> Self {
        let (a, b, n, m) = self.align(other);
        PAdicInt::raw(self.prime, (a + m - b) % m, n)
    }

    pub fn mul(self, other: Self) -> Self {
        let (a, b, n, m) = self.align(other);
        PAdicInt::raw(self.prime, a * b % m, n)
    }

    pub fn neg(self) -> Self {
        let m = self.modulus();
        PAdicInt::raw(self.prime, (m - self.residue) % m, self.precision)
    }

    /// Repeated squaring at this value's own precision.
    pub fn pow_mod(self, mut e: u128) -> Self {
        let m = self.modulus();
        let mut base = self.residue;
        let mut acc: u128 = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        PAdicInt::raw(self.prime, acc, self.precision)
    }

    /// Multiplicative inverse; exists iff the residue is a unit (not
    /// divisible by p).
    pub fn inverse(self) -> Result<Self, PadicError> {
        let m = self.modulus();
        match mod_inverse(self.residue, m) {
            Some(inv) => Ok(PAdicInt::raw(self.prime, inv, self.precision)),
            None => Err(PadicError::NotAUnit(self.residue)),
        }
    }

    /// Exact division by p: requires residue divisible by p and drops the
    /// precision by exactly one digit.
    pub fn div_exact_p(self) -> Result<Self, PadicError> {
        if self.precision == 0 {
            return Err(PadicError::PrecisionTooLow { have: 0, need: 1 });
        }
        if self.residue % self.prime as u128 != 0 {
            return Err(PadicError::NotDivisibleByP(self.residue));
        }
        Ok(PAdicInt::raw(self.prime, self.residue / self.prime as u128, self.precision - 1))
    }

    /// Largest v <= precision with p^v dividing the residue; the marker when
    /// the residue is zero to the full precision.
    pub fn val(&self) -> Valuation {
        if self.residue == 0 {
            return Valuation::ZeroToPrecision;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r % self.prime as u128 == 0 {
            r /= self.prime as u128;
            v += 1;
        }
        Valuation::Known(v)
    }
}

impl fmt::Display for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.prime, self.precision)
    }
}

impl std::ops::Add for PAdicInt {
    type Output = PAdicInt;
    fn add(self, rhs: PAdicInt) -> PAdicInt {
        PAdicInt::add(self, rhs)
    }
}

impl std::ops::Sub for PAdicInt {
    type Output = PAdicInt;
    fn sub(self, rhs: PAdicInt) -> PAdicInt {
        PAdicInt::sub(self, rhs)
    }
}

impl std::ops::Mul for PAdicInt {
    type Output = PAdicInt;
    fn mul(self, rhs: PAdicInt) -> PAdicInt {
        PAdicInt::mul(self, rhs)
    }
}

fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    // Extended Euclid on i128; m <= 2^62 so everything fits.
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

/// Floor of log base p of k; k >= 1.
fn ilog_p(p: u64, k: u64) -> u32 {
    debug_assert!(k >= 1);
    let mut v = 0;
    let mut acc = p;
    while acc <= k {
        v += 1;
        acc = acc.saturating_mul(p);
    }
    v
}

/// p-adic valuation of an ordinary nonzero integer.
fn int_val_p(p: u64, mut k: u64) -> u32 {
    debug_assert!(k >= 1);
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

/// theta(x) = (x - x^p) / p. Always exact by Fermat's little theorem; the
/// result carries one digit less precision. Panics on precision-0 input.
pub fn theta(x: PAdicInt) -> PAdicInt {
    assert!(x.precision() >= 1, "theta needs at least one digit of precision");
    let xp = x.pow_mod(x.prime() as u128);
    (x - xp).div_exact_p().expect("x - x^p is divisible by p")
}

/// Solve (1+pc)^(p^(k-1)) = 1 + b*p^k mod p^n for c; p odd, b a unit,
/// k >= 1, n > k. The solution is unique mod p^(n-k) and is returned at that
/// precision.
///
/// Fixed-point form: F(c) = ((1+pc)^(p^(k-1)) - 1 - b*p^k) / p^k is exact
/// for every c (each binomial term of the expansion has valuation >= k) and
/// F(c) = c - b + p*(...), so c <- c - F(c) contracts by a factor of p.
pub fn hensel_unit_root(p: u64, k: u32, b: PAdicInt, n: u32) -> Result<PAdicInt, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if p == 2 {
        return Err(PadicError::EvenPrime);
    }
    if k < 1 {
        return Err(PadicError::BadParameter { name: "k", value: k as u64 });
    }
    if n <= k {
        return Err(PadicError::PrecisionTooLow { have: n, need: k + 1 });
    }
    assert_eq!(b.prime(), p, "mixed primes");
    if b.residue() % p as u128 == 0 {
        return Err(PadicError::NotAUnit(b.residue()));
    }
    let out_prec = n - k;
    if b.precision() < out_prec {
        return Err(PadicError::PrecisionTooLow { have: b.precision(), need: out_prec });
    }
    checked_modulus(p, n)?;
    let exponent = checked_modulus(p, k - 1)?; // p^(k-1) as a plain integer
    let pk = checked_modulus(p, k)?;
    let b_low = b.reduce_to(out_prec);
    let rhs = PAdicInt::new(p, (1 + b_low.residue() * pk) as i128, n)?;

    let mut c = b_low;
    for _ in 0..=out_prec + 2 {
        // Lift c canonically and evaluate at full precision n.
        let one_pc = PAdicInt::new(p, (1 + p as u128 * c.residue()) as i128, n)?;
        let mut diff = one_pc.pow_mod(exponent) - rhs;
        for _ in 0..k {
            diff = diff.div_exact_p()?;
        }
        // diff now has precision n-k = out_prec.
        let next = c - diff;
        if next == c {
            if !verify_unit_root(p, k, b, c, n) {
                return Err(PadicError::NoConvergence);
            }
            return Ok(c);
        }
        c = next;
    }
    Err(PadicError::NoConvergence)
}

/// Check (1+pc)^(p^(k-1)) = 1 + b*p^k mod p^n by repeated squaring, lifting
/// c's canonical residue. Any lift gives the same left side mod p^n when c
/// carries precision >= n-k.
pub fn verify_unit_root(p: u64, k: u32, b: PAdicInt, c: PAdicInt, n: u32) -> bool {
    if k < 1 || n <= k {
        return false;
    }
    let exponent = match checked_modulus(p, k - 1) {
        Ok(e) => e,
        Err(_) => return false,
    };
    let pk = match checked_modulus(p, k) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let lhs = match PAdicInt::new(p, (1 + p as u128 * c.residue()) as i128, n) {
        Ok(v) => v.pow_mod(exponent),
        Err(_) => return false,
    };
    let pnk = match checked_modulus(p, n - k) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let rhs = match PAdicInt::new(p, (1 + b.residue() % pnk * pk) as i128, n) {
        Ok(v) => v,
        Err(_) => return false,
    };
    lhs == rhs
}

/// Shared series driver state: stop once the per-term valuation lower bound
/// has exceeded the target precision for p consecutive terms.
struct StopRule {
    p: u64,
    streak: u64,
}

impl StopRule {
    fn new(p: u64) -> Self {
        StopRule { p, streak: 0 }
    }

    /// Feed one term's bound; returns true when it is time to stop.
    fn exceeded(&mut self, bound_exceeds: bool) -> bool {
        if bound_exceeds {
            self.streak += 1;
            self.streak >= self.p
        } else {
            self.streak = 0;
            false
        }
    }
}

/// The series logarithm log(x) = sum_{k>=1} (-1)^k (p^(k-1)/k) (theta(x)/x^p)^k
/// for p odd and x = 1 mod p, evaluated at the formula's face value. The
/// result has precision N-1 (inherited from theta). No term divides by p:
/// p^(k-1)/k = p^(k-1-v_p(k)) / (k/p^(v_p(k))) with k-1 >= v_p(k).
pub fn rezk_log(x: PAdicInt) -> Result<PAdicInt, PadicError> {
    let p = x.prime();
    if p == 2 {
        return Err(PadicError::EvenPrime);
    }
    if x.precision() < 2 {
        return Err(PadicError::PrecisionTooLow { have: x.precision(), need: 2 });
    }
    if x.residue() % p as u128 != 1 {
        return Err(PadicError::NotOneModP(x.residue()));
    }
    let t = theta(x);
    let xp_inv = x.pow_mod(p as u128).inverse()?;
    let y = t * xp_inv; // theta(x)/x^p at precision N-1
    let wp = y.precision();
    let mut sum = PAdicInt::zero(p, wp)?;
    let v_y = match y.val() {
        Valuation::ZeroToPrecision => return Ok(sum),
        Valuation::Known(v) => v as u64,
    };

    let mut yk = PAdicInt::new(p, 1, wp)?;
    let mut stop = StopRule::new(p);
    let cap = 16 * (wp as u64 + 2) + 64;
    for k in 1..=cap {
        yk = yk * y;
        // Lower bound on the term's valuation: k*(v_y+1) - 1 - floor(log_p k).
        let bound = k * (v_y + 1) - 1 - ilog_p(p, k) as u64;
        if stop.exceeded(bound > wp as u64) {
            return Ok(sum);
        }
        if bound > wp as u64 {
            continue;
        }
        let e = int_val_p(p, k);
        let power = k - 1 - e as u64; // exponent of the surviving p factor
        let p_part = if power >= wp as u64 {
            PAdicInt::zero(p, wp)?
        } else {
            PAdicInt::new(p, 1, wp)?.mul(PAdicInt::raw(p, checked_modulus(p, power as u32)?, wp))
        };
        let k_unit = PAdicInt::new(p, (k / checked_modulus(p, e)? as u64) as i128, wp)?;
        let term = yk * p_part * k_unit.inverse()?;
        if k % 2 == 0 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    Err(PadicError::NoConvergence)
}

/// Classical p-adic logarithm log(x) = sum_{k>=1} (-1)^(k+1) (x-1)^k / k for
/// x = 1 mod p, p odd. Terms with v_p(k) = e cost e digits of tracked
/// precision, so the result's precision is N - floor(log_p k_max); used as an
/// independent oracle for `rezk_log` via p*rezk_log(x) = (p-1)*classical_log(x).
pub fn classical_log(x: PAdicInt) -> Result<PAdicInt, PadicError> {
    let p = x.prime();
    if p == 2 {
        return Err(PadicError::EvenPrime);
    }
    if x.residue() % p as u128 != 1 {
        return Err(PadicError::NotOneModP(x.residue()));
    }
    let n = x.precision();
    let one = PAdicInt::new(p, 1, n)?;
    let w = x - one;
    let v_w = match w.val() {
        Valuation::ZeroToPrecision => return PAdicInt::zero(p, n),
        Valuation::Known(v) => v as u64,
    };
    let mut sum = PAdicInt::zero(p, n)?;
    let mut wk = one;
    let mut stop = StopRule::new(p);
    let cap = 16 * (n as u64 + 2) + 64;
    for k in 1..=cap {
        wk = wk * w;
        let bound = k * v_w - ilog_p(p, k) as u64;
        if stop.exceeded(bound > n as u64) {
            return Ok(sum);
        }
        if bound > n as u64 {
            continue;
        }
        let e = int_val_p(p, k);
        let mut term = wk;
        for _ in 0..e {
            term = term.div_exact_p()?;
        }
        let k_unit = PAdicInt::new(p, (k / checked_modulus(p, e)? as u64) as i128, term.precision())?;
        term = term * k_unit.inverse()?;
        if k % 2 == 1 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    Err(PadicError::NoConvergence)
}

/// Compare two values at their common (minimum) precision.
pub fn eq_at_common_precision(a: PAdicInt, b: PAdicInt) -> bool {
    let n = a.precision().min(b.precision());
    a.reduce_to(n) == b.reduce_to(n)
}
