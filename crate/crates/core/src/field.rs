//! Exact scalar arithmetic.
//!
//! Two fields are supported: a large prime field `Z/pZ` (the default, with
//! `p = 2^61 - 1`) and the rationals. Every [`Scalar`] carries enough of its
//! field to detect mixed-field operands; the operator impls panic on those,
//! the `try_*` methods return [`Error::MixedField`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Smallest admissible modulus (exclusive).
pub const MIN_PRIME: u64 = 1 << 60;

/// Rational-mode samples are uniform integers in `[-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND]`.
pub const RATIONAL_SAMPLE_BOUND: i64 = 1 << 16;

/// Name of the random generator recorded in every report.
pub const GENERATOR: &str = "chacha20";

/// The working field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Prime(u64),
    Rational,
}

impl Field {
    /// A prime field, validated: `p` must be prime and exceed 2^60.
    pub fn prime(p: u64) -> Result<Self> {
        if p <= MIN_PRIME {
            return Err(Error::InvalidField(format!(
                "modulus {p} must exceed 2^60 = {MIN_PRIME}"
            )));
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("modulus {p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn mersenne61() -> Self {
        Field::Prime(MERSENNE_61)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            Field::Prime(p) => {
                let r = (v as i128).rem_euclid(p as i128) as u64;
                Scalar::Mod(ModP {
                    value: r,
                    modulus: p,
                })
            }
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match *self {
            Field::Prime(p) => Scalar::Mod(ModP {
                value: v % p,
                modulus: p,
            }),
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// `num / den` in this field.
    pub fn fraction(&self, num: i64, den: i64) -> Result<Scalar> {
        self.from_i64(num).try_div(&self.from_i64(den))
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Field::Prime(p) => Some(p),
            Field::Rational => None,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Field::Prime(_) => Mode::PrimeField,
            Field::Rational => Mode::Rational,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "GF({p})"),
            Field::Rational => write!(f, "QQ"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PrimeField,
    Rational,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::PrimeField => "prime-field",
            Mode::Rational => "rational",
        })
    }
}

/// Field plus reproducibility seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldConfig {
    pub field: Field,
    pub seed: u64,
}

impl FieldConfig {
    pub fn new(mode: Mode, prime: u64, seed: u64) -> Result<Self> {
        let field = match mode {
            Mode::PrimeField => Field::prime(prime)?,
            Mode::Rational => Field::Rational,
        };
        Ok(FieldConfig { field, seed })
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self.field, self.seed)
    }
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            field: Field::mersenne61(),
            seed: 0,
        }
    }
}

/// An element of `Z/pZ`, canonical representative in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModP {
    value: u64,
    modulus: u64,
}

impl ModP {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    fn add(self, rhs: Self) -> Self {
        let p = self.modulus;
        let (s, carry) = self.value.overflowing_add(rhs.value);
        let value = if carry || s >= p {
            s.wrapping_sub(p)
        } else {
            s
        };
        ModP { value, modulus: p }
    }

    #[inline]
    fn neg(self) -> Self {
        let value = if self.value == 0 {
            0
        } else {
            self.modulus - self.value
        };
        ModP {
            value,
            modulus: self.modulus,
        }
    }

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let p = self.modulus;
        let prod = self.value as u128 * rhs.value as u128;
        let value = if p == MERSENNE_61 {
            // 2^61 = 1 mod p
            let lo = (prod as u64) & MERSENNE_61;
            let hi = (prod >> 61) as u64;
            let s = lo + hi;
            if s >= MERSENNE_61 {
                s - MERSENNE_61
            } else {
                s
            }
        } else {
            (prod % p as u128) as u64
        };
        ModP { value, modulus: p }
    }

    fn inv(self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.modulus as i128, self.value as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        let value = s0.rem_euclid(self.modulus as i128) as u64;
        Some(ModP {
            value,
            modulus: self.modulus,
        })
    }
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod(ModP),
    Rat(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Mod(m) => Field::Prime(m.modulus),
            Scalar::Rat(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod(m) => m.value == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod(m) => m.value == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn zero_like(&self) -> Scalar {
        self.field().zero()
    }

    pub fn one_like(&self) -> Scalar {
        self.field().one()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Mod(_) => None,
        }
    }

    fn mixed(&self, other: &Scalar) -> Error {
        Error::MixedField(self.field().to_string(), other.field().to_string())
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Mod(a), Scalar::Mod(b)) if a.modulus == b.modulus => {
                Ok(Scalar::Mod(a.add(*b)))
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            _ => Err(self.mixed(rhs)),
        }
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Mod(a), Scalar::Mod(b)) if a.modulus == b.modulus => {
                Ok(Scalar::Mod(a.add(b.neg())))
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a - b)),
            _ => Err(self.mixed(rhs)),
        }
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Mod(a), Scalar::Mod(b)) if a.modulus == b.modulus => {
                Ok(Scalar::Mod(a.mul(*b)))
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            _ => Err(self.mixed(rhs)),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Mod(m) => m.inv().map(Scalar::Mod).ok_or(Error::DivisionByZero),
            Scalar::Rat(r) if r.is_zero() => Err(Error::DivisionByZero),
            Scalar::Rat(r) => Ok(Scalar::Rat(r.recip())),
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.try_mul(&rhs.inv()?)
    }

    pub fn pow(&self, mut exp: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod(m) => write!(f, "{}", m.value),
            Scalar::Rat(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs).expect("mixed-field arithmetic")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$try(&rhs).expect("mixed-field arithmetic")
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$try(rhs).expect("mixed-field arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod(m) => Scalar::Mod(m.neg()),
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Seeded source of random field elements.
///
/// Prime-field draws are uniform on `[0, p)`; rational draws are uniform
/// integers in `[-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND]`.
#[derive(Clone, Debug)]
pub struct Sampler {
    field: Field,
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(field: Field, seed: u64) -> Self {
        Sampler {
            field,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn random_scalar(&mut self) -> Scalar {
        match self.field {
            Field::Prime(p) => Scalar::Mod(ModP {
                value: self.rng.gen_range(0..p),
                modulus: p,
            }),
            Field::Rational => {
                let v = self
                    .rng
                    .gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND);
                Scalar::Rat(BigRational::from_integer(BigInt::from(v)))
            }
        }
    }

    pub fn random_vector(&mut self, len: usize) -> Vec<Scalar> {
        (0..len).map(|_| self.random_scalar()).collect()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.gen()
    }

    /// A child sampler whose stream depends only on this sampler's next draw.
    pub fn fork(&mut self) -> Sampler {
        let seed = self.next_u64();
        Sampler::new(self.field, seed)
    }
}

/// Per-task seed: first 8 bytes of `SHA-256(master_le || label)`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Clears denominators of a rational row, returning integer entries.
pub(crate) fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, r| {
        num_integer::Integer::lcm(&acc, r.denom())
    });
    row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
}
