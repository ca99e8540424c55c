//! Scalar abstractions.
//!
//! Everything that only needs field arithmetic (the cluster-hit distribution,
//! full-mesh convergence times) is generic over [`Field`], so it can be
//! evaluated exactly over rationals. Anything that needs `ln`, `powi` or
//! sampling is generic over [`Real`] (`f32` / `f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use rand::distributions::{Distribution, Open01};
use rand::Rng;

/// Network size above which float products of survival terms switch to
/// log-space accumulation.
pub const LOG_SPACE_THRESHOLD: usize = 10_000;

pub trait Field: Clone + Debug + PartialOrd + Num + FromPrimitive + Send + Sync {
    /// Lossless conversion of a node count.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("node count representable in scalar type")
    }

    /// `prod_{j=0}^{x-1} (1 - k / (n - j))`, the probability that none of the
    /// first `x` informed nodes belongs to the cluster.
    fn survival_product(n: usize, k: usize, x: usize) -> Self {
        let kk = Self::count(k);
        (0..x).fold(Self::one(), |acc, j| {
            acc * (Self::one() - kk.clone() / Self::count(n - j))
        })
    }

    /// `survival_product(n, k, x)` for every `x` in `0..len`, evaluated
    /// incrementally with the same operation order as the single-value form.
    fn survival_products(n: usize, k: usize, len: usize) -> Vec<Self> {
        let kk = Self::count(k);
        let mut out = Vec::with_capacity(len);
        let mut acc = Self::one();
        for j in 0..len {
            out.push(acc.clone());
            if j + 1 < len {
                acc = acc * (Self::one() - kk.clone() / Self::count(n - j));
            }
        }
        out
    }

    /// Sums a sequence of terms in order. Float types override this with
    /// compensated summation.
    fn accumulate<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    fn to_f64_lossy(&self) -> f64;
}

/// Floating-point scalar used by the approximate models and the simulator.
pub trait Real: Field + Float + Display + Default + Sum + Copy + 'static {
    /// Uniform draw on the open interval (0, 1).
    fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("finite f64 converts")
    }
}

/// Survival products for floats: direct multiplication for moderate `n`,
/// compensated log-space accumulation above [`LOG_SPACE_THRESHOLD`].
fn float_survival<F: Float + FromPrimitive>(n: usize, k: usize, len: usize) -> Vec<F> {
    let kk = F::from_usize(k).unwrap();
    let term = |j: usize| F::one() - kk / F::from_usize(n - j).unwrap();
    let mut out = Vec::with_capacity(len);
    if n > LOG_SPACE_THRESHOLD {
        let mut acc = Neumaier::<F>::new();
        for j in 0..len {
            out.push(acc.value().exp());
            acc.add((-(kk / F::from_usize(n - j).unwrap())).ln_1p());
        }
    } else {
        let mut acc = F::one();
        for j in 0..len {
            out.push(acc);
            acc = acc * term(j);
        }
    }
    out
}

struct Neumaier<F> {
    sum: F,
    comp: F,
}

impl<F: Float> Neumaier<F> {
    fn new() -> Self {
        Self {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    fn add(&mut self, t: F) {
        let s = self.sum + t;
        if self.sum.abs() >= t.abs() {
            self.comp = self.comp + ((self.sum - s) + t);
        } else {
            self.comp = self.comp + ((t - s) + self.sum);
        }
        self.sum = s;
    }

    fn value(&self) -> F {
        self.sum + self.comp
    }
}

fn neumaier<F: Float, I: IntoIterator<Item = F>>(terms: I) -> F {
    let mut acc = Neumaier::<F>::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Field for $t {
            fn survival_product(n: usize, k: usize, x: usize) -> Self {
                float_survival(n, k, x + 1)[x]
            }

            fn survival_products(n: usize, k: usize, len: usize) -> Vec<Self> {
                float_survival(n, k, len)
            }

            fn accumulate<I: IntoIterator<Item = Self>>(terms: I) -> Self {
                neumaier(terms)
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }

        impl Real for $t {
            fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Field for Ratio<i64> {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Field for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
}

/// Exact rational from a numerator/denominator pair.
pub fn exact(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
