//! The finite-support distribution monad over exact rationals.
//!
//! A [`Dist`] stores only strictly positive weights and always sums to one,
//! so two distributions are mathematically equal exactly when they are
//! structurally equal. The monad structure is [`eta`], [`dmap`] and [`join`];
//! [`ell`] is the double strength forming independent joints.
//!
//! Payoff carriers are convex algebras: a carrier with an expectation
//! operator (see [`ConvexAlgebra`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Exact rational number.
pub type Q = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Lossy conversion used only by float-tolerant oracles.
pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("distribution has no entries")]
    Empty,
    #[error("negative weight {weight} on `{element}`")]
    NegativeWeight { element: String, weight: String },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("probability {0} outside [0, 1]")]
    OutOfRange(String),
}

/// A probability in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Prob(Q);

impl Prob {
    pub fn new(value: Q) -> Result<Prob, DistError> {
        if value.is_negative() || value > Q::one() {
            return Err(DistError::OutOfRange(fmt_q(&value)));
        }
        Ok(Prob(value))
    }

    pub fn value(&self) -> &Q {
        &self.0
    }

    pub fn into_inner(self) -> Q {
        self.0
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.0))
    }
}

/// A finite-support probability distribution with exact weights.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist<A: Ord> {
    weights: BTreeMap<A, Q>,
}

impl<A: Ord + Clone + fmt::Debug> Dist<A> {
    /// Builds a distribution, dropping zero weights and merging duplicates.
    pub fn new<I>(entries: I) -> Result<Dist<A>, DistError>
    where
        I: IntoIterator<Item = (A, Q)>,
    {
        let mut weights: BTreeMap<A, Q> = BTreeMap::new();
        let mut any = false;
        for (a, w) in entries {
            any = true;
            if w.is_negative() {
                return Err(DistError::NegativeWeight {
                    element: format!("{a:?}"),
                    weight: fmt_q(&w),
                });
            }
            *weights.entry(a).or_insert_with(Q::zero) += w;
        }
        if !any {
            return Err(DistError::Empty);
        }
        weights.retain(|_, w| !w.is_zero());
        let sum: Q = weights.values().sum();
        if !sum.is_one() {
            return Err(DistError::NotNormalized { sum: fmt_q(&sum) });
        }
        Ok(Dist { weights })
    }
}

impl<A: Ord + Clone> Dist<A> {
    /// Internal constructor for weights already known to be normalized; still
    /// merges and drops zeros.
    fn from_normalized<I: IntoIterator<Item = (A, Q)>>(entries: I) -> Dist<A> {
        let mut weights: BTreeMap<A, Q> = BTreeMap::new();
        for (a, w) in entries {
            if w.is_zero() {
                continue;
            }
            *weights.entry(a).or_insert_with(Q::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        debug_assert!(weights.values().sum::<Q>().is_one());
        Dist { weights }
    }

    /// Point mass at `a`.
    pub fn point(a: A) -> Dist<A> {
        let mut weights = BTreeMap::new();
        weights.insert(a, Q::one());
        Dist { weights }
    }

    /// Uniform distribution over the distinct elements given. Panics on an
    /// empty input.
    pub fn uniform<I: IntoIterator<Item = A>>(items: I) -> Dist<A> {
        let mut keys: Vec<A> = items.into_iter().collect();
        keys.sort();
        keys.dedup();
        assert!(!keys.is_empty(), "uniform distribution over an empty set");
        let w = Q::new(BigInt::one(), BigInt::from(keys.len()));
        Dist {
            weights: keys.into_iter().map(|k| (k, w.clone())).collect(),
        }
    }

    /// Weight of `a`; zero outside the support.
    pub fn weight(&self, a: &A) -> Q {
        self.weights.get(a).cloned().unwrap_or_else(Q::zero)
    }

    pub fn prob(&self, a: &A) -> Prob {
        Prob(self.weight(a))
    }

    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.weights.keys()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &Q)> {
        self.weights.iter()
    }

    pub fn contains(&self, a: &A) -> bool {
        self.weights.contains_key(a)
    }

    /// The element of a point mass.
    pub fn as_point(&self) -> Option<&A> {
        if self.weights.len() == 1 {
            self.weights.keys().next()
        } else {
            None
        }
    }

    /// Stored weights are positive and sum to exactly one.
    pub fn audit(&self) -> bool {
        !self.weights.is_empty()
            && self.weights.values().all(|w| w.is_positive())
            && self.weights.values().sum::<Q>().is_one()
    }

    pub fn map<B: Ord + Clone, F: Fn(&A) -> B>(&self, f: F) -> Dist<B> {
        Dist::from_normalized(self.weights.iter().map(|(a, w)| (f(a), w.clone())))
    }

    /// Kleisli extension: `join(map(k, self))`.
    pub fn bind<B: Ord + Clone, F: Fn(&A) -> Dist<B>>(&self, k: F) -> Dist<B> {
        let mut out = Vec::new();
        for (a, w) in &self.weights {
            for (b, v) in k(a).weights {
                out.push((b, w * v));
            }
        }
        Dist::from_normalized(out)
    }

    /// Independent joint with `other`, combining elements with `f`.
    pub fn product_with<B, C, F>(&self, other: &Dist<B>, f: F) -> Dist<C>
    where
        B: Ord + Clone,
        C: Ord + Clone,
        F: Fn(&A, &B) -> C,
    {
        let mut out = Vec::with_capacity(self.weights.len() * other.weights.len());
        for (a, w) in &self.weights {
            for (b, v) in &other.weights {
                out.push((f(a, b), w * v));
            }
        }
        Dist::from_normalized(out)
    }

    /// Convex combination `Σ wᵢ dᵢ` of distributions; the weights must sum to one.
    pub fn mixture<I>(parts: I) -> Dist<A>
    where
        I: IntoIterator<Item = (Q, Dist<A>)>,
    {
        let mut out = Vec::new();
        for (w, d) in parts {
            for (a, v) in d.weights {
                out.push((a, &w * v));
            }
        }
        Dist::from_normalized(out)
    }
}

impl<A: Ord + Clone + fmt::Display> fmt::Display for Dist<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}: {}", fmt_q(w))?;
        }
        write!(f, "}}")
    }
}

impl<A: Ord + Clone + fmt::Debug> fmt::Debug for Dist<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a:?}: {}", fmt_q(w))?;
        }
        write!(f, "}}")
    }
}

impl<A: Ord + Clone + fmt::Display> Serialize for Dist<A> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Distribution constructor; see [`Dist::new`].
pub fn dist_new<A: Ord + Clone + fmt::Debug>(entries: Vec<(A, Q)>) -> Result<Dist<A>, DistError> {
    Dist::new(entries)
}

/// Unit of the monad: the point mass.
pub fn eta<A: Ord + Clone>(a: A) -> Dist<A> {
    Dist::point(a)
}

/// Functor action: pushforward along `f`.
pub fn dmap<A: Ord + Clone, B: Ord + Clone>(f: impl Fn(&A) -> B, d: &Dist<A>) -> Dist<B> {
    d.map(f)
}

/// Multiplication of the monad: flatten a distribution of distributions.
pub fn join<A: Ord + Clone>(dd: &Dist<Dist<A>>) -> Dist<A> {
    dd.bind(|d| d.clone())
}

/// Kleisli extension of `k` applied to `d`.
pub fn kleisli<A: Ord + Clone, B: Ord + Clone>(k: impl Fn(&A) -> Dist<B>, d: &Dist<A>) -> Dist<B> {
    d.bind(k)
}

/// Double strength: the independent joint distribution.
pub fn ell<A: Ord + Clone, B: Ord + Clone>(da: &Dist<A>, db: &Dist<B>) -> Dist<(A, B)> {
    da.product_with(db, |a, b| (a.clone(), b.clone()))
}

pub fn marginals<A: Ord + Clone, B: Ord + Clone>(d: &Dist<(A, B)>) -> (Dist<A>, Dist<B>) {
    (d.map(|p| p.0.clone()), d.map(|p| p.1.clone()))
}

/// Whether a joint distribution is the independent product of its marginals.
pub fn is_independent<A: Ord + Clone, B: Ord + Clone>(d: &Dist<(A, B)>) -> bool {
    let (a, b) = marginals(d);
    ell(&a, &b) == *d
}

/// Fixed-length vector of exact rationals; the payoff carrier `Qⁿ`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalVec(Vec<Q>);

impl RationalVec {
    pub fn new(components: Vec<Q>) -> RationalVec {
        RationalVec(components)
    }

    pub fn zeros(dim: usize) -> RationalVec {
        RationalVec(vec![Q::zero(); dim])
    }

    pub fn from_ints(xs: &[i64]) -> RationalVec {
        RationalVec(xs.iter().map(|&x| qi(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Q] {
        &self.0
    }

    pub fn into_components(self) -> Vec<Q> {
        self.0
    }

    /// Concatenation: the carrier of a product algebra.
    pub fn concat(&self, other: &RationalVec) -> RationalVec {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        RationalVec(v)
    }

    /// Splits into the first `at` coordinates and the rest.
    pub fn split(&self, at: usize) -> (RationalVec, RationalVec) {
        (RationalVec(self.0[..at].to_vec()), RationalVec(self.0[at..].to_vec()))
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> RationalVec {
        RationalVec(self.0[range].to_vec())
    }

    pub fn scale(&self, w: &Q) -> RationalVec {
        RationalVec(self.0.iter().map(|x| x * w).collect())
    }

    /// Coordinate `i` of the result is coordinate `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> RationalVec {
        RationalVec(perm.iter().map(|&i| self.0[i].clone()).collect())
    }
}

impl Index<usize> for RationalVec {
    type Output = Q;
    fn index(&self, i: usize) -> &Q {
        &self.0[i]
    }
}

impl Add for &RationalVec {
    type Output = RationalVec;
    fn add(self, rhs: &RationalVec) -> RationalVec {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        RationalVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVec {
    type Output = RationalVec;
    fn sub(self, rhs: &RationalVec) -> RationalVec {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        RationalVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVec {
    type Output = RationalVec;
    fn neg(self) -> RationalVec {
        RationalVec(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&Q> for &RationalVec {
    type Output = RationalVec;
    fn mul(self, w: &Q) -> RationalVec {
        self.scale(w)
    }
}

impl fmt::Display for RationalVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_q).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for RationalVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An algebra of the distribution monad: a carrier with an expectation.
///
/// Laws: `expect(eta(r)) = r` and `expect(join(dd)) = expect(dmap(expect, dd))`.
pub trait ConvexAlgebra {
    type Carrier: Ord + Clone;
    fn expect(&self, d: &Dist<Self::Carrier>) -> Self::Carrier;
}

/// The rationals with the usual weighted mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl ConvexAlgebra for Rationals {
    type Carrier = Q;
    fn expect(&self, d: &Dist<Q>) -> Q {
        d.iter().map(|(x, w)| x * w).sum()
    }
}

/// `Qⁿ` with componentwise expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VecAlgebra {
    pub dim: usize,
}

impl VecAlgebra {
    pub fn new(dim: usize) -> VecAlgebra {
        VecAlgebra { dim }
    }

    /// The product algebra, carried by concatenation.
    pub fn product(self, other: VecAlgebra) -> VecAlgebra {
        VecAlgebra { dim: self.dim + other.dim }
    }
}

impl ConvexAlgebra for VecAlgebra {
    type Carrier = RationalVec;
    fn expect(&self, d: &Dist<RationalVec>) -> RationalVec {
        let mut acc = vec![Q::zero(); self.dim];
        for (v, w) in d.iter() {
            assert_eq!(v.dim(), self.dim, "vector of dimension {} in Q^{}", v.dim(), self.dim);
            for (a, x) in acc.iter_mut().zip(v.components()) {
                *a += x * w;
            }
        }
        RationalVec(acc)
    }
}

/// The free algebra `D(A)` with `join` as its expectation.
#[derive(Clone, Copy, Debug, Default)]
pub struct FreeAlgebra<A>(std::marker::PhantomData<A>);

impl<A> FreeAlgebra<A> {
    pub fn new() -> FreeAlgebra<A> {
        FreeAlgebra(std::marker::PhantomData)
    }
}

impl<A: Ord + Clone> ConvexAlgebra for FreeAlgebra<A> {
    type Carrier = Dist<A>;
    fn expect(&self, d: &Dist<Dist<A>>) -> Dist<A> {
        join(d)
    }
}

/// Every distribution on `items` whose weights are multiples of `1/n`,
/// in lexicographic order of the numerator vectors.
pub fn simplex_grid<A: Ord + Clone>(items: &[A], n: u32) -> Vec<Dist<A>> {
    let mut out = Vec::new();
    if items.is_empty() || n == 0 {
        return out;
    }
    let mut counts = vec![0u32; items.len()];
    fn rec<A: Ord + Clone>(items: &[A], n: u32, i: usize, left: u32, counts: &mut Vec<u32>, out: &mut Vec<Dist<A>>) {
        if i + 1 == items.len() {
            counts[i] = left;
            let den = i64::from(n);
            out.push(Dist::from_normalized(
                items.iter().zip(counts.iter()).map(|(a, &c)| (a.clone(), q(i64::from(c), den))),
            ));
            return;
        }
        for c in (0..=left).rev() {
            counts[i] = c;
            rec(items, n, i + 1, left - c, counts, out);
        }
    }
    rec(items, n, 0, n, &mut counts, &mut out);
    out
}

/// Number of points [`simplex_grid`] would produce: `C(n + m - 1, m - 1)`.
pub fn simplex_grid_size(m: usize, n: u32) -> u128 {
    if m == 0 {
        return 0;
    }
    let (top, k) = (u128::from(n) + m as u128 - 1, m as u128 - 1);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(top - i) / (i + 1);
    }
    acc
}

pub fn expect<Alg: ConvexAlgebra>(alg: &Alg, d: &Dist<Alg::Carrier>) -> Alg::Carrier {
    alg.expect(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(entries: &[(&'static str, i64, i64)]) -> Dist<&'static str> {
        Dist::new(entries.iter().map(|&(a, n, m)| (a, q(n, m)))).unwrap()
    }

    #[test]
    fn construction_drops_zeros_and_merges() {
        let u = d(&[("H", 1, 2), ("T", 1, 2)]);
        assert_eq!(u, Dist::uniform(["H", "T"]));
        let p = d(&[("H", 1, 1), ("T", 0, 1)]);
        assert_eq!(p, eta("H"));
        assert_eq!(p.support_len(), 1);
        let m = d(&[("H", 1, 3), ("H", 1, 3), ("T", 1, 3)]);
        assert_eq!(m.weight(&"H"), q(2, 3));
        assert_eq!(m.weight(&"T"), q(1, 3));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Dist::new(vec![("H", q(1, 2))]),
            Err(DistError::NotNormalized { .. })
        ));
        assert!(matches!(
            Dist::new(vec![("H", q(3, 2)), ("T", q(-1, 2))]),
            Err(DistError::NegativeWeight { .. })
        ));
        assert_eq!(Dist::<&str>::new(vec![]), Err(DistError::Empty));
        assert!(Prob::new(q(3, 2)).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let u = Dist::uniform(["H", "T"]);
        let swap = |s: &&str| if *s == "H" { "T" } else { "H" };
        assert_eq!(dmap(swap, &u), u);
        assert_eq!(dmap(|_| 7, &u), eta(7));
        let corr = Dist::new(vec![(("H", "H"), q(1, 2)), (("T", "T"), q(1, 2))]).unwrap();
        assert_eq!(dmap(|p: &(&str, &str)| p.0, &corr), u);
        assert_eq!(dmap(|s: &&str| s.len(), &eta("abc")), eta(3));
    }

    #[test]
    fn join_examples() {
        let u = Dist::uniform(["H", "T"]);
        let dd = Dist::uniform([eta("H"), eta("T")]);
        assert_eq!(join(&dd), u);
        assert_eq!(join(&eta(u.clone())), u);
        // (1/2)(1/2) + (1/2)(1) = 3/4 on H, (1/2)(1/2) = 1/4 on T
        let dd = Dist::new(vec![(u.clone(), q(1, 2)), (eta("H"), q(1, 2))]).unwrap();
        assert_eq!(join(&dd), d(&[("H", 3, 4), ("T", 1, 4)]));
    }

    #[test]
    fn kleisli_examples() {
        let u = Dist::uniform(["H", "T"]);
        assert_eq!(kleisli(|a: &&str| eta(*a), &u), u);
        let k = |a: &&'static str| Dist::uniform([*a, if *a == "H" { "T" } else { "H" }]);
        assert_eq!(kleisli(k, &eta("H")), k(&"H"));
        assert_eq!(kleisli(k, &eta("H")), u);
    }

    #[test]
    fn strength_and_marginals() {
        let u = Dist::uniform(["H", "T"]);
        let j = ell(&u, &u);
        assert_eq!(j.support_len(), 4);
        assert!(j.iter().all(|(_, w)| *w == q(1, 4)));
        let db = d(&[("x", 1, 3), ("y", 2, 3)]);
        assert_eq!(ell(&eta("a"), &db), dmap(|b| ("a", *b), &db));
        assert_eq!(marginals(&ell(&u, &db)), (u.clone(), db.clone()));
        assert_eq!(marginals(&eta(("a", "b"))), (eta("a"), eta("b")));
        let corr = Dist::new(vec![(("H", "H"), q(1, 2)), (("T", "T"), q(1, 2))]).unwrap();
        assert_eq!(marginals(&corr), (u.clone(), u.clone()));
    }

    #[test]
    fn independence() {
        let u = Dist::uniform(["H", "T"]);
        assert!(is_independent(&ell(&u, &d(&[("H", 1, 3), ("T", 2, 3)]))));
        assert!(is_independent(&eta(("a", "b"))));
        let corr = Dist::new(vec![(("H", "H"), q(1, 2)), (("T", "T"), q(1, 2))]).unwrap();
        assert!(!is_independent(&corr));
    }

    #[test]
    fn expectation_examples() {
        let r = Dist::new(vec![(qi(-1), q(1, 2)), (qi(1), q(1, 2))]).unwrap();
        assert_eq!(expect(&Rationals, &r), qi(0));
        assert_eq!(expect(&Rationals, &eta(q(5, 7))), q(5, 7));
        let alg = VecAlgebra::new(2);
        let v = Dist::new(vec![
            (RationalVec::from_ints(&[5, 0]), q(1, 2)),
            (RationalVec::from_ints(&[-10, -10]), q(1, 2)),
        ])
        .unwrap();
        // (5 - 10)/2 = -5/2, (0 - 10)/2 = -5
        assert_eq!(expect(&alg, &v), RationalVec::new(vec![q(-5, 2), qi(-5)]));
        let free = FreeAlgebra::<&str>::new();
        let dd = Dist::uniform([eta("H"), eta("T")]);
        assert_eq!(expect(&free, &dd), Dist::uniform(["H", "T"]));
    }

    #[test]
    fn display_is_canonical() {
        let m = d(&[("T", 1, 3), ("H", 2, 3)]);
        assert_eq!(m.to_string(), "{H: 2/3, T: 1/3}");
        assert_eq!(eta("E").to_string(), "{E: 1}");
        assert_eq!(RationalVec::new(vec![q(-5, 2), qi(0)]).to_string(), "(-5/2, 0)");
    }

    #[test]
    fn simplex_grid_counts() {
        let g = simplex_grid(&["a", "b", "c"], 4);
        assert_eq!(g.len(), 15);
        assert_eq!(simplex_grid_size(3, 4), 15);
        assert_eq!(simplex_grid_size(4, 12), 455);
        assert!(g.iter().all(|d| d.audit()));
        assert_eq!(g[0], eta("a"));
        let mut sorted = g.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), g.len());
    }
}
