//! The set of ordering laws reachable from product measures: membership for three
//! variables, the cycle-count upper bound on its dimension, the Lie shuffle basis,
//! even/odd independence constraints and draw-matrix lower bounds.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{integer_rank, rank_mod_p};
use crate::rational::{factorial, to_f64, Rational};
use crate::word_maps::{draw_matrix, ordering_rank, orderings, OrderDistribution};

/// Whether `(P(X1<X2), P(X2<X3), P(X3<X1))` is attainable by independent variables.
pub fn trybula_contains(x: &Rational, y: &Rational, z: &Rational) -> Result<bool> {
    let one = Rational::one();
    for v in [x, y, z] {
        if v.is_negative() || *v > one {
            return Err(Error::input(format!("coordinate {v} outside [0, 1]")));
        }
    }
    let ok = |x: &Rational, y: &Rational, z: &Rational| {
        let a = x + y * z;
        let b = y + x * z;
        let c = z + x * y;
        a.min(b).min(c) <= one
    };
    let (xb, yb, zb) = (&one - x, &one - y, &one - z);
    Ok(ok(x, y, z) && ok(&xb, &yb, &zb))
}

/// Permutations of `m` points with exactly one nontrivial cycle.
pub fn pure_cycle_count(m: usize) -> BigUint {
    let mf = factorial(m as u64);
    (2..=m)
        .map(|k| &mf / (factorial((m - k) as u64) * BigUint::from(k)))
        .sum()
}

/// Formal combination of orderings; symbols are `0`-based.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OrderingVector {
    pub terms: BTreeMap<Vec<usize>, Rational>,
}

impl OrderingVector {
    pub fn zero() -> Self {
        OrderingVector::default()
    }

    pub fn basis(u: Vec<usize>) -> Self {
        OrderingVector {
            terms: BTreeMap::from([(u, Rational::one())]),
        }
    }

    fn insert(&mut self, u: Vec<usize>, c: Rational) {
        let e = self.terms.entry(u).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.insert(u.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return OrderingVector::zero();
        }
        OrderingVector {
            terms: self.terms.iter().map(|(u, c)| (u.clone(), c * s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn symbols(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.terms.keys().next().cloned().unwrap_or_default();
        s.sort_unstable();
        s
    }

    fn check_disjoint(&self, other: &Self) -> Result<()> {
        let a = self.symbols();
        if other.symbols().iter().any(|x| a.binary_search(x).is_ok()) {
            return Err(Error::input("orderings share a symbol"));
        }
        Ok(())
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        self.check_disjoint(other)?;
        let mut out = OrderingVector::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.insert(w, a * b);
            }
        }
        Ok(out)
    }

    /// `[u, v] = uv − vu`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Ok(self.concat(other)?.sub(&other.concat(self)?))
    }

    /// Sum of all interleavings, extended bilinearly.
    pub fn shuffle(&self, other: &Self) -> Result<Self> {
        self.check_disjoint(other)?;
        fn interleave(u: &[usize], v: &[usize], acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if u.is_empty() || v.is_empty() {
                let mut w = acc.clone();
                w.extend_from_slice(u);
                w.extend_from_slice(v);
                out.push(w);
                return;
            }
            for (first, rest, other) in [(u[0], &u[1..], v), (v[0], u, &v[1..])] {
                acc.push(first);
                interleave(rest, other, acc, out);
                acc.pop();
            }
        }
        let mut out = OrderingVector::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut words = Vec::new();
                interleave(u, v, &mut Vec::new(), &mut words);
                for w in words {
                    out.insert(w, a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn positive_terms(&self) -> usize {
        self.terms.values().filter(|c| c.is_positive()).count()
    }

    pub fn negative_terms(&self) -> usize {
        self.terms.values().filter(|c| c.is_negative()).count()
    }

    /// Coordinates over all orderings of `0..m` in lexicographic order.
    pub fn dense(&self, m: usize) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); (1..=m).product()];
        for (u, c) in &self.terms {
            if u.len() != m {
                return Err(Error::input("ordering vector does not cover all symbols"));
            }
            v[ordering_rank(u)] = c.clone();
        }
        Ok(v)
    }
}

impl fmt::Display for OrderingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (u, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let mag = c.abs();
            let coef = if mag.is_one() {
                String::new()
            } else {
                format!("{mag}*")
            };
            let digits: String = u.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "{sign}{coef}{digits}")?;
        }
        Ok(())
    }
}

/// A permutation of `0..m` as cycles, each led by its smallest point, sorted by leader.
/// Fixed points are kept as one-point cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclePermutation {
    pub m: usize,
    pub cycles: Vec<Vec<usize>>,
}

impl CyclePermutation {
    /// From one-line notation: `p[i]` is the image of `i`.
    pub fn from_images(p: &[usize]) -> Result<Self> {
        let m = p.len();
        let mut seen = vec![false; m];
        if p.iter()
            .any(|&x| x >= m || std::mem::replace(&mut seen[x], true))
        {
            return Err(Error::input("not a permutation"));
        }
        let mut done = vec![false; m];
        let mut cycles = Vec::new();
        for s in 0..m {
            if done[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = s;
            while !done[x] {
                done[x] = true;
                c.push(x);
                x = p[x];
            }
            cycles.push(c);
        }
        Ok(CyclePermutation { m, cycles })
    }

    /// Cycles of distinct points; normalised silently.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut p: Vec<usize> = (0..m).collect();
        let mut used = vec![false; m];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= m || std::mem::replace(&mut used[x], true) {
                    return Err(Error::input(format!(
                        "point {} repeated or out of range",
                        x + 1
                    )));
                }
                p[x] = c[(i + 1) % c.len()];
            }
        }
        Self::from_images(&p)
    }

    /// Parses `(12)(345)` or `(1 2)(3 4 5)` with `1`-based points. `m` defaults to the largest point.
    pub fn parse(s: &str, m: Option<usize>) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut cur: Option<Vec<usize>> = None;
        let mut num = String::new();
        let spaced = s.contains(' ') || s.contains(',');
        let flush = |num: &mut String, cur: &mut Option<Vec<usize>>| -> Result<()> {
            if !num.is_empty() {
                let v: usize = num
                    .parse()
                    .map_err(|_| Error::input(format!("bad point {num:?}")))?;
                if v == 0 {
                    return Err(Error::input("points are numbered from 1"));
                }
                cur.as_mut()
                    .ok_or_else(|| Error::input("point outside a cycle"))?
                    .push(v - 1);
                num.clear();
            }
            Ok(())
        };
        for ch in s.chars() {
            match ch {
                '(' if cur.is_none() => cur = Some(Vec::new()),
                ')' => {
                    flush(&mut num, &mut cur)?;
                    cycles.push(
                        cur.take()
                            .ok_or_else(|| Error::input("unbalanced parenthesis"))?,
                    );
                }
                '0'..='9' if spaced => num.push(ch),
                '0'..='9' => {
                    num.push(ch);
                    flush(&mut num, &mut cur)?;
                }
                ' ' | ',' => flush(&mut num, &mut cur)?,
                _ => return Err(Error::input(format!("unexpected {ch:?} in cycle notation"))),
            }
        }
        if cur.is_some() {
            return Err(Error::input("unbalanced parenthesis"));
        }
        let top = cycles.iter().flatten().max().map_or(0, |x| x + 1);
        let m = m.unwrap_or(top);
        if top > m {
            return Err(Error::input(format!("point {top} exceeds m = {m}")));
        }
        Self::from_cycles(m, &cycles)
    }

    pub fn nontrivial(&self) -> Vec<&Vec<usize>> {
        self.cycles.iter().filter(|c| c.len() > 1).collect()
    }

    pub fn images(&self) -> Vec<usize> {
        let mut p = vec![0; self.m];
        for c in &self.cycles {
            for (i, &x) in c.iter().enumerate() {
                p[x] = c[(i + 1) % c.len()];
            }
        }
        p
    }
}

impl fmt::Display for CyclePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nt = self.nontrivial();
        if nt.is_empty() {
            return write!(f, "()");
        }
        let sep = if self.m > 9 { " " } else { "" };
        for c in nt {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(sep))?;
        }
        Ok(())
    }
}

/// Left-nested bracket `[c1, c2, …, cr]`.
pub fn cycle_vector(c: &[usize]) -> OrderingVector {
    let mut v = OrderingVector::basis(vec![c[0]]);
    for &x in &c[1..] {
        v = v
            .bracket(&OrderingVector::basis(vec![x]))
            .expect("cycle points are distinct");
    }
    v
}

/// Shuffle product of the brackets of all cycles, fixed points included.
pub fn lie_shuffle_vector(pi: &CyclePermutation) -> Result<OrderingVector> {
    if pi.m > 6 {
        return Err(Error::cap("Lie shuffle vector size", pi.m, 6));
    }
    let mut v = OrderingVector::basis(Vec::new());
    for c in &pi.cycles {
        v = v.shuffle(&cycle_vector(c))?;
    }
    Ok(v)
}

/// Rows `F(π)` over `S_m` in lexicographic one-line order, columns over orderings.
pub fn lie_basis_matrix(m: usize) -> Result<Vec<Vec<Rational>>> {
    if m > 5 {
        return Err(Error::cap("Lie basis size", m, 5));
    }
    orderings(m)
        .par_iter()
        .map(|p| lie_shuffle_vector(&CyclePermutation::from_images(p)?)?.dense(m))
        .collect()
}

pub fn lie_basis_rank(m: usize) -> Result<usize> {
    let rows = lie_basis_matrix(m)?;
    Ok(integer_rank(
        rows.into_iter()
            .map(|r| r.into_iter().map(|q| q.to_integer()).collect())
            .collect(),
    ))
}

/// Two disjoint sets of orderings of `0..m`, as membership flags over the lexicographic list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventPair {
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
}

impl EventPair {
    pub fn new(plus: Vec<bool>, minus: Vec<bool>) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::input("event flags of different lengths"));
        }
        if plus.iter().zip(&minus).any(|(a, b)| *a && *b) {
            return Err(Error::input("overlapping event pair"));
        }
        Ok(EventPair { plus, minus })
    }

    /// Events on the relative order of `symbols`: the full ordering restricted to `symbols`
    /// lies in `plus` (respectively `minus`).
    pub fn from_patterns(
        m: usize,
        symbols: &[usize],
        plus: &[Vec<usize>],
        minus: &[Vec<usize>],
    ) -> Result<Self> {
        let all = orderings(m);
        let flags = |pats: &[Vec<usize>]| -> Vec<bool> {
            all.iter()
                .map(|o| {
                    let r: Vec<usize> = o.iter().copied().filter(|x| symbols.contains(x)).collect();
                    pats.contains(&r)
                })
                .collect()
        };
        EventPair::new(flags(plus), flags(minus))
    }

    /// Sign classes of `F(c)` for one cycle `c`.
    pub fn from_cycle(m: usize, c: &[usize]) -> Result<Self> {
        let v = cycle_vector(c);
        let pick = |pos: bool| -> Vec<Vec<usize>> {
            v.terms
                .iter()
                .filter(|(_, k)| k.is_positive() == pos)
                .map(|(u, _)| u.clone())
                .collect()
        };
        EventPair::from_patterns(m, c, &pick(true), &pick(false))
    }
}

/// Products over sign patterns of the conjunction probabilities: `(even side, odd side)`.
fn eo_sides<T: Clone>(
    x: &[T],
    events: &[EventPair],
    add: impl Fn(&T, &T) -> T,
    zero: T,
) -> (Vec<T>, Vec<T>) {
    let k = events.len();
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for s in 0..1usize << k {
        let mut p = zero.clone();
        for (u, xu) in x.iter().enumerate() {
            let hit = (0..k).all(|i| {
                if s >> i & 1 == 1 {
                    events[i].plus[u]
                } else {
                    events[i].minus[u]
                }
            });
            if hit {
                p = add(&p, xu);
            }
        }
        if s.count_ones() % 2 == 0 {
            even.push(p)
        } else {
            odd.push(p)
        }
    }
    (even, odd)
}

fn check_events(n: usize, events: &[EventPair]) -> Result<()> {
    if events.len() < 2 {
        return Err(Error::input(
            "even/odd constraints need at least two event pairs",
        ));
    }
    if events.iter().any(|e| e.plus.len() != n) {
        return Err(Error::input(
            "event flags do not match the number of orderings",
        ));
    }
    Ok(())
}

/// Left side minus right side of the even/odd constraint under `dist`.
pub fn eo_constraint_residual(dist: &OrderDistribution, events: &[EventPair]) -> Result<Rational> {
    check_events(dist.len(), events)?;
    let x: Vec<Rational> = dist.values().cloned().collect();
    let (even, odd) = eo_sides(&x, events, |a, b| a + b, Rational::zero());
    let lhs: Rational = even.iter().product();
    let rhs: Rational = odd.iter().product();
    Ok(lhs - rhs)
}

fn eo_value_f64(x: &[f64], events: &[EventPair]) -> f64 {
    let (even, odd) = eo_sides(x, events, |a, b| a + b, 0.0);
    even.iter().product::<f64>() - odd.iter().product::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    pub permutation: String,
    /// Ratio of the gradient to the shuffle vector, as `p/q`.
    pub scale: String,
    pub proportional: bool,
    pub finite_difference_rel_error: f64,
    pub pass: bool,
}

/// Gradient at the uniform law of the even/odd constraint built from the sign classes of each
/// nontrivial cycle, compared against the shuffle vector of `π` and against central differences.
pub fn eo_gradient_check(pi: &CyclePermutation) -> Result<GradientReport> {
    let m = pi.m;
    if m > 5 {
        return Err(Error::cap("gradient check size", m, 5));
    }
    let cyc = pi.nontrivial();
    if cyc.len() < 2 {
        return Err(Error::input(
            "the gradient check needs at least two nontrivial cycles",
        ));
    }
    let events = cyc
        .iter()
        .map(|c| EventPair::from_cycle(m, c))
        .collect::<Result<Vec<_>>>()?;
    let n: usize = (1..=m).product();
    let k = events.len();
    let x0 = Rational::new(BigInt::one(), BigInt::from(n));
    let x: Vec<Rational> = vec![x0; n];
    let (even, odd) = eo_sides(&x, &events, |a, b| a + b, Rational::zero());
    let pattern = |u: usize| -> Option<usize> {
        (0..1usize << k).find(|s| {
            (0..k).all(|i| {
                if s >> i & 1 == 1 {
                    events[i].plus[u]
                } else {
                    events[i].minus[u]
                }
            })
        })
    };
    let (mut ei, mut oi) = (Vec::new(), Vec::new());
    for s in 0..1usize << k {
        if s.count_ones() % 2 == 0 {
            ei.push(s)
        } else {
            oi.push(s)
        }
    }
    let others = |side: &[Rational], skip: usize| -> Rational {
        side.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, v)| v.clone())
            .product()
    };
    let grad: Vec<Rational> = (0..n)
        .map(|u| match pattern(u) {
            None => Rational::zero(),
            Some(s) => match ei.iter().position(|&t| t == s) {
                Some(i) => others(&even, i),
                None => -others(&odd, oi.iter().position(|&t| t == s).unwrap_or(0)),
            },
        })
        .collect();
    let target = lie_shuffle_vector(pi)?.dense(m)?;
    let pivot = target
        .iter()
        .position(|t| !t.is_zero())
        .ok_or_else(|| Error::internal("zero shuffle vector"))?;
    let scale = &grad[pivot] / &target[pivot];
    let proportional = !scale.is_zero() && grad.iter().zip(&target).all(|(g, t)| *g == &scale * t);
    let xf = vec![1.0 / n as f64; n];
    let h = 1e-4 / n as f64;
    let gmax = grad.iter().map(|g| to_f64(g).abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (u, g) in grad.iter().enumerate() {
        let (mut up, mut dn) = (xf.clone(), xf.clone());
        up[u] += h;
        dn[u] -= h;
        let fd = (eo_value_f64(&up, &events) - eo_value_f64(&dn, &events)) / (2.0 * h);
        worst = worst.max((fd - to_f64(g)).abs() / gmax);
    }
    Ok(GradientReport {
        permutation: pi.to_string(),
        scale: crate::rational::fmt_q(&scale),
        proportional,
        finite_difference_rel_error: worst,
        pass: proportional && worst < 1e-6,
    })
}

/// Permutations of `0..m` with at least two nontrivial cycles.
pub fn eo_permutations(m: usize) -> Vec<CyclePermutation> {
    orderings(m)
        .into_iter()
        .filter_map(|p| CyclePermutation::from_images(&p).ok())
        .filter(|p| p.nontrivial().len() >= 2)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimBounds {
    pub m: usize,
    pub upper: u64,
    pub lower: u64,
    pub word: String,
    pub tight: bool,
}

/// Seeded concatenation of shuffled alphabets, no letter repeated twice in a row,
/// cut to length `1.1 C(m) + m`.
pub fn default_trial_word(m: usize, seed: u64) -> Vec<usize> {
    let c = pure_cycle_count(m).to_f64().unwrap_or(0.0);
    let len = (1.1 * c).ceil() as usize + m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<usize> = Vec::with_capacity(len + m);
    while w.len() < len {
        let mut p: Vec<usize> = (0..m).collect();
        p.shuffle(&mut rng);
        if w.last() == Some(&p[0]) {
            p.swap(0, m - 1);
        }
        w.extend(p);
    }
    w.truncate(len.max(m));
    w
}

const RANK_PRIME: u64 = 2_305_843_009_213_693_951;

/// Upper bound `C(m)` and lower bound `rank(draw matrix) − 1`.
pub fn dim_bounds_report(m: usize, trial_word: Option<Vec<usize>>) -> Result<DimBounds> {
    if m == 0 {
        return Err(Error::input("m must be at least 1"));
    }
    if m > 6 {
        return Err(Error::cap("dimension bound size", m, 6));
    }
    let upper = pure_cycle_count(m)
        .to_u64()
        .ok_or_else(|| Error::internal("cycle count overflow"))?;
    let word = trial_word.unwrap_or_else(|| default_trial_word(m, 0));
    if word.iter().max().map_or(0, |&x| x + 1) != m {
        return Err(Error::input(format!(
            "trial word must use exactly {m} symbols"
        )));
    }
    let d = draw_matrix(&word)?;
    let modp: Vec<Vec<u64>> = d
        .iter()
        .map(|r| r.iter().map(|&x| (x % RANK_PRIME as u128) as u64).collect())
        .collect();
    let mut rank = rank_mod_p(modp, RANK_PRIME) as u64;
    if rank < upper + 1 && m <= 5 {
        rank = integer_rank(
            d.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        ) as u64;
    }
    let lower = rank.saturating_sub(1);
    Ok(DimBounds {
        m,
        upper,
        lower,
        word: crate::word_maps::word_string(&word),
        tight: lower == upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::word_maps::{parse_word, word_distribution, WordMap};

    fn v(s: &str) -> Vec<usize> {
        s.chars()
            .map(|c| c.to_digit(10).unwrap() as usize - 1)
            .collect()
    }

    #[test]
    fn trybula_examples() {
        let h = rat(1, 2);
        assert!(trybula_contains(&h, &h, &h).unwrap());
        assert!(!trybula_contains(&int(1), &int(1), &int(1)).unwrap());
        assert!(!trybula_contains(&int(0), &int(0), &int(0)).unwrap());
        assert!(trybula_contains(&int(1), &int(1), &int(0)).unwrap());
        assert!(trybula_contains(&int(2), &h, &h).is_err());
    }

    #[test]
    fn cycle_counts() {
        let c: Vec<u64> = (1..=7)
            .map(|m| pure_cycle_count(m).to_u64().unwrap())
            .collect();
        assert_eq!(c, vec![0, 1, 5, 20, 84, 409, 2365]);
        for m in 1..=8 {
            let mut multi = 0u64;
            for p in orderings(m) {
                if CyclePermutation::from_images(&p)
                    .unwrap()
                    .nontrivial()
                    .len()
                    >= 2
                {
                    multi += 1;
                }
            }
            let total: u64 = (1..=m as u64).product();
            assert_eq!(total, 1 + pure_cycle_count(m).to_u64().unwrap() + multi);
        }
    }

    #[test]
    fn shuffles() {
        let s = OrderingVector::basis(v("12"))
            .shuffle(&OrderingVector::basis(v("34")))
            .unwrap();
        assert_eq!(s.terms.len(), 6);
        for w in ["1234", "1324", "1342", "3124", "3142", "3412"] {
            assert_eq!(s.terms[&v(w)], int(1));
        }
        let e = OrderingVector::basis(Vec::new());
        assert_eq!(s.shuffle(&e).unwrap(), s);
        let t = OrderingVector::basis(v("1"))
            .shuffle(&OrderingVector::basis(v("2")))
            .unwrap();
        assert_eq!(t.to_string(), "12+21");
        assert!(s.shuffle(&OrderingVector::basis(v("1"))).is_err());
    }

    #[test]
    fn cycle_vectors() {
        let p = CyclePermutation::parse("(12)", None).unwrap();
        assert_eq!(lie_shuffle_vector(&p).unwrap().to_string(), "12-21");
        let p = CyclePermutation::parse("(231)", None).unwrap();
        assert_eq!(p.to_string(), "(123)");
        let f = lie_shuffle_vector(&p).unwrap();
        assert_eq!(f.to_string(), "123-213-312+321");
        let p = CyclePermutation::parse("(12)(34)", None).unwrap();
        let f = lie_shuffle_vector(&p).unwrap();
        assert_eq!(f.terms.len(), 24);
        assert_eq!(f.positive_terms(), f.negative_terms());
        let id = CyclePermutation::from_images(&[0, 1, 2]).unwrap();
        assert!(lie_shuffle_vector(&id)
            .unwrap()
            .dense(3)
            .unwrap()
            .iter()
            .all(|x| x.is_one()));
    }

    #[test]
    fn balanced_signs() {
        for p in orderings(4) {
            let pi = CyclePermutation::from_images(&p).unwrap();
            if pi.nontrivial().is_empty() {
                continue;
            }
            let f = lie_shuffle_vector(&pi).unwrap();
            assert_eq!(f.positive_terms(), f.negative_terms(), "{pi}");
            if pi.nontrivial().len() == 1 {
                assert!(f.terms.values().all(|c| c.abs().is_one()));
            }
        }
    }

    #[test]
    fn basis_ranks() {
        assert_eq!(lie_basis_rank(2).unwrap(), 2);
        assert_eq!(lie_basis_rank(3).unwrap(), 6);
        assert_eq!(lie_basis_rank(4).unwrap(), 24);
    }

    #[test]
    fn eo_on_word_map() {
        let wm = WordMap::parse(
            "abcdabdcba",
            &[
                rat(1, 3),
                int(2),
                int(1),
                rat(1, 2),
                int(3),
                int(1),
                int(5),
                int(2),
                int(1),
                int(1),
            ],
        )
        .unwrap();
        let d = word_distribution(&wm).unwrap();
        let e1 = EventPair::from_patterns(4, &[0, 1], &[v("12")], &[v("21")]).unwrap();
        let e2 = EventPair::from_patterns(4, &[2, 3], &[v("34")], &[v("43")]).unwrap();
        assert!(eo_constraint_residual(&d, &[e1.clone(), e2.clone()])
            .unwrap()
            .is_zero());
        let mut bad = d.clone();
        *bad.get_mut(&v("1234")).unwrap() += rat(1, 10);
        *bad.get_mut(&v("2143")).unwrap() -= rat(1, 10);
        assert!(!eo_constraint_residual(&bad, &[e1.clone(), e2])
            .unwrap()
            .is_zero());
        assert!(EventPair::from_patterns(4, &[0, 1], &[v("12")], &[v("12")]).is_err());
        assert!(eo_constraint_residual(&d, &[e1]).is_err());
    }

    #[test]
    fn gradients() {
        for s in ["(12)(34)", "(12)(345)", "(13)(24)", "(14)(23)"] {
            let r = eo_gradient_check(&CyclePermutation::parse(s, None).unwrap()).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(eo_gradient_check(&CyclePermutation::parse("(123)", None).unwrap()).is_err());
    }

    #[test]
    fn dimension_bounds() {
        let r = dim_bounds_report(3, Some(parse_word("abcabcba").unwrap())).unwrap();
        assert_eq!((r.upper, r.lower), (5, 5));
        let r = dim_bounds_report(4, None).unwrap();
        assert_eq!((r.upper, r.lower), (20, 20));
    }
}
