//! Word maps: weighted words whose letters are drawn independently per symbol, and the laws
//! they induce on orderings of the symbols.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{integer_rank, null_vector};
use crate::rational::{from_f64, int, rat, to_f64, QJson, Rational};

/// Law on orderings of `0..m`; an ordering lists symbols from first drawn position to last.
/// Keys cover all of `S_m` in lexicographic order.
pub type OrderDistribution = BTreeMap<Vec<usize>, Rational>;

pub const MAX_SYMBOLS: usize = 7;

/// All orderings of `0..m` in lexicographic order.
pub fn orderings(m: usize) -> Vec<Vec<usize>> {
    (0..m).permutations(m).collect()
}

/// Lexicographic rank of an ordering among all orderings of its length.
pub fn ordering_rank(sigma: &[usize]) -> usize {
    let m = sigma.len();
    let mut rank = 0;
    for i in 0..m {
        let smaller = sigma[i + 1..].iter().filter(|&&x| x < sigma[i]).count();
        rank = rank * (m - i) + smaller;
    }
    rank
}

pub fn letter(c: usize) -> char {
    (b'a' + c as u8) as char
}

pub fn ordering_name(sigma: &[usize]) -> String {
    sigma.iter().map(|&c| letter(c)).collect()
}

pub fn parse_word(s: &str) -> Result<Vec<usize>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'a'..='z' => Ok(c as usize - 'a' as usize),
            _ => Err(Error::input(format!(
                "word letters must be a..z, got {c:?}"
            ))),
        })
        .collect()
}

pub fn word_string(w: &[usize]) -> String {
    w.iter().map(|&c| letter(c)).collect()
}

fn symbol_count(word: &[usize]) -> Result<usize> {
    let m = word.iter().max().map_or(0, |&c| c + 1);
    if m == 0 {
        return Err(Error::input("empty word"));
    }
    if let Some(c) = (0..m).find(|c| !word.contains(c)) {
        return Err(Error::input(format!(
            "symbol {} missing from word",
            letter(c)
        )));
    }
    if m > MAX_SYMBOLS {
        return Err(Error::cap("word symbols", m, MAX_SYMBOLS));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWordMap", into = "RawWordMap")]
pub struct WordMap {
    pub m: usize,
    pub word: Vec<usize>,
    /// Per position; each symbol's weights are normalised separately.
    pub weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawWordMap {
    word: String,
    #[serde(default)]
    weights: Option<Vec<QJson>>,
}

impl TryFrom<RawWordMap> for WordMap {
    type Error = Error;
    fn try_from(r: RawWordMap) -> Result<Self> {
        let word = parse_word(&r.word)?;
        match r.weights {
            Some(w) => WordMap::new(word, w.into_iter().map(|q| q.0).collect()),
            None => WordMap::unit(word),
        }
    }
}

impl From<WordMap> for RawWordMap {
    fn from(w: WordMap) -> Self {
        RawWordMap {
            word: word_string(&w.word),
            weights: Some(w.weights.into_iter().map(QJson).collect()),
        }
    }
}

impl WordMap {
    pub fn new(word: Vec<usize>, weights: Vec<Rational>) -> Result<Self> {
        if word.len() != weights.len() {
            return Err(Error::input(format!(
                "{} letters but {} weights",
                word.len(),
                weights.len()
            )));
        }
        let m = symbol_count(&word)?;
        let wm = WordMap { m, word, weights };
        wm.validate()?;
        Ok(wm)
    }

    pub fn unit(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        WordMap::new(word, vec![Rational::one(); n])
    }

    pub fn parse(word: &str, weights: &[Rational]) -> Result<Self> {
        WordMap::new(parse_word(word)?, weights.to_vec())
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(Signed::is_negative) {
            return Err(Error::input("negative weight"));
        }
        for (c, t) in self.totals().iter().enumerate() {
            if !t.is_positive() {
                return Err(Error::input(format!(
                    "symbol {} has zero total weight",
                    letter(c)
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn totals(&self) -> Vec<Rational> {
        let mut t = vec![Rational::zero(); self.m];
        for (&c, w) in self.word.iter().zip(&self.weights) {
            t[c] += w;
        }
        t
    }

    /// Positions of symbol `c`.
    pub fn positions(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.word[i] == c).collect()
    }

    /// Same law, with each symbol's weights rescaled to coprime integers.
    pub fn integerized(&self) -> WordMap {
        let mut out = self.clone();
        for c in 0..self.m {
            let pos = self.positions(c);
            let l = pos
                .iter()
                .fold(BigInt::one(), |l, &i| l.lcm(self.weights[i].denom()));
            let nums: Vec<BigInt> = pos
                .iter()
                .map(|&i| (&self.weights[i] * Rational::from(l.clone())).to_integer())
                .collect();
            let g = nums.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            for (&i, x) in pos.iter().zip(nums) {
                out.weights[i] = Rational::from(x / &g);
            }
        }
        out
    }

    /// Drops zero-weight positions and merges adjacent repeats of a symbol.
    pub fn compacted(&self) -> WordMap {
        let mut word: Vec<usize> = Vec::new();
        let mut weights: Vec<Rational> = Vec::new();
        for (&c, w) in self.word.iter().zip(&self.weights) {
            if w.is_zero() {
                continue;
            }
            match word.last() {
                Some(&d) if d == c => *weights.last_mut().unwrap() += w,
                _ => {
                    word.push(c);
                    weights.push(w.clone());
                }
            }
        }
        WordMap {
            m: self.m,
            word,
            weights,
        }
    }

    /// Exponent notation such as `c b^2 a^(2/3)`.
    pub fn exponent_string(&self) -> String {
        self.word
            .iter()
            .zip(&self.weights)
            .map(|(&c, w)| {
                if w.is_one() {
                    letter(c).to_string()
                } else if w.is_integer() {
                    format!("{}^{}", letter(c), w)
                } else {
                    format!("{}^({})", letter(c), w)
                }
            })
            .join(" ")
    }

    /// Per-position integer numerators and per-symbol integer totals.
    fn integer_weights(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let wm = self.integerized();
        let num: Vec<BigInt> = wm.weights.iter().map(|w| w.to_integer()).collect();
        let mut tot = vec![BigInt::zero(); self.m];
        for (&c, x) in wm.word.iter().zip(&num) {
            tot[c] += x;
        }
        (num, tot)
    }
}

/// Weighted embedding counts of every ordering, sharing prefix tables along the lexicographic trie.
fn embedding_counts(word: &[usize], num: &[BigInt], m: usize) -> Vec<BigInt> {
    fn extend(word: &[usize], num: &[BigInt], cum: &[BigInt], c: usize) -> Vec<BigInt> {
        let mut next = Vec::with_capacity(cum.len());
        let mut run = BigInt::zero();
        for i in 0..word.len() {
            next.push(run.clone());
            if word[i] == c && !num[i].is_zero() && !cum[i].is_zero() {
                run += &num[i] * &cum[i];
            }
        }
        next.push(run);
        next
    }
    fn walk(
        word: &[usize],
        num: &[BigInt],
        m: usize,
        used: u32,
        cum: &[BigInt],
        out: &mut Vec<BigInt>,
    ) {
        if used.count_ones() as usize == m {
            out.push(cum[word.len()].clone());
            return;
        }
        for c in (0..m).filter(|c| used & (1 << c) == 0) {
            walk(word, num, m, used | 1 << c, &extend(word, num, cum, c), out);
        }
    }
    let start = vec![BigInt::one(); word.len() + 1];
    (0..m)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            walk(
                word,
                num,
                m,
                1 << c,
                &extend(word, num, &start, c),
                &mut out,
            );
            out
        })
        .flatten()
        .collect()
}

/// Exact law of the ordering of one independent draw per symbol.
pub fn word_distribution(wm: &WordMap) -> Result<OrderDistribution> {
    wm.validate()?;
    let (num, tot) = wm.integer_weights();
    let denom: BigInt = tot.iter().product();
    let counts = embedding_counts(&wm.word, &num, wm.m);
    Ok(orderings(wm.m)
        .into_iter()
        .zip(counts)
        .map(|(s, c)| (s, Rational::new(c, denom.clone())))
        .collect())
}

pub fn uniform_distribution(m: usize) -> OrderDistribution {
    let n = orderings(m);
    let p = rat(1, n.len() as i64);
    n.into_iter().map(|s| (s, p.clone())).collect()
}

pub fn is_uniform(d: &OrderDistribution) -> bool {
    let n = d.len() as i64;
    d.values().all(|p| *p == rat(1, n))
}

pub fn tv_distance(a: &OrderDistribution, b: &OrderDistribution) -> Rational {
    let keys: Vec<&Vec<usize>> = a.keys().chain(b.keys()).sorted().dedup().collect();
    let zero = Rational::zero();
    let s: Rational = keys
        .iter()
        .map(|k| (a.get(*k).unwrap_or(&zero) - b.get(*k).unwrap_or(&zero)).abs())
        .sum();
    s / int(2)
}

/// Entry `(i, σ)` counts the subsequences spelling `σ` that use position `i`.
/// Columns follow [`orderings`].
pub fn draw_matrix(word: &[usize]) -> Result<Vec<Vec<u128>>> {
    let m = symbol_count(word)?;
    let r = word.len();
    let overflow = || Error::cap("draw count", "more than 128 bits", "u128");
    let cols: Vec<Vec<u128>> = orderings(m)
        .par_iter()
        .map(|sigma| {
            // pre[j][i]: embeddings of σ[..j] in positions < i; suf[j][i]: of σ[j..] in positions ≥ i.
            let mut pre = vec![vec![0u128; r + 1]; m + 1];
            pre[0].iter_mut().for_each(|x| *x = 1);
            for j in 1..=m {
                for i in 0..r {
                    let add = if word[i] == sigma[j - 1] {
                        pre[j - 1][i]
                    } else {
                        0
                    };
                    pre[j][i + 1] = pre[j][i].checked_add(add).ok_or_else(overflow)?;
                }
            }
            let mut suf = vec![vec![0u128; r + 1]; m + 1];
            suf[m].iter_mut().for_each(|x| *x = 1);
            for j in (0..m).rev() {
                for i in (0..r).rev() {
                    let add = if word[i] == sigma[j] {
                        suf[j + 1][i + 1]
                    } else {
                        0
                    };
                    suf[j][i] = suf[j][i + 1].checked_add(add).ok_or_else(overflow)?;
                }
            }
            (0..r)
                .map(|i| {
                    let j = sigma.iter().position(|&c| c == word[i]).unwrap_or(0);
                    pre[j][i]
                        .checked_mul(suf[j + 1][i + 1])
                        .ok_or_else(overflow)
                })
                .collect::<Result<Vec<u128>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..r)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect())
}

pub fn draw_matrix_rank(word: &[usize]) -> Result<usize> {
    let rows = draw_matrix(word)?
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    Ok(integer_rank(rows))
}

/// Reduces every symbol to at most `m!` positions without changing the induced law.
pub fn shorten_word_map(wm: &WordMap) -> Result<WordMap> {
    wm.validate()?;
    if wm.m > 5 {
        return Err(Error::cap("shortening symbols", wm.m, 5));
    }
    let mut cur = wm.compacted();
    for c in 0..cur.m {
        let pos: Vec<usize> = cur.positions(c);
        let conditional: Vec<Vec<Rational>> = pos
            .iter()
            .map(|&i| {
                let mut probe = cur.clone();
                for &j in &pos {
                    probe.weights[j] = if j == i {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                }
                word_distribution(&probe).map(|d| d.into_values().collect())
            })
            .collect::<Result<_>>()?;
        let mut alive: Vec<usize> = (0..pos.len()).collect();
        loop {
            let mut rows: Vec<Vec<Rational>> = (0..conditional[0].len())
                .map(|k| alive.iter().map(|&a| conditional[a][k].clone()).collect())
                .collect();
            rows.push(vec![Rational::one(); alive.len()]);
            let Some(mut lambda) = null_vector(&rows) else {
                break;
            };
            if !lambda.iter().any(Signed::is_positive) {
                lambda.iter_mut().for_each(|x| *x = -x.clone());
            }
            let (drop, t) = alive
                .iter()
                .zip(&lambda)
                .enumerate()
                .filter(|(_, (_, l))| l.is_positive())
                .map(|(k, (&a, l))| (k, &cur.weights[pos[a]] / l))
                .min_by(|x, y| x.1.cmp(&y.1))
                .ok_or_else(|| Error::internal("no positive coefficient in affine dependency"))?;
            for (&a, l) in alive.iter().zip(&lambda) {
                cur.weights[pos[a]] = &cur.weights[pos[a]] - &t * l;
            }
            cur.weights[pos[alive[drop]]] = Rational::zero();
            alive.remove(drop);
        }
        cur = cur.compacted();
    }
    Ok(cur)
}

pub fn universal_word_length(m: usize) -> u64 {
    (1..=m as u64).product::<u64>() * m as u64 * (m as u64).saturating_sub(1) + 1
}

/// `a b c … a b c … a`, long enough to host every shortened word map.
pub fn universal_word(m: usize) -> Result<Vec<usize>> {
    if !(2..=MAX_SYMBOLS).contains(&m) {
        return Err(Error::input(format!(
            "universal words need 2 <= m <= {MAX_SYMBOLS}"
        )));
    }
    Ok((0..universal_word_length(m) as usize)
        .map(|i| i % m)
        .collect())
}

/// Places a word map inside the universal word, zero weights elsewhere.
pub fn embed_in_universal(wm: &WordMap) -> Result<WordMap> {
    let short = if wm.m <= 5 {
        shorten_word_map(wm)?
    } else {
        wm.compacted()
    };
    let u = universal_word(wm.m)?;
    let mut weights = vec![Rational::zero(); u.len()];
    let mut p = 0;
    for (&c, w) in short.word.iter().zip(&short.weights) {
        let j = (p..u.len())
            .find(|&j| u[j] == c)
            .ok_or_else(|| Error::input("word map has more than m! positions for some symbol"))?;
        weights[j] = w.clone();
        p = j + 1;
    }
    WordMap::new(u, weights)
}

/// `m (m!)^(m-1)`.
pub fn recursive_word_length(m: usize) -> BigInt {
    let f: BigInt = (1..=m).map(BigInt::from).product();
    BigInt::from(m) * num_traits::pow(f, m.saturating_sub(1))
}

/// `v_k`: the concatenation, over `S_m` in lexicographic order, of each relabelling of `v_{k-1}`;
/// `v_1 = a b c …`.
pub fn recursive_word(k: usize, m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..m).collect();
    let perms = orderings(m);
    for _ in 1..k {
        v = perms.iter().flat_map(|p| v.iter().map(|&c| p[c])).collect();
    }
    v
}

/// `v_m` with unit weights.
pub fn uniform_word_recursive(m: usize) -> Result<WordMap> {
    if m == 0 {
        return Err(Error::input("m must be at least 1"));
    }
    if m > 4 {
        return Err(Error::cap("length cap", recursive_word_length(m), 55_296));
    }
    WordMap::unit(recursive_word(m, m))
}

/// Nodes in `[0, 1]` with weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadratureScheme {
    pub nodes: Vec<Rational>,
    pub weights: Vec<Rational>,
}

impl QuadratureScheme {
    /// `Σ w_i x_i^j − 1/(j+1)`.
    pub fn moment_error(&self, j: u32) -> Rational {
        let s: Rational = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * num_traits::pow(x.clone(), j as usize))
            .sum();
        s - rat(1, j as i64 + 1)
    }

    /// Largest `d` for which the moments `0..=d` are exact, if any.
    pub fn exact_degree(&self) -> Option<u32> {
        (0..)
            .take_while(|&j| j < 64 && self.moment_error(j).is_zero())
            .last()
    }

    pub fn max_moment_error(&self, d: u32) -> f64 {
        (0..=d)
            .map(|j| to_f64(&self.moment_error(j)).abs())
            .fold(0.0, f64::max)
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Newton iteration on the moment equations with the given fixed nodes.
fn newton_scheme(fixed: &[f64], free_guess: Vec<f64>, r: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let nf = free_guess.len();
    let neq = nf + r;
    let split = |z: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut x = fixed.to_vec();
        x.extend_from_slice(&z[..nf]);
        (x, z[nf..].to_vec())
    };
    let resid = |z: &[f64]| -> Vec<f64> {
        let (x, w) = split(z);
        (0..neq)
            .map(|j| {
                x.iter()
                    .zip(&w)
                    .map(|(x, w)| w * x.powi(j as i32))
                    .sum::<f64>()
                    - 1.0 / (j as f64 + 1.0)
            })
            .collect()
    };
    let norm = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut z = free_guess;
    z.extend(std::iter::repeat(1.0 / r as f64).take(r));
    for _ in 0..200 {
        let f = resid(&z);
        if norm(&f) < 1e-15 {
            break;
        }
        let (x, w) = split(&z);
        let jac: Vec<Vec<f64>> = (0..neq)
            .map(|j| {
                let dx = (0..nf).map(|i| {
                    let xi = x[fixed.len() + i];
                    if j == 0 {
                        0.0
                    } else {
                        w[fixed.len() + i] * j as f64 * xi.powi(j as i32 - 1)
                    }
                });
                let dw = x.iter().map(|xi| xi.powi(j as i32));
                dx.chain(dw).collect()
            })
            .collect();
        let step = solve_dense(jac, f.iter().map(|v| -v).collect())
            .ok_or_else(|| Error::internal("singular quadrature Jacobian"))?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if norm(&resid(&trial)) < norm(&f) || t < 1e-6 {
                z = trial;
                break;
            }
            t /= 2.0;
        }
    }
    let res = norm(&resid(&z));
    if res >= 1e-12 {
        return Err(Error::internal(format!(
            "quadrature moments not solved, residual {res:e}"
        )));
    }
    Ok(split(&z))
}

fn rational_scheme(x: Vec<f64>, w: Vec<f64>) -> Result<QuadratureScheme> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    if x.iter().any(|v| !(-1e-12..=1.0 + 1e-12).contains(v)) || w.iter().any(|v| *v <= 0.0) {
        return Err(Error::internal(
            "quadrature solution outside [0,1] or with nonpositive weights",
        ));
    }
    let nodes = order
        .iter()
        .map(|&i| from_f64(x[i].clamp(0.0, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    let mut weights = order
        .iter()
        .map(|&i| from_f64(w[i]))
        .collect::<Result<Vec<_>>>()?;
    let s: Rational = weights.iter().sum();
    weights.iter_mut().for_each(|v| *v = &*v / &s);
    Ok(QuadratureScheme { nodes, weights })
}

/// `r` nodes including `0`, exact through degree `2r − 2`.
pub fn gauss_radau(r: usize) -> Result<QuadratureScheme> {
    match r {
        0 => Err(Error::input("a scheme needs at least one node")),
        1 => Ok(QuadratureScheme {
            nodes: vec![int(0)],
            weights: vec![int(1)],
        }),
        2 => Ok(QuadratureScheme {
            nodes: vec![int(0), rat(2, 3)],
            weights: vec![rat(1, 4), rat(3, 4)],
        }),
        _ => {
            let guess = (1..r)
                .map(|i| {
                    (1.0 - (std::f64::consts::PI * 2.0 * i as f64 / (2 * r - 1) as f64).cos()) / 2.0
                })
                .collect();
            let (x, w) = newton_scheme(&[0.0], guess, r)?;
            rational_scheme(x, w)
        }
    }
}

/// `r` nodes including both endpoints, exact through degree `2r − 3`.
pub fn gauss_lobatto(r: usize) -> Result<QuadratureScheme> {
    match r {
        0 | 1 => Err(Error::input("Lobatto schemes need at least two nodes")),
        2 => Ok(QuadratureScheme {
            nodes: vec![int(0), int(1)],
            weights: vec![rat(1, 2), rat(1, 2)],
        }),
        3 => Ok(QuadratureScheme {
            nodes: vec![int(0), rat(1, 2), int(1)],
            weights: vec![rat(1, 6), rat(2, 3), rat(1, 6)],
        }),
        _ => {
            let guess = (1..r - 1)
                .map(|i| (1.0 - (std::f64::consts::PI * i as f64 / (r - 1) as f64).cos()) / 2.0)
                .collect();
            let (x, w) = newton_scheme(&[0.0, 1.0], guess, r)?;
            rational_scheme(x, w)
        }
    }
}

/// `w^{x_1} B^{α_1} w^{x_2 − x_1} … B^{α_r} w^{1 − x_r}` with `B` a fresh last symbol;
/// `w^t` scales every weight of `w` by `t` and is omitted when `t = 0`.
pub fn quadrature_word(scheme: &QuadratureScheme, w: &WordMap) -> Result<WordMap> {
    let b = w.m;
    let mut word = Vec::new();
    let mut weights = Vec::new();
    let push_w = |word: &mut Vec<usize>, weights: &mut Vec<Rational>, t: Rational| {
        if t.is_positive() {
            word.extend_from_slice(&w.word);
            weights.extend(w.weights.iter().map(|x| x * &t));
        }
    };
    let mut prev = Rational::zero();
    for (x, a) in scheme.nodes.iter().zip(&scheme.weights) {
        push_w(&mut word, &mut weights, x - &prev);
        word.push(b);
        weights.push(a.clone());
        prev = x.clone();
    }
    push_w(&mut word, &mut weights, int(1) - prev);
    WordMap::new(word, weights)
}

/// Lengths of the quadrature uniform words: `1, 3, 8, 19, 60, 184, 740, …`.
pub fn quadrature_word_length(m: usize) -> u64 {
    let mut l = 1u64;
    for k in 2..=m as u64 {
        l = if k % 2 == 1 {
            (k + 1) / 2 * (l + 1)
        } else {
            k / 2 * l + (k + 2) / 2
        };
    }
    l
}

/// Scheme extending a uniform word on `m − 1` symbols to `m`.
pub fn quadrature_scheme_for(m: usize) -> Result<QuadratureScheme> {
    let k = m - 1;
    if k % 2 == 1 {
        gauss_lobatto((k + 3) / 2)
    } else {
        gauss_radau((k + 2) / 2)
    }
}

/// Uniform word on `m ≤ 5` symbols built by stacking quadrature schemes.
/// Rational schemes are used through `m = 4`; the `m = 5` step uses floating nodes made exact.
pub fn uniform_word_quadrature(m: usize) -> Result<WordMap> {
    if !(1..=5).contains(&m) {
        return Err(Error::input("quadrature words are built for 1 <= m <= 5"));
    }
    let mut w = WordMap::unit(vec![0])?;
    for k in 2..=m {
        w = quadrature_word(&quadrature_scheme_for(k)?, &w)?.integerized();
    }
    Ok(w)
}

/// Law of the A/B pattern when `k` draws of symbol 0 and `l` of symbol 1 are sorted by position.
/// Patterns are strings over `{'A', 'B'}`.
pub fn kl_pattern_distribution(
    wm: &WordMap,
    k: usize,
    l: usize,
) -> Result<BTreeMap<String, Rational>> {
    if wm.m != 2 {
        return Err(Error::input(
            "(k, l) patterns need a word map on two symbols",
        ));
    }
    if k + l > 8 {
        return Err(Error::cap("k + l", k + l, 8));
    }
    let tot = wm.totals();
    let fact = |n: usize| -> Rational { (1..=n as i64).map(int).product() };
    // Σ over per-position counts of Π p^c / c!, then scaled by k! l!.
    let mut states: BTreeMap<(String, usize, usize), Rational> = BTreeMap::new();
    states.insert((String::new(), 0, 0), Rational::one());
    for (&c, w) in wm.word.iter().zip(&wm.weights) {
        if w.is_zero() {
            continue;
        }
        let p = w / &tot[c];
        let mut next: BTreeMap<(String, usize, usize), Rational> = BTreeMap::new();
        for ((pat, a, b), v) in states {
            let room = if c == 0 { k - a } else { l - b };
            let mut pk = Rational::one();
            for t in 0..=room {
                let mut pat2 = pat.clone();
                pat2.extend(std::iter::repeat(if c == 0 { 'A' } else { 'B' }).take(t));
                let key = if c == 0 {
                    (pat2, a + t, b)
                } else {
                    (pat2, a, b + t)
                };
                *next.entry(key).or_insert_with(Rational::zero) += &v * &pk / fact(t);
                pk = &pk * &p;
            }
        }
        states = next;
    }
    let scale = fact(k) * fact(l);
    Ok(states
        .into_iter()
        .filter(|((_, a, b), _)| *a == k && *b == l)
        .map(|((p, _, _), v)| (p, v * &scale))
        .collect())
}

/// Whether every interleaving of `k` A-draws and `l` B-draws is equally likely.
pub fn kl_uniform_check(wm: &WordMap, k: usize, l: usize) -> Result<bool> {
    let d = kl_pattern_distribution(wm, k, l)?;
    let n = (0..k + l).combinations(l).count();
    Ok(d.len() == n && d.values().all(|v| *v == rat(1, n as i64)))
}

/// `P(first < second)` for two symbols of a law on orderings.
pub fn precedes(d: &OrderDistribution, first: usize, second: usize) -> Rational {
    d.iter()
        .filter(|(s, _)| s.iter().position(|&c| c == first) < s.iter().position(|&c| c == second))
        .map(|(_, p)| p.clone())
        .sum()
}

/// Numeric value of an ordering law, for reports.
pub fn approx(d: &OrderDistribution) -> Vec<f64> {
    d.values().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
}
