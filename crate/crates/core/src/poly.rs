//! Exact univariate polynomials and piecewise polynomials with rational breakpoints.

use num_traits::{One, Zero};

use crate::rational::{int, Rational};

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    c: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(q: Rational) -> Self {
        Poly::from_coeffs(vec![q])
    }

    pub fn from_coeffs(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    /// `(x - a)^k`.
    pub fn shifted_power(a: &Rational, k: usize) -> Self {
        let lin = Poly::from_coeffs(vec![-a.clone(), Rational::one()]);
        (0..k).fold(Poly::constant(Rational::one()), |acc, _| acc.mul(&lin))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.c
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, a| acc * x + a)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(c)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            c: self.c.iter().map(|a| -a).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            c: self.c.iter().map(|a| a * q).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Poly {
        let mut c = vec![Rational::zero()];
        c.extend(
            self.c
                .iter()
                .enumerate()
                .map(|(i, a)| a / int(i as i64 + 1)),
        );
        Poly::from_coeffs(c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * int(i as i64))
                .collect(),
        )
    }

    /// `∫_a^b p`.
    pub fn definite(&self, a: &Rational, b: &Rational) -> Rational {
        let f = self.integral();
        f.eval(b) - f.eval(a)
    }
}

/// Function equal to `pieces[i].1` on `[pieces[i].0, pieces[i+1].0)`, to the last polynomial
/// beyond the last start, and to 0 before the first start.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PiecewisePoly {
    pieces: Vec<(Rational, Poly)>,
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        PiecewisePoly { pieces: Vec::new() }
    }

    /// The constant `q` on `[start, ∞)`.
    pub fn step(start: Rational, q: Rational) -> Self {
        PiecewisePoly::from_pieces(vec![(start, Poly::constant(q))])
    }

    pub fn from_pieces(pieces: Vec<(Rational, Poly)>) -> Self {
        let mut out: Vec<(Rational, Poly)> = Vec::with_capacity(pieces.len());
        for (s, p) in pieces {
            if let Some(last) = out.last_mut() {
                debug_assert!(last.0 < s, "breakpoints must increase");
                if last.1 == p {
                    continue;
                }
            } else if p.is_zero() {
                continue;
            }
            out.push((s, p));
        }
        PiecewisePoly { pieces: out }
    }

    pub fn pieces(&self) -> &[(Rational, Poly)] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.pieces.iter().map(|(s, _)| s)
    }

    fn piece_at(&self, x: &Rational) -> Option<&Poly> {
        let i = self.pieces.partition_point(|(s, _)| s <= x);
        i.checked_sub(1).map(|i| &self.pieces[i].1)
    }

    fn piece_before(&self, x: &Rational) -> Option<&Poly> {
        let i = self.pieces.partition_point(|(s, _)| s < x);
        i.checked_sub(1).map(|i| &self.pieces[i].1)
    }

    pub fn value(&self, x: &Rational) -> Rational {
        self.piece_at(x).map_or_else(Rational::zero, |p| p.eval(x))
    }

    pub fn left_limit(&self, x: &Rational) -> Rational {
        self.piece_before(x)
            .map_or_else(Rational::zero, |p| p.eval(x))
    }

    /// Value at +∞; the last piece must be constant.
    pub fn limit(&self) -> Rational {
        match self.pieces.last() {
            None => Rational::zero(),
            Some((_, p)) => {
                debug_assert!(p.degree().unwrap_or(0) == 0, "unbounded tail");
                p.coeffs().first().cloned().unwrap_or_else(Rational::zero)
            }
        }
    }

    fn merged_breaks(&self, o: &PiecewisePoly) -> Vec<Rational> {
        let mut b: Vec<Rational> = self.breakpoints().chain(o.breakpoints()).cloned().collect();
        b.sort();
        b.dedup();
        b
    }

    fn combine(&self, o: &PiecewisePoly, f: impl Fn(&Poly, &Poly) -> Poly) -> PiecewisePoly {
        let zero = Poly::zero();
        let pieces = self
            .merged_breaks(o)
            .into_iter()
            .map(|s| {
                let p = f(
                    self.piece_at(&s).unwrap_or(&zero),
                    o.piece_at(&s).unwrap_or(&zero),
                );
                (s, p)
            })
            .collect();
        PiecewisePoly::from_pieces(pieces)
    }

    pub fn add(&self, o: &PiecewisePoly) -> PiecewisePoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        self.combine(o, Poly::add)
    }

    pub fn mul(&self, o: &PiecewisePoly) -> PiecewisePoly {
        self.combine(o, Poly::mul)
    }

    pub fn scale(&self, q: &Rational) -> PiecewisePoly {
        PiecewisePoly::from_pieces(
            self.pieces
                .iter()
                .map(|(s, p)| (s.clone(), p.scale(q)))
                .collect(),
        )
    }

    /// Piecewise derivative, ignoring jumps.
    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly::from_pieces(
            self.pieces
                .iter()
                .map(|(s, p)| (s.clone(), p.derivative()))
                .collect(),
        )
    }

    /// `∫_{-∞}^{∞}`; the last piece must vanish.
    pub fn total_integral(&self) -> Rational {
        debug_assert!(self.pieces.last().map_or(true, |(_, p)| p.is_zero()));
        self.pieces
            .windows(2)
            .map(|w| w[0].1.definite(&w[0].0, &w[1].0))
            .sum()
    }

    /// `x ↦ w/(b-a) · ∫_a^{min(x,b)} self`, and 0 for `x < a`.
    pub fn uniform_transform(&self, a: &Rational, b: &Rational, w: &Rational) -> PiecewisePoly {
        let k = w / (b - a);
        let mut cuts = vec![a.clone()];
        cuts.extend(self.breakpoints().filter(|s| *s > a && *s < b).cloned());
        cuts.push(b.clone());
        let zero = Poly::zero();
        let mut acc = Rational::zero();
        let mut pieces = Vec::with_capacity(cuts.len());
        for win in cuts.windows(2) {
            let (p, q) = (&win[0], &win[1]);
            let f = self.piece_at(p).unwrap_or(&zero);
            let anti = f.integral();
            let base = &acc - anti.eval(p);
            pieces.push((p.clone(), anti.add(&Poly::constant(base)).scale(&k)));
            acc += anti.eval(q) - anti.eval(p);
        }
        pieces.push((b.clone(), Poly::constant(acc * k)));
        PiecewisePoly::from_pieces(pieces)
    }

    /// `x ↦ w · self(c-) · [x > c]`.
    pub fn atom_transform(&self, c: &Rational, w: &Rational) -> PiecewisePoly {
        PiecewisePoly::step(c.clone(), self.left_limit(c) * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn poly_arithmetic() {
        let p = Poly::shifted_power(&int(1), 2);
        assert_eq!(p.coeffs(), &[int(1), int(-2), int(1)]);
        assert_eq!(p.eval(&int(3)), int(4));
        assert_eq!(p.definite(&int(1), &int(2)), rat(1, 3));
        assert_eq!(p.derivative().eval(&int(3)), int(4));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn uniform_cdf_chain() {
        // P(U1 < U2 < x) for two uniforms on [0,1] is x^2/2 on [0,1].
        let one = PiecewisePoly::step(int(-1), int(1));
        let f1 = one.uniform_transform(&int(0), &int(1), &int(1));
        assert_eq!(f1.value(&rat(1, 2)), rat(1, 2));
        let f2 = f1.uniform_transform(&int(0), &int(1), &int(1));
        assert_eq!(f2.value(&rat(1, 2)), rat(1, 8));
        assert_eq!(f2.limit(), rat(1, 2));
    }

    #[test]
    fn atoms_use_left_limits() {
        let one = PiecewisePoly::step(int(-1), int(1));
        let f = one.atom_transform(&int(2), &rat(1, 3));
        assert_eq!(f.left_limit(&int(2)), int(0));
        assert_eq!(f.value(&int(3)), rat(1, 3));
        let g = f.atom_transform(&int(2), &int(1));
        assert_eq!(g.limit(), int(0));
    }

    #[test]
    fn sums_and_products() {
        let a = PiecewisePoly::from_pieces(vec![
            (int(0), Poly::constant(int(1))),
            (int(1), Poly::zero()),
        ]);
        let b = PiecewisePoly::from_pieces(vec![
            (rat(1, 2), Poly::constant(int(2))),
            (int(2), Poly::zero()),
        ]);
        assert_eq!(a.add(&b).value(&rat(3, 4)), int(3));
        assert_eq!(a.mul(&b).total_integral(), int(1));
        assert_eq!(a.add(&b).total_integral(), int(4));
    }
}
