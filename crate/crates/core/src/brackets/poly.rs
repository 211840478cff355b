use std::collections::BTreeMap;

/// Exponents of `(q, p, q', p', x, k)`; classical observables use the last
/// two slots for `(x, u)`.
pub type Exponents = [u32; 6];

/// Polynomial in the six commuting phase-space variables. For quantum
/// observables this is the Weyl symbol.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Exponents, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial(c, [0; 6])
    }

    pub fn monomial(c: f64, e: Exponents) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, e);
        p
    }

    pub fn variable(slot: usize) -> Self {
        let mut e = [0; 6];
        e[slot] = 1;
        Poly::monomial(1.0, e)
    }

    pub fn add_term(&mut self, c: f64, e: Exponents) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(c, *e);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in self.terms() {
            out.add_term(c * s, *e);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let mut e = *ea;
                for (a, b) in e.iter_mut().zip(eb) {
                    *a += b;
                }
                out.add_term(ca * cb, e);
            }
        }
        out
    }

    pub fn derivative(&self, slot: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in self.terms() {
            if e[slot] > 0 {
                let mut d = *e;
                d[slot] -= 1;
                out.add_term(c * e[slot] as f64, d);
            }
        }
        out
    }

    /// Evaluate at a point given per slot.
    pub fn eval(&self, point: &[f64; 6]) -> f64 {
        self.terms()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c, |acc, (&k, &v)| acc * v.powi(k as i32))
            })
            .sum()
    }

    /// `sum_m (d_{q_m} f d_{p_m} g - d_{p_m} f d_{q_m} g)`.
    pub fn poisson(&self, other: &Poly) -> Poly {
        (0..3).fold(Poly::zero(), |acc, m| {
            let a = self.derivative(2 * m).mul(&other.derivative(2 * m + 1));
            let b = self.derivative(2 * m + 1).mul(&other.derivative(2 * m));
            acc.add(&a).add(&b.scale(-1.0))
        })
    }

    /// Moyal bracket `(2/hbar) f sin(hbar Lambda / 2) g`, the Weyl symbol of
    /// `[F, G] / (i hbar)`. Terminates because the inputs are polynomials.
    pub fn moyal(&self, other: &Poly, hbar: f64) -> Poly {
        let max_n = self.degree().min(other.degree());
        let mut out = Poly::zero();
        let mut n = 1;
        let mut factorial = 1.0;
        while n <= max_n {
            let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let weight = sign * (0.5 * hbar).powi(n as i32 - 1) / factorial;
            out = out.add(&lambda_power(self, other, n).scale(weight));
            factorial *= ((n + 1) * (n + 2)) as f64;
            n += 2;
        }
        out
    }
}

/// `f Lambda^n g` with `Lambda = sum_m (<-d_q ->d_p - <-d_p ->d_q)`.
fn lambda_power(f: &Poly, g: &Poly, n: u32) -> Poly {
    if n == 0 {
        return f.mul(g);
    }
    if f.is_zero() || g.is_zero() {
        return Poly::zero();
    }
    (0..3).fold(Poly::zero(), |acc, m| {
        let a = lambda_power(&f.derivative(2 * m), &g.derivative(2 * m + 1), n - 1);
        let b = lambda_power(&f.derivative(2 * m + 1), &g.derivative(2 * m), n - 1);
        acc.add(&a).add(&b.scale(-1.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: [u32; 6]) -> Exponents {
        v
    }

    #[test]
    fn canonical_pair() {
        let (q, p) = (Poly::variable(0), Poly::variable(1));
        assert_eq!(q.poisson(&p), Poly::constant(1.0));
        assert_eq!(q.moyal(&p, 1.0), Poly::constant(1.0));
        assert_eq!(p.moyal(&q, 1.0), Poly::constant(-1.0));
    }

    #[test]
    fn moyal_equals_poisson_up_to_quadratic() {
        let f = Poly::monomial(2.0, e([1, 1, 0, 0, 0, 0])).add(&Poly::monomial(1.0, e([0, 0, 2, 0, 0, 0])));
        let g = Poly::monomial(-1.5, e([0, 2, 0, 0, 0, 0])).add(&Poly::monomial(0.5, e([0, 0, 0, 1, 1, 0])));
        assert_eq!(f.moyal(&g, 0.7), f.poisson(&g));
    }

    #[test]
    fn moyal_cubic_correction() {
        // [q^3, p^3]/(i hbar) has Weyl symbol 9 q^2 p^2 - (3/2) hbar^2.
        let f = Poly::monomial(1.0, e([3, 0, 0, 0, 0, 0]));
        let g = Poly::monomial(1.0, e([0, 3, 0, 0, 0, 0]));
        let hbar: f64 = 0.8;
        let mut expected = Poly::monomial(9.0, e([2, 2, 0, 0, 0, 0]));
        expected.add_term(-1.5 * hbar * hbar, [0; 6]);
        let got = f.moyal(&g, hbar);
        for (ex, c) in expected.terms() {
            let v = got.terms().find(|(k, _)| *k == ex).map(|(_, v)| v).unwrap();
            assert!((v - c).abs() < 1e-14);
        }
        assert_eq!(got.terms().count(), 2);
    }

    #[test]
    fn eval_and_degree() {
        let f = Poly::monomial(3.0, e([0, 0, 0, 0, 2, 1])).add(&Poly::constant(-1.0));
        assert_eq!(f.degree(), 3);
        assert_eq!(f.eval(&[0.0, 0.0, 0.0, 0.0, 2.0, 0.5]), 5.0);
    }
}
