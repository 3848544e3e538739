//! Top-degree forms: `i(a)` of Orlik–Solomon elements and the weight function as exact
//! rational functions in `t` and `z`.

use std::collections::BTreeMap;

use num::{One, Zero};

use super::{permutation_sign, Arrangement, Configuration, Hyperplane, OsElement};
use crate::error::{KzError, Result};
use crate::free_kac_moody::MultiDegree;
use crate::hypergeometric::{colors, lifts};
use crate::linalg::QMatrix;
use crate::rational::Q;
use crate::weight_modules::TensorIndex;

/// Sparse polynomial over `Q` in `t_1..t_m, z_1..z_n`, keyed by exponent vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(pub BTreeMap<Vec<u32>, Q>);

impl Poly {
    pub fn constant(c: Q, nvars: usize) -> Self {
        let mut p = BTreeMap::new();
        if !c.is_zero() {
            p.insert(vec![0; nvars], c);
        }
        Poly(p)
    }

    fn add_assign(&mut self, other: &Poly) {
        for (e, c) in &other.0 {
            let v = self.0.entry(e.clone()).or_insert_with(Q::zero);
            *v += c;
            if v.is_zero() {
                self.0.remove(e);
            }
        }
    }

    /// Multiplies by `x_a − x_b`.
    fn mul_difference(&self, a: usize, b: usize) -> Poly {
        let mut out = Poly::default();
        for (var, sign) in [(a, Q::one()), (b, -Q::one())] {
            let shifted = Poly(
                self.0
                    .iter()
                    .map(|(e, c)| {
                        let mut e = e.clone();
                        e[var] += 1;
                        (e, c * &sign)
                    })
                    .collect(),
            );
            out.add_assign(&shifted);
        }
        out
    }
}

/// `(a, b)` with `l_H = x_a − x_b` over the variables `t_1..t_m, z_1..z_n`.
fn linear_form(h: Hyperplane, m: usize) -> (usize, usize) {
    match h {
        Hyperplane::Diag(k, l) => (k, l),
        Hyperplane::Point(k, j) => (k, m + j),
    }
}

/// `Σ c / Π_{H} l_H`, each denominator a list of hyperplane indices (repeats allowed).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RationalSum {
    pub terms: Vec<(Q, Vec<usize>)>,
}

impl RationalSum {
    /// Exact value at a point, `Singular` on a hyperplane.
    pub fn eval(&self, config: &Configuration, z: &[Q], t: &[Q]) -> Result<Q> {
        let x: Vec<&Q> = t.iter().chain(z).collect();
        self.terms.iter().try_fold(Q::zero(), |acc, (c, den)| {
            let mut d = Q::one();
            for &h in den {
                let (a, b) = linear_form(config.hyperplanes[h], config.m);
                let l = x[a] - x[b];
                if l.is_zero() {
                    return Err(KzError::Singular(format!("point lies on {}", config.hyperplanes[h])));
                }
                d *= l;
            }
            Ok(acc + c / d)
        })
    }

    /// Numerator over the common denominator `Π l_H^{e_H}` with the given exponents.
    fn numerator(&self, config: &Configuration, exps: &[usize]) -> Poly {
        let nvars = config.m + config.n;
        let mut total = Poly::default();
        for (c, den) in &self.terms {
            let mut p = Poly::constant(c.clone(), nvars);
            for (h, &e) in exps.iter().enumerate() {
                let have = den.iter().filter(|&&x| x == h).count();
                let (a, b) = linear_form(config.hyperplanes[h], config.m);
                for _ in have..e {
                    p = p.mul_difference(a, b);
                }
            }
            total.add_assign(&p);
        }
        total
    }

    /// Equality as rational functions, by comparing numerators over a common denominator.
    pub fn same_function(&self, other: &RationalSum, config: &Configuration) -> bool {
        let mut exps = vec![0; config.hyperplanes.len()];
        for (_, den) in self.terms.iter().chain(&other.terms) {
            for h in 0..exps.len() {
                exps[h] = exps[h].max(den.iter().filter(|&&x| x == h).count());
            }
        }
        self.numerator(config, &exps) == other.numerator(config, &exps)
    }
}

/// `i(a)` of a top-degree element: the coefficient of `dt_1 ∧ .. ∧ dt_m` in
/// `Σ c · dlog l_{H_1} ∧ .. ∧ dlog l_{H_m}`.
pub fn os_rational(arr: &Arrangement, x: &OsElement) -> Result<RationalSum> {
    let m = arr.m();
    if x.degree != m {
        return Err(KzError::Dimension(format!("expected a degree {m} element, got degree {}", x.degree)));
    }
    let mut terms = Vec::new();
    for (t, c) in arr.os[m].basis().iter().zip(&x.coeffs) {
        if c.is_zero() {
            continue;
        }
        let g = QMatrix::from_fn(m, m, |i, k| {
            let (a, b) = linear_form(arr.hyperplane(t[i]), m);
            if a == k {
                Q::one()
            } else if b == k {
                -Q::one()
            } else {
                Q::zero()
            }
        });
        let det = det(&g);
        if !det.is_zero() {
            terms.push((c * det, t.to_vec()));
        }
    }
    Ok(RationalSum { terms })
}

fn det(g: &QMatrix) -> Q {
    let n = g.nrows();
    let mut a = g.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            for j in 0..n {
                let tmp = a[(c, j)].clone();
                a[(c, j)] = a[(p, j)].clone();
                a[(p, j)] = tmp;
            }
            d = -d;
        }
        d *= a[(c, c)].clone();
        for r in c + 1..n {
            if !a[(r, c)].is_zero() {
                let f = &a[(r, c)] / &a[(c, c)];
                for j in c..n {
                    let v = &f * &a[(c, j)];
                    a[(r, j)] -= v;
                }
            }
        }
    }
    d
}

fn check_shape(arr: &Arrangement, lambda: &MultiDegree, idx: &TensorIndex) -> Result<Vec<usize>> {
    let cols = colors(lambda);
    if cols.len() != arr.m() || idx.n_groups() != arr.config.n {
        return Err(KzError::Dimension(format!(
            "{idx} with weight {lambda} does not fit C_{{{};{}}}",
            arr.config.n,
            arr.m()
        )));
    }
    if idx.degree(lambda.rank()) != *lambda {
        return Err(KzError::Dimension(format!("{idx} does not have weight {lambda}")));
    }
    Ok(cols)
}

/// The weight function of `f_I v` as a sum over `Σ(I)` of chain products.
pub fn weight_rational(arr: &Arrangement, lambda: &MultiDegree, idx: &TensorIndex) -> Result<RationalSum> {
    let cols = check_shape(arr, lambda, idx)?;
    let c = &arr.config;
    let mut terms = Vec::new();
    for l in lifts(idx, &cols) {
        let mut sign = Q::one();
        let mut den = Vec::new();
        for (j, g) in l.iter().enumerate() {
            for w in g.windows(2) {
                if w[0] > w[1] {
                    sign = -sign;
                }
                den.push(c.index_of(Hyperplane::diag(w[0], w[1])).expect("diagonal present"));
            }
            if let Some(&last) = g.last() {
                den.push(c.index_of(Hyperplane::Point(last, j)).expect("point hyperplane present"));
            }
        }
        terms.push((sign, den));
    }
    Ok(RationalSum { terms })
}

/// The top-degree element matched with `(f_I)^*`: for each `K ∈ Σ(I)`,
/// `(−1)^{|K|} H^1_{K^1} ∘ .. ∘ H^n_{K^n}` with
/// `H^p_{i_1..i_l} = H_{i_1 i_2} ∘ .. ∘ H_{i_{l−1} i_l} ∘ H^p_{i_l}`, summed.
pub fn eta_top(arr: &Arrangement, lambda: &MultiDegree, idx: &TensorIndex) -> Result<OsElement> {
    let cols = check_shape(arr, lambda, idx)?;
    let c = &arr.config;
    let m = arr.m();
    let mut terms = Vec::new();
    for l in lifts(idx, &cols) {
        let flat: Vec<usize> = l.concat();
        let sign = if permutation_sign(&flat) < 0 { -Q::one() } else { Q::one() };
        let mut tuple = Vec::with_capacity(m);
        for (p, g) in l.iter().enumerate() {
            for w in g.windows(2) {
                tuple.push(c.index_of(Hyperplane::diag(w[0], w[1])).expect("diagonal present"));
            }
            if let Some(&last) = g.last() {
                tuple.push(c.index_of(Hyperplane::Point(last, p)).expect("point hyperplane present"));
            }
        }
        terms.push((tuple, sign));
    }
    Ok(arr.os_combination(m, terms))
}
