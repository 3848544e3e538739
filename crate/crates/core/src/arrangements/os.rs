use std::collections::HashMap;
use std::fmt;

use num::{One, Zero};

use super::{permutation_sign, subsets, Arrangement, Quotient};
use crate::rational::{fmt_q, Q};

/// Degree `k` of the Orlik–Solomon algebra. Generators are the `k`-sets in general
/// position; the basis is the set of those without a broken circuit.
#[derive(Clone, Debug)]
pub struct OsDegree {
    pub k: usize,
    pub gens: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    pub(crate) q: Quotient,
}

/// An element of `A^k` in coordinates on the no-broken-circuit basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OsElement {
    pub degree: usize,
    pub coeffs: Vec<Q>,
}

impl OsElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &OsElement) -> OsElement {
        assert_eq!(self.degree, other.degree);
        OsElement {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> OsElement {
        OsElement {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }
}

/// Minimal dependent sets with nonempty intersection, minus their first hyperplane.
fn broken_circuits(arr: &Arrangement) -> Vec<Vec<usize>> {
    let nh = arr.config.hyperplanes.len();
    let mut circuits: Vec<Vec<usize>> = Vec::new();
    for size in 2..=(arr.m() + 1).min(nh) {
        for s in subsets(nh, size) {
            let dependent = arr.meet_all(&s).is_some_and(|e| e.codim() < size);
            if dependent && !circuits.iter().any(|c| c.iter().all(|h| s.contains(h))) {
                circuits.push(s);
            }
        }
    }
    circuits.into_iter().map(|c| c[1..].to_vec()).collect()
}

impl OsDegree {
    pub(crate) fn new(arr: &Arrangement, k: usize) -> Self {
        let nh = arr.config.hyperplanes.len();
        let gens: Vec<Vec<usize>> = subsets(nh, k).into_iter().filter(|s| arr.general_position(s)).collect();
        let index: HashMap<Vec<usize>, usize> = gens.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();

        // ∂(H_1..H_{k+1}) = Σ (−1)^i (..Ĥ_i..) for dependent sets with nonempty intersection
        let relations: Vec<Vec<(usize, Q)>> = subsets(nh, k + 1)
            .into_iter()
            .filter(|t| arr.meet_all(t).is_some_and(|e| e.codim() < k + 1))
            .map(|t| {
                (0..=k)
                    .filter_map(|i| {
                        let mut rest = t.clone();
                        rest.remove(i);
                        let sign = if i % 2 == 0 { -Q::one() } else { Q::one() };
                        index.get(&rest).map(|&g| (g, sign))
                    })
                    .collect()
            })
            .collect();

        let broken = broken_circuits(arr);
        let has_bc = |g: &Vec<usize>| broken.iter().any(|b| b.iter().all(|h| g.contains(h)));
        let mut order: Vec<usize> = (0..gens.len()).filter(|&i| has_bc(&gens[i])).collect();
        order.extend((0..gens.len()).filter(|&i| !has_bc(&gens[i])));
        let q = Quotient::new(gens.len(), &relations, &order);
        OsDegree { k, gens, index, q }
    }

    pub fn dim(&self) -> usize {
        self.q.basis.len()
    }

    /// Basis tuples, increasing in hyperplane order.
    pub fn basis(&self) -> Vec<&[usize]> {
        self.q.basis.iter().map(|&g| self.gens[g].as_slice()).collect()
    }

    /// Generators that contain no broken circuit.
    pub fn nbc_count(&self, arr: &Arrangement) -> usize {
        let broken = broken_circuits(arr);
        self.gens
            .iter()
            .filter(|g| !broken.iter().any(|b| b.iter().all(|h| g.contains(h))))
            .count()
    }
}

impl Arrangement {
    pub fn os_zero(&self, k: usize) -> OsElement {
        OsElement {
            degree: k,
            coeffs: vec![Q::zero(); self.os[k].dim()],
        }
    }

    pub fn os_one(&self) -> OsElement {
        OsElement {
            degree: 0,
            coeffs: vec![Q::one()],
        }
    }

    /// Normal form of an ordered tuple `(H_1, .., H_k)` of hyperplane indices.
    pub fn os_tuple(&self, hs: &[usize]) -> OsElement {
        self.os_combination(hs.len(), [(hs.to_vec(), Q::one())])
    }

    /// Normal form of `Σ c · (tuple)` with all tuples of length `k`.
    pub fn os_combination(&self, k: usize, terms: impl IntoIterator<Item = (Vec<usize>, Q)>) -> OsElement {
        let deg = &self.os[k];
        let combo = terms.into_iter().filter_map(|(t, c)| {
            assert_eq!(t.len(), k, "tuple length differs from degree");
            let mut s = t.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            let g = *deg.index.get(&s)?;
            let c = if permutation_sign(&t) < 0 { -c } else { c };
            Some((g, c))
        });
        OsElement {
            degree: k,
            coeffs: deg.q.reduce(combo),
        }
    }

    /// The product, induced by concatenation of tuples.
    pub fn os_mul(&self, x: &OsElement, y: &OsElement) -> OsElement {
        let k = x.degree + y.degree;
        if k > self.m() {
            return OsElement {
                degree: k,
                coeffs: Vec::new(),
            };
        }
        let (bx, by) = (self.os[x.degree].basis(), self.os[y.degree].basis());
        let mut terms = Vec::new();
        for (a, ca) in bx.iter().zip(&x.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in by.iter().zip(&y.coeffs) {
                if !cb.is_zero() {
                    terms.push(([*a, *b].concat(), ca * cb));
                }
            }
        }
        self.os_combination(k, terms)
    }

    /// `ω(a) = Σ a(H) H`.
    pub fn omega(&self) -> OsElement {
        let terms = self.config.weights.iter().enumerate().map(|(h, a)| (vec![h], a.clone()));
        self.os_combination(1, terms)
    }

    /// `d(a) x = ω(a) · x`.
    pub fn os_d(&self, x: &OsElement) -> OsElement {
        self.os_mul(&self.omega(), x)
    }

    /// Text form of an element, e.g. `2·(H_12,H_1^1) - (H_1^1,H_2^1)`.
    pub fn os_display(&self, x: &OsElement) -> String {
        let basis = self.os[x.degree].basis();
        let parts: Vec<String> = basis
            .iter()
            .zip(&x.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| {
                let names: Vec<String> = t.iter().map(|&h| self.hyperplane(h).to_string()).collect();
                format!("{}·({})", fmt_q(c), names.join(","))
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for OsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_q).collect();
        write!(f, "A^{}[{}]", self.degree, parts.join(", "))
    }
}
