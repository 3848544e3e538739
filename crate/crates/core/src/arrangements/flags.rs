use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{permutations, Arrangement, OsElement, Quotient};
use crate::linalg::QMatrix;
use crate::rational::Q;

/// `Fl^k`: flags `L^0 ⊃ L^1 ⊃ .. ⊃ L^k` with `codim L^i = i`, modulo the relations
/// that, for fixed `L^j` with `j ≠ i`, the sum over all admissible `L^i` vanishes.
#[derive(Clone, Debug)]
pub struct FlagSpace {
    pub k: usize,
    /// Flags as edge ids `[L^1, .., L^k]`.
    pub flags: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    pub relations: Vec<Vec<(usize, Q)>>,
    pub(crate) q: Quotient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagElement {
    pub degree: usize,
    pub coeffs: Vec<Q>,
}

impl FlagElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl FlagSpace {
    pub(crate) fn new(arr: &Arrangement, k: usize) -> Self {
        let mut flags = vec![Vec::new()];
        for _ in 0..k {
            flags = flags
                .into_iter()
                .flat_map(|f: Vec<usize>| {
                    let last = f.last().copied().unwrap_or(0);
                    arr.below[last].iter().map(move |&e| [f.clone(), vec![e]].concat()).collect::<Vec<_>>()
                })
                .collect();
        }
        let index: HashMap<Vec<usize>, usize> = flags.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let mut groups: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for (id, f) in flags.iter().enumerate() {
            for i in 1..k {
                let mut gap = f.clone();
                gap.remove(i - 1);
                groups.entry((i, gap)).or_default().push(id);
            }
        }
        let relations: Vec<Vec<(usize, Q)>> = groups
            .into_values()
            .map(|ids| ids.into_iter().map(|id| (id, Q::one())).collect())
            .collect();
        let order: Vec<usize> = (0..flags.len()).collect();
        let q = Quotient::new(flags.len(), &relations, &order);
        FlagSpace {
            k,
            flags,
            index,
            relations,
            q,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.basis.len()
    }

    pub fn basis(&self) -> &[usize] {
        &self.q.basis
    }

    pub fn id(&self, flag: &[usize]) -> Option<usize> {
        self.index.get(flag).copied()
    }
}

/// Exact checks of the flag complex, the Orlik–Solomon complex and the maps between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    pub m: usize,
    /// `(dim A^k, dim Fl^k, number of nbc sets)` for `k = 0..=m`.
    pub dims: Vec<(usize, usize, usize)>,
    pub phi_annihilates_relations: bool,
    pub phi_isomorphism: bool,
    pub d_flag_squared_zero: bool,
    pub d_os_squared_zero: bool,
    pub s_well_defined: bool,
    pub s_symmetric: bool,
    pub s_matches_pairing: bool,
    pub s_chain_map: bool,
    /// The chain identity with the sign `(−1)^{k(k−1)/2}` dropped. Expected to fail
    /// whenever `m ≥ 2` and the weights are generic.
    pub s_chain_map_without_sign: bool,
}

impl ChainReport {
    pub fn passes(&self) -> bool {
        self.dims.iter().all(|&(a, f, b)| a == f && a == b)
            && self.phi_annihilates_relations
            && self.phi_isomorphism
            && self.d_flag_squared_zero
            && self.d_os_squared_zero
            && self.s_well_defined
            && self.s_symmetric
            && self.s_matches_pairing
            && self.s_chain_map
    }

    /// True when dropping the sign is caught.
    pub fn negative_control_detected(&self) -> bool {
        !self.s_chain_map_without_sign
    }
}

fn sign_q(s: i64) -> Q {
    if s < 0 {
        -Q::one()
    } else {
        Q::one()
    }
}

impl Arrangement {
    pub fn flag_combination(&self, k: usize, terms: impl IntoIterator<Item = (usize, Q)>) -> FlagElement {
        FlagElement {
            degree: k,
            coeffs: self.flags[k].q.reduce(terms),
        }
    }

    /// `F(H_1, .., H_k)` as a flag id in `Fl^k`.
    pub fn flag_of_tuple(&self, hs: &[usize]) -> Option<usize> {
        self.flags[hs.len()].id(&self.flag_of(hs)?)
    }

    /// `F(H̄) ∘ F(H̄') = F(H̄, H̄')` as an element of `Fl^{k+l}`, zero if the concatenated
    /// tuple is not in general position.
    pub fn flag_product(&self, x: &[usize], y: &[usize]) -> FlagElement {
        let t = [x, y].concat();
        let k = t.len();
        let terms = self.flag_of_tuple(&t).map(|id| (id, Q::one()));
        self.flag_combination(k, terms)
    }

    /// `d(L^0 ⊃ .. ⊃ L^k) = Σ_{L^{k+1} ⊂ L^k} (L^0 ⊃ .. ⊃ L^{k+1})` on a flag id.
    fn flag_d_raw(&self, k: usize, id: usize) -> Vec<(usize, Q)> {
        let f = &self.flags[k].flags[id];
        let last = f.last().copied().unwrap_or(0);
        self.below[last]
            .iter()
            .map(|&e| {
                let g = [f.clone(), vec![e]].concat();
                (self.flags[k + 1].id(&g).expect("child flag enumerated"), Q::one())
            })
            .collect()
    }

    pub fn flag_d(&self, x: &FlagElement) -> FlagElement {
        let k = x.degree;
        let terms: Vec<(usize, Q)> = self.flags[k]
            .basis()
            .iter()
            .zip(&x.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .flat_map(|(&id, c)| self.flag_d_raw(k, id).into_iter().map(move |(g, v)| (g, v * c)))
            .collect();
        self.flag_combination(k + 1, terms)
    }

    /// `φ^k(H_1..H_k) = Σ_σ (−1)^{|σ|} δ_{F(H_σ(1), .., H_σ(k))}` as values on all flags.
    pub fn phi_tuple(&self, hs: &[usize]) -> Vec<Q> {
        let k = hs.len();
        let mut out = vec![Q::zero(); self.flags[k].flags.len()];
        for (p, s) in permutations(k) {
            let t: Vec<usize> = p.iter().map(|&i| hs[i]).collect();
            if let Some(id) = self.flag_of_tuple(&t) {
                out[id] += sign_q(s);
            }
        }
        out
    }

    pub fn phi(&self, x: &OsElement) -> Vec<Q> {
        let k = x.degree;
        let mut out = vec![Q::zero(); self.flags[k].flags.len()];
        for (t, c) in self.os[k].basis().iter().zip(&x.coeffs) {
            if !c.is_zero() {
                for (o, v) in out.iter_mut().zip(self.phi_tuple(t)) {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// Matrix of `φ^k`: rows the Orlik–Solomon basis, columns the basis of `Fl^k`.
    pub fn phi_matrix(&self, k: usize) -> QMatrix {
        let rows = self.os[k].basis();
        let cols = self.flags[k].basis();
        let vals: Vec<Vec<Q>> = rows.iter().map(|t| self.phi_tuple(t)).collect();
        QMatrix::from_fn(rows.len(), cols.len(), |i, j| vals[i][cols[j]].clone())
    }

    /// `S^k(L^0 ⊃ .. ⊃ L^k) = (−1)^{k(k−1)/2} Σ_{H_i ⊃ L^i} a(H_1)..a(H_k) (H_1, .., H_k)`.
    /// With `with_sign = false` the prefactor is dropped.
    pub fn s_map(&self, k: usize, id: usize, with_sign: bool) -> OsElement {
        let f = &self.flags[k].flags[id];
        let choices: Vec<Vec<usize>> = f.iter().map(|&e| self.hyperplanes_over(e)).collect();
        let mut tuples: Vec<(Vec<usize>, Q)> = vec![(Vec::new(), Q::one())];
        for c in &choices {
            tuples = tuples
                .into_iter()
                .flat_map(|(t, w)| {
                    c.iter()
                        .filter(|h| !t.contains(h))
                        .map(|&h| ([t.clone(), vec![h]].concat(), &w * self.config.weight(h)))
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        let x = self.os_combination(k, tuples);
        if with_sign && (k * k.saturating_sub(1) / 2) % 2 == 1 {
            x.scale(&-Q::one())
        } else {
            x
        }
    }

    pub fn s_map_element(&self, x: &FlagElement, with_sign: bool) -> OsElement {
        let k = x.degree;
        self.flags[k]
            .basis()
            .iter()
            .zip(&x.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .fold(self.os_zero(k), |acc, (&id, c)| acc.add(&self.s_map(k, id, with_sign).scale(c)))
    }

    /// Ordered tuples `H̄` with `F(H̄) = F`.
    fn adjacent_tuples(&self, k: usize, id: usize) -> Vec<Vec<usize>> {
        let f = &self.flags[k].flags[id];
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        let mut prev = 0;
        for &e in f {
            let fresh: Vec<usize> = self
                .hyperplanes_over(e)
                .into_iter()
                .filter(|&h| !self.edges[prev].inside(self.hyperplane(h)))
                .collect();
            out = out
                .into_iter()
                .flat_map(|t| fresh.iter().map(move |&h| [t.clone(), vec![h]].concat()).collect::<Vec<_>>())
                .collect();
            prev = e;
        }
        out
    }

    /// The flag-pair form `S^k(F, F')`: the sum over hyperplane sets adjacent to both
    /// flags of `sign(σ(H̄, F)) sign(σ(H̄, F')) Π a(H)`.
    pub fn s_pairing(&self, k: usize, f: usize, g: usize) -> Q {
        let perms = permutations(k);
        let mut total = Q::zero();
        for t in self.adjacent_tuples(k, f) {
            for (p, s) in &perms {
                let u: Vec<usize> = p.iter().map(|&i| t[i]).collect();
                if self.flag_of_tuple(&u) == Some(g) {
                    let w: Q = t.iter().map(|&h| self.config.weight(h).clone()).product();
                    total += sign_q(*s) * w;
                }
            }
        }
        total
    }

    /// Gram matrix of the flag-pair form on the basis of `Fl^k`.
    pub fn s_form_matrix(&self, k: usize) -> QMatrix {
        let b = self.flags[k].basis();
        QMatrix::from_fn(b.len(), b.len(), |i, j| self.s_pairing(k, b[i], b[j]))
    }

    pub fn chain_check(&self) -> ChainReport {
        let m = self.m();
        let dims = (0..=m)
            .map(|k| (self.os[k].dim(), self.flags[k].dim(), self.os[k].nbc_count(self)))
            .collect();

        let phi_annihilates_relations = (0..=m).all(|k| {
            self.os[k].basis().iter().all(|t| {
                let v = self.phi_tuple(t);
                self.flags[k]
                    .relations
                    .iter()
                    .all(|r| r.iter().map(|(id, c)| c * &v[*id]).sum::<Q>().is_zero())
            })
        });
        let phi_isomorphism = (0..=m).all(|k| {
            let p = self.phi_matrix(k);
            p.is_square() && p.inverse().is_some()
        });

        let unit = |k: usize, id: usize| self.flag_combination(k, [(id, Q::one())]);
        let d_flag_squared_zero = (0..m.saturating_sub(1))
            .all(|k| self.flags[k].basis().iter().all(|&id| self.flag_d(&self.flag_d(&unit(k, id))).is_zero()));
        let d_os_squared_zero = (0..m.saturating_sub(1)).all(|k| {
            self.os[k]
                .basis()
                .iter()
                .all(|t| self.os_d(&self.os_d(&self.os_tuple(t))).is_zero())
        });

        // S^k must kill every gap relation
        let s_well_defined = (0..=m).all(|k| {
            self.flags[k].relations.iter().all(|r| {
                r.iter()
                    .fold(self.os_zero(k), |acc, (id, c)| acc.add(&self.s_map(k, *id, true).scale(c)))
                    .is_zero()
            })
        });
        let s_symmetric = (0..=m).all(|k| self.s_form_matrix(k).is_symmetric());
        let s_matches_pairing = (0..=m).all(|k| {
            let sign = if (k * k.saturating_sub(1) / 2) % 2 == 1 { -Q::one() } else { Q::one() };
            self.flags[k].basis().iter().all(|&f| {
                let v = self.phi(&self.s_map(k, f, true));
                self.flags[k].basis().iter().all(|&g| v[g] == &sign * self.s_pairing(k, f, g))
            })
        });
        let chain = |with_sign: bool| {
            (0..m).all(|k| {
                self.flags[k].basis().iter().all(|&id| {
                    let lhs = self.s_map_element(&self.flag_d(&unit(k, id)), with_sign);
                    let rhs = self.os_d(&self.s_map(k, id, with_sign));
                    lhs == rhs
                })
            })
        };
        ChainReport {
            n: self.config.n,
            m,
            dims,
            phi_annihilates_relations,
            phi_isomorphism,
            d_flag_squared_zero,
            d_os_squared_zero,
            s_well_defined,
            s_symmetric,
            s_matches_pairing,
            s_chain_map: chain(true),
            s_chain_map_without_sign: chain(false),
        }
    }
}
