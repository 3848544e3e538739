//! Hypergeometric solutions: the master function, the weight function, real chambers,
//! the solution matrix `u_IJ`, and numerical checks of both equation systems.

pub mod quadrature;

use std::f64::consts::PI;
use std::sync::Arc;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connections::{ConnectionParams, Field, KzSystem};
use crate::error::{KzError, Result};
use crate::free_kac_moody::MultiDegree;
use crate::linalg::{complex_det, condition_number, CMatrix, Matrix};
use crate::rational::{q_to_f64, FromQ};
use crate::weight_modules::{enumerate_basis, MuVector, TensorIndex, TensorVerma};

use quadrature::{graded_rule, reduce_exponent, Node, Schedule, LADDER};

/// Color `c(k)` of each integration variable: `m_1` variables of color 0, then color 1, ...
pub fn colors(lambda: &MultiDegree) -> Vec<usize> {
    lambda
        .0
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| std::iter::repeat_n(i, m as usize))
        .collect()
}

/// Assignment of integration variables to the positions of an index: `groups[j][l]` is
/// the variable sitting at position `l` of group `j`.
pub type Lift = Vec<Vec<usize>>;

/// All `σ ∈ Σ(I)`, as lifts. Variables of each color are permuted among the positions of
/// that color.
pub fn lifts(idx: &TensorIndex, colors: &[usize]) -> Vec<Lift> {
    fn go(groups: &[&[u8]], colors: &[usize], used: &mut Vec<bool>, cur: &mut Lift, out: &mut Vec<Lift>) {
        let j = cur.len() - 1;
        let l = cur[j].len();
        if l == groups[j].len() {
            if j + 1 == groups.len() {
                out.push(cur.clone());
            } else {
                cur.push(Vec::new());
                go(groups, colors, used, cur, out);
                cur.pop();
            }
            return;
        }
        let want = groups[j][l] as usize;
        for v in 0..colors.len() {
            if !used[v] && colors[v] == want {
                used[v] = true;
                cur[j].push(v);
                go(groups, colors, used, cur, out);
                cur[j].pop();
                used[v] = false;
            }
        }
    }
    let groups = idx.groups();
    if groups.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    go(&groups, colors, &mut vec![false; colors.len()], &mut vec![Vec::new()], &mut out);
    out
}

/// The lift assigning variables of each color in increasing order along `I`.
pub fn canonical_lift(idx: &TensorIndex, colors: &[usize]) -> Lift {
    let mut next: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for g in idx.groups() {
        let mut vars = Vec::new();
        for &c in g {
            let c = c as usize;
            if next.len() <= c {
                next.resize(c + 1, 0);
            }
            let v = colors
                .iter()
                .enumerate()
                .filter(|(_, &cv)| cv == c)
                .nth(next[c])
                .map(|(v, _)| v)
                .expect("index letters match the coloring");
            next[c] += 1;
            vars.push(v);
        }
        out.push(vars);
    }
    out
}

fn lift_term<T: Field>(lift: &Lift, diff: impl Fn(usize, usize) -> T, diff_z: impl Fn(usize, usize) -> T) -> T {
    let mut den = T::one();
    for (j, g) in lift.iter().enumerate() {
        for w in g.windows(2) {
            den = den * diff(w[0], w[1]);
        }
        if let Some(&last) = g.last() {
            den = den * diff_z(last, j);
        }
    }
    T::one() / den
}

/// Coefficient of `f_I v` in `ω(z, t)` against `dt_1 ∧ .. ∧ dt_m`:
/// `Σ_{σ∈Σ(I)} Π_j 1/((t_{σ_j(1)} − t_{σ_j(2)}) .. (t_{σ_j(s_j)} − z_j))`.
pub fn weight_function<T: Field>(lambda: &MultiDegree, idx: &TensorIndex, z: &[T], t: &[T]) -> Result<T> {
    let cols = colors(lambda);
    if t.len() != cols.len() || z.len() != idx.n_groups() {
        return Err(KzError::Dimension(format!(
            "expected {} variables and {} points, got {} and {}",
            cols.len(),
            idx.n_groups(),
            t.len(),
            z.len()
        )));
    }
    if idx.degree(lambda.rank()) != *lambda {
        return Err(KzError::Dimension(format!("{idx} does not have weight {lambda}")));
    }
    for a in 0..t.len() {
        for b in 0..a {
            if (t[a].clone() - t[b].clone()).is_zero() {
                return Err(KzError::Singular(format!("t_{} = t_{}", b + 1, a + 1)));
            }
        }
        for (j, zj) in z.iter().enumerate() {
            if (t[a].clone() - zj.clone()).is_zero() {
                return Err(KzError::Singular(format!("t_{} = z_{}", a + 1, j + 1)));
            }
        }
    }
    Ok(lifts(idx, &cols).iter().fold(T::zero(), |acc, l| {
        acc + lift_term(l, |a, b| t[a].clone() - t[b].clone(), |a, j| t[a].clone() - z[j].clone())
    }))
}

/// Exponents of `Φ_μ^{1/κ}`, already divided by `κ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MasterExponents {
    pub kappa: f64,
    pub colors: Vec<usize>,
    /// `(Λ_i, Λ_j)/κ`.
    pub zz: Vec<Vec<f64>>,
    /// `−(α_{c(k)}, Λ_j)/κ`.
    pub tz: Vec<Vec<f64>>,
    /// `(α_{c(k)}, α_{c(l)})/κ`.
    pub tt: Vec<Vec<f64>>,
    /// `−⟨α_{c(k)}, μ⟩/κ`.
    pub rate_t: Vec<f64>,
    /// `⟨Λ_j, μ⟩/κ`.
    pub rate_z: Vec<f64>,
}

impl MasterExponents {
    pub fn new(tv: &TensorVerma, lambda: &MultiDegree, mu: &MuVector<f64>, kappa: f64) -> Result<Self> {
        if kappa == 0.0 || !kappa.is_finite() {
            return Err(KzError::Domain("κ must be a nonzero real number".into()));
        }
        let n = tv.n();
        let cols = colors(lambda);
        let hw = &tv.hw;
        let zz = (0..n)
            .map(|i| (0..n).map(|j| q_to_f64(&hw.lam_lam[(i, j)]) / kappa).collect())
            .collect();
        let tz = cols
            .iter()
            .map(|&c| (0..n).map(|j| -q_to_f64(&hw.lam_alpha[j][c]) / kappa).collect())
            .collect();
        let tt = cols
            .iter()
            .map(|&c| cols.iter().map(|&d| q_to_f64(tv.km.b(c, d)) / kappa).collect())
            .collect();
        let rate_t = cols.iter().map(|&c| -mu.alpha[c] / kappa).collect();
        let rate_z = mu.lam.iter().map(|x| x / kappa).collect();
        Ok(MasterExponents {
            kappa,
            colors: cols,
            zz,
            tz,
            tt,
            rate_t,
            rate_z,
        })
    }

    pub fn m(&self) -> usize {
        self.colors.len()
    }

    /// Exponent conditions under which every real chamber integral converges.
    pub fn check_convergence(&self) -> Result<()> {
        let m = self.m();
        for k in 0..m {
            for (j, &p) in self.tz[k].iter().enumerate() {
                if p <= 0.0 {
                    return Err(KzError::Convergence(format!(
                        "-(α_{}, Λ_{})/κ = {p} is not positive",
                        self.colors[k] + 1,
                        j + 1
                    )));
                }
            }
            for l in k + 1..m {
                if self.tt[k][l] <= 0.0 {
                    return Err(KzError::Convergence(format!(
                        "(α_{}, α_{})/κ = {} is not positive",
                        self.colors[k] + 1,
                        self.colors[l] + 1,
                        self.tt[k][l]
                    )));
                }
            }
            if self.rate_t[k] >= 0.0 {
                return Err(KzError::Convergence(format!(
                    "<α_{}, μ>/κ = {} is not positive",
                    self.colors[k] + 1,
                    -self.rate_t[k]
                )));
            }
        }
        Ok(())
    }

    /// `log |Π_{i<j} (z_i − z_j)^{(Λ_i,Λ_j)/κ} exp(Σ ⟨Λ_j,μ⟩ z_j/κ)|`.
    fn log_z_part(&self, z: &[f64]) -> f64 {
        let mut s: f64 = z.iter().zip(&self.rate_z).map(|(z, r)| z * r).sum();
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                s += self.zz[i][j] * (z[j] - z[i]).ln();
            }
        }
        s
    }
}

/// A real chamber `z_j < t_{i^j_1} < .. < t_{i^j_{s_j}} < z_{j+1}` with `z_{n+1} = ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: TensorIndex,
    /// Variables of each group in increasing order along the real line.
    pub groups: Lift,
}

impl Cell {
    pub fn n(&self) -> usize {
        self.groups.len()
    }

    /// True when some variable lies beyond `z_n`.
    pub fn unbounded(&self) -> bool {
        self.groups.last().is_some_and(|g| !g.is_empty())
    }

    fn locate(&self, m: usize) -> (Vec<usize>, Vec<usize>) {
        let mut grp = vec![0; m];
        let mut pos = vec![0; m];
        for (j, g) in self.groups.iter().enumerate() {
            for (l, &v) in g.iter().enumerate() {
                grp[v] = j;
                pos[v] = l;
            }
        }
        (grp, pos)
    }
}

fn check_increasing(z: &[f64]) -> Result<()> {
    if z.iter().any(|x| !x.is_finite()) || z.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KzError::Domain("points z must be real and strictly increasing".into()));
    }
    Ok(())
}

/// One chamber per `I ∈ P(λ, n)`, using the canonical lift.
pub fn cells(z: &[f64], lambda: &MultiDegree, n: usize) -> Result<Vec<Cell>> {
    check_increasing(z)?;
    if z.len() != n {
        return Err(KzError::Dimension(format!("expected {n} points, got {}", z.len())));
    }
    let cols = colors(lambda);
    Ok(enumerate_basis(lambda, n)
        .into_iter()
        .map(|index| Cell {
            groups: canonical_lift(&index, &cols),
            index,
        })
        .collect())
}

/// Every ordered real chamber: all lifts of all `I`.
pub fn all_chambers(z: &[f64], lambda: &MultiDegree, n: usize) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    let cols = colors(lambda);
    for c in cells(z, lambda, n)? {
        for groups in lifts(&c.index, &cols) {
            out.push(Cell {
                index: c.index.clone(),
                groups,
            });
        }
    }
    Ok(out)
}

/// Quadrature and finite-difference settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSettings {
    /// Relative tolerance between successive refinements.
    pub tol: f64,
    /// Number of refinement steps allowed (at most the ladder length).
    pub max_depth: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
    /// Order of the central difference stencil: 2 (three points) or 4 (five points).
    pub fd_order: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            tol: 1e-10,
            max_depth: LADDER.len(),
            fd_step: 1e-3,
            fd_order: 4,
        }
    }
}

/// One integration direction of a cell.
#[derive(Clone, Debug)]
struct Dim {
    var: usize,
    group: usize,
    prev: Option<usize>,
    bounded: bool,
    a0: f64,
    a1: Option<f64>,
    scale: f64,
}

/// Node-independent data for a cell: directions, endpoint exponents, scales and phase.
#[derive(Clone, Debug)]
struct CellPlan {
    cell: Cell,
    dims: Vec<Dim>,
    grp: Vec<usize>,
    pos: Vec<usize>,
    /// `Σ p` over negative factors of `Φ_μ^{1/κ}`.
    phase: f64,
}

impl CellPlan {
    fn new(cell: Cell, ex: &MasterExponents) -> Self {
        let m = ex.m();
        let n = cell.n();
        let (grp, pos) = cell.locate(m);
        let mut dims = Vec::new();
        for (j, g) in cell.groups.iter().enumerate() {
            let bounded = j + 1 < n;
            let s = g.len();
            for (k, &v) in g.iter().enumerate() {
                let prev = (k > 0).then(|| g[k - 1]);
                let p0 = match prev {
                    Some(u) => ex.tt[u][v],
                    None => ex.tz[v][j],
                };
                let a1 = bounded.then(|| {
                    let mut a = (s - 1 - k) as f64;
                    for l in k..s {
                        a += ex.tz[g[l]][j + 1] - 1.0;
                        for l2 in l + 1..s {
                            a += ex.tt[g[l]][g[l2]] - 1.0;
                        }
                    }
                    reduce_exponent(a)
                });
                let rate: f64 = g[k..].iter().map(|&u| -ex.rate_t[u]).sum();
                dims.push(Dim {
                    var: v,
                    group: j,
                    prev,
                    bounded,
                    a0: reduce_exponent(p0 - 1.0),
                    a1,
                    scale: if rate > 0.0 { 1.0 / rate } else { 1.0 },
                });
            }
        }
        let mut phase = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                phase += ex.zz[i][j];
            }
        }
        for k in 0..m {
            for j in grp[k] + 1..n {
                phase += ex.tz[k][j];
            }
            for l in k + 1..m {
                if (grp[k], pos[k]) < (grp[l], pos[l]) {
                    phase += ex.tt[k][l];
                }
            }
        }
        CellPlan {
            cell,
            dims,
            grp,
            pos,
            phase,
        }
    }
}

/// Coordinates of one quadrature point, with accurate distances to neighbours.
#[derive(Clone)]
struct Point {
    x: Vec<f64>,
    /// Distance to the left end of the variable's interval.
    dl: Vec<f64>,
    /// Distance to the right end (bounded intervals only).
    dr: Vec<f64>,
    /// Distance to the previous variable (or left end) in the same group.
    gap: Vec<f64>,
}

struct Evaluator<'a> {
    ex: &'a MasterExponents,
    z: &'a [f64],
    plan: &'a CellPlan,
    columns: &'a [Vec<Lift>],
    rules: Vec<Vec<Node>>,
}

impl Evaluator<'_> {
    fn diff(&self, pt: &Point, a: usize, b: usize) -> f64 {
        let (grp, pos, g) = (&self.plan.grp, &self.plan.pos, &self.plan.cell.groups);
        let (ga, gb) = (grp[a], grp[b]);
        if ga == gb {
            let (lo, hi, sign) = if pos[a] < pos[b] { (pos[a], pos[b], -1.0) } else { (pos[b], pos[a], 1.0) };
            sign * g[ga][lo + 1..=hi].iter().map(|&v| pt.gap[v]).sum::<f64>()
        } else if ga < gb {
            -(pt.dr[a] + (self.z[gb] - self.z[ga + 1]) + pt.dl[b])
        } else {
            pt.dr[b] + (self.z[ga] - self.z[gb + 1]) + pt.dl[a]
        }
    }

    fn diff_z(&self, pt: &Point, a: usize, j: usize) -> f64 {
        let g = self.plan.grp[a];
        if j <= g {
            pt.dl[a] + (self.z[g] - self.z[j])
        } else {
            -(pt.dr[a] + (self.z[j] - self.z[g + 1]))
        }
    }

    fn leaf(&self, pt: &Point, weight: f64, log_jac: f64, acc: &mut [f64]) {
        let ex = self.ex;
        let m = ex.m();
        let mut lg = log_jac;
        for k in 0..m {
            lg += ex.rate_t[k] * pt.x[k];
            for j in 0..self.z.len() {
                lg += ex.tz[k][j] * self.diff_z(pt, k, j).abs().ln();
            }
            for l in k + 1..m {
                lg += ex.tt[k][l] * self.diff(pt, k, l).abs().ln();
            }
        }
        let f = weight * lg.exp();
        if f == 0.0 || !f.is_finite() {
            return;
        }
        for (slot, col) in acc.iter_mut().zip(self.columns) {
            let w: f64 = col
                .iter()
                .map(|l| lift_term(l, |a, b| self.diff(pt, a, b), |a, j| self.diff_z(pt, a, j)))
                .sum();
            *slot += f * w;
        }
    }

    fn recurse(&self, d: usize, pt: &mut Point, weight: f64, log_jac: f64, acc: &mut [f64]) {
        if d == self.plan.dims.len() {
            self.leaf(pt, weight, log_jac, acc);
            return;
        }
        for node in &self.rules[d] {
            let lj = self.place(d, node, pt);
            self.recurse(d + 1, pt, weight * node.w, log_jac + lj, acc);
        }
    }

    /// Sets the variable of direction `d` from the node; returns the log-Jacobian.
    fn place(&self, d: usize, node: &Node, pt: &mut Point) -> f64 {
        let dim = &self.plan.dims[d];
        let v = dim.var;
        let a = self.z[dim.group];
        let dl_prev = dim.prev.map_or(0.0, |p| pt.dl[p]);
        if dim.bounded {
            let b = self.z[dim.group + 1];
            let r_prev = dim.prev.map_or(b - a, |p| pt.dr[p]);
            let g = r_prev * node.u;
            let r = r_prev * node.one_minus;
            let dl = dl_prev + g;
            pt.gap[v] = g;
            pt.dl[v] = dl;
            pt.dr[v] = r;
            pt.x[v] = if dl < r { a + dl } else { b - r };
            r_prev.ln()
        } else {
            let g = dim.scale * node.u / node.one_minus;
            let dl = dl_prev + g;
            pt.gap[v] = g;
            pt.dl[v] = dl;
            pt.dr[v] = f64::INFINITY;
            pt.x[v] = a + dl;
            dim.scale.ln() - 2.0 * node.one_minus.ln()
        }
    }

    /// `∫ Π|factor|^p e^{rate·t} w_J` over the cell for every column `J`, without the
    /// `z`-only factor and the phase.
    fn integrate(&self) -> Vec<f64> {
        let m = self.ex.m();
        let blank = Point {
            x: vec![0.0; m],
            dl: vec![0.0; m],
            dr: vec![0.0; m],
            gap: vec![0.0; m],
        };
        let ncol = self.columns.len();
        if self.plan.dims.is_empty() {
            let mut acc = vec![0.0; ncol];
            self.leaf(&blank, 1.0, 0.0, &mut acc);
            return acc;
        }
        let parts: Vec<Vec<f64>> = self.rules[0]
            .par_iter()
            .map(|node| {
                let mut pt = blank.clone();
                let mut acc = vec![0.0; ncol];
                let lj = self.place(0, node, &mut pt);
                self.recurse(1, &mut pt, node.w, lj, &mut acc);
                acc
            })
            .collect();
        let mut out = vec![0.0; ncol];
        for p in parts {
            for (o, x) in out.iter_mut().zip(p) {
                *o += x;
            }
        }
        out
    }
}

/// The matrix `u_IJ`: rows are chambers, columns are basis vectors of `M_λ`.
#[derive(Clone, Debug)]
pub struct SolutionMatrix {
    pub u: CMatrix,
    pub cells: Vec<Cell>,
    pub columns: Vec<TensorIndex>,
    /// Refinement step at which each row converged.
    pub schedules: Vec<Schedule>,
    /// Largest relative change between the last two refinements over all rows.
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Max relative residual of `κ∂_{z_i}u − B_i u` over rows, for each `i`.
    pub kz: Vec<f64>,
    /// Max relative residual of `κ∂_{μ'}u − C_{μ'}u` over rows.
    pub dynamical: f64,
    pub max: f64,
    pub fd_step: f64,
    pub quadrature_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantReport {
    /// `log det u(p2) − log det u(p1)`, real and imaginary parts.
    pub numeric: (f64, f64),
    pub closed_form: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub condition: (f64, f64),
}

/// Solver for the hypergeometric solutions on one weight space.
#[derive(Debug)]
pub struct Hypergeometric {
    pub sys: Arc<KzSystem>,
    pub lambda: MultiDegree,
    colors: Vec<usize>,
    /// `Σ(J)` for every basis vector `J`.
    columns: Vec<Vec<Lift>>,
}

fn to_complex(p: &ConnectionParams<f64>) -> ConnectionParams<Complex64> {
    let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    ConnectionParams {
        z: c(&p.z),
        mu: MuVector::new(c(&p.mu.alpha), c(&p.mu.lam)),
        kappa: Complex64::new(p.kappa, 0.0),
    }
}

fn mu_to_complex(m: &MuVector<f64>) -> MuVector<Complex64> {
    let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    MuVector::new(c(&m.alpha), c(&m.lam))
}

fn row_residual(kappa: f64, du: &[Complex64], a: &CMatrix, u: &[Complex64]) -> f64 {
    let au = a.mul_vec(u);
    let mut res = 0.0f64;
    let mut lhs = 0.0f64;
    let mut rhs = 0.0f64;
    for (d, x) in du.iter().zip(&au) {
        let l = d * kappa;
        res = res.max((l - x).norm());
        lhs = lhs.max(l.norm());
        rhs = rhs.max(x.norm());
    }
    res / lhs.max(rhs).max(f64::MIN_POSITIVE)
}

impl Hypergeometric {
    pub fn new(sys: Arc<KzSystem>) -> Self {
        let lambda = sys.space.lambda.clone();
        let colors = colors(&lambda);
        let columns = sys.space.basis.iter().map(|j| lifts(j, &colors)).collect();
        Hypergeometric {
            sys,
            lambda,
            colors,
            columns,
        }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn exponents(&self, p: &ConnectionParams<f64>) -> Result<MasterExponents> {
        MasterExponents::new(&self.sys.tv, &self.lambda, &p.mu, p.kappa)
    }

    fn prepare(&self, p: &ConnectionParams<f64>) -> Result<(MasterExponents, Vec<CellPlan>)> {
        p.validate(self.sys.n())?;
        let ex = self.exponents(p)?;
        ex.check_convergence()?;
        let plans = cells(&p.z, &self.lambda, self.sys.n())?
            .into_iter()
            .map(|c| CellPlan::new(c, &ex))
            .collect();
        Ok((ex, plans))
    }

    fn rules(plan: &CellPlan, s: Schedule) -> Result<Vec<Vec<Node>>> {
        plan.dims.iter().map(|d| graded_rule(Some(d.a0), d.a1, s)).collect()
    }

    /// One row of `u` with a fixed rule (no phase, no `z`-only factor).
    fn raw_row(&self, plan: &CellPlan, ex: &MasterExponents, z: &[f64], s: Schedule) -> Result<Vec<f64>> {
        let ev = Evaluator {
            ex,
            z,
            plan,
            columns: &self.columns,
            rules: Self::rules(plan, s)?,
        };
        Ok(ev.integrate())
    }

    fn finish_row(raw: Vec<f64>, plan: &CellPlan, ex: &MasterExponents, z: &[f64]) -> Vec<Complex64> {
        let c = Complex64::from_polar(ex.log_z_part(z).exp(), PI * plan.phase);
        raw.into_iter().map(|x| c * x).collect()
    }

    /// Adaptive refinement of one row; returns the row, the schedule and the estimate.
    fn adaptive_row(&self, plan: &CellPlan, ex: &MasterExponents, z: &[f64], st: &QuadratureSettings) -> Result<(Vec<f64>, Schedule, f64)> {
        if plan.dims.is_empty() {
            return Ok((self.raw_row(plan, ex, z, LADDER[0])?, LADDER[0], 0.0));
        }
        let depth = st.max_depth.clamp(2, LADDER.len());
        let mut prev = self.raw_row(plan, ex, z, LADDER[0])?;
        let mut est = f64::INFINITY;
        for &s in &LADDER[1..depth] {
            let cur = self.raw_row(plan, ex, z, s)?;
            let scale = cur.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let diff = cur.iter().zip(&prev).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            est = diff / scale.max(f64::MIN_POSITIVE);
            if est <= st.tol {
                return Ok((cur, s, est));
            }
            prev = cur;
        }
        Err(KzError::Accuracy {
            achieved: est,
            requested: st.tol,
        })
    }

    pub fn solution_matrix(&self, p: &ConnectionParams<f64>, st: &QuadratureSettings) -> Result<SolutionMatrix> {
        let (ex, plans) = self.prepare(p)?;
        let rows = plans
            .par_iter()
            .map(|plan| self.adaptive_row(plan, &ex, &p.z, st))
            .collect::<Result<Vec<_>>>()?;
        let mut schedules = Vec::new();
        let mut err = 0.0f64;
        let mut mat = Vec::new();
        for ((raw, s, e), plan) in rows.into_iter().zip(&plans) {
            schedules.push(s);
            err = err.max(e);
            mat.push(Self::finish_row(raw, plan, &ex, &p.z));
        }
        Ok(SolutionMatrix {
            u: Matrix::from_rows(mat),
            cells: plans.into_iter().map(|pl| pl.cell).collect(),
            columns: self.sys.space.basis.clone(),
            schedules,
            error_estimate: err,
        })
    }

    /// Rows at shifted parameters with the schedules and plans of the base point.
    fn rows_at(&self, plans: &[CellPlan], schedules: &[Schedule], p: &ConnectionParams<f64>) -> Result<Vec<Vec<Complex64>>> {
        check_increasing(&p.z).map_err(|_| KzError::Domain("finite-difference stencil leaves the ordered regime".into()))?;
        let ex = self.exponents(p)?;
        ex.check_convergence()?;
        plans
            .par_iter()
            .zip(schedules)
            .map(|(plan, &s)| Ok(Self::finish_row(self.raw_row(plan, &ex, &p.z, s)?, plan, &ex, &p.z)))
            .collect()
    }

    /// Central difference of every row along `shift(p, ±kh)`.
    fn central(
        &self,
        plans: &[CellPlan],
        sched: &[Schedule],
        order: usize,
        h: f64,
        shift: impl Fn(f64) -> ConnectionParams<f64>,
    ) -> Result<Vec<Vec<Complex64>>> {
        let stencil: &[(f64, f64)] = match order {
            2 => &[(-1.0, -0.5), (1.0, 0.5)],
            4 => &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
            _ => return Err(KzError::Domain(format!("finite-difference order must be 2 or 4, got {order}"))),
        };
        let mut out: Vec<Vec<Complex64>> = Vec::new();
        for &(k, c) in stencil {
            let rows = self.rows_at(plans, sched, &shift(k * h))?;
            if out.is_empty() {
                out = rows.iter().map(|r| vec![Complex64::new(0.0, 0.0); r.len()]).collect();
            }
            for (o, r) in out.iter_mut().zip(rows) {
                for (x, y) in o.iter_mut().zip(r) {
                    *x += y * (c / h);
                }
            }
        }
        Ok(out)
    }

    /// Finite-difference residuals of both systems along `dir`, against the true
    /// operators.
    pub fn residuals(&self, p: &ConnectionParams<f64>, dir: &MuVector<f64>, st: &QuadratureSettings) -> Result<ResidualReport> {
        let pc = to_complex(p);
        let kz = (0..self.sys.n()).map(|i| self.sys.kz_matrix(i, &pc)).collect::<Result<Vec<_>>>()?;
        let c = self.sys.dyn_matrix(&mu_to_complex(dir), &pc)?;
        self.residuals_against(p, dir, st, &kz, &c)
    }

    /// Residuals against caller-supplied operators `B_i` and `C_{μ'}`.
    pub fn residuals_against(
        &self,
        p: &ConnectionParams<f64>,
        dir: &MuVector<f64>,
        st: &QuadratureSettings,
        kz: &[CMatrix],
        dyn_op: &CMatrix,
    ) -> Result<ResidualReport> {
        let base = self.solution_matrix(p, st)?;
        let (_, plans) = self.prepare(p)?;
        let sched = &base.schedules;
        let rows = base.u.to_rows();
        let mut kz_res = Vec::new();
        for (i, b) in kz.iter().enumerate() {
            let h = st.fd_step * p.z[i].abs().max(1.0);
            let du = self.central(&plans, sched, st.fd_order, h, |d| {
                let mut q = p.clone();
                q.z[i] += d;
                q
            })?;
            kz_res.push(
                du.iter()
                    .zip(&rows)
                    .map(|(d, u)| row_residual(p.kappa, d, b, u))
                    .fold(0.0, f64::max),
            );
        }
        let norm = |m: &MuVector<f64>| m.alpha.iter().chain(&m.lam).fold(0.0f64, |a, x| a.max(x.abs()));
        let dn = norm(dir);
        if dn == 0.0 {
            return Err(KzError::Domain("direction μ' must be nonzero".into()));
        }
        let h = st.fd_step * norm(&p.mu).max(1.0) / dn;
        let du = self.central(&plans, sched, st.fd_order, h, |d| {
            let mut q = p.clone();
            q.mu = MuVector::lincomb(&1.0, &p.mu, &d, dir);
            q
        })?;
        let dynamical = du
            .iter()
            .zip(&rows)
            .map(|(d, u)| row_residual(p.kappa, d, dyn_op, u))
            .fold(0.0, f64::max);
        let max = kz_res.iter().copied().fold(dynamical, f64::max);
        Ok(ResidualReport {
            kz: kz_res,
            dynamical,
            max,
            fd_step: st.fd_step,
            quadrature_error: base.error_estimate,
        })
    }

    /// Closed form of `log det u(p2) − log det u(p1)` (same `κ` at both points).
    pub fn closed_form_increment(&self, p1: &ConnectionParams<f64>, p2: &ConnectionParams<f64>) -> Result<f64> {
        if p1.kappa != p2.kappa {
            return Err(KzError::Domain("both points must share κ".into()));
        }
        let sys = &self.sys;
        let n = sys.n();
        let mut s = 0.0;
        for i in 0..n {
            let tr = |p: &ConnectionParams<f64>| -> f64 {
                let d = sys.mu_diag(i, &p.mu);
                (0..d.nrows()).map(|k| d[(k, k)]).sum()
            };
            s += p2.z[i] * tr(p2) - p1.z[i] * tr(p1);
            for j in i + 1..n {
                let eps = q_to_f64(&sys.casimir_trace(i, j));
                s += eps * ((p2.z[i] - p2.z[j]) / (p1.z[i] - p1.z[j])).ln();
            }
        }
        for (alpha, d) in &sys.deltas {
            let delta = q_to_f64(&d.trace());
            let r = p2.mu.pair_root(alpha) / p1.mu.pair_root(alpha);
            if r <= 0.0 {
                return Err(KzError::Domain(format!("segment crosses <{alpha}, μ> = 0")));
            }
            s += delta * r.ln();
        }
        Ok(s / p1.kappa)
    }

    /// Compares the log-determinant increment between two nearby points with the
    /// closed form.
    pub fn determinant_check(&self, p1: &ConnectionParams<f64>, p2: &ConnectionParams<f64>, st: &QuadratureSettings) -> Result<DeterminantReport> {
        let closed = self.closed_form_increment(p1, p2)?;
        let u1 = self.solution_matrix(p1, st)?;
        let u2 = self.solution_matrix(p2, st)?;
        let cond = |u: &CMatrix| -> Result<f64> {
            let c = condition_number(u);
            if !c.is_finite() || c > 1e12 {
                return Err(KzError::Conditioning(format!("condition number {c:.3e}")));
            }
            Ok(c)
        };
        let (c1, c2) = (cond(&u1.u)?, cond(&u2.u)?);
        let ratio = complex_det(&u2.u) / complex_det(&u1.u);
        let num = ratio.ln();
        let abs_error = (num - Complex64::new(closed, 0.0)).norm();
        Ok(DeterminantReport {
            numeric: (num.re, num.im),
            closed_form: closed,
            abs_error,
            rel_error: abs_error / closed.abs().max(f64::MIN_POSITIVE),
            condition: (c1, c2),
        })
    }
}

/// `exp(Σ ⟨Λ_j,μ⟩ z_j/κ) Π_{i<j} (z_i − z_j)^{(Λ_i,Λ_j)/κ}` with the chamber phase, the
/// solution for `λ = 0`.
pub fn vacuum_solution(ex: &MasterExponents, z: &[f64]) -> Complex64 {
    let mut phase = 0.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            phase += ex.zz[i][j];
        }
    }
    Complex64::from_polar(ex.log_z_part(z).exp(), PI * phase)
}

/// Field conversion used by callers that keep exact parameters.
pub fn params_to_f64(p: &ConnectionParams<crate::rational::Q>) -> ConnectionParams<f64> {
    let f = |v: &[crate::rational::Q]| v.iter().map(f64::from_q).collect::<Vec<_>>();
    ConnectionParams {
        z: f(&p.z),
        mu: MuVector::new(f(&p.mu.alpha), f(&p.mu.lam)),
        kappa: f64::from_q(&p.kappa),
    }
}
