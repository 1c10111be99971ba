//! Parallel transport in the truncated free algebra.
//!
//! A [`ConnectionPath`] is a degree-one, algebra-valued function `h(z)`;
//! transports solve `H' = h(z)·H`. Three independent routes are offered:
//! fixed-step RK4 ([`ode_transport`]), word-by-word iterated integrals
//! ([`chen_series`]) and the CBH integral formula for `log H`
//! ([`log_holonomy_cbh`], [`log_holonomy_cbh_direct`]).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cbh::{cbh_entry, cbh_map};
use crate::coeff::Q;
use crate::error::{Error, Result};
use crate::lie::LieElement;
use crate::quadrature::{GaussLegendre, PanelGrid};
use crate::series::{NumericSeries, Series};
use crate::word::Word;

type CoeffFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// `z ↦ Σ_j c_j(z) x_j` together with the points where it is undefined
/// and the points where it may jump.
#[derive(Clone)]
pub struct ConnectionPath {
    alphabet: usize,
    coeffs: Arc<CoeffFn>,
    singularities: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for ConnectionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectionPath")
            .field("alphabet", &self.alphabet)
            .field("singularities", &self.singularities)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl ConnectionPath {
    pub fn new(
        alphabet: usize,
        coeffs: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        singularities: Vec<f64>,
    ) -> Self {
        ConnectionPath {
            alphabet,
            coeffs: Arc::new(coeffs),
            singularities,
            breakpoints: Vec::new(),
        }
    }

    /// Marks points where the coefficients may be discontinuous.
    pub fn with_breakpoints(mut self, mut breaks: Vec<f64>) -> Self {
        breaks.sort_by(f64::total_cmp);
        self.breakpoints = breaks;
        self
    }

    pub fn constant(coeffs: Vec<f64>) -> Self {
        let alphabet = coeffs.len();
        ConnectionPath::new(alphabet, move |_| coeffs.clone(), Vec::new())
    }

    pub fn generator(alphabet: usize, i: u8) -> Self {
        let mut c = vec![0.0; alphabet];
        c[i as usize] = 1.0;
        ConnectionPath::constant(c)
    }

    /// `values[k]` on the `k`-th interval cut out by `breaks`.
    pub fn piecewise_constant(breaks: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != breaks.len() + 1 || values.is_empty() {
            return Err(Error::Structural(format!(
                "{} breakpoints need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        let alphabet = values[0].len();
        if values.iter().any(|v| v.len() != alphabet) {
            return Err(Error::Structural("piece values differ in length".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structural("breakpoints must increase".into()));
        }
        let cuts = breaks.clone();
        let path = ConnectionPath::new(
            alphabet,
            move |z| values[cuts.partition_point(|&b| b <= z)].clone(),
            Vec::new(),
        );
        Ok(path.with_breakpoints(breaks))
    }

    /// `c_j(z) = Σ_k coeffs[j][k] z^k`.
    pub fn polynomial(coeffs: Vec<Vec<f64>>) -> Self {
        let alphabet = coeffs.len();
        ConnectionPath::new(
            alphabet,
            move |z| {
                coeffs
                    .iter()
                    .map(|p| p.iter().rev().fold(0.0, |acc, &c| acc * z + c))
                    .collect()
            },
            Vec::new(),
        )
    }

    /// Polynomial path with coefficients drawn uniformly from `[-1, 1]`.
    pub fn random_polynomial(alphabet: usize, poly_degree: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..alphabet)
            .map(|_| {
                (0..=poly_degree)
                    .map(|_| rng.gen_range(-1.0..=1.0))
                    .collect()
            })
            .collect();
        ConnectionPath::polynomial(coeffs)
    }

    /// `A_0/z + A_1/(z - 1)`.
    pub fn kz() -> Self {
        ConnectionPath::new(2, |z| vec![1.0 / z, 1.0 / (z - 1.0)], vec![0.0, 1.0])
    }

    /// The KZ connection pulled back along `z = 1/(1 + e^{-s})`, `s ∈ ℝ`:
    /// `A_0(1 - z) - A_1 z`, bounded and free of singularities.
    pub fn kz_logistic() -> Self {
        ConnectionPath::new(
            2,
            |s: f64| {
                let z = 1.0 / (1.0 + (-s).exp());
                let zc = 1.0 / (1.0 + s.exp());
                vec![zc, -z]
            },
            Vec::new(),
        )
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn singularities(&self) -> &[f64] {
        &self.singularities
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coefficients(&self, z: f64) -> Vec<f64> {
        let c = (self.coeffs)(z);
        debug_assert_eq!(c.len(), self.alphabet);
        c
    }

    pub fn value(&self, z: f64, degree: usize) -> NumericSeries {
        let mut s = Series::zero(self.alphabet, degree);
        for (j, c) in self.coefficients(z).iter().enumerate() {
            s.add_term(Word::letter(j as u8), c);
        }
        s
    }

    fn check_interval(&self, a: f64, b: f64) -> Result<()> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("interval [{a}, {b}] is not finite")));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if let Some(s) = self.singularities.iter().find(|&&s| lo <= s && s <= hi) {
            return Err(Error::Domain(format!(
                "singular point {s} lies in the interval [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    fn breaks_inside(&self, a: f64, b: f64) -> Vec<f64> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.breakpoints
            .iter()
            .copied()
            .filter(|&x| lo < x && x < hi)
            .collect()
    }
}

/// A value together with an estimate of its absolute error.
#[derive(Clone, Debug)]
pub struct Estimated<T> {
    pub value: T,
    pub error_bound: f64,
}

/// Words up to a given length, indexed level by level with the first letter
/// most significant, so that left multiplication by a letter is an offset.
struct Layout {
    alphabet: usize,
    degree: usize,
    offsets: Vec<usize>,
}

impl Layout {
    fn new(alphabet: usize, degree: usize) -> Self {
        let mut offsets = vec![0];
        let mut size = 1;
        for _ in 0..=degree {
            let last = *offsets.last().unwrap();
            offsets.push(last + size);
            size *= alphabet;
        }
        Layout {
            alphabet,
            degree,
            offsets,
        }
    }

    fn size(&self) -> usize {
        self.offsets[self.degree + 1]
    }

    #[cfg(test)]
    fn index(&self, w: &Word) -> usize {
        let rank = w
            .letters()
            .iter()
            .fold(0, |acc, &l| acc * self.alphabet + l as usize);
        self.offsets[w.len()] + rank
    }

    fn word(&self, len: usize, mut rank: usize) -> Word {
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (rank % self.alphabet) as u8;
            rank /= self.alphabet;
        }
        Word::new(letters)
    }

    /// `out = (Σ_j c_j x_j) · g`.
    fn left_mul(&self, c: &[f64], g: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut block = 1;
        for len in 0..self.degree {
            let (src, dst) = (self.offsets[len], self.offsets[len + 1]);
            for (j, &cj) in c.iter().enumerate() {
                if cj == 0.0 {
                    continue;
                }
                let base = dst + j * block;
                for r in 0..block {
                    out[base + r] += cj * g[src + r];
                }
            }
            block *= self.alphabet;
        }
    }

    fn to_series(&self, g: &[f64]) -> NumericSeries {
        let mut s = Series::zero(self.alphabet, self.degree);
        for len in 0..=self.degree {
            for rank in 0..self.offsets[len + 1] - self.offsets[len] {
                s.add_term(self.word(len, rank), &g[self.offsets[len] + rank]);
            }
        }
        s
    }
}

fn rk4(path: &ConnectionPath, layout: &Layout, g: &mut [f64], z0: f64, z1: f64, steps: usize) {
    let n = layout.size();
    let h = (z1 - z0) / steps as f64;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    // A piece may end on a jump of the path: sample its ends from inside.
    let (first, last) = if z1 > z0 {
        (z0.next_up(), z1.next_down())
    } else {
        (z0.next_down(), z1.next_up())
    };
    for s in 0..steps {
        let z = z0 + h * s as f64;
        let c0 = path.coefficients(if s == 0 { first } else { z });
        let cm = path.coefficients(z + 0.5 * h);
        let c1 = path.coefficients(if s + 1 == steps { last } else { z + h });
        layout.left_mul(&c0, g, &mut k1);
        tmp.iter_mut()
            .zip(g.iter().zip(&k1))
            .for_each(|(t, (x, k))| *t = x + 0.5 * h * k);
        layout.left_mul(&cm, &tmp, &mut k2);
        tmp.iter_mut()
            .zip(g.iter().zip(&k2))
            .for_each(|(t, (x, k))| *t = x + 0.5 * h * k);
        layout.left_mul(&cm, &tmp, &mut k3);
        tmp.iter_mut()
            .zip(g.iter().zip(&k3))
            .for_each(|(t, (x, k))| *t = x + h * k);
        layout.left_mul(&c1, &tmp, &mut k4);
        for i in 0..n {
            g[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Solves `G' = path(z)·G`, `G(z0) = 1` by classical RK4 and returns `G(z1)`.
///
/// Interior breakpoints of the path are stepped onto exactly; `steps` is
/// shared between the resulting pieces in proportion to their length.
pub fn ode_transport(
    path: &ConnectionPath,
    z0: f64,
    z1: f64,
    steps: usize,
    degree: usize,
) -> Result<NumericSeries> {
    if steps == 0 {
        return Err(Error::Domain(
            "ode_transport needs at least one step".into(),
        ));
    }
    path.check_interval(z0, z1)?;
    let layout = Layout::new(path.alphabet, degree);
    let mut g = vec![0.0; layout.size()];
    g[0] = 1.0;
    if z0 == z1 {
        return Ok(layout.to_series(&g));
    }
    let mut cuts = vec![z0];
    let mut inner = path.breaks_inside(z0, z1);
    if z1 < z0 {
        inner.reverse();
    }
    cuts.extend(inner);
    cuts.push(z1);
    let total = (z1 - z0).abs();
    for w in cuts.windows(2) {
        let share = ((w[1] - w[0]).abs() / total * steps as f64).ceil().max(1.0) as usize;
        rk4(path, &layout, &mut g, w[0], w[1], share);
    }
    Ok(layout.to_series(&g))
}

/// Coefficients `h_0 = 1, h_1, …, h_order` of the holomorphic factor `H(u)`
/// of the solution `H(u)·u^{A_a}` of `G' = (A_a/u + A_b/(u - 1))·G` at `u = 0`.
///
/// They solve `(m - ad_{A_a}) h_m = -A_b (h_0 + ⋯ + h_{m-1})`; `ad_{A_a}`
/// raises degree, so the inverse is a finite Neumann series.
pub fn boundary_coefficients(a: u8, b: u8, order: usize, degree: usize) -> Vec<Series> {
    let aa = Series::generator(2, degree, a);
    let ab = Series::generator(2, degree, b);
    let mut hs = vec![Series::one(2, degree)];
    let mut partial = Series::one(2, degree);
    for m in 1..=order {
        let rhs = -(&ab * &partial);
        let inv_m = Q::new(1.into(), (m as i64).into());
        let mut term = rhs.scale(&inv_m);
        let mut h = Series::zero(2, degree);
        while !term.is_zero() {
            h = &h + &term;
            term = (&(&aa * &term) - &(&term * &aa)).scale(&inv_m);
        }
        partial = &partial + &h;
        hs.push(h);
    }
    hs
}

fn evaluate_boundary(hs: &[Series], u: f64) -> NumericSeries {
    let degree = hs[0].degree();
    let mut out = Series::zero(2, degree);
    let mut power = 1.0;
    for h in hs {
        out = &out + &h.map_coeffs(|c| to_f64(c) * power);
        power *= u;
    }
    out
}

fn to_f64(c: &Q) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().expect("finite rational")
}

/// `ε^{A}` as `exp(log(ε)·A)` in the truncated algebra.
fn power_of_eps(letter: u8, eps: f64, sign: f64, degree: usize) -> NumericSeries {
    Series::monomial(2, degree, Word::letter(letter), sign * eps.ln())
        .exp()
        .expect("nilpotent exponential")
}

/// The finite-`ε` regularized associator `ε^{-A_1}·T(ε → 1-ε)·ε^{A_0}`.
pub fn kz_associator_numeric(degree: usize, eps: f64, steps: usize) -> Result<NumericSeries> {
    kz_associator(degree, eps, steps, 0)
}

/// `G_1(z)^{-1} G_0(z)` with both renormalized solutions approximated near
/// their endpoints by `H(u)·u^{A}`, `H` truncated at `u^{boundary_order}`.
///
/// Order 0 is the plain regularization; order `m` leaves an error of
/// size `ε^{m+1}` up to powers of `log ε`.
pub fn kz_associator(
    degree: usize,
    eps: f64,
    steps: usize,
    boundary_order: usize,
) -> Result<NumericSeries> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("ε must lie in (0, 1/2), got {eps}")));
    }
    // The transport from ε to 1 - ε is computed in the logistic variable,
    // where the equation has bounded coefficients.
    let s0 = (eps / (1.0 - eps)).ln();
    let transport = ode_transport(&ConnectionPath::kz_logistic(), s0, -s0, steps, degree)?;
    let h0 = evaluate_boundary(&boundary_coefficients(0, 1, boundary_order, degree), eps);
    let h1 = evaluate_boundary(&boundary_coefficients(1, 0, boundary_order, degree), eps);
    let left = &power_of_eps(1, eps, -1.0, degree) * &h1.inverse_unipotent()?;
    let right = &h0 * &power_of_eps(0, eps, 1.0, degree);
    Ok(&(&left * &transport) * &right)
}

/// Parameters of the two-point extrapolation in `ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KzSchedule {
    pub eps: f64,
    /// The second point is `ratio·eps`.
    pub ratio: f64,
    pub steps: usize,
    pub boundary_order: usize,
}

impl Default for KzSchedule {
    fn default() -> Self {
        KzSchedule {
            eps: 1e-3,
            ratio: 0.5,
            steps: 20_000,
            boundary_order: 2,
        }
    }
}

/// Richardson extrapolation of [`kz_associator`] from `ε` and `ratio·ε`,
/// assuming an error of order `ε^{boundary_order + 1}`. The error bound is
/// the size of the correction.
pub fn kz_associator_extrapolated(
    degree: usize,
    schedule: &KzSchedule,
) -> Result<Estimated<NumericSeries>> {
    let r = schedule.ratio;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("ratio must lie in (0, 1), got {r}")));
    }
    let (coarse, fine) = rayon::join(
        || {
            kz_associator(
                degree,
                schedule.eps,
                schedule.steps,
                schedule.boundary_order,
            )
        },
        || {
            kz_associator(
                degree,
                r * schedule.eps,
                schedule.steps,
                schedule.boundary_order,
            )
        },
    );
    let (coarse, fine) = (coarse?, fine?);
    let rp = r.powi(schedule.boundary_order as i32 + 1);
    let value = (&fine - &coarse.scale(&rp)).scale(&(1.0 / (1.0 - rp)));
    let error_bound = value.max_abs_diff(&fine);
    Ok(Estimated { value, error_bound })
}

/// Quadrature layout for iterated integrals over `a ≤ z_1 ≤ ⋯ ≤ z_n ≤ b`.
///
/// Integrals are computed with `panels·2^r` panels for `r = 0, 1, …` until
/// two successive results differ by at most `tol`, or `refinements` is
/// exhausted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexIntegrator {
    pub order: usize,
    pub panels: usize,
    pub refinements: usize,
    pub tol: f64,
}

impl Default for SimplexIntegrator {
    fn default() -> Self {
        SimplexIntegrator {
            order: 12,
            panels: 2,
            refinements: 6,
            tol: 1e-10,
        }
    }
}

impl SimplexIntegrator {
    fn refine<T>(
        &self,
        mut compute: impl FnMut(usize) -> Result<T>,
        diff: impl Fn(&T, &T) -> (f64, f64),
    ) -> Result<Estimated<T>> {
        if self.order == 0 || self.panels == 0 || !(self.tol > 0.0) {
            return Err(Error::Domain(format!("invalid integrator {self:?}")));
        }
        let mut prev = compute(self.panels)?;
        let mut last = (f64::NAN, f64::INFINITY);
        for r in 1..=self.refinements {
            let next = compute(self.panels << r)?;
            let (value, d) = diff(&prev, &next);
            let bound = d + 64.0 * f64::EPSILON * value.abs().max(1.0);
            if bound <= self.tol {
                return Ok(Estimated {
                    value: next,
                    error_bound: bound,
                });
            }
            last = (value, bound);
            prev = next;
        }
        Err(Error::Resource {
            value: last.0,
            bound: last.1,
            tol: self.tol,
        })
    }
}

fn worst_series(a: &NumericSeries, b: &NumericSeries) -> (f64, f64) {
    let mut worst = (0.0, 0.0);
    for (w, c) in b.terms() {
        let d = (c - a.coeff(w)).abs();
        if d > worst.1 {
            worst = (*c, d);
        }
    }
    for (w, c) in a.terms() {
        if b.coeff(w) == 0.0 && c.abs() > worst.1 {
            worst = (0.0, c.abs());
        }
    }
    worst
}

fn worst_lie(a: &LieElement<f64>, b: &LieElement<f64>) -> (f64, f64) {
    worst_series(&a.expand(), &b.expand())
}

fn chen_on_grid(
    path: &ConnectionPath,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
    degree: usize,
) -> NumericSeries {
    let grid = PanelGrid::uniform(order, a, b, panels, &path.breaks_inside(a, b));
    let samples: Vec<Vec<f64>> = grid
        .points
        .iter()
        .map(|&(t, _)| path.coefficients(t))
        .collect();
    let alphabet = path.alphabet;
    let letter: Vec<Vec<f64>> = (0..alphabet)
        .map(|j| samples.iter().map(|c| c[j]).collect())
        .collect();
    let mut out = Series::zero(alphabet, degree);
    out.add_term(Word::empty(), &1.0);
    let mut level: Vec<(Word, Vec<f64>)> = vec![(Word::empty(), vec![1.0; grid.len()])];
    for len in 1..=degree {
        let last = len == degree;
        let next: Vec<(Word, f64, Vec<f64>)> = level
            .par_iter()
            .flat_map_iter(|(w, f)| {
                let grid = &grid;
                letter.iter().enumerate().map(move |(j, cj)| {
                    let integrand: Vec<f64> = cj.iter().zip(f).map(|(c, v)| c * v).collect();
                    let total = grid.integral(&integrand);
                    let nodal = if last {
                        Vec::new()
                    } else {
                        grid.antiderivative(&integrand)
                    };
                    (Word::letter(j as u8).concat(w), total, nodal)
                })
            })
            .collect();
        level = Vec::with_capacity(next.len());
        for (w, total, nodal) in next {
            out.add_term(w.clone(), &total);
            level.push((w, nodal));
        }
    }
    out
}

/// Iterated integrals of `path` over `[a, b]`: the coefficient of
/// `x_{j_n}⋯x_{j_1}` is `∫_{a≤z_1≤⋯≤z_n≤b} c_{j_n}(z_n)⋯c_{j_1}(z_1)`.
pub fn chen_series(
    path: &ConnectionPath,
    a: f64,
    b: f64,
    integrator: &SimplexIntegrator,
    degree: usize,
) -> Result<Estimated<NumericSeries>> {
    path.check_interval(a, b)?;
    integrator.refine(
        |panels| Ok(chen_on_grid(path, a, b, integrator.order, panels, degree)),
        worst_series,
    )
}

/// `log H` for the holonomy `H` of `path` over `[a, b]`, as `cbh_n` of the
/// Chen series.
pub fn log_holonomy_cbh(
    path: &ConnectionPath,
    a: f64,
    b: f64,
    integrator: &SimplexIntegrator,
    degree: usize,
) -> Result<Estimated<LieElement<f64>>> {
    path.check_interval(a, b)?;
    integrator.refine(
        |panels| {
            Ok(cbh_map(&chen_on_grid(
                path,
                a,
                b,
                integrator.order,
                panels,
                degree,
            )))
        },
        worst_lie,
    )
}

/// Nested Gauss–Legendre nodes over `a ≤ z_1 ≤ ⋯ ≤ z_n ≤ b`; every level
/// splits its interval `[a, z_{k+1}]` at the path's breakpoints.
struct NestedRule<'a> {
    rule: GaussLegendre,
    a: f64,
    span: f64,
    panels: usize,
    breaks: &'a [f64],
}

impl NestedRule<'_> {
    fn nodes(&self, hi: f64) -> Vec<(f64, f64)> {
        let count = ((self.panels as f64) * (hi - self.a) / self.span)
            .ceil()
            .max(1.0) as usize;
        let mut cuts: Vec<f64> = (0..=count)
            .map(|i| self.a + (hi - self.a) * i as f64 / count as f64)
            .collect();
        cuts.extend(
            self.breaks
                .iter()
                .copied()
                .filter(|&x| self.a < x && x < hi),
        );
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        let mut out = Vec::new();
        for c in cuts.windows(2) {
            let (mid, half) = (0.5 * (c[0] + c[1]), 0.5 * (c[1] - c[0]));
            for (&x, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }
}

fn cbh_integral_on_grid(
    path: &ConnectionPath,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
    degree: usize,
) -> LieElement<f64> {
    let alphabet = path.alphabet;
    let breaks = path.breaks_inside(a, b);
    let nested = NestedRule {
        rule: GaussLegendre::new(order),
        a,
        span: b - a,
        panels,
        breaks: &breaks,
    };
    let mut total = Series::zero(alphabet, degree);
    for n in 1..=degree {
        let entry = cbh_entry(n);
        let perms: Vec<(Vec<usize>, f64)> = entry
            .expansion
            .iter()
            .map(|(p, c)| (p.iter().map(|&i| i as usize).collect(), to_f64(c)))
            .collect();
        let words = alphabet.pow(n as u32);
        // Outer variable z_n first; `args[p]` holds h at the p-th CBH argument,
        // i.e. at z_{n-p}.
        let outer = nested.nodes(b);
        let acc: Vec<f64> = outer
            .par_iter()
            .map(|&(z, w)| {
                let mut acc = vec![0.0; words];
                let mut args = vec![path.coefficients(z)];
                visit(&nested, path, &perms, n, z, w, &mut args, &mut acc);
                acc
            })
            .reduce(
                || vec![0.0; words],
                |mut x, y| {
                    x.iter_mut().zip(y).for_each(|(u, v)| *u += v);
                    x
                },
            );
        for (rank, v) in acc.into_iter().enumerate() {
            let mut letters = vec![0u8; n];
            let mut r = rank;
            for slot in letters.iter_mut().rev() {
                *slot = (r % alphabet) as u8;
                r /= alphabet;
            }
            total.add_term(Word::new(letters), &v);
        }
    }
    LieElement::decompose(&total).0
}

#[allow(clippy::too_many_arguments)]
fn visit(
    nested: &NestedRule<'_>,
    path: &ConnectionPath,
    perms: &[(Vec<usize>, f64)],
    n: usize,
    hi: f64,
    weight: f64,
    args: &mut Vec<Vec<f64>>,
    acc: &mut [f64],
) {
    if args.len() == n {
        let alphabet = path.alphabet;
        for (rank, slot) in acc.iter_mut().enumerate() {
            let mut r = rank;
            let mut letters = vec![0usize; n];
            for l in letters.iter_mut().rev() {
                *l = r % alphabet;
                r /= alphabet;
            }
            let mut v = 0.0;
            for (perm, c) in perms {
                let mut prod = *c;
                for (k, &p) in perm.iter().enumerate() {
                    prod *= args[p][letters[k]];
                }
                v += prod;
            }
            *slot += weight * v;
        }
        return;
    }
    for (z, w) in nested.nodes(hi) {
        args.push(path.coefficients(z));
        visit(nested, path, perms, n, z, weight * w, args, acc);
        args.pop();
    }
}

/// `Σ_{n≤N} ∫_{a≤z_1≤⋯≤z_n≤b} CBH_n(h(z_n), …, h(z_1))`, integrating the
/// sampled CBH polynomials directly over the simplex. The cost grows like
/// `(order·panels)^N`, so this is meant for cross-checks at small degree.
pub fn log_holonomy_cbh_direct(
    path: &ConnectionPath,
    a: f64,
    b: f64,
    integrator: &SimplexIntegrator,
    degree: usize,
) -> Result<Estimated<LieElement<f64>>> {
    path.check_interval(a, b)?;
    if b < a {
        return Err(Error::Domain(format!(
            "direct simplex integral needs a ≤ b, got [{a}, {b}]"
        )));
    }
    integrator.refine(
        |panels| {
            Ok(cbh_integral_on_grid(
                path,
                a,
                b,
                integrator.order,
                panels,
                degree,
            ))
        },
        worst_lie,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};
    use num_traits::Zero;

    fn exp_generator(alphabet: usize, degree: usize, i: u8, scale: &Q) -> Series {
        let mut out = Series::one(alphabet, degree);
        let mut coeff = Q::from_integer(1.into());
        for k in 1..=degree {
            coeff = coeff * scale / qi(k as i64);
            if coeff.is_zero() {
                break;
            }
            out.add_term(Word::new(vec![i; k]), &coeff);
        }
        out
    }

    fn w(v: &[u8]) -> Word {
        Word::new(v.to_vec())
    }

    #[test]
    fn layout_indexing() {
        let layout = Layout::new(3, 3);
        assert_eq!(layout.size(), 1 + 3 + 9 + 27);
        for len in 0..=3 {
            for word in Word::all_of_length(3, len) {
                let i = layout.index(&word);
                assert_eq!(layout.word(len, i - layout.offsets[len]), word);
            }
        }
    }

    #[test]
    fn transport_of_constant_and_zero_paths() {
        let g = ode_transport(&ConnectionPath::generator(2, 0), 0.0, 1.0, 200, 4).unwrap();
        let exact = exp_generator(2, 4, 0, &qi(1)).map_coeffs(to_f64);
        assert!(g.max_abs_diff(&exact) < 1e-10);
        let zero =
            ode_transport(&ConnectionPath::constant(vec![0.0, 0.0]), 0.0, 1.0, 10, 4).unwrap();
        assert_eq!(zero, Series::one(2, 4));
    }

    #[test]
    fn transport_composes() {
        let path = ConnectionPath::random_polynomial(2, 3, 11);
        let ab = ode_transport(&path, 0.0, 0.4, 400, 4).unwrap();
        let bc = ode_transport(&path, 0.4, 1.0, 600, 4).unwrap();
        let ac = ode_transport(&path, 0.0, 1.0, 1000, 4).unwrap();
        assert!((&bc * &ab).max_abs_diff(&ac) < 1e-11);
        assert_eq!(ac.constant_term(), 1.0);
    }

    #[test]
    fn transport_rejects_singularities() {
        let err = ode_transport(&ConnectionPath::kz(), 0.0, 0.5, 10, 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(ode_transport(&ConnectionPath::kz(), 0.2, 0.8, 0, 2).is_err());
        assert!(kz_associator_numeric(2, 0.7, 10).is_err());
    }

    #[test]
    fn boundary_coefficients_solve_recursion() {
        let hs = boundary_coefficients(0, 1, 2, 3);
        let a0 = Series::generator(2, 3, 0);
        let a1 = Series::generator(2, 3, 1);
        let mut partial = Series::one(2, 3);
        for (m, h) in hs.iter().enumerate().skip(1) {
            let lhs = &h.scale(&qi(m as i64)) - &(&(&a0 * h) - &(h * &a0));
            assert_eq!(lhs, -(&a1 * &partial));
            partial = &partial + h;
        }
        // h_1 = -A_1 + [A_0, A_1] - … at low degree
        assert_eq!(hs[1].coeff(&w(&[1])), qi(-1));
        assert_eq!(hs[1].coeff(&w(&[0, 1])), qi(-1));
        assert_eq!(hs[1].coeff(&w(&[1, 0])), qi(1));
        assert_eq!(hs[2].coeff(&w(&[1])), q(-1, 2));
    }

    #[test]
    fn associator_low_degrees() {
        let phi = kz_associator(2, 1e-3, 4000, 2).unwrap();
        assert!((phi.constant_term() - 1.0).abs() < 1e-14);
        assert!(phi.coeff(&w(&[0])).abs() < 1e-9, "{}", phi.coeff(&w(&[0])));
        assert!(phi.coeff(&w(&[1])).abs() < 1e-9);
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((phi.coeff(&w(&[0, 1])) + z2).abs() < 1e-5);
        assert!((phi.coeff(&w(&[1, 0])) - z2).abs() < 1e-5);
    }

    #[test]
    fn chen_of_constant_path_is_exponential() {
        let est = chen_series(
            &ConnectionPath::generator(2, 0),
            0.0,
            1.0,
            &Default::default(),
            4,
        )
        .unwrap();
        let exact = exp_generator(2, 4, 0, &qi(1)).map_coeffs(to_f64);
        assert!(est.value.max_abs_diff(&exact) < 1e-12);
        assert!(est.error_bound <= 1e-10);
    }

    #[test]
    fn chen_of_piecewise_path() {
        let path =
            ConnectionPath::piecewise_constant(vec![0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
                .unwrap();
        let est = chen_series(&path, 0.0, 1.0, &Default::default(), 4).unwrap();
        let half = q(1, 2);
        let exact = &exp_generator(2, 4, 1, &half) * &exp_generator(2, 4, 0, &half);
        assert!(est.value.max_abs_diff(&exact.map_coeffs(to_f64)) < 1e-12);
    }

    #[test]
    fn log_holonomy_of_constant_path() {
        let path = ConnectionPath::constant(vec![0.3, -0.7]);
        let est = log_holonomy_cbh(&path, 0.0, 1.0, &Default::default(), 4).unwrap();
        let expected = path.value(0.0, 4);
        assert!(est.value.expand().max_abs_diff(&expected) <= 1e-10);
    }

    #[test]
    fn direct_and_chen_forms_agree() {
        let path = ConnectionPath::random_polynomial(2, 2, 5);
        let integrator = SimplexIntegrator {
            order: 6,
            panels: 1,
            refinements: 3,
            tol: 1e-9,
        };
        let chen = log_holonomy_cbh(&path, 0.0, 1.0, &integrator, 3).unwrap();
        let direct = log_holonomy_cbh_direct(&path, 0.0, 1.0, &integrator, 3).unwrap();
        let diff = chen.value.max_abs_diff(&direct.value);
        assert!(
            diff <= chen.error_bound + direct.error_bound + 1e-12,
            "{diff}"
        );
    }

    #[test]
    fn piecewise_validation() {
        assert!(ConnectionPath::piecewise_constant(vec![0.5], vec![vec![1.0]]).is_err());
        assert!(ConnectionPath::piecewise_constant(vec![0.5, 0.2], vec![vec![1.0]; 3]).is_err());
    }
}
