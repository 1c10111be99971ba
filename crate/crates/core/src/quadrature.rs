//! Gauss–Legendre panels with spectral cumulative integration.
//!
//! Iterated integrals are built by repeatedly taking antiderivatives of
//! nodal data, so each rule carries, besides nodes and weights, the matrix
//! `S[i][j] = ∫_{-1}^{x_i} ℓ_j(s) ds` of integrated Lagrange polynomials.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    integration: Vec<Vec<f64>>,
}

/// `(P_0(x), …, P_n(x))` by the three-term recurrence.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Newton iteration from the Tricomi initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(n, x);
            let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        let legendre_at_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let integration = nodes
            .iter()
            .map(|&xi| {
                let p = legendre_all(n, xi);
                // ∫_{-1}^{xi} P_k
                let q: Vec<f64> = (0..n)
                    .map(|k| {
                        if k == 0 {
                            xi + 1.0
                        } else {
                            (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64
                        }
                    })
                    .collect();
                (0..n)
                    .map(|j| {
                        weights[j]
                            * (0..n)
                                .map(|k| (2 * k + 1) as f64 / 2.0 * legendre_at_nodes[j][k] * q[k])
                                .sum::<f64>()
                    })
                    .collect()
            })
            .collect();
        GaussLegendre {
            nodes,
            weights,
            integration,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_a^b f` with this rule on a single panel.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// An interval `[lo, hi]` carrying also `1 - lo` and `1 - hi`, so that
/// nodes close to `1` keep their distance to `1` at full relative precision.
#[derive(Clone, Copy, Debug)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub lo_c: f64,
    pub hi_c: f64,
    width: f64,
}

impl Panel {
    pub fn new(lo: f64, hi: f64) -> Self {
        Panel {
            lo,
            hi,
            lo_c: 1.0 - lo,
            hi_c: 1.0 - hi,
            width: hi - lo,
        }
    }

    /// A panel given by complements `1 - lo`, `1 - hi`.
    pub fn from_complements(lo_c: f64, hi_c: f64) -> Self {
        Panel {
            lo: 1.0 - lo_c,
            hi: 1.0 - hi_c,
            lo_c,
            hi_c,
            width: lo_c - hi_c,
        }
    }

    /// Signed length `hi - lo`, computed from whichever representation is exact.
    pub fn width(&self) -> f64 {
        self.width
    }
}

/// Nodes of a panel layout, with the data needed for cumulative integration.
#[derive(Clone, Debug)]
pub struct PanelGrid {
    rule: GaussLegendre,
    panels: Vec<Panel>,
    /// `(t, 1 - t)` for each node, panel-major.
    pub points: Vec<(f64, f64)>,
}

impl PanelGrid {
    pub fn new(rule: GaussLegendre, panels: Vec<Panel>) -> Self {
        let mut points = Vec::with_capacity(panels.len() * rule.order());
        for p in &panels {
            let half = 0.5 * p.width();
            for &x in &rule.nodes {
                let off = half * (x + 1.0);
                points.push((p.lo + off, p.lo_c - off));
            }
        }
        PanelGrid {
            rule,
            panels,
            points,
        }
    }

    /// Uniform panels on `[a, b]`, additionally split at `breaks` inside it.
    pub fn uniform(order: usize, a: f64, b: f64, panels: usize, breaks: &[f64]) -> Self {
        let mut cuts: Vec<f64> = (0..=panels)
            .map(|i| a + (b - a) * i as f64 / panels as f64)
            .collect();
        cuts.extend(
            breaks
                .iter()
                .copied()
                .filter(|&x| x > a.min(b) && x < a.max(b)),
        );
        if b >= a {
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        } else {
            cuts.sort_by(|x, y| y.partial_cmp(x).unwrap());
        }
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        let panels = cuts.windows(2).map(|c| Panel::new(c[0], c[1])).collect();
        PanelGrid::new(GaussLegendre::new(order), panels)
    }

    /// Panels on `[0, 1]` refined geometrically toward both endpoints:
    /// `[0, δ], [δ, δ/r], …, [r/2, 1/2]` and the mirror image, `δ = r^levels / 2`.
    pub fn graded_unit(order: usize, ratio: f64, levels: usize) -> Self {
        let mut cuts = vec![0.5];
        let mut x = 0.5;
        for _ in 0..levels {
            x *= ratio;
            cuts.push(x);
        }
        cuts.push(0.0);
        cuts.reverse();
        let mut panels: Vec<Panel> = cuts.windows(2).map(|c| Panel::new(c[0], c[1])).collect();
        let mirrored: Vec<Panel> = cuts
            .windows(2)
            .rev()
            .map(|c| Panel::from_complements(c[1], c[0]))
            .collect();
        panels.extend(mirrored);
        PanelGrid::new(GaussLegendre::new(order), panels)
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_{start} f` over the whole layout, from nodal values.
    pub fn integral(&self, values: &[f64]) -> f64 {
        let p = self.rule.order();
        self.panels
            .iter()
            .enumerate()
            .map(|(k, panel)| {
                0.5 * panel.width()
                    * values[k * p..(k + 1) * p]
                        .iter()
                        .zip(&self.rule.weights)
                        .map(|(v, w)| v * w)
                        .sum::<f64>()
            })
            .sum()
    }

    /// Nodal values of `F(t) = ∫_{start}^{t} f`, from nodal values of `f`.
    pub fn antiderivative(&self, values: &[f64]) -> Vec<f64> {
        let p = self.rule.order();
        let mut out = Vec::with_capacity(values.len());
        let mut base = 0.0;
        for (k, panel) in self.panels.iter().enumerate() {
            let half = 0.5 * panel.width();
            let f = &values[k * p..(k + 1) * p];
            for row in &self.rule.integration {
                out.push(base + half * row.iter().zip(f).map(|(s, v)| s * v).sum::<f64>());
            }
            base += half
                * f.iter()
                    .zip(&self.rule.weights)
                    .map(|(v, w)| v * w)
                    .sum::<f64>();
        }
        out
    }
}
