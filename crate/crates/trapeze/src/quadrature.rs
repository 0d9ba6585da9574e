//! Composite Gauss–Legendre quadrature with adaptive panel doubling.

use std::sync::OnceLock;

/// Nodes per panel of the composite rule.
pub const PANEL_ORDER: usize = 8;
/// Starting density in nodes per unit parameter.
pub const NODES_PER_UNIT: usize = 64;
/// Relative agreement required between successive refinements.
pub const REL_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 14;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Rule {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    }

    /// Integrate `f` over [a, b] with a single application of the rule.
    pub fn apply<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared panel rule.
pub fn panel_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| Rule::new(PANEL_ORDER))
}

/// Composite rule with `panels` equal panels on [a, b].
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let rule = panel_rule();
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        acc += rule.apply(lo, lo + h, &mut f);
    }
    acc
}

/// Integrate over [a, b] starting at [`NODES_PER_UNIT`] nodes per unit
/// length, doubling until two successive values agree to [`REL_TOL`]
/// relative to `max(|I|, scale)`.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, scale: f64, mut f: F) -> f64 {
    if a == b {
        return 0.0;
    }
    let base = ((NODES_PER_UNIT as f64 * (b - a).abs()) / PANEL_ORDER as f64).ceil() as usize;
    let mut panels = base.max(1);
    let mut prev = composite(a, b, panels, &mut f);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = composite(a, b, panels, &mut f);
        if (next - prev).abs() <= REL_TOL * next.abs().max(scale) {
            return next;
        }
        prev = next;
    }
    prev
}
