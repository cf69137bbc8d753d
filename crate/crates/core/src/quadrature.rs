//! Composite Gauss-Legendre quadrature against the ensemble weight.
//!
//! [`build_quadrature`] truncates the real line where `exp(-N V)` has decayed
//! far below the requested tolerance, covers the remaining interval with
//! uniform panels, and doubles the panel count until polynomial moments agree
//! with a rule of twice the per-panel order; the doubled-order rule is the
//! one returned. The resulting [`QuadratureRule`]
//! integrates `f(x) exp(-N V(x))` for smooth `f`; [`QuadratureRule::refine_near`]
//! produces a graded copy for integrands with a near-real pole.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::scalar::{as_f64, real, Real};

/// Highest moment degree checked when a rule is built.
pub const MOMENT_DEGREE: usize = 128;

const MAX_PANELS: usize = 8192;

/// Nodes and weights for integration against `exp(-N V(x))`.
///
/// The weights already contain the exponential factor, so
/// `integrate(f)` approximates the integral of `f(x) exp(-N V(x))` over the
/// real line.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T: Real> {
    /// Strictly increasing abscissas.
    pub nodes: Vec<T>,
    /// Strictly positive weights, including the factor `exp(-N V)`.
    pub weights: Vec<T>,
    /// The rule covers `[-truncation_radius, truncation_radius]`.
    pub truncation_radius: T,
    /// Panel boundaries, strictly increasing, first `-R`, last `R`.
    pub panel_edges: Vec<T>,
    /// Gauss-Legendre points per panel.
    pub points_per_panel: usize,
    /// Moments up to this degree were validated against a doubled rule.
    pub degree_bound: usize,
    potential: Potential<T>,
    tol: T,
}

/// Builds a rule for `potential` that reproduces moments to relative
/// accuracy `tol`.
///
/// Requires `points_per_panel >= 8` and `0 < tol <= 1e-4`.
pub fn build_quadrature<T: Real>(
    potential: &Potential<T>,
    points_per_panel: usize,
    tol: T,
) -> Result<QuadratureRule<T>> {
    potential.validate()?;
    if points_per_panel < 8 {
        return Err(Error::Config(format!(
            "points_per_panel must be at least 8, got {points_per_panel}"
        )));
    }
    if !(tol > T::zero() && tol <= real(1e-4)) {
        return Err(Error::Config(format!(
            "quadrature tolerance must lie in (0, 1e-4], got {tol}"
        )));
    }
    let (radius, degree_target) = choose_truncation(potential, tol, MOMENT_DEGREE);
    let mut n_panels = 8;
    loop {
        let edges = uniform_edges(-radius, radius, n_panels);
        let rule = QuadratureRule::from_edges(potential, edges.clone(), points_per_panel, radius, tol);
        if let Some(bound) = rule.moments_converged(degree_target) {
            // Hand back the doubled-order rule that the check compared
            // against: once the two agree to `tol`, the finer one is well
            // past it.
            let mut fine =
                QuadratureRule::from_edges(potential, edges, 2 * points_per_panel, radius, tol);
            fine.degree_bound = bound;
            return Ok(fine);
        }
        if n_panels >= MAX_PANELS {
            return Err(Error::Config(format!(
                "quadrature moments did not converge with {MAX_PANELS} panels"
            )));
        }
        n_panels *= 2;
    }
}

impl<T: Real> QuadratureRule<T> {
    /// Uniform panels on `[-radius, radius]`, without moment validation.
    ///
    /// Intended for independent cross-checks that want a small rule of known
    /// shape; `degree_bound` is left at zero.
    pub fn fixed_panels(
        potential: &Potential<T>,
        radius: T,
        n_panels: usize,
        points_per_panel: usize,
    ) -> Result<Self> {
        potential.validate()?;
        if n_panels == 0 || points_per_panel < 2 || !(radius > T::zero()) {
            return Err(Error::Config(
                "fixed_panels needs a positive radius, at least one panel and two points".into(),
            ));
        }
        let edges = uniform_edges(-radius, radius, n_panels);
        Ok(Self::from_edges(
            potential,
            edges,
            points_per_panel,
            radius,
            real(1e-10),
        ))
    }

    fn from_edges(
        potential: &Potential<T>,
        panel_edges: Vec<T>,
        points_per_panel: usize,
        truncation_radius: T,
        tol: T,
    ) -> Self {
        let (nodes, weights) = assemble(potential, &panel_edges, points_per_panel);
        QuadratureRule {
            nodes,
            weights,
            truncation_radius,
            panel_edges,
            points_per_panel,
            degree_bound: 0,
            potential: potential.clone(),
            tol,
        }
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Approximates the integral of `f(x) exp(-N V(x))` over the real line.
    ///
    /// Fails with [`Error::NonFiniteIntegrand`] naming the offending node if
    /// `f` returns NaN or an infinity anywhere.
    pub fn integrate<F>(&self, mut f: F) -> Result<Complex<T>>
    where
        F: FnMut(T) -> Complex<T>,
    {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, (&x, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(x);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand {
                    index: i,
                    abscissa: as_f64(x),
                });
            }
            acc = acc + v.scale(w);
        }
        Ok(acc)
    }

    /// Sum of `|w_i| |f(x_i)|`, the scale against which cancellation in
    /// [`QuadratureRule::integrate`] must be judged.
    pub fn absolute_sum<F>(&self, mut f: F) -> T
    where
        F: FnMut(T) -> Complex<T>,
    {
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w.abs() * f(x).norm();
        }
        acc
    }

    /// A copy of the rule whose panels are geometrically graded toward the
    /// window `[center - dist, center + dist]`, down to panels of width
    /// `min_width` inside it.
    ///
    /// Panels are split in half while they are both wider than `min_width`
    /// and closer to the window than their own width, so panel width grows
    /// roughly linearly with distance from the window — the right resolution
    /// profile for a pole at distance `~min_width` from the axis.
    pub fn refine_near(&self, center: T, dist: T, min_width: T) -> Result<Self> {
        if !(dist >= T::zero()) || !(min_width > T::zero()) {
            return Err(Error::Config(
                "refine_near needs dist >= 0 and min_width > 0".into(),
            ));
        }
        let lo = center - dist;
        let hi = center + dist;
        let mut edges = Vec::with_capacity(self.panel_edges.len());
        edges.push(self.panel_edges[0]);
        for w in self.panel_edges.windows(2) {
            push_graded(&mut edges, w[0], w[1], lo, hi, min_width);
        }
        if edges.len() > 4 * MAX_PANELS {
            return Err(Error::Config(format!(
                "refinement produced {} panels, above the budget",
                edges.len() - 1
            )));
        }
        Ok(Self::from_edges(
            &self.potential,
            edges,
            self.points_per_panel,
            self.truncation_radius,
            self.tol,
        ))
    }

    /// The same panels with a different Gauss-Legendre order.
    pub fn with_points_per_panel(&self, points_per_panel: usize) -> Result<Self> {
        if points_per_panel < 2 {
            return Err(Error::Config(
                "points_per_panel must be at least 2".into(),
            ));
        }
        let mut rule = Self::from_edges(
            &self.potential,
            self.panel_edges.clone(),
            points_per_panel,
            self.truncation_radius,
            self.tol,
        );
        rule.degree_bound = 0;
        Ok(rule)
    }

    /// Extends the validated moment range so polynomials up to
    /// `max_degree` can be orthogonalized on this rule.
    ///
    /// Re-runs the panel-doubling loop if the current rule was only checked
    /// to a lower degree. Fails with [`Error::DegreeOutOfRange`] if moments
    /// of the needed order overflow the working precision.
    pub fn ensure_capacity(&mut self, max_degree: usize) -> Result<()> {
        let needed = 2 * max_degree + 2;
        if needed <= self.degree_bound {
            return Ok(());
        }
        let base_ppp = (self.points_per_panel / 2).max(8);
        let (radius, degree_target) =
            choose_truncation(&self.potential, self.tol, needed.max(MOMENT_DEGREE));
        if degree_target < needed {
            return Err(Error::DegreeOutOfRange {
                degree: needed,
                max: degree_target,
            });
        }
        let mut n_panels = (self.panel_edges.len() - 1).max(8);
        loop {
            let edges = uniform_edges(-radius, radius, n_panels);
            let rule = Self::from_edges(&self.potential, edges.clone(), base_ppp, radius, self.tol);
            if let Some(bound) = rule.moments_converged(degree_target) {
                if bound < needed {
                    return Err(Error::DegreeOutOfRange {
                        degree: needed,
                        max: bound,
                    });
                }
                let mut fine =
                    Self::from_edges(&self.potential, edges, 2 * base_ppp, radius, self.tol);
                fine.degree_bound = bound;
                *self = fine;
                return Ok(());
            }
            if n_panels >= MAX_PANELS {
                return Err(Error::Config(format!(
                    "quadrature moments did not converge with {MAX_PANELS} panels"
                )));
            }
            n_panels *= 2;
        }
    }

    /// Checks moments `0..=degree` against the same panels at doubled order.
    ///
    /// Returns the highest finite validated degree on success (which may be
    /// below `degree` only if a higher moment overflows), `None` if the two
    /// rules disagree beyond `tol` relative to the absolute mass.
    fn moments_converged(&self, degree: usize) -> Option<usize> {
        let fine = assemble(&self.potential, &self.panel_edges, 2 * self.points_per_panel);
        let tol = as_f64(self.tol);
        // Running powers, in f64 so that high moments of wide rules stay
        // representable regardless of the scalar type.
        let mut pc: Vec<f64> = self.nodes.iter().map(|_| 1.0).collect();
        let mut pf: Vec<f64> = fine.0.iter().map(|_| 1.0).collect();
        let mut validated = 0usize;
        for k in 0..=degree {
            let mut mc = 0.0;
            let mut sc = 0.0;
            for ((p, &x), &w) in pc.iter_mut().zip(&self.nodes).zip(&self.weights) {
                let w = as_f64(w);
                mc += w * *p;
                sc += w * p.abs();
                *p *= as_f64(x);
            }
            let mut mf = 0.0;
            for ((p, &x), &w) in pf.iter_mut().zip(&fine.0).zip(&fine.1) {
                mf += as_f64(w) * *p;
                *p *= as_f64(x);
            }
            if !(mc.is_finite() && mf.is_finite() && sc.is_finite()) {
                return Some(validated);
            }
            if (mc - mf).abs() > tol * sc.max(f64::MIN_POSITIVE) {
                return None;
            }
            validated = k;
        }
        Some(validated)
    }
}

/// Truncation radius and the moment degree actually validated.
///
/// Wide radii push `N V(R)` toward the scalar's exponent range, where the
/// weight underflows and high moments become junk, so the wanted degree is
/// halved until the edge weight stays comfortably representable.
fn choose_truncation<T: Real>(potential: &Potential<T>, tol: T, wanted: usize) -> (T, usize) {
    let limit = -(T::min_positive_value().ln()) * real::<T>(0.9);
    let (_, v_min) = potential.minimum();
    let n = real::<T>(potential.matrix_size as f64);
    let mut degree = wanted.max(8);
    loop {
        let radius = truncation_radius(potential, tol, degree);
        let shifted = (potential.value(radius) - v_min)
            .max(potential.value(-radius) - v_min)
            * n;
        if shifted <= limit || degree <= 8 {
            return (radius, degree);
        }
        degree /= 2;
    }
}

/// Where `exp(-N (V(x) - min V)) |x|^D` falls to `tol * 1e-4` on both tails,
/// with a 5% safety margin.
///
/// The `|x|^D` factor matters: the rule must integrate moments up to degree
/// `D`, whose integrands peak far out in the tail, so truncating where the
/// bare weight is small would silently lose their mass.
fn truncation_radius<T: Real>(potential: &Potential<T>, tol: T, max_moment_degree: usize) -> T {
    let (x_min, v_min) = potential.minimum();
    let n = real::<T>(potential.matrix_size as f64);
    let d = real::<T>(max_moment_degree as f64);
    let target = -(tol * real(1e-4)).ln();
    let excess =
        |x: T| n * (potential.value(x) - v_min) - d * x.abs().max(T::one()).ln() - target;
    let mut radius = T::zero();
    for dir in [T::one(), -T::one()] {
        let mut step = T::one();
        let mut x = x_min + dir * step;
        while excess(x) < T::zero() {
            step = step * real(2.0);
            x = x_min + dir * step;
            if !x.is_finite() {
                break;
            }
        }
        let (mut a, mut b) = (x_min, x);
        for _ in 0..200 {
            let mid = (a + b) / real(2.0);
            if mid == a || mid == b {
                break;
            }
            if excess(mid) < T::zero() {
                a = mid;
            } else {
                b = mid;
            }
        }
        radius = radius.max(b.abs());
    }
    radius * real(1.05)
}

fn uniform_edges<T: Real>(a: T, b: T, n_panels: usize) -> Vec<T> {
    let mut edges = Vec::with_capacity(n_panels + 1);
    for i in 0..=n_panels {
        let t = real::<T>(i as f64 / n_panels as f64);
        edges.push(a + (b - a) * t);
    }
    edges
}

fn push_graded<T: Real>(edges: &mut Vec<T>, a: T, b: T, lo: T, hi: T, min_width: T) {
    let width = b - a;
    let near = a <= hi + width && b >= lo - width;
    if width <= min_width || !near {
        edges.push(b);
        return;
    }
    let mid = (a + b) / real(2.0);
    if mid <= a || mid >= b {
        edges.push(b);
        return;
    }
    push_graded(edges, a, mid, lo, hi, min_width);
    push_graded(edges, mid, b, lo, hi, min_width);
}

fn assemble<T: Real>(
    potential: &Potential<T>,
    panel_edges: &[T],
    points_per_panel: usize,
) -> (Vec<T>, Vec<T>) {
    let (xi, omega) = gauss_legendre::<T>(points_per_panel);
    let n_panels = panel_edges.len() - 1;
    let mut nodes = Vec::with_capacity(n_panels * points_per_panel);
    let mut weights = Vec::with_capacity(n_panels * points_per_panel);
    for w in panel_edges.windows(2) {
        let mid = (w[0] + w[1]) / real(2.0);
        let half = (w[1] - w[0]) / real(2.0);
        for (&t, &om) in xi.iter().zip(&omega) {
            let x = mid + half * t;
            let weight = (half * om * potential.weight(x)).max(T::min_positive_value());
            nodes.push(x);
            weights.push(weight);
        }
    }
    (nodes, weights)
}

/// Plain Gauss-Legendre nodes and weights on `[a, b]` split into uniform
/// panels, with no potential factor.
pub fn composite_panels<T: Real>(a: T, b: T, n_panels: usize, points_per_panel: usize) -> (Vec<T>, Vec<T>) {
    let (xi, omega) = gauss_legendre::<T>(points_per_panel);
    let edges = uniform_edges(a, b, n_panels.max(1));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in edges.windows(2) {
        let mid = (w[0] + w[1]) / real(2.0);
        let half = (w[1] - w[0]) / real(2.0);
        for (&t, &om) in xi.iter().zip(&omega) {
            nodes.push(mid + half * t);
            weights.push(half * om);
        }
    }
    (nodes, weights)
}

/// Gauss-Legendre nodes and weights of order `n` on `[-1, 1]`.
///
/// Roots come from Newton iteration on the Legendre recurrence; the usual
/// asymptotic seed converges in a handful of steps for every order used
/// here. Computation runs in f64 and is converted to `T` at the end.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "gauss_legendre order must be positive");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (
        nodes.into_iter().map(real).collect(),
        weights.into_iter().map(real).collect(),
    )
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k_f = k as f64;
        let p2 = ((2.0 * k_f + 1.0) * x * p1 - k_f * p0) / (k_f + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
