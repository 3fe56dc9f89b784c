//! Legendre-Fenchel transforms of moduli, Lipschitz regularization, and the
//! two-sided sandwich estimate on commutative samples.
//!
//! A concave modulus through the origin is determined by the penalty curve
//! delta(s) = (1/2) sup_t (omega(t) - s t): the modulus is recovered as
//! omega(t) = min_s (2 delta(s) + s t). The same quantity delta(s) prices the
//! best approximation of a function f by s-Lipschitz functions, realized
//! here by the explicit regularization f_s = delta(s) + inf_y (f(y) + s d(., y)).
//! Feeding the normalized regularizations back into the generating set turns
//! the pointwise bound ||pi1(f) - pi2(f)|| <= omega_f(d_K(pi1, pi2)) into an
//! identity-level inequality that holds sample by sample, which is what the
//! sandwich check certifies.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use crate::algebra::{diagonal_element, AlgebraElement, GeneratingSet};
use crate::error::{Error, Result};
use crate::modulus::{
    concave_majorant, pair_deviations, pair_distances, ConcaveFn, EmpiricalModulus,
};
use crate::reps::RepPairSet;
use crate::transport::{lipschitz_generators, FiniteMetricSpace};

/// A real function tabulated on a strictly increasing finite grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid { context: "grid function".into() });
        }
        if grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "grid has {} nodes but {} values were supplied",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: Some("grid function data".into()) });
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("grid nodes must be strictly increasing"));
        }
        Ok(GridFn { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn sorted_dedup(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    xs.dedup();
    xs
}

/// The discrete Legendre-Fenchel conjugate h*(s) = max_t (s t - h(t)), with
/// the max over the tabulation grid of `h`.
pub fn fenchel_conjugate(h: &GridFn, s_grid: &[f64]) -> Result<GridFn> {
    if s_grid.is_empty() {
        return Err(Error::EmptyGrid { context: "conjugate slope grid".into() });
    }
    if s_grid.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite { context: Some("conjugate slope grid".into()) });
    }
    let slopes = sorted_dedup(s_grid.to_vec());
    let values = slopes
        .iter()
        .map(|&s| {
            h.grid
                .iter()
                .zip(&h.values)
                .map(|(&t, &v)| s * t - v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    GridFn::new(slopes, values)
}

/// Sign of the cross product (b - a) x (p - a), computed exactly.
/// Positive: p strictly above the line through a and b (with a.0 < b.0).
fn exact_side(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.0, y: a.1 },
        robust::Coord { x: b.0, y: b.1 },
        robust::Coord { x: p.0, y: p.1 },
    )
}

/// Indices of the lower convex hull vertices of the tabulated points, left
/// to right. Points lying exactly on a hull edge are not vertices.
fn lower_hull_indices(h: &GridFn) -> Vec<usize> {
    let pt = |i: usize| (h.grid[i], h.values[i]);
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..h.grid.len() {
        while hull.len() >= 2 {
            let a = pt(hull[hull.len() - 2]);
            let b = pt(hull[hull.len() - 1]);
            // b on or above the chord a -> p: drop it.
            if exact_side(a, pt(i), b) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Slope grid on which the double conjugate reproduces the convex lower
/// envelope exactly: the hull slopes themselves, plus 0. Only the test
/// cross-check takes the conjugation route; production code assembles the
/// envelope geometrically in [`biconjugate`].
#[cfg(test)]
fn envelope_slopes(h: &GridFn) -> Vec<f64> {
    let hull = lower_hull_indices(h);
    let mut slopes: Vec<f64> = hull
        .windows(2)
        .map(|w| (h.values[w[1]] - h.values[w[0]]) / (h.grid[w[1]] - h.grid[w[0]]))
        .collect();
    slopes.push(0.0);
    sorted_dedup(slopes)
}

/// The double conjugate h** on the grid of `h`. With the slope grid chosen
/// from the lower hull of `h`, every supporting line of the envelope is
/// available, so h** is the convex lower envelope of the tabulated points:
/// h** <= h, with equality iff the data is convex.
///
/// The envelope is assembled directly from the hull: vertices keep their
/// input values verbatim and interior points take the chord value, certified
/// by an exact orientation predicate to land on or above the chord and never
/// above the input. That discipline makes convexification literally
/// idempotent bit for bit; agreement with the conjugate-of-the-conjugate
/// route is checked in the tests.
pub fn biconjugate(h: &GridFn) -> Result<GridFn> {
    let hull = lower_hull_indices(h);
    let mut values = h.values.clone();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let va = (h.grid[a], h.values[a]);
        let vb = (h.grid[b], h.values[b]);
        let slope = (vb.1 - va.1) / (vb.0 - va.0);
        for i in (a + 1)..b {
            let t = h.grid[i];
            let mut y = va.1 + (t - va.0) * slope;
            // Rounding may leave the chord value below the exact chord; an
            // exponentially growing bump lifts it back with a deterministic
            // result even under heavy cancellation.
            let mut bump = f64::EPSILON * va.1.abs().max(vb.1.abs()).max(f64::MIN_POSITIVE);
            let mut guard = 0;
            while exact_side(va, vb, (t, y)) < 0.0 {
                y += bump;
                bump *= 2.0;
                guard += 1;
                assert!(guard <= 128, "chord interpolation failed to stabilize");
            }
            values[i] = y.min(h.values[i]);
        }
    }
    GridFn::new(h.grid.clone(), values)
}

/// The penalty delta(s) = (1/2) max_t (omega(t) - s t) for s >= 0.
///
/// The max over t ranges over [0, infinity); omega is affine between its
/// breakpoints and constant beyond the last one, so for s >= 0 the supremum
/// is attained at a breakpoint and the origin keeps it nonnegative.
pub fn delta_from_modulus(omega: &ConcaveFn, s: f64) -> f64 {
    assert!(s.is_finite() && s >= 0.0, "penalty slope must be finite and nonnegative");
    0.5 * omega
        .breakpoints()
        .iter()
        .map(|&(t, v)| v - s * t)
        .fold(0.0, f64::max)
}

/// Tabulates delta on the informative slopes: 0 together with the positive
/// hull slopes of omega. Between consecutive hull slopes delta is affine, so
/// this grid determines the whole curve.
pub fn delta_curve(omega: &ConcaveFn) -> GridFn {
    let mut grid: Vec<f64> = omega.slopes().into_iter().filter(|s| *s > 0.0).collect();
    grid.push(0.0);
    let grid = sorted_dedup(grid);
    let values = grid.iter().map(|&s| delta_from_modulus(omega, s)).collect();
    GridFn::new(grid, values).expect("slope grid is nonempty, sorted, finite")
}

/// Rebuilds a modulus from penalty samples: omega(t) = min_s (2 delta(s) + s t).
///
/// Exact at the breakpoints of the original modulus whenever `delta` was
/// tabulated on its hull slopes (including 0 for the constant tail).
pub fn reconstruct_modulus(delta: &GridFn, t_grid: &[f64]) -> Result<GridFn> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid { context: "reconstruction grid".into() });
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite { context: Some("reconstruction grid".into()) });
    }
    let grid = sorted_dedup(t_grid.to_vec());
    let values = grid
        .iter()
        .map(|&t| {
            delta
                .grid
                .iter()
                .zip(&delta.values)
                .map(|(&s, &d)| 2.0 * d + s * t)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    GridFn::new(grid, values)
}

/// A real-valued function on a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFunctionOnSpace {
    space: FiniteMetricSpace,
    values: Vec<f64>,
}

impl RealFunctionOnSpace {
    pub fn new(space: &FiniteMetricSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                space.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: Some("function values".into()) });
        }
        Ok(RealFunctionOnSpace { space: space.clone(), values })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The function as a diagonal element of C(X).
    pub fn to_element(&self) -> AlgebraElement {
        let coords: Vec<Complex64> =
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        diagonal_element(&self.space.algebra(), &coords)
            .expect("commutative algebra accepts any diagonal")
    }
}

fn function_provenance(space: &FiniteMetricSpace, parts: &[&[f64]]) -> u64 {
    let mut hasher = DefaultHasher::new();
    space.len().hash(&mut hasher);
    for i in 0..space.len() {
        for j in 0..space.len() {
            space.dist(i, j).to_bits().hash(&mut hasher);
        }
    }
    for part in parts {
        for v in *part {
            v.to_bits().hash(&mut hasher);
        }
    }
    hasher.finish()
}

/// The least concave majorant of the raw modulus of continuity of `f`:
/// samples (d(x,y), |f(x) - f(y)|) over all pairs of points.
pub fn function_modulus(f: &RealFunctionOnSpace) -> Result<ConcaveFn> {
    modulus_of_parts(&f.space, &[f.values()])
}

/// Modulus of the complex function re + i*im on a shared space; deviations
/// are measured in the complex absolute value.
pub fn complex_function_modulus(
    re: &RealFunctionOnSpace,
    im: &RealFunctionOnSpace,
) -> Result<ConcaveFn> {
    if re.space != im.space {
        return Err(Error::SpaceMismatch);
    }
    modulus_of_parts(&re.space, &[re.values(), im.values()])
}

fn modulus_of_parts(space: &FiniteMetricSpace, parts: &[&[f64]]) -> Result<ConcaveFn> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mut samples = Vec::with_capacity(n * (n - 1) / 2);
    for x in 0..n {
        for y in (x + 1)..n {
            let dev: f64 = parts
                .iter()
                .map(|vals| (vals[x] - vals[y]).powi(2))
                .sum::<f64>()
                .sqrt();
            samples.push((space.dist(x, y), dev));
        }
    }
    let empirical = EmpiricalModulus::from_samples(samples, function_provenance(space, parts))?;
    concave_majorant(&empirical)
}

/// Result of regularizing `f` at Lipschitz level `s`.
#[derive(Debug, Clone)]
pub struct LipRegularized {
    /// f_s = delta(s) + inf_y (f(y) + s d(., y)).
    pub regularized: RealFunctionOnSpace,
    /// The penalty delta(s) computed from the supplied modulus.
    pub delta: f64,
    /// max over pairs of (|f_s(x) - f_s(y)| - s d(x,y))^+; zero up to
    /// roundoff because the inf-convolution is s-Lipschitz by construction.
    pub lip_residual: f64,
    /// sup |f - f_s|; bounded by delta, reported for comparison.
    pub sup_deviation: f64,
    /// Exact sup-distance from f to the s-Lipschitz functions,
    /// (1/2) max over pairs of (f(x) - f(y) - s d(x,y))^+. At most delta;
    /// the report makes any gap between the two visible.
    pub lip_distance: f64,
}

/// The s-Lipschitz regularization f_s of `f`, shifted by delta(s) so that it
/// straddles f symmetrically: ||f - f_s|| <= delta(s).
///
/// `omega` should be a concave majorant of f's raw modulus (normally
/// `function_modulus(f)`); it only enters through delta(s).
pub fn lip_regularize(
    f: &RealFunctionOnSpace,
    s: f64,
    omega: &ConcaveFn,
) -> Result<LipRegularized> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::invalid(format!(
            "Lipschitz level must be finite and nonnegative, got {s}"
        )));
    }
    let n = f.space.len();
    let delta = delta_from_modulus(omega, s);
    let values: Vec<f64> = (0..n)
        .map(|x| {
            let inf = (0..n)
                .map(|y| f.values[y] + s * f.space.dist(x, y))
                .fold(f64::INFINITY, f64::min);
            delta + inf
        })
        .collect();

    let mut lip_residual = 0.0f64;
    let mut lip_distance = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let d = f.space.dist(x, y);
            lip_residual = lip_residual.max((values[x] - values[y]).abs() - s * d);
            lip_distance = lip_distance.max(f.values[x] - f.values[y] - s * d);
        }
    }
    let sup_deviation = f
        .values
        .iter()
        .zip(&values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    Ok(LipRegularized {
        regularized: RealFunctionOnSpace { space: f.space.clone(), values },
        delta,
        lip_residual: lip_residual.max(0.0),
        sup_deviation,
        lip_distance: 0.5 * lip_distance.max(0.0),
    })
}

/// A generating set for C(X) under which the sandwich estimate holds sample
/// by sample for the complex function re + i*im.
///
/// Starts from the distance functions d(x, .) and adjoins, for every positive
/// hull slope s of each part's modulus, the normalized regularization
/// (f_s - min f_s) / s. Each added function is 1-Lipschitz and nonnegative,
/// so on point representations the metric d_K is still d. The payoff: for any
/// pair of representations at distance t, splitting f = (f - f_s) + f_s
/// bounds ||pi1(f) - pi2(f)|| by 2 delta(s) + s t, and minimizing over the
/// hull slopes yields omega_f(t) on the nose.
pub fn sandwich_family(
    re: &RealFunctionOnSpace,
    im: &RealFunctionOnSpace,
) -> Result<GeneratingSet> {
    if re.space != im.space {
        return Err(Error::SpaceMismatch);
    }
    let space = &re.space;
    let algebra = space.algebra();
    let base = lipschitz_generators(space)?;
    let mut elements: Vec<AlgebraElement> = base.elements().to_vec();
    for f in [re, im] {
        let omega = function_modulus(f)?;
        let mut seen = Vec::new();
        for s in omega.slopes() {
            if s <= 0.0 || seen.contains(&s) {
                continue;
            }
            seen.push(s);
            let reg = lip_regularize(f, s, &omega)?;
            let min = reg
                .regularized
                .values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let coords: Vec<Complex64> = reg
                .regularized
                .values
                .iter()
                .map(|&v| Complex64::new((v - min) / s, 0.0))
                .collect();
            elements.push(diagonal_element(&algebra, &coords)?);
        }
    }
    let mut set = GeneratingSet::new(algebra, elements)?;
    set.verify(space.len());
    Ok(set)
}

/// Per-sample margins of the sandwich estimate; negative entries mean slack.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    /// max over samples of ||pi1(re) - pi2(re)|| - omega_re(d_K).
    pub re_residual: f64,
    /// max over samples of ||pi1(im) - pi2(im)|| - omega_im(d_K).
    pub im_residual: f64,
    /// max over samples of ||pi1(f) - pi2(f)|| - 2 omega_f(d_K) for the
    /// complex f = re + i*im.
    pub complex_residual: f64,
    /// Largest d_K among the samples.
    pub max_distance: f64,
    /// Number of representation pairs examined.
    pub samples: usize,
}

/// Measures the sandwich estimate on a set of representation pairs: real
/// parts against omega, the complex combination against 2*omega. Residuals
/// are reported, not clamped; callers decide what to assert.
pub fn sandwich_check(
    re: &RealFunctionOnSpace,
    im: &RealFunctionOnSpace,
    pairs: &RepPairSet,
    k: &GeneratingSet,
) -> Result<SandwichReport> {
    if re.space != im.space {
        return Err(Error::SpaceMismatch);
    }
    if pairs.is_empty() {
        return Err(Error::EmptySampleSet { context: "sandwich check".into() });
    }
    let algebra = re.space.algebra();
    if *pairs.algebra() != algebra {
        return Err(Error::algebra_mismatch(
            "representation pairs do not act on the function algebra of the space",
        ));
    }
    if *k.algebra() != algebra {
        return Err(Error::algebra_mismatch(
            "generating set does not live in the function algebra of the space",
        ));
    }

    let omega_re = function_modulus(re)?;
    let omega_im = function_modulus(im)?;
    let omega_c = complex_function_modulus(re, im)?;

    let re_el = re.to_element();
    let im_el = im.to_element();
    let f_el = re_el.add(&im_el.scale(Complex64::new(0.0, 1.0)));

    let ds = pair_distances(pairs, k)?;
    let dev_re = pair_deviations(pairs, &re_el)?;
    let dev_im = pair_deviations(pairs, &im_el)?;
    let dev_f = pair_deviations(pairs, &f_el)?;

    let mut report = SandwichReport {
        re_residual: f64::NEG_INFINITY,
        im_residual: f64::NEG_INFINITY,
        complex_residual: f64::NEG_INFINITY,
        max_distance: 0.0,
        samples: pairs.len(),
    };
    for i in 0..pairs.len() {
        report.re_residual = report.re_residual.max(dev_re[i] - omega_re.eval(ds[i]));
        report.im_residual = report.im_residual.max(dev_im[i] - omega_im.eval(ds[i]));
        report.complex_residual = report
            .complex_residual
            .max(dev_f[i] - 2.0 * omega_c.eval(ds[i]));
        report.max_distance = report.max_distance.max(ds[i]);
    }
    Ok(report)
}
