//! Both sides of the three-variable Ostrowski and Cebysev type inequalities,
//! their classical one-variable counterparts, and refinement studies for the
//! continuous case.

use serde::{Deserialize, Serialize};

use crate::calculus::triple_sum_local;
use crate::domain::{Box3, GridIndex};
use crate::error::{Error, Result};
use crate::function::{AxisFactor, FactorKind, Function3};
use crate::identities::Analysis;

/// Outcome of one inequality check, `lhs <= rhs` up to `tol_abs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    pub tol_abs: f64,
}

impl Margin {
    /// Uses the default tolerance `1e-9 * (1 + |rhs|)`.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self::with_tol(lhs, rhs, default_tol(rhs))
    }

    pub fn with_tol(lhs: f64, rhs: f64, tol_abs: f64) -> Self {
        let margin = rhs - lhs;
        Margin {
            lhs,
            rhs,
            margin,
            passed: margin >= -tol_abs,
            tol_abs,
        }
    }

    pub fn retol(self, tol_abs: f64) -> Self {
        Self::with_tol(self.lhs, self.rhs, tol_abs)
    }
}

pub fn default_tol(rhs: f64) -> f64 {
    1e-9 * (1.0 + rhs.abs())
}

/// Ostrowski check result. `margin.rhs` is the sup-norm bound; the
/// integral-of-|mixed| and the pointwise |B| bounds are reported alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OstrowskiReport {
    pub margin: Margin,
    /// The integral of `f - A(f)` before taking its absolute value.
    pub signed_lhs: f64,
    /// `(1/8) * V * integral |f^{Δ3Δ2Δ1}|`.
    pub rhs_integral: f64,
    /// `(1/8) * integral |B(f)|`.
    pub rhs_tight: f64,
    /// `sup |f^{Δ3Δ2Δ1}|` over the box.
    pub sup_norm: f64,
}

impl OstrowskiReport {
    /// `lhs <= rhs_tight <= rhs_integral <= rhs`, each step within `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        let m = &self.margin;
        m.lhs <= self.rhs_tight + tol && self.rhs_tight <= self.rhs_integral + tol && self.rhs_integral <= m.rhs + tol
    }
}

fn region(domain: &Box3) -> (GridIndex, GridIndex) {
    (domain.corner(), domain.upper())
}

/// Three-variable Ostrowski type check over `[sigma(base), b)`.
///
/// The left side is `|integral (f - A(f))|`; by the averaged identity the
/// integrand is `B(f) / 8`, which bounds it by `(1/8) V^2 sup|f^{Δ3Δ2Δ1}|`
/// with `V = prod (b_i - sigma_i(base_i))`.
pub fn ostrowski_check(f: &Function3, domain: &Box3) -> Result<OstrowskiReport> {
    let an = Analysis::new(f, domain)?;
    Ok(ostrowski_from_analysis(&an))
}

pub fn ostrowski_from_analysis(an: &Analysis) -> OstrowskiReport {
    let domain = an.domain();
    let (lo, hi) = region(domain);
    let a_of = |p: GridIndex| an.functional_a(p).expect("p inside region");
    let signed = triple_sum_local(domain, lo, hi, |p| an.value(p) - a_of(p));
    let tight = triple_sum_local(domain, lo, hi, |p| an.functional_b(p).expect("p inside region").abs()) / 8.0;
    let abs_mixed = triple_sum_local(domain, lo, hi, |p| an.mixed().get(p).abs());
    let volume = domain.corner_volume();
    let sup = an.mixed().sup_norm;
    OstrowskiReport {
        margin: Margin::new(signed.abs(), volume * volume * sup / 8.0),
        signed_lhs: signed,
        rhs_integral: volume * abs_mixed / 8.0,
        rhs_tight: tight,
        sup_norm: sup,
    }
}

/// Cebysev check result, with the pointwise product identity residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CebysevReport {
    pub margin: Margin,
    pub signed_lhs: f64,
    /// Largest relative residual of `fg - (fA(g) + gA(f))/2 = (gB(f) + fB(g))/16`.
    pub product_identity_residual: f64,
}

/// Three-variable Cebysev type check over `[sigma(base), b)`.
pub fn cebysev_check(f: &Function3, g: &Function3, domain: &Box3) -> Result<CebysevReport> {
    let af = Analysis::new(f, domain)?;
    let ag = Analysis::new(g, domain)?;
    Ok(cebysev_from_analyses(&af, &ag))
}

pub fn cebysev_from_analyses(af: &Analysis, ag: &Analysis) -> CebysevReport {
    let domain = af.domain();
    let (lo, hi) = region(domain);
    let mut residual = 0.0f64;
    let integrand = |p: GridIndex| {
        let (fv, gv) = (af.value(p), ag.value(p));
        let (a_f, a_g) = (
            af.functional_a(p).expect("in region"),
            ag.functional_a(p).expect("in region"),
        );
        fv * gv - 0.5 * (fv * a_g + gv * a_f)
    };
    for p in Box3::indices(lo, hi) {
        let (fv, gv) = (af.value(p), ag.value(p));
        let (a_f, a_g) = (
            af.functional_a(p).expect("in region"),
            ag.functional_a(p).expect("in region"),
        );
        let (b_f, b_g) = (
            af.functional_b(p).expect("in region"),
            ag.functional_b(p).expect("in region"),
        );
        let left = fv * gv - 0.5 * (fv * a_g + gv * a_f);
        let right = (gv * b_f + fv * b_g) / 16.0;
        let scale = 1.0 + (fv * gv).abs() + 0.5 * ((fv * a_g).abs() + (gv * a_f).abs());
        residual = residual.max((left - right).abs() / scale);
    }
    let signed = triple_sum_local(domain, lo, hi, integrand);
    let (sf, sg) = (af.mixed().sup_norm, ag.mixed().sup_norm);
    let weight = triple_sum_local(domain, lo, hi, |p| ag.value(p).abs() * sf + af.value(p).abs() * sg);
    CebysevReport {
        margin: Margin::new(signed.abs(), domain.corner_volume() * weight / 16.0),
        signed_lhs: signed,
        product_identity_residual: residual,
    }
}

/// A closed-form function of one real variable with an analytic bound on
/// its derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum Function1 {
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    Factor {
        amplitude: f64,
        factor: AxisFactor,
    },
}

impl Function1 {
    pub fn identity() -> Self {
        Function1::Poly(vec![0.0, 1.0])
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Function1::Poly(c) => horner(c, u),
            Function1::Factor { amplitude, factor } => amplitude * factor.eval(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Function1::Poly(c) => horner(&poly_derivative(c), u),
            Function1::Factor { amplitude, factor } => amplitude * factor.derivative(u),
        }
    }

    /// `sup |f'|` on `[a, b]`, from the critical points of `f'`.
    pub fn deriv_sup(&self, a: f64, b: f64) -> f64 {
        let mut candidates = vec![a, b];
        match self {
            Function1::Poly(c) => {
                let d2 = poly_derivative(&poly_derivative(c));
                candidates.extend(real_roots(&d2, a, b));
            }
            Function1::Factor { factor, .. } => {
                let w = factor.freq;
                if w != 0.0 {
                    // |f'| peaks where the argument hits a multiple of pi (sin) or pi/2 off it (cos)
                    let shift = match factor.kind {
                        FactorKind::Sin => 0.0,
                        FactorKind::Cos => std::f64::consts::FRAC_PI_2,
                        FactorKind::Exp => f64::NAN,
                    };
                    if shift.is_finite() {
                        let (lo, hi) = {
                            let (u, v) = (w * a + factor.phase - shift, w * b + factor.phase - shift);
                            (u.min(v), u.max(v))
                        };
                        let pi = std::f64::consts::PI;
                        let mut k = (lo / pi).ceil();
                        while k * pi <= hi {
                            candidates.push((k * pi + shift - factor.phase) / w);
                            k += 1.0;
                        }
                    }
                }
            }
        }
        candidates
            .into_iter()
            .filter(|u| (a..=b).contains(u))
            .map(|u| self.derivative(u).abs())
            .fold(0.0, f64::max)
    }

    /// `u -> f(u, y, z)` for closed-form three-variable functions.
    pub fn restrict_x(f: &Function3, y: f64, z: f64) -> Option<Function1> {
        match f {
            Function3::Poly(p) => Some(Function1::Poly(p.restrict_x(y, z))),
            Function3::TrigProd(t) => Some(Function1::Factor {
                amplitude: t.amplitude * t.factors[1].eval(y) * t.factors[2].eval(z),
                factor: t.factors[0],
            }),
            Function3::Tabulated(_) => None,
        }
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * u + k)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
}

/// Real roots of a polynomial inside `[a, b]`, found by bisection on the
/// monotone pieces between the roots of its derivative.
fn real_roots(c: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            return if (a..=b).contains(&r) { vec![r] } else { Vec::new() };
        }
        _ => {}
    }
    let mut knots = vec![a];
    knots.extend(real_roots(&poly_derivative(&c), a, b));
    knots.push(b);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(&c, lo), horner(&c, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if horner(&c, mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if horner(&c, b) == 0.0 {
        roots.push(b);
    }
    roots
}

/// Romberg integration, refined until successive estimates agree to 1e-12.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const MAX_LEVELS: usize = 22;
    let mut prev: Vec<f64> = vec![0.5 * (b - a) * (f(a) + f(b))];
    for level in 1..MAX_LEVELS {
        let n = 1usize << (level - 1);
        let h = (b - a) / (2 * n) as f64;
        let mids: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * prev[0] + h * mids];
        for m in 1..=level {
            let factor = 4f64.powi(m as i32);
            row.push(row[m - 1] + (row[m - 1] - prev[m - 1]) / (factor - 1.0));
        }
        let (new, old) = (row[level], prev[level - 1]);
        if level >= 3 && (new - old).abs() <= 1e-12 * (1.0 + new.abs()) {
            return new;
        }
        prev = row;
    }
    prev[prev.len() - 1]
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::BadInterval(format!("need a < b, got [{a}, {b}]")));
    }
    Ok(())
}

/// Classical Ostrowski inequality at `x` on `[a, b]`.
pub fn classical_ostrowski_check(f: &Function1, x: f64, a: f64, b: f64, deriv_sup: f64) -> Result<Margin> {
    check_interval(a, b)?;
    if !(a..=b).contains(&x) {
        return Err(Error::BadInterval(format!("x = {x} outside [{a}, {b}]")));
    }
    let len = b - a;
    let mean = integrate(|u| f.eval(u), a, b) / len;
    let offset = x - 0.5 * (a + b);
    let bracket = 0.25 + offset * offset / (len * len);
    Ok(Margin::new((f.eval(x) - mean).abs(), bracket * len * deriv_sup))
}

/// Classical Cebysev inequality on `[a, b]`.
pub fn classical_cebysev_check(f: &Function1, g: &Function1, a: f64, b: f64, fsup: f64, gsup: f64) -> Result<Margin> {
    check_interval(a, b)?;
    let len = b - a;
    let mean = |h: &dyn Fn(f64) -> f64| integrate(h, a, b) / len;
    let fg = mean(&|u| f.eval(u) * g.eval(u));
    let lhs = (fg - mean(&|u| f.eval(u)) * mean(&|u| g.eval(u))).abs();
    Ok(Margin::new(lhs, len * len * fsup * gsup / 12.0))
}

/// What a refinement study evaluates at each level.
#[derive(Debug, Clone, Copy)]
pub enum ConvergenceTarget<'a> {
    Ostrowski(&'a Function3),
    Cebysev(&'a Function3, &'a Function3),
}

/// Per-level values of a check under uniform refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub levels: Vec<u32>,
    /// Grid step per level on axis 0.
    pub steps: Vec<f64>,
    pub lhs: Vec<f64>,
    /// Left side before the absolute value; rates are measured on this.
    pub signed_lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margins: Vec<Margin>,
    /// `d_k / d_{k+1}` for successive differences `d_k = L_k - L_{k+1}`;
    /// `None` when a difference vanishes. About 2 for first-order convergence.
    pub rates: Vec<Option<f64>>,
    /// `log2 |rate|`.
    pub orders: Vec<Option<f64>>,
}

impl ConvergenceRecord {
    pub fn all_passed(&self) -> bool {
        self.margins.iter().all(|m| m.passed)
    }
}

/// Evaluates the target check at refine levels `0..=max_level`.
pub fn continuous_convergence_study(
    target: ConvergenceTarget,
    domain: &Box3,
    max_level: u32,
) -> Result<ConvergenceRecord> {
    let mut rec = ConvergenceRecord {
        levels: Vec::new(),
        steps: Vec::new(),
        lhs: Vec::new(),
        signed_lhs: Vec::new(),
        rhs: Vec::new(),
        margins: Vec::new(),
        rates: Vec::new(),
        orders: Vec::new(),
    };
    for level in 0..=max_level {
        let fine = domain.refine(level)?;
        let (margin, signed) = match target {
            ConvergenceTarget::Ostrowski(f) => {
                let r = ostrowski_check(f, &fine)?;
                (r.margin, r.signed_lhs)
            }
            ConvergenceTarget::Cebysev(f, g) => {
                let r = cebysev_check(f, g, &fine)?;
                (r.margin, r.signed_lhs)
            }
        };
        rec.levels.push(level);
        rec.steps.push(fine.scale(0).step().unwrap_or(f64::NAN));
        rec.lhs.push(margin.lhs);
        rec.signed_lhs.push(signed);
        rec.rhs.push(margin.rhs);
        rec.margins.push(margin);
    }
    let diffs: Vec<f64> = rec.signed_lhs.windows(2).map(|w| w[0] - w[1]).collect();
    for w in diffs.windows(2) {
        let rate = (w[1] != 0.0 && w[0] != 0.0).then(|| w[0] / w[1]);
        rec.rates.push(rate);
        rec.orders.push(rate.map(|r| r.abs().log2()));
    }
    Ok(rec)
}

fn is_unit_integer_scale(domain: &Box3, axis: usize) -> bool {
    let ts = domain.scale(axis);
    let tol = ts.tolerance();
    ts.points()
        .iter()
        .enumerate()
        .all(|(i, &p)| (p - (i + 1) as f64).abs() <= tol)
        && (domain.lo()[axis] - 1.0).abs() <= tol
        && (domain.hi()[axis] - ts.max()).abs() <= tol
}

/// Ostrowski check on scales `{1, ..., b_i + 1}`, where delta integrals are
/// plain sums and the mixed partial is the third forward difference.
pub fn discrete_instance_check(f: &Function3, domain: &Box3) -> Result<OstrowskiReport> {
    if let Some(axis) = (0..3).find(|&a| !is_unit_integer_scale(domain, a)) {
        return Err(Error::NotUnitIntegerScale { axis });
    }
    ostrowski_check(f, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::TimeScale;

    fn cube_z(n: i64) -> Box3 {
        let s = TimeScale::integers(0, n).unwrap();
        Box3::spanning([s.clone(), s.clone(), s], None).unwrap()
    }

    fn xyz() -> Function3 {
        Function3::poly(&[(1.0, [1, 1, 1])])
    }

    fn sum3() -> Function3 {
        Function3::poly(&[(1.0, [1, 0, 0]), (1.0, [0, 1, 0]), (1.0, [0, 0, 1])])
    }

    #[test]
    fn margin_semantics() {
        let m = Margin::with_tol(1.0, 0.9, 0.2);
        assert!(m.passed);
        assert!((m.margin + 0.1).abs() < 1e-15);
        assert!(!m.retol(0.05).passed);
        assert!(Margin::new(0.0, 0.0).passed);
    }

    #[test]
    fn ostrowski_vanishes_without_mixed_term() {
        for f in [Function3::constant(3.0), sum3()] {
            let r = ostrowski_check(&f, &cube_z(3)).unwrap();
            assert!(r.margin.lhs.abs() < 1e-12);
            assert_eq!(r.margin.rhs, 0.0);
            assert!(r.margin.passed);
        }
    }

    #[test]
    fn ostrowski_xyz_unit_cube() {
        // base 0, sigma = 1, region [1,2)^3 is the single point (1,1,1):
        // f - A = 1 - 9/8, V = 1, sup = 1
        let r = ostrowski_check(&xyz(), &cube_z(2)).unwrap();
        assert_eq!(r.signed_lhs, -0.125);
        assert_eq!(r.margin.lhs, 0.125);
        assert_eq!(r.margin.rhs, 0.125);
        assert_eq!(r.rhs_tight, 0.125);
        assert_eq!(r.rhs_integral, 0.125);
        assert!(r.margin.passed);
        assert!(r.chain_holds(1e-12));
    }

    #[test]
    fn ostrowski_xyz_closed_form_on_uniform_grid() {
        // per axis sum_{u in [c,b)} (2u - c - b) h = -h (b - c), so
        // integral (f - A) = (1/8) prod(-h (b_i - c_i))
        let s = TimeScale::uniform(0.0, 1.0, 0.125).unwrap();
        let b = Box3::spanning([s.clone(), s.clone(), s], None).unwrap();
        let r = ostrowski_check(&xyz(), &b).unwrap();
        let h: f64 = 0.125;
        let expected = -(h * (1.0 - h)).powi(3) / 8.0;
        assert!((r.signed_lhs - expected).abs() < 1e-15);
    }

    #[test]
    fn ostrowski_scales_linearly() {
        let s = TimeScale::geometric(0.5, 1.3, 5).unwrap();
        let b = Box3::spanning([s.clone(), TimeScale::integers(-1, 3).unwrap(), s], None).unwrap();
        let f = Function3::poly(&[(1.0, [2, 1, 1]), (-0.5, [1, 2, 1]), (0.3, [1, 0, 0])]);
        let r1 = ostrowski_check(&f, &b).unwrap();
        // dyadic factors scale every floating-point operation exactly
        for c in [2.0, 0.25] {
            let r = ostrowski_check(&f.scaled(c), &b).unwrap();
            assert_eq!(r.margin.lhs, c * r1.margin.lhs);
            assert_eq!(r.margin.rhs, c * r1.margin.rhs);
        }
        // the lhs comes out of cancellation, so compare on the scale of the bound
        let r2 = ostrowski_check(&f.scaled(2.5), &b).unwrap();
        assert!((r2.margin.lhs - 2.5 * r1.margin.lhs).abs() <= 1e-12 * r2.margin.rhs);
        assert!((r2.margin.rhs - 2.5 * r1.margin.rhs).abs() <= 1e-12 * r2.margin.rhs);
        assert!(r1.chain_holds(1e-12));
    }

    #[test]
    fn cebysev_trivial_cases() {
        let b = cube_z(3);
        let c = Function3::constant(1.5);
        let r = cebysev_check(&c, &c, &b).unwrap();
        assert!(r.margin.lhs.abs() < 1e-12);
        assert_eq!(r.margin.rhs, 0.0);
        let r = cebysev_check(&xyz(), &Function3::constant(0.0), &b).unwrap();
        assert_eq!(r.margin.lhs, 0.0);
        assert_eq!(r.margin.rhs, 0.0);
    }

    #[test]
    fn cebysev_xyz_with_linear_sum() {
        let b = cube_z(2);
        let r = cebysev_check(&xyz(), &sum3(), &b).unwrap();
        assert!(r.margin.passed);
        assert!(r.product_identity_residual <= 1e-10);
        let swapped = cebysev_check(&sum3(), &xyz(), &b).unwrap();
        assert!((swapped.margin.lhs - r.margin.lhs).abs() <= 1e-12 * (1.0 + r.margin.lhs));
        assert!((swapped.margin.rhs - r.margin.rhs).abs() <= 1e-12 * (1.0 + r.margin.rhs));
        // single region point (1,1,1): f=1, g=3, A(f)=9/8, A(g)=3 (g has no mixed part)
        // lhs = |3 - (3 + 27/8)/2| = 3/16 ; rhs = (1/16)(3*1 + 1*0) = 3/16
        assert!((r.margin.lhs - 3.0 / 16.0).abs() < 1e-15);
        assert!((r.margin.rhs - 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn classical_ostrowski_examples() {
        let id = Function1::identity();
        let m = classical_ostrowski_check(&id, 0.5, 0.0, 1.0, 1.0).unwrap();
        assert!(m.lhs.abs() < 1e-12 && (m.rhs - 0.25).abs() < 1e-15);
        let m = classical_ostrowski_check(&id, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!((m.lhs - 0.5).abs() < 1e-12 && (m.rhs - 0.5).abs() < 1e-15);
        assert!(m.margin.abs() <= 1e-9);
        let sq = Function1::Poly(vec![0.0, 0.0, 1.0]);
        assert_eq!(sq.deriv_sup(0.0, 1.0), 2.0);
        let m = classical_ostrowski_check(&sq, 1.0, 0.0, 1.0, 2.0).unwrap();
        assert!((m.lhs - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.rhs - 1.0).abs() < 1e-15);
        assert!((m.margin - 1.0 / 3.0).abs() < 1e-12);
        assert!(classical_ostrowski_check(&id, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(classical_ostrowski_check(&id, 2.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn classical_cebysev_examples() {
        let id = Function1::identity();
        let m = classical_cebysev_check(&id, &id, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((m.lhs - 1.0 / 12.0).abs() < 1e-12 && (m.rhs - 1.0 / 12.0).abs() < 1e-15);
        let c = Function1::Poly(vec![4.0]);
        assert!(classical_cebysev_check(&c, &id, 0.0, 1.0, 0.0, 1.0).unwrap().lhs < 1e-12);
        let sq = Function1::Poly(vec![0.0, 0.0, 1.0]);
        let m = classical_cebysev_check(&id, &sq, 0.0, 1.0, 1.0, 2.0).unwrap();
        assert!((m.lhs - 1.0 / 12.0).abs() < 1e-12);
        assert!((m.rhs - 1.0 / 6.0).abs() < 1e-15);
        assert!(classical_cebysev_check(&id, &id, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn deriv_sup_is_attained_and_bounds_samples() {
        let cases = [
            Function1::Poly(vec![0.3, -1.0, 0.5, 2.0, -0.7]),
            Function1::Poly(vec![0.0, 0.0, 0.0, 1.0]),
            Function1::Factor {
                amplitude: 1.5,
                factor: AxisFactor::new(FactorKind::Sin, 3.0, 0.2),
            },
            Function1::Factor {
                amplitude: -0.5,
                factor: AxisFactor::new(FactorKind::Cos, 2.0, 1.0),
            },
            Function1::Factor {
                amplitude: 2.0,
                factor: AxisFactor::new(FactorKind::Exp, -1.5, 0.0),
            },
        ];
        for f in &cases {
            let (a, b) = (-1.3, 2.1);
            let sup = f.deriv_sup(a, b);
            let sampled = (0..=20000)
                .map(|i| f.derivative(a + (b - a) * i as f64 / 20000.0).abs())
                .fold(0.0, f64::max);
            assert!(sampled <= sup * (1.0 + 1e-12), "{f:?}");
            assert!(sampled >= sup * (1.0 - 1e-4), "{f:?}");
        }
    }

    #[test]
    fn romberg_is_accurate() {
        assert!((integrate(|u| u.sin(), 0.0, std::f64::consts::PI) - 2.0).abs() < 1e-11);
        assert!((integrate(|u| u * u * u, 0.0, 2.0) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn convergence_of_constant_has_undefined_rates() {
        let s = TimeScale::uniform(0.0, 1.0, 0.25).unwrap();
        let b = Box3::spanning([s.clone(), s.clone(), s], None).unwrap();
        let c = Function3::constant(2.0);
        let rec = continuous_convergence_study(ConvergenceTarget::Ostrowski(&c), &b, 3).unwrap();
        assert_eq!(rec.levels, vec![0, 1, 2, 3]);
        assert_eq!(rec.rates.len(), 2);
        assert!(rec.rates.iter().all(Option::is_none));
        assert!(rec.lhs.iter().all(|v| v.abs() < 1e-12));
        assert!(rec.all_passed());
    }

    #[test]
    fn convergence_rejects_non_uniform_scales() {
        let b = cube_z(2);
        assert!(matches!(
            continuous_convergence_study(ConvergenceTarget::Ostrowski(&xyz()), &b, 2),
            Err(Error::UnsupportedKind { .. })
        ));
    }

    #[test]
    fn discrete_instances() {
        let z = |n: i64| TimeScale::integers(1, n + 1).unwrap();
        let b1 = Box3::spanning([z(1), z(1), z(1)], None).unwrap();
        let r = discrete_instance_check(&xyz(), &b1).unwrap();
        assert!(r.margin.passed);
        assert_eq!((r.margin.lhs, r.margin.rhs), (0.0, 0.0));
        let b2 = Box3::spanning([z(2), z(2), z(2)], None).unwrap();
        let r = discrete_instance_check(&Function3::constant(7.0), &b2).unwrap();
        assert_eq!((r.margin.lhs, r.margin.rhs), (0.0, 0.0));
        let r = discrete_instance_check(&xyz(), &b2).unwrap();
        assert!(r.margin.passed);
        // integers 0..2 start at 0, not 1
        assert!(matches!(
            discrete_instance_check(&xyz(), &cube_z(2)),
            Err(Error::NotUnitIntegerScale { axis: 0 })
        ));
    }
}
