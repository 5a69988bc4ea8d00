//! Contact-rate regulation laws.
//!
//! The contact rate obeys `dβ/dt = -α (g(β) - h(u I))`, where `g` is the
//! intrinsic relaxation map (strictly increasing, nonnegative) and `h` the
//! perceived-risk target (strictly decreasing, positive). Laws with closed
//! forms override the numeric inverses and derivatives.

use std::fmt;

/// Relative tolerance of the bisection inverses.
pub const INVERSE_RTOL: f64 = 1e-12;

/// Relative interiority margin used when testing `g(γ/c_s) ∈ image(h)°`.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Infimum and supremum of a map's image over `[0, domain_upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageBounds {
    pub lower: f64,
    pub upper: f64,
}

impl ImageBounds {
    pub fn contains_interior(&self, y: f64, rel_margin: f64) -> bool {
        self.interior_slack(y, rel_margin) > 0.0
    }

    /// Signed distance of `y` from the boundary, after subtracting the margin.
    /// Positive means strictly interior.
    pub fn interior_slack(&self, y: f64, rel_margin: f64) -> f64 {
        let scale = self
            .lower
            .abs()
            .max(self.upper.abs())
            .max(f64::MIN_POSITIVE);
        let m = rel_margin * scale;
        (y - self.lower - m).min(self.upper - y - m)
    }
}

pub trait ContactRateLaw: fmt::Debug + Send + Sync {
    fn descriptor(&self) -> &str;

    /// Relaxation map applied to the contact rate.
    fn g(&self, beta: f64) -> f64;

    /// Target contact rate as a function of the scaled infectives `u I`.
    fn h(&self, x: f64) -> f64;

    /// Upper end of the domain on which inverses are bracketed and images
    /// are bounded.
    fn domain_upper(&self) -> f64 {
        1e12
    }

    fn g_prime(&self, beta: f64) -> f64 {
        derivative(|x| self.g(x), beta)
    }

    fn h_prime(&self, x: f64) -> f64 {
        derivative(|z| self.h(z), x)
    }

    fn g_image(&self) -> ImageBounds {
        ImageBounds {
            lower: self.g(0.0),
            upper: self.g(self.domain_upper()),
        }
    }

    fn h_image(&self) -> ImageBounds {
        ImageBounds {
            lower: self.h(self.domain_upper()),
            upper: self.h(0.0),
        }
    }

    /// Preimage of `y` under `g`, or `None` if `y` is outside its image.
    fn g_inv(&self, y: f64) -> Option<f64> {
        bisect(|x| self.g(x), y, self.domain_upper(), true)
    }

    /// Preimage of `y` under `h`, or `None` if `y` is outside its image.
    fn h_inv(&self, y: f64) -> Option<f64> {
        bisect(|x| self.h(x), y, self.domain_upper(), false)
    }

    /// Antiderivative of `p ↦ h(u e^p)` when available in closed form.
    fn h_log_primitive(&self, _u: f64, _p: f64) -> Option<f64> {
        None
    }
}

fn derivative(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let step = 1e-6 * x.abs().max(1e-3);
    if x - step < 0.0 {
        // one-sided second-order stencil at the domain edge
        (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step)
    } else {
        (f(x + step) - f(x - step)) / (2.0 * step)
    }
}

/// Solves `f(x) = y` on `[0, upper]` for a strictly monotone `f`.
fn bisect(f: impl Fn(f64) -> f64, y: f64, upper: f64, increasing: bool) -> Option<f64> {
    if !y.is_finite() {
        return None;
    }
    let (f_lo, f_hi) = (f(0.0), f(upper));
    let (min, max) = if increasing {
        (f_lo, f_hi)
    } else {
        (f_hi, f_lo)
    };
    if y < min || y > max {
        return None;
    }
    if y == f_lo {
        return Some(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, upper);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let below = if increasing { f(mid) < y } else { f(mid) > y };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= INVERSE_RTOL * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Monod (Michaelis–Menten) inhibition: `h(x) = K/(1+x)`, `g(z) = z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodLaw {
    /// Nominal contact rate `h(0)`.
    pub k: f64,
}

impl MonodLaw {
    pub fn new(k: f64) -> crate::Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(crate::Error::InvalidParameter(format!(
                "Monod K must be positive and finite, got {k}"
            )));
        }
        Ok(Self { k })
    }
}

impl ContactRateLaw for MonodLaw {
    fn descriptor(&self) -> &str {
        "monod"
    }

    fn g(&self, beta: f64) -> f64 {
        beta
    }

    fn h(&self, x: f64) -> f64 {
        self.k / (1.0 + x)
    }

    fn g_prime(&self, _beta: f64) -> f64 {
        1.0
    }

    fn h_prime(&self, x: f64) -> f64 {
        -self.k / ((1.0 + x) * (1.0 + x))
    }

    fn g_image(&self) -> ImageBounds {
        ImageBounds {
            lower: 0.0,
            upper: f64::INFINITY,
        }
    }

    fn h_image(&self) -> ImageBounds {
        ImageBounds {
            lower: 0.0,
            upper: self.k,
        }
    }

    fn g_inv(&self, y: f64) -> Option<f64> {
        (y >= 0.0 && y.is_finite()).then_some(y)
    }

    fn h_inv(&self, y: f64) -> Option<f64> {
        (y > 0.0 && y <= self.k).then(|| self.k / y - 1.0)
    }

    fn h_log_primitive(&self, u: f64, p: f64) -> Option<f64> {
        // K (p - ln(1 + u e^p)), rearranged when u e^p would overflow
        let log_x = u.ln() + p;
        let value = if log_x > 30.0 {
            -u.ln() - (-log_x).exp().ln_1p()
        } else {
            p - log_x.exp().ln_1p()
        };
        Some(self.k * value)
    }
}

type ScalarMap = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A law given by arbitrary closures; inverses use bisection on
/// `[0, domain_upper]`.
pub struct FnLaw {
    name: String,
    g: ScalarMap,
    h: ScalarMap,
    domain_upper: f64,
}

impl FnLaw {
    pub fn new(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            g: Box::new(g),
            h: Box::new(h),
            domain_upper: 1e12,
        }
    }

    pub fn with_domain_upper(mut self, upper: f64) -> Self {
        self.domain_upper = upper;
        self
    }
}

impl fmt::Debug for FnLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnLaw")
            .field("name", &self.name)
            .field("domain_upper", &self.domain_upper)
            .finish_non_exhaustive()
    }
}

impl ContactRateLaw for FnLaw {
    fn descriptor(&self) -> &str {
        &self.name
    }

    fn g(&self, beta: f64) -> f64 {
        (self.g)(beta)
    }

    fn h(&self, x: f64) -> f64 {
        (self.h)(x)
    }

    fn domain_upper(&self) -> f64 {
        self.domain_upper
    }
}

/// Slack of assumption A4 at composite rate `c_s`: positive iff
/// `g(γ/c_s)` lies strictly inside the image of `h`.
pub fn a4_slack<L: ContactRateLaw + ?Sized>(law: &L, gamma: f64, c_s: f64) -> f64 {
    if !(c_s > 0.0) {
        return f64::NEG_INFINITY;
    }
    let y = law.g(gamma / c_s);
    if !y.is_finite() {
        return f64::NEG_INFINITY;
    }
    law.h_image().interior_slack(y, INTERIOR_MARGIN)
}

pub fn a4_holds<L: ContactRateLaw + ?Sized>(law: &L, gamma: f64, c_s: f64) -> bool {
    a4_slack(law, gamma, c_s) > 0.0
}

/// `h⁻¹(g(γ/c_s))`, the scaled endemic infectives `u I_e`, when A4 holds.
pub fn endemic_scaled_infectives<L: ContactRateLaw + ?Sized>(
    law: &L,
    gamma: f64,
    c_s: f64,
) -> Option<f64> {
    if !a4_holds(law, gamma, c_s) {
        return None;
    }
    law.h_inv(law.g(gamma / c_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_law() -> FnLaw {
        FnLaw::new("cubic-exp", |b| b + b * b * b, |x| 0.03 * (-x).exp()).with_domain_upper(1e3)
    }

    #[test]
    fn monod_maps() {
        let law = MonodLaw::new(0.0229).unwrap();
        assert_eq!(law.h(0.0), 0.0229);
        assert_relative_eq!(law.h(3.0), 0.0229 / 4.0);
        assert_eq!(law.g(0.7), 0.7);
        assert_relative_eq!(law.h_inv(law.h(2.5)).unwrap(), 2.5, max_relative = 1e-14);
        assert!(law.h_inv(0.03).is_none());
        assert!(law.h_inv(0.0).is_none());
        assert!(MonodLaw::new(-1.0).is_err());
    }

    #[test]
    fn bisection_inverse_matches_closed_form() {
        let law = MonodLaw::new(0.5).unwrap();
        let generic = FnLaw::new("monod-numeric", |b| b, |x| 0.5 / (1.0 + x));
        for y in [0.5, 0.4, 0.1, 1e-3, 1e-6] {
            let exact = law.h_inv(y).unwrap();
            let numeric = generic.h_inv(y).unwrap();
            assert_relative_eq!(numeric, exact, max_relative = 1e-10, epsilon = 1e-12);
        }
        assert_relative_eq!(generic.g_inv(0.25).unwrap(), 0.25, max_relative = 1e-11);
        assert!(generic.h_inv(0.6).is_none());
    }

    #[test]
    fn general_law_inverse_and_derivatives() {
        let law = exp_law();
        let x = law.h_inv(0.01).unwrap();
        assert_relative_eq!(x, 3.0_f64.ln(), max_relative = 1e-10);
        assert_relative_eq!(
            law.h_prime(1.0),
            -0.03 * (-1.0_f64).exp(),
            max_relative = 1e-7
        );
        assert_relative_eq!(law.g_prime(0.5), 1.75, max_relative = 1e-7);
        assert_relative_eq!(law.g_prime(0.0), 1.0, max_relative = 1e-7);
    }

    #[test]
    fn monod_log_primitive_is_antiderivative() {
        let law = MonodLaw::new(0.02).unwrap();
        let u = 8e-4;
        for p in [-3.0, 0.0, 5.0, 8.3, 40.0] {
            let d = 1e-5;
            let fd = (law.h_log_primitive(u, p + d).unwrap()
                - law.h_log_primitive(u, p - d).unwrap())
                / (2.0 * d);
            assert_relative_eq!(
                fd,
                law.h(u * f64::exp(p)),
                max_relative = 1e-6,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn a4_for_monod_is_the_susceptible_threshold() {
        let law = MonodLaw::new(0.0229).unwrap();
        let gamma = 0.091;
        let c_star = gamma / 0.0229;
        assert!(a4_holds(&law, gamma, 1.01 * c_star));
        assert!(!a4_holds(&law, gamma, 0.99 * c_star));
        // boundary coincidence: endemic and disease-free states merge
        assert!(!a4_holds(&law, gamma, c_star));
        assert!(!a4_holds(&law, gamma, 0.0));
    }
}
