//! Periodic Hilbert transform, commutators with multiplication operators, and
//! residuals of the classical Hilbert-transform identities.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{product, PeriodicField, ProductRule, Spectrum};

pub fn hilbert(field: &PeriodicField) -> PeriodicField {
    PeriodicField::from_spectrum(field.spectrum().hilbert()).expect("Hilbert transform keeps the spectrum Hermitian")
}

/// `‖H²f + f − f̂(0)‖_{L²}`.
pub fn hilbert_squared_check(field: &PeriodicField) -> f64 {
    let s = field.spectrum();
    let mut residual = s.hilbert().hilbert().plus(s).expect("same grid");
    residual.coeffs_mut()[s.max_mode() as usize] -= s.get(0);
    residual.sobolev_norm(0.0)
}

/// Spectrum of `[H; v]u = H[vu] − vH[u]` with both products taken under `rule`.
pub fn commutator_spectrum(v: &Spectrum, u: &Spectrum, rule: ProductRule) -> Result<Spectrum> {
    let vu = product(v, u, rule)?;
    let v_hu = product(v, &u.hilbert(), rule)?;
    vu.hilbert().minus(&v_hu)
}

/// Direct frequency-space form
/// `([H; v]u)^(k) = −Σ_ℓ i(sgn k − sgn ℓ) v̂(k−ℓ) û(ℓ)` on the retained band.
///
/// O(K²); the reference the FFT path is checked against.
pub fn commutator_direct(v: &Spectrum, u: &Spectrum) -> Result<Spectrum> {
    v.grid().ensure_same(u.grid())?;
    let k_max = v.max_mode();
    Ok(Spectrum::from_fn(v.grid(), |k| {
        let lo = (k - k_max).max(-k_max);
        let hi = (k + k_max).min(k_max);
        let sum: Complex64 = (lo..=hi)
            .filter_map(|l| {
                let weight = k.signum() - l.signum();
                (weight != 0).then(|| v.get(k - l) * u.get(l) * weight as f64)
            })
            .sum();
        Complex64::new(0.0, -1.0) * sum
    }))
}

/// `[H; v]∂ₓᵖf`, products formed in physical space under `rule`.
pub fn commutator_h(v: &PeriodicField, f: &PeriodicField, p: u32, rule: ProductRule) -> Result<PeriodicField> {
    let u = f.spectrum().derivative(p);
    PeriodicField::from_spectrum(commutator_spectrum(v.spectrum(), &u, rule)?)
}

/// `[H; v]∂ₓᵖf` from the direct frequency-space sum.
pub fn commutator_h_spectral(v: &PeriodicField, f: &PeriodicField, p: u32) -> Result<PeriodicField> {
    let u = f.spectrum().derivative(p);
    PeriodicField::from_spectrum(commutator_direct(v.spectrum(), &u)?)
}

/// Commutator `[H; v]∂ₓᵖ` with a fixed modulating field.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorOp {
    pub modulating_field: PeriodicField,
    pub derivative_order: u32,
}

impl CommutatorOp {
    pub fn new(modulating_field: PeriodicField, derivative_order: u32) -> Self {
        Self {
            modulating_field,
            derivative_order,
        }
    }

    pub fn apply(&self, f: &PeriodicField, rule: ProductRule) -> Result<PeriodicField> {
        commutator_h(&self.modulating_field, f, self.derivative_order, rule)
    }
}

/// `L²` norm of `H[fg − H[f]H[g]] − (fH[g] + H[f]g)`.
pub fn product_identity_check(f: &PeriodicField, g: &PeriodicField, rule: ProductRule) -> Result<f64> {
    let (f, g) = (f.spectrum(), g.spectrum());
    let (hf, hg) = (f.hilbert(), g.hilbert());
    let lhs = product(f, g, rule)?.minus(&product(&hf, &hg, rule)?)?.hilbert();
    let rhs = product(f, &hg, rule)?.plus(&product(&hf, g, rule)?)?;
    Ok(lhs.minus(&rhs)?.sobolev_norm(0.0))
}

/// `|(H[f], g) + (f, H[g])|` with trapezoid inner products.
pub fn adjoint_check(f: &PeriodicField, g: &PeriodicField) -> Result<f64> {
    let a = hilbert(f).inner_quadrature(g)?;
    let b = f.inner_quadrature(&hilbert(g))?;
    Ok((a + b).abs())
}

/// `|([h; H]f, g) − (f, [h; H]g)|` with trapezoid inner products.
pub fn commutator_self_adjoint_check(
    h: &PeriodicField,
    f: &PeriodicField,
    g: &PeriodicField,
    rule: ProductRule,
) -> Result<f64> {
    // [h; H] = −[H; h]; the sign cancels in the difference.
    let cf = commutator_h(h, f, 0, rule)?;
    let cg = commutator_h(h, g, 0, rule)?;
    Ok((cf.inner_quadrature(g)? - f.inner_quadrature(&cg)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    fn field(f: impl Fn(f64) -> f64) -> PeriodicField {
        PeriodicField::from_fn(&grid(), f).unwrap()
    }

    fn max_diff(a: &PeriodicField, f: impl Fn(f64) -> f64) -> f64 {
        a.grid()
            .nodes()
            .zip(a.samples())
            .map(|(x, v)| (v - f(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn hilbert_of_trig_functions() {
        assert!(max_diff(&hilbert(&field(f64::cos)), f64::sin) < 1e-15);
        assert!(max_diff(&hilbert(&field(f64::sin)), |x| -x.cos()) < 1e-15);
        assert!(hilbert(&field(|_| 1.0)).max_abs() < 1e-15);
    }

    #[test]
    fn hilbert_squared() {
        assert!(hilbert_squared_check(&field(f64::cos)) < 1e-15);
        assert!(hilbert_squared_check(&field(|_| 5.0)) < 1e-15);
        assert!(hilbert_squared_check(&field(|x| (3.0 * x).sin() - 0.3 * (7.0 * x).cos())) < 1e-14);
    }

    #[test]
    fn commutator_of_cosine_with_sine() {
        // [H; cos x](−sin x) = H[−sin x cos x] − cos x H[−sin x]
        //   = H[−sin 2x / 2] − cos²x = cos 2x / 2 − cos²x = −1/2.
        let out = commutator_h(&field(f64::cos), &field(|x| -x.sin()), 0, ProductRule::Padded).unwrap();
        assert!(max_diff(&out, |_| -0.5) < 1e-15);
        let direct = commutator_h_spectral(&field(f64::cos), &field(|x| -x.sin()), 0).unwrap();
        assert!(max_diff(&direct, |_| -0.5) < 1e-15);
    }

    #[test]
    fn constant_modulation_commutes() {
        let f = field(|x| (2.0 * x).sin() + 0.5 * (5.0 * x).cos());
        for p in 0..3 {
            let out = commutator_h(&field(|_| 2.5), &f, p, ProductRule::TwoThirds).unwrap();
            assert!(out.max_abs() < 1e-13);
        }
    }

    #[test]
    fn direct_and_fft_forms_agree() {
        let v = field(|x| x.cos() + 0.3 * (4.0 * x).sin());
        let f = field(|x| (2.0 * x).cos() + 0.7 * (3.0 * x + 0.4).sin() + 0.1 * (6.0 * x).cos());
        for p in 0..4 {
            let a = commutator_h(&v, &f, p, ProductRule::Padded).unwrap();
            let b = commutator_h_spectral(&v, &f, p).unwrap();
            assert!(a.spectrum().max_deviation(b.spectrum()).unwrap() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn operator_wrapper() {
        let op = CommutatorOp::new(field(f64::cos), 1);
        let out = op.apply(&field(f64::cos), ProductRule::Padded).unwrap();
        // u = −sin x, same as the worked example above.
        assert!(max_diff(&out, |_| -0.5) < 1e-15);
    }

    #[test]
    fn identities_on_cosine() {
        let c = field(f64::cos);
        assert!(product_identity_check(&c, &c, ProductRule::TwoThirds).unwrap() < 1e-14);
        assert_eq!(product_identity_check(&PeriodicField::zeros(&grid()), &c, ProductRule::TwoThirds).unwrap(), 0.0);
        assert!(adjoint_check(&c, &field(f64::sin)).unwrap() < 1e-14);
        let s = field(f64::sin);
        // (H cos, sin) = (sin, sin) = π.
        assert!((hilbert(&c).inner_quadrature(&s).unwrap() - std::f64::consts::PI).abs() < 1e-14);
        let h = field(|x| (2.0 * x).cos());
        assert!(commutator_self_adjoint_check(&h, &c, &field(|x| (3.0 * x).sin()), ProductRule::TwoThirds).unwrap() < 1e-14);
    }
}
