//! Frobenius calculus on q-expansions: the Hecke operator `T_p`, the defects
//! `U_p = log(t^p / t(q^p))` and companions, the finite differences `N_l`, and
//! the exponential layers `phi^l/p^l`, `U^l/p^l`.
//!
//! Layer `l` of every graded object is only meaningful modulo `p^{4-l}`; the
//! [`Layer`] type carries that modulus with the series.

use thiserror::Error;

use crate::modular::Dictionary;
use crate::prime::PrimeContext;
use crate::ring::{PadicRing, Valuation};
use crate::series::{Series, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrobeniusError {
    #[error("{what}: invariant fails at q^{exponent}")]
    Invariant { what: &'static str, exponent: i64 },
    #[error("pole order {order} exceeds the cap {cap}")]
    PoleCap { order: usize, cap: usize },
    #[error("layer index {0} outside 0..=3")]
    LayerIndex(u32),
    #[error("triangular conversion fails in row {row} at q^{exponent}")]
    Triangular { row: u32, exponent: i64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `T_p f = Λ_p f + chi3(p) p^4 σ_p f`.
pub fn hecke_t_p<R: PadicRing>(f: &Series<R>, ctx: &PrimeContext) -> Result<Series<R>, SeriesError> {
    let weight_term = f.verschiebung(ctx.p).scale(&f.ring().from_i64(ctx.chi3 * (ctx.p as i64).pow(4)));
    f.cartier(ctx.p).add(&weight_term)
}

/// The Frobenius defects of the parameters `t`, `u`, `g`.
///
/// `u_p`, `v_p`, `w_p` are the truncated log sums and are meaningful modulo
/// `p^{K+guard}`: residue backends carry exactly that many digits, the
/// rational backend holds a representative. `nu_p` and `phi_p` stay in the
/// dictionary ring and are exact.
#[derive(Clone, Debug)]
pub struct FrobeniusDefects<R: PadicRing> {
    pub ctx: PrimeContext,
    pub u_p: Series<R>,
    pub v_p: Series<R>,
    pub w_p: Series<R>,
    pub nu_p: Series<R>,
    pub phi_p: Series<R>,
}

/// `f^p / σ_p f` for a series with unit leading coefficient.
fn frobenius_ratio<R: PadicRing>(f: &Series<R>, p: u64) -> Result<Series<R>, SeriesError> {
    f.pow(p as i64)?.mul(&f.invert()?.verschiebung(p))
}

fn require_divisible<R: PadicRing>(s: &Series<R>, what: &'static str) -> Result<(), FrobeniusError> {
    if s.lowest_exponent() < 1 && !s.is_zero() {
        return Err(FrobeniusError::Invariant { what, exponent: s.lowest_exponent() });
    }
    let p = s.ring().prime();
    for (n, c) in s.terms() {
        if s.ring().valuation(c, p).map_err(SeriesError::from)? == Valuation::Finite(0) {
            return Err(FrobeniusError::Invariant { what, exponent: n });
        }
    }
    Ok(())
}

impl<R: PadicRing> FrobeniusDefects<R> {
    /// Builds the defects from `t`, `u`, `g` and verifies: zero constant terms,
    /// divisibility by `p`, `U = V - 2W mod p^{K+guard}`, and
    /// `nu * exp(U) = 1 mod p^K`.
    pub fn build(dict: &Dictionary<R>, ctx: &PrimeContext) -> Result<Self, FrobeniusError> {
        let p = ctx.p;
        let u_p = frobenius_ratio(dict.t(), p)?.log1p_scaled(ctx)?;
        let v_p = frobenius_ratio(dict.u(), p)?.log1p_scaled(ctx)?;
        let w_p = frobenius_ratio(dict.g(), p)?.log1p_scaled(ctx)?;
        let nu_p = dict.t().verschiebung(p).mul(&dict.t().pow(p as i64)?.invert()?)?;
        let phi_p = nu_p.sub(&Series::one(nu_p.ring().clone(), nu_p.precision()))?;

        for (s, what) in [(&u_p, "U_p"), (&v_p, "V_p"), (&w_p, "W_p"), (&phi_p, "phi_p")] {
            require_divisible(s, what)?;
        }
        let combo = v_p.sub(&w_p.scale_i64(2))?;
        if let Some(exponent) = u_p.first_incongruence(&combo, ctx.modulus_exponent + ctx.guard_digits)? {
            return Err(FrobeniusError::Invariant { what: "U_p = V_p - 2 W_p", exponent });
        }
        let k = ctx.modulus_exponent;
        let e = u_p.exp_to(k)?;
        let prod = nu_p.coarsen(e.ring())?.mul(&e)?;
        let one = Series::one(prod.ring().clone(), prod.precision());
        if let Some(exponent) = prod.first_incongruence(&one, k)? {
            return Err(FrobeniusError::Invariant { what: "nu_p exp(U_p) = 1", exponent });
        }
        Ok(Self { ctx: ctx.clone(), u_p, v_p, w_p, nu_p, phi_p })
    }

    /// Ring of `U_p`: `K + guard` digits in the residue backend.
    pub fn ring(&self) -> &R {
        self.u_p.ring()
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn check_layer(ell: u32) -> Result<(), FrobeniusError> {
    if ell > 3 {
        return Err(FrobeniusError::LayerIndex(ell));
    }
    Ok(())
}

/// `t^j` and `f / t^{jp}` for `j = 0..=ell`.
fn pole_terms<R: PadicRing>(
    f: &Series<R>,
    dict: &Dictionary<R>,
    ctx: &PrimeContext,
    ell: u32,
) -> Result<Vec<(Series<R>, Series<R>)>, FrobeniusError> {
    check_layer(ell)?;
    let order = ell as usize * ctx.p as usize;
    if order > ctx.pole_cap {
        return Err(FrobeniusError::PoleCap { order, cap: ctx.pole_cap });
    }
    let t = dict.t();
    let t_inv_p = t.invert()?.pow(ctx.p as i64)?;
    let mut out = Vec::with_capacity(ell as usize + 1);
    let mut tj = Series::one(t.ring().clone(), t.precision());
    let mut fj = f.clone();
    for j in 0..=ell {
        if j > 0 {
            tj = tj.mul(t)?;
            fj = fj.mul(&t_inv_p)?;
        }
        out.push((tj.clone(), fj.clone()));
    }
    Ok(out)
}

/// `N_l(f) = sum_j (-1)^{l-j} C(l,j) t^j T_p(f / t^{jp})`, asserting that
/// every coefficient is divisible by `p^l`.
pub fn finite_difference_numerator<R: PadicRing>(
    f: &Series<R>,
    dict: &Dictionary<R>,
    ctx: &PrimeContext,
    ell: u32,
) -> Result<Series<R>, FrobeniusError> {
    let mut acc: Option<Series<R>> = None;
    for (j, (tj, fj)) in pole_terms(f, dict, ctx, ell)?.into_iter().enumerate() {
        let sign = if (ell as usize - j).is_multiple_of(2) { 1 } else { -1 };
        let term = tj.mul(&hecke_t_p(&fj, ctx)?)?.scale_i64(sign * binomial(ell, j as u32));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    let n = acc.expect("at least the j = 0 term");
    if let Valuation::Finite(v) = n.p_valuation(ctx.p)? {
        if v < ell {
            let exponent = n
                .terms()
                .find(|(_, c)| n.ring().valuation(c, ctx.p).is_ok_and(|x| x < Valuation::Finite(ell)))
                .map_or(n.lowest_exponent(), |(e, _)| e);
            return Err(FrobeniusError::Invariant { what: "p^l divides N_l", exponent });
        }
    }
    Ok(n)
}

/// `𝒱_l(f) = sum_j (-1)^{l-j} C(l,j) t^j σ_p(f / t^{jp})`, the Verschiebung part
/// of `N_l(f) = Λ_p(f phi^l) + chi3(p) p^4 𝒱_l(f)`.
pub fn verschiebung_remainder<R: PadicRing>(
    f: &Series<R>,
    dict: &Dictionary<R>,
    ctx: &PrimeContext,
    ell: u32,
) -> Result<Series<R>, FrobeniusError> {
    let mut acc: Option<Series<R>> = None;
    for (j, (tj, fj)) in pole_terms(f, dict, ctx, ell)?.into_iter().enumerate() {
        let sign = if (ell as usize - j).is_multiple_of(2) { 1 } else { -1 };
        let term = tj.mul(&fj.verschiebung(ctx.p))?.scale_i64(sign * binomial(ell, j as u32));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("at least the j = 0 term"))
}

/// A graded entry read modulo `p^modulus_exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<R: PadicRing> {
    pub ell: u32,
    pub modulus_exponent: u32,
    pub series: Series<R>,
}

impl<R: PadicRing> Layer<R> {
    /// Canonical image modulo `p^modulus_exponent` (identity for exact rings).
    pub fn reduced(&self) -> Result<Series<R>, SeriesError> {
        self.series.coarsen(&self.series.ring().with_exponent(self.modulus_exponent)?)
    }
}

/// `𝔈_l(f) = N_l(f) / p^l`, read modulo `p^{4-l}`.
pub fn frak_e<R: PadicRing>(
    f: &Series<R>,
    dict: &Dictionary<R>,
    ctx: &PrimeContext,
    ell: u32,
) -> Result<Layer<R>, FrobeniusError> {
    let n = finite_difference_numerator(f, dict, ctx, ell)?;
    Ok(Layer { ell, modulus_exponent: ctx.modulus_exponent - ell, series: n.divide_by_p_power(ell)? })
}

/// Entries `l = 1, 2, 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerVector<R: PadicRing> {
    pub layers: Vec<Layer<R>>,
}

impl<R: PadicRing> LayerVector<R> {
    pub fn get(&self, ell: u32) -> &Layer<R> {
        &self.layers[ell as usize - 1]
    }
}

fn power_layers<R: PadicRing>(x: &Series<R>, k: u32) -> Result<LayerVector<R>, SeriesError> {
    let mut layers = Vec::with_capacity(3);
    let mut pow = x.clone();
    for ell in 1..=3 {
        if ell > 1 {
            pow = pow.mul(x)?;
        }
        layers.push(Layer { ell, modulus_exponent: k - ell, series: pow.divide_by_p_power(ell)? });
    }
    Ok(LayerVector { layers })
}

/// `(phi^l / p^l, U^l / p^l)` for `l = 1, 2, 3`, after verifying the
/// triangular relation between them.
pub fn layer_vectors<R: PadicRing>(defects: &FrobeniusDefects<R>) -> Result<(LayerVector<R>, LayerVector<R>), FrobeniusError> {
    let k = defects.ctx.modulus_exponent;
    let phi = power_layers(&defects.phi_p, k)?;
    let u = power_layers(&defects.u_p, k)?;
    if let Some((row, exponent)) = triangular_mismatch(&phi, &u, defects.ctx.p)? {
        return Err(FrobeniusError::Triangular { row, exponent });
    }
    Ok((phi, u))
}

/// Checks `Φ ≡ M 𝒰` with `M = [[-1, p/2, -p^2/6], [0, 1, -p], [0, 0, -1]]`,
/// row `l` modulo `p^{4-l}`; returns the first failing row and exponent.
pub fn triangular_mismatch<R: PadicRing>(
    phi: &LayerVector<R>,
    u: &LayerVector<R>,
    p: u64,
) -> Result<Option<(u32, i64)>, SeriesError> {
    for row in 1..=3u32 {
        let k = phi.get(row).modulus_exponent;
        let ring = phi.get(row).series.ring().with_exponent(k)?;
        let layer = |ell: u32| u.get(ell).series.coarsen(&ring);
        let pe = ring.from_i64(p as i64);
        let half = ring.inv(&ring.from_i64(2)).expect("2 is a unit");
        let sixth = ring.inv(&ring.from_i64(6)).expect("6 is a unit");
        let rhs = match row {
            1 => layer(1)?
                .neg()
                .add(&layer(2)?.scale(&ring.mul(&pe, &half)))?
                .sub(&layer(3)?.scale(&ring.mul(&ring.mul(&pe, &pe), &sixth)))?,
            2 => layer(2)?.sub(&layer(3)?.scale(&pe))?,
            _ => layer(3)?.neg(),
        };
        let lhs = phi.get(row).series.coarsen(&ring)?;
        if let Some(exponent) = lhs.first_incongruence(&rhs, k)? {
            return Ok(Some((row, exponent)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::build_dictionary;
    use crate::ring::Residues;

    fn residue_setup(p: u64, precision: i64) -> (PrimeContext, Dictionary<Residues>) {
        let ctx = PrimeContext::new(p).unwrap();
        let ring = Residues::new(p, ctx.working_digits()).unwrap();
        (ctx, build_dictionary(precision, ring).unwrap())
    }

    #[test]
    fn hecke_on_monomial() {
        let ctx = PrimeContext::new(7).unwrap();
        let r = Residues::new(7, 6).unwrap();
        let q = Series::monomial(r, 1, 1, 20);
        let tq = hecke_t_p(&q, &ctx).unwrap();
        // Λ_7 q = 0 through q^2; the σ_7 part is 7^4 q^7 but is cut by Λ's precision
        assert!(tq.is_zero());
        assert_eq!(tq.precision(), 3);
        let q7 = Series::monomial(r, 7, 1, 20);
        assert_eq!(hecke_t_p(&q7, &ctx).unwrap().coeff(1), Some(1));
        let inert = PrimeContext::new(5).unwrap();
        let r5 = Residues::new(5, 6).unwrap();
        let one = Series::one(r5, 12);
        assert_eq!(hecke_t_p(&one, &inert).unwrap().coeff(0), Some(r5.modulus() - 624));
    }

    #[test]
    fn defects_at_seven() {
        let (ctx, dict) = residue_setup(7, 120);
        let d = FrobeniusDefects::build(&dict, &ctx).unwrap();
        assert_eq!(d.u_p.ring().digits(), 6);
        assert!(d.u_p.lowest_exponent() >= 1);
        let (phi, u) = layer_vectors(&d).unwrap();
        assert_eq!(phi.get(3).modulus_exponent, 1);
        assert_eq!(u.get(1).modulus_exponent, 3);
    }

    #[test]
    fn numerator_zero_layer_is_hecke() {
        let (ctx, dict) = residue_setup(7, 120);
        let n0 = finite_difference_numerator(dict.c0(), &dict, &ctx, 0).unwrap();
        assert_eq!(n0, hecke_t_p(dict.c0(), &ctx).unwrap());
        assert!(finite_difference_numerator(dict.c0(), &dict, &ctx, 4).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!((0..=3).map(|k| binomial(3, k)).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
    }
}
